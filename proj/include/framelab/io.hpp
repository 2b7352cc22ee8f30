#pragma once

// File formats: point sets (CSV, JSON), domains (JSON), generators (CSV
// rows "omega,re,im"), and JSON/CSV views of reports.

#include <optional>
#include <string>

#include <json.hpp>

#include "framelab/domain.hpp"
#include "framelab/framecore.hpp"
#include "framelab/multiplication.hpp"
#include "framelab/pointset.hpp"
#include "framelab/translates.hpp"

namespace framelab::io {

/// One point per line, coordinates separated by commas. A first line that
/// does not parse as numbers is taken as a header. Without `box` the box is
/// the bounding box padded by half the separation on each side.
PointSet read_points_csv(const std::string& path, const std::optional<Box>& box = std::nullopt);
/// {"dim": d, "points": [...], "box": [[lo, hi], ...]}; "points" holds
/// numbers (d = 1) or coordinate lists.
PointSet read_points_json(const std::string& path);
/// Dispatches on the extension (.json, otherwise CSV).
PointSet read_points(const std::string& path, const std::optional<Box>& box = std::nullopt);
Box padded_box(std::size_t dim, const std::vector<double>& coords);

void write_points_csv(const std::string& path, const PointSet& ps);

/// {"intervals": [[a, b], ...]}
Domain read_domain_json(const std::string& path);

/// Rows "omega,re,im" matching the grid nodes in order (to 1e-9 relative).
Generator read_generator_csv(const std::string& path, const GridPtr& grid, const std::string& label = "csv");
std::string generator_csv(const Generator& gen);

nlohmann::json to_json(const Domain& d);
nlohmann::json to_json(const Grid& g);
nlohmann::json to_json(const DensityReport& r);
std::string density_csv(const DensityReport& r);
nlohmann::json to_json(const FrameReport& r, bool with_spectrum = false);
std::string spectrum_csv(const FrameReport& r);
nlohmann::json to_json(const MultiplierProfile& p);
nlohmann::json to_json(const PropertyFlags& f);
nlohmann::json to_json(const MultCheckReport& r);
nlohmann::json to_json(const MultSweepReport& r);
std::string sweep_csv(const MultSweepReport& r);
nlohmann::json to_json(const ObstructionReport& r);
nlohmann::json to_json(const ExpansionResult& r, bool with_coeffs);
std::string coeffs_csv(const ExpansionResult& r);
nlohmann::json to_json(const OuterFrameReport& r);
nlohmann::json to_json(const ConvolutionReport& r);
nlohmann::json to_json(const UnionReport& r);
nlohmann::json to_json(const UnionSweepReport& r);

/// Writes through a temporary file in the same directory and renames it.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace framelab::io
