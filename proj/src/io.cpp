#include "framelab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "framelab/errors.hpp"

namespace framelab::io {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("io: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InputError("io: " + path + " is not valid JSON: " + e.what());
  }
}

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    if (b == std::string::npos) return false;
    double v = 0.0;
    const char* first = cell.data() + b;
    const char* last = cell.data() + e + 1;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) return false;
    out.push_back(v);
  }
  return !out.empty();
}

// Reads numeric rows; a non-numeric first row is a header.
std::vector<std::vector<double>> read_rows(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<std::vector<double>> rows;
  std::vector<double> row;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!parse_row(line, row)) {
      if (rows.empty() && lineno == 1) continue;
      throw InputError("io: " + path + ":" + std::to_string(lineno) + ": expected comma-separated numbers");
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw InputError("io: " + path + " holds no data rows");
  return rows;
}

std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

Box padded_box(std::size_t dim, const std::vector<double>& coords) {
  const std::size_t n = coords.size() / dim;
  double pad = 0.5;
  if (n > 1) {
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        double d = 0.0;
        for (std::size_t c = 0; c < dim; ++c) d += std::pow(coords[a * dim + c] - coords[b * dim + c], 2);
        sep = std::min(sep, std::sqrt(d));
      }
    }
    if (sep > 0.0) pad = 0.5 * sep;
  }
  Box box;
  for (std::size_t c = 0; c < dim; ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t k = 0; k < n; ++k) {
      lo = std::min(lo, coords[k * dim + c]);
      hi = std::max(hi, coords[k * dim + c]);
    }
    box.sides.emplace_back(lo - pad, hi + pad);
  }
  return box;
}

PointSet read_points_csv(const std::string& path, const std::optional<Box>& box) {
  const auto rows = read_rows(path);
  const std::size_t dim = rows.front().size();
  std::vector<double> coords;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].size() != dim) throw InputError("io: " + path + ": rows have different dimensions");
    coords.insert(coords.end(), rows[k].begin(), rows[k].end());
  }
  Box b = box ? *box : padded_box(dim, coords);
  return PointSet(dim, std::move(coords), std::move(b));
}

PointSet read_points_json(const std::string& path) {
  const json j = read_json(path);
  if (!j.is_object() || !j.contains("points") || !j["points"].is_array() || j["points"].empty()) {
    throw InputError("io: " + path + ": expected an object with a non-empty \"points\" list");
  }
  std::vector<double> coords;
  std::size_t dim = j.value("dim", std::size_t{0});
  try {
    for (const auto& p : j["points"]) {
      if (p.is_number()) {
        if (dim == 0) dim = 1;
        if (dim != 1) throw InputError("io: " + path + ": scalar point in a multi-dimensional set");
        coords.push_back(p.get<double>());
      } else {
        if (dim == 0) dim = p.size();
        if (!p.is_array() || p.size() != dim) throw InputError("io: " + path + ": point of wrong dimension");
        for (const auto& c : p) coords.push_back(c.get<double>());
      }
    }
    if (j.contains("box")) {
      Box b;
      for (const auto& s : j["box"]) b.sides.emplace_back(s.at(0).get<double>(), s.at(1).get<double>());
      return PointSet(dim, std::move(coords), std::move(b));
    }
  } catch (const json::exception& e) {
    throw InputError("io: " + path + ": " + e.what());
  }
  Box b = padded_box(dim, coords);
  return PointSet(dim, std::move(coords), std::move(b));
}

PointSet read_points(const std::string& path, const std::optional<Box>& box) {
  if (std::filesystem::path(path).extension() == ".json") {
    PointSet ps = read_points_json(path);
    return box ? PointSet(ps.dim(), ps.coords(), *box) : ps;
  }
  return read_points_csv(path, box);
}

void write_points_csv(const std::string& path, const PointSet& ps) {
  std::string s;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const auto p = ps.point(k);
    for (std::size_t c = 0; c < p.size(); ++c) s += (c ? "," : "") + fmt(p[c]);
    s += "\n";
  }
  atomic_write(path, s);
}

Domain read_domain_json(const std::string& path) {
  const json j = read_json(path);
  if (!j.is_object() || !j.contains("intervals") || !j["intervals"].is_array()) {
    throw InputError("io: " + path + ": expected {\"intervals\": [[a, b], ...]}");
  }
  std::vector<Interval> ivs;
  try {
    for (const auto& iv : j["intervals"]) ivs.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
  } catch (const json::exception& e) {
    throw InputError("io: " + path + ": " + e.what());
  }
  return Domain(std::move(ivs));
}

Generator read_generator_csv(const std::string& path, const GridPtr& grid, const std::string& label) {
  const auto rows = read_rows(path);
  if (rows.size() != grid->size()) {
    throw InputError("io: " + path + " has " + std::to_string(rows.size()) + " rows but the grid has " +
                     std::to_string(grid->size()) + " nodes");
  }
  std::vector<cplx> v(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 3) throw InputError("io: " + path + ": expected omega,re,im on row " + std::to_string(i + 1));
    const double node = grid->nodes()[i];
    if (std::abs(r[0] - node) > 1e-9 * std::max(1.0, std::abs(node))) {
      throw InputError("io: " + path + ": frequency " + fmt(r[0]) + " on row " + std::to_string(i + 1) +
                       " does not match grid node " + fmt(node));
    }
    v[i] = cplx(r[1], r[2]);
  }
  return Generator{SampledFunction(grid, std::move(v)), label};
}

std::string generator_csv(const Generator& gen) {
  std::string s = "omega,re,im\n";
  const auto& g = *gen.hat_h.grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    s += fmt(g.nodes()[i]) + "," + fmt(gen.hat_h.values[i].real()) + "," + fmt(gen.hat_h.values[i].imag()) + "\n";
  }
  return s;
}

json to_json(const Domain& d) {
  json a = json::array();
  for (const auto& iv : d.intervals()) a.push_back({iv.lo, iv.hi});
  return {{"intervals", a}, {"measure", d.measure()}};
}

json to_json(const Grid& g) {
  std::vector<std::size_t> counts(g.domain().intervals().size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) ++counts[g.interval_of(i)];
  return {{"domain", to_json(g.domain())}, {"nodes", g.size()}, {"cells_per_interval", counts}, {"max_step", g.max_step()}};
}

json to_json(const DensityReport& r) {
  json j = {{"r_values", r.r_values}, {"nu_minus", r.nu_minus}, {"nu_plus", r.nu_plus},
            {"d_minus", r.d_minus},   {"d_plus", r.d_plus},     {"resolution", r.resolution}};
  if (r.extrapolated) {
    j["extrapolated"] = {{"r", r.extrapolated->r}, {"d_minus", r.extrapolated->d_minus}, {"d_plus", r.extrapolated->d_plus}};
  } else {
    j["extrapolated"] = nullptr;
  }
  return j;
}

std::string density_csv(const DensityReport& r) {
  std::string s = "r,nu_minus,nu_plus,d_minus,d_plus\n";
  for (std::size_t k = 0; k < r.r_values.size(); ++k) {
    s += fmt(r.r_values[k]) + "," + std::to_string(r.nu_minus[k]) + "," + std::to_string(r.nu_plus[k]) + "," +
         fmt(r.d_minus[k]) + "," + fmt(r.d_plus[k]) + "\n";
  }
  return s;
}

json to_json(const FrameReport& r, bool with_spectrum) {
  json j = {{"lower", r.lower},
            {"upper", r.upper},
            {"min_eigenvalue", r.min_eigenvalue},
            {"gram_lower", r.gram_lower},
            {"gram_upper", r.gram_upper},
            {"rank", r.rank},
            {"dim_space", r.dim_space},
            {"members", r.members},
            {"rank_tol", r.rank_tol},
            {"flags",
             {{"bessel", r.flags.bessel},
              {"frame_for_whole_space", r.flags.frame_for_whole_space},
              {"frame_sequence", r.flags.frame_sequence},
              {"riesz_sequence", r.flags.riesz_sequence},
              {"tight", r.flags.tight}}},
            {"resolution",
             {{"nodes", r.resolution.nodes}, {"max_step", r.resolution.max_step}, {"measure", r.resolution.measure}}},
            {"cross_check", opt(r.cross_check)}};
  if (with_spectrum) j["spectrum"] = r.spectrum;
  return j;
}

std::string spectrum_csv(const FrameReport& r) {
  std::string s = "index,eigenvalue\n";
  for (std::size_t k = 0; k < r.spectrum.size(); ++k) s += std::to_string(k) + "," + fmt(r.spectrum[k]) + "\n";
  return s;
}

json to_json(const MultiplierProfile& p) {
  return {{"ess_inf", p.ess_inf},
          {"ess_sup", p.ess_sup},
          {"ess_inf_on_support", p.ess_inf_on_support},
          {"zero_measure_fraction", p.zero_measure_fraction},
          {"support", p.support_domain ? to_json(*p.support_domain) : json(nullptr)},
          {"support_nodes", p.support_nodes.size()},
          {"zero_tol", p.zero_tol}};
}

json to_json(const PropertyFlags& f) {
  return {{"frame", f.frame},   {"tight", f.tight},   {"riesz", f.riesz}, {"bessel", f.bessel},
          {"frame_sequence", f.frame_sequence}, {"complete", f.complete}};
}

json to_json(const MultCheckReport& r) {
  json j = {{"kind", to_string(r.kind)},
            {"profile", to_json(r.profile)},
            {"base", to_json(r.base_report)},
            {"multiplied", to_json(r.mult_report)},
            {"predicted", to_json(r.predicted)},
            {"measured", to_json(r.measured)},
            {"compared", r.compared},
            {"within_envelope", r.within_envelope},
            {"span_matches", opt(r.span_matches)},
            {"extended_agrees", opt(r.extended_agrees)},
            {"consistent", r.consistent},
            {"notes", r.notes}};
  j["envelope"] = r.envelope ? json{{"lo", r.envelope->lo}, {"hi", r.envelope->hi}} : json(nullptr);
  return j;
}

json to_json(const MultSweepReport& r) {
  json levels = json::array();
  for (const auto& l : r.levels) levels.push_back(to_json(l));
  return {{"kind", to_string(r.kind)},
          {"refinements", r.refinements},
          {"multiplier_stat", r.multiplier_stat},
          {"measured_stat", r.measured_stat},
          {"multiplier_trend", to_string(r.multiplier_trend)},
          {"measured_trend", to_string(r.measured_trend)},
          {"predicted", r.predicted},
          {"measured", r.measured},
          {"consistent", r.consistent},
          {"levels", levels}};
}

std::string sweep_csv(const MultSweepReport& r) {
  std::string s = "n_per_unit,multiplier_stat,measured_stat\n";
  for (std::size_t k = 0; k < r.refinements.size(); ++k) {
    s += std::to_string(r.refinements[k]) + "," + fmt(r.multiplier_stat[k]) + "," + fmt(r.measured_stat[k]) + "\n";
  }
  return s;
}

json to_json(const ObstructionReport& r) {
  return {{"refinements", r.refinements},
          {"lower", r.lower},
          {"upper", r.upper},
          {"min_hat_sq", r.min_hat_sq},
          {"ratios", r.ratios},
          {"trend", to_string(r.trend)},
          {"strictly_decreasing", r.strictly_decreasing},
          {"max_ratio", r.max_ratio},
          {"obstruction_shown", r.obstruction_shown}};
}

json to_json(const ExpansionResult& r, bool with_coeffs) {
  json j = {{"residual", r.residual},
            {"vanishing", r.vanishing},
            {"coeff_norm_sq", r.coeff_norm_sq},
            {"coeff_bound", r.coeff_bound},
            {"permutation_change", r.permutation_change},
            {"iterations", r.iterations},
            {"warnings", r.warnings}};
  if (with_coeffs) {
    json c = json::array();
    for (std::size_t k = 0; k < r.coeffs.size(); ++k) {
      c.push_back({{"lambda", r.lambdas[k]}, {"re", r.coeffs[k].real()}, {"im", r.coeffs[k].imag()}});
    }
    j["coefficients"] = c;
  }
  return j;
}

std::string coeffs_csv(const ExpansionResult& r) {
  std::string s = "lambda,re,im\n";
  for (std::size_t k = 0; k < r.coeffs.size(); ++k) {
    s += fmt(r.lambdas[k]) + "," + fmt(r.coeffs[k].real()) + "," + fmt(r.coeffs[k].imag()) + "\n";
  }
  return s;
}

json to_json(const OuterFrameReport& r) {
  return {{"projected", to_json(r.projected)},   {"reference", to_json(r.reference)},
          {"unprojected", to_json(r.unprojected)}, {"max_deviation", r.max_deviation},
          {"lower_diff", r.lower_diff},           {"upper_diff", r.upper_diff},
          {"bounds_match", r.bounds_match}};
}

json to_json(const ConvolutionReport& r) {
  return {{"mode", to_string(r.mode)},
          {"product", to_json(r.product)},
          {"f_system", to_json(r.f_report)},
          {"g_system", to_json(r.g_report)},
          {"envelope", {{"lo", r.envelope.lo}, {"hi", r.envelope.hi}}},
          {"observed", {{"lo", r.observed_lo}, {"hi", r.observed_hi}}},
          {"within_envelope", r.within_envelope},
          {"consistent", r.consistent},
          {"notes", r.notes}};
}

json to_json(const UnionReport& r) {
  return {{"report", to_json(r.report)},
          {"m_parts", r.m_parts},
          {"M_parts", r.big_m_parts},
          {"m", r.m},
          {"M", r.big_m},
          {"p_hat", r.p_hat},
          {"P_hat", r.big_p_hat},
          {"predicted_frame", r.predicted_frame},
          {"measured_frame", r.measured_frame},
          {"envelope", {{"lo", r.envelope.lo}, {"hi", r.envelope.hi}}},
          {"within_envelope", r.within_envelope},
          {"consistent", r.consistent}};
}

json to_json(const UnionSweepReport& r) {
  json levels = json::array();
  for (const auto& l : r.levels) levels.push_back(to_json(l));
  return {{"refinements", r.refinements},
          {"p_hat", r.p_hat},
          {"lower", r.lower},
          {"p_trend", to_string(r.p_trend)},
          {"lower_trend", to_string(r.lower_trend)},
          {"levels", levels}};
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("io: cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InputError("io: write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InputError("io: cannot rename onto " + path);
  }
}

}  // namespace framelab::io
