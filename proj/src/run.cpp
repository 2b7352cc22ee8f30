#include "framelab/run.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "framelab/expr.hpp"
#include "framelab/io.hpp"
#include "framelab/multiplication.hpp"
#include "framelab/pointset.hpp"
#include "framelab/translates.hpp"

namespace framelab {

using nlohmann::json;

namespace {

void allow_params(const RunConfig& c, std::initializer_list<const char*> keys) {
  const std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : c.params.items()) {
    if (!ok.count(k)) throw ConfigError("params." + k, "unknown key for " + std::string(to_string(c.command)));
  }
}

double param_number(const RunConfig& c, const char* key, double def) {
  if (!c.params.contains(key)) return def;
  if (!c.params[key].is_number()) throw ConfigError(std::string("params.") + key, "expected a number");
  return c.params[key].get<double>();
}

double param_positive(const RunConfig& c, const char* key, double def) {
  const double v = param_number(c, key, def);
  if (!(v > 0.0)) throw ConfigError(std::string("params.") + key, "must be positive");
  return v;
}

std::size_t param_count(const RunConfig& c, const char* key, std::size_t def) {
  if (!c.params.contains(key)) return def;
  if (!c.params[key].is_number_integer() || c.params[key].get<long long>() < 0) throw ConfigError(std::string("params.") + key, "expected a non-negative integer");
  return c.params[key].get<std::size_t>();
}

std::string param_string(const RunConfig& c, const char* key, const std::string& def) {
  if (!c.params.contains(key)) return def;
  if (!c.params[key].is_string()) throw ConfigError(std::string("params.") + key, "expected a string");
  return c.params[key].get<std::string>();
}

Domain require_domain(const RunConfig& c) {
  if (c.domain.empty()) throw ConfigError("domain", "required for " + std::string(to_string(c.command)));
  return Domain(c.domain);
}

bool has_points(const RunConfig& c) { return c.points.kind != PointsConfig::Kind::None; }

PointSet build_points(const RunConfig& c) {
  const auto& p = c.points;
  std::optional<Box> box;
  if (!p.box.empty()) box = Box{p.box};
  switch (p.kind) {
    case PointsConfig::Kind::None:
      throw ConfigError("points", "required for " + std::string(to_string(c.command)));
    case PointsConfig::Kind::Path: return io::read_points(p.path, box);
    case PointsConfig::Kind::Inline: {
      Box b = box ? *box : io::padded_box(p.dim, p.coords);
      return PointSet(p.dim, p.coords, std::move(b));
    }
    case PointsConfig::Kind::Lattice: {
      PointSet ps = uniform_lattice(p.start, p.count, p.step);
      return box ? PointSet(1, ps.coords(), *box) : ps;
    }
    case PointsConfig::Kind::Jittered: {
      PointSet ps = jittered_lattice(p.start, p.count, p.step, p.amplitude, c.seed);
      return box ? PointSet(1, ps.coords(), *box) : ps;
    }
  }
  throw ConfigError("points", "unsupported");
}

Generator build_generator(const GeneratorConfig& g, const GridPtr& grid, const std::string& where) {
  if (!g.present()) throw ConfigError(where, "required");
  if (!g.csv.empty()) return io::read_generator_csv(g.csv, grid);
  return Generator{expr::evaluate_on(expr::parse(g.expr), grid), g.expr};
}

ScalarFn expression_fn(const std::string& src) {
  auto node = std::make_shared<expr::Node>(expr::parse(src));
  return [node](double t) { return expr::evaluate(*node, t); };
}

std::vector<int> refinements_or(const RunConfig& c, std::vector<int> def) { return c.refine.empty() ? def : c.refine; }

MultCheckOptions mult_options(const RunConfig& c) {
  MultCheckOptions o;
  o.rank_tol = c.rank_tol;
  return o;
}

CheckKind check_kind(const std::string& s) {
  for (auto k : {CheckKind::Frame, CheckKind::Tight, CheckKind::Riesz, CheckKind::Bessel, CheckKind::Converse,
                 CheckKind::FrameSequence}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("params.check", "unknown check '" + s + "'");
}

std::string yes_no(bool b, const char* what) { return (b ? std::string("") : std::string("not ")) + what; }

// --- commands ----------------------------------------------------------------

RunResult cmd_density(const RunConfig& c) {
  allow_params(c, {"r_values"});
  const PointSet ps = build_points(c);
  std::vector<double> rs;
  if (c.params.contains("r_values")) {
    const auto& a = c.params["r_values"];
    if (!a.is_array() || a.empty()) throw ConfigError("params.r_values", "expected a non-empty list");
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!a[k].is_number() || !(a[k].get<double>() > 0.0)) {
        throw ConfigError("params.r_values[" + std::to_string(k) + "]", "must be a positive number");
      }
      rs.push_back(a[k].get<double>());
    }
  } else {
    const double half = 0.5 * ps.box().shortest_side();
    rs = {half / 8.0, half / 4.0, half / 2.0, half};
  }
  const DensityReport d = beurling_density(ps, rs);
  RunResult r;
  r.report["result"] = {{"density", io::to_json(d)}, {"points", ps.size()}, {"dim", ps.dim()},
                        {"separation", ps.size() > 1 ? json(separation(ps)) : json(nullptr)}};
  r.consistent = true;
  r.verdict = "density computed";
  r.csv = io::density_csv(d);
  return r;
}

RunResult cmd_gap(const RunConfig& c) {
  allow_params(c, {"r_ball"});
  const PointSet ps = build_points(c);
  const GapResult g = gap(ps);
  RunResult r;
  r.report["result"] = {{"gap", g.value}, {"resolution", g.resolution}, {"points", ps.size()}, {"dim", ps.dim()},
                        {"separation", ps.size() > 1 ? json(separation(ps)) : json(nullptr)}};
  if (c.params.contains("r_ball")) {
    const auto pred = beurling_ball_frame_predicate(ps, param_positive(c, "r_ball", 1.0));
    r.report["result"]["ball_predicate"] = {{"predicted_frame", pred.predicted_frame}, {"product", pred.product}};
  }
  r.consistent = true;
  r.verdict = "gap " + std::to_string(g.value);
  r.csv = "gap,resolution\n" + std::to_string(g.value) + "," + std::to_string(g.resolution) + "\n";
  return r;
}

RunResult cmd_frame_bounds(const RunConfig& c) {
  allow_params(c, {"predicate_a", "predicate_r"});
  const Domain dom = require_domain(c);
  const PointSet ps = build_points(c);
  const GridPtr grid = make_grid(dom, c.n_per_unit);
  SynthesisSystem sys = exponential_system(grid, ps);
  if (!c.multiplier.empty()) sys = multiply_system(sys, expr::evaluate_on(expr::parse(c.multiplier), grid));
  MeasureOptions mo;
  mo.rank_tol = c.rank_tol;
  const FrameReport fr = measure_bounds(sys, mo);
  RunResult r;
  r.report["grid"] = io::to_json(*grid);
  r.report["result"] = {{"frame", io::to_json(fr, true)}};
  r.consistent = true;
  if (c.params.contains("predicate_a")) {
    const double a = param_positive(c, "predicate_a", 1.0);
    const double rr = param_positive(c, "predicate_r", 0.5 * ps.box().shortest_side());
    const auto pred = beurling_1d_frame_predicate(ps, a, rr);
    // The predicate is sufficient only: a predicted frame must be measured.
    r.consistent = !pred.predicted_frame || fr.flags.frame_for_whole_space;
    r.report["result"]["predicate"] = {{"a", a}, {"r", rr}, {"predicted_frame", pred.predicted_frame},
                                       {"d_minus", pred.d_minus}, {"margin", pred.margin}};
  }
  r.verdict = yes_no(fr.flags.frame_for_whole_space, "frame") + ", bounds [" + std::to_string(fr.lower) + ", " +
              std::to_string(fr.upper) + "]";
  r.csv = io::spectrum_csv(fr);
  return r;
}

RunResult cmd_mult_check(const RunConfig& c) {
  allow_params(c, {"check"});
  const Domain dom = require_domain(c);
  if (c.multiplier.empty()) throw ConfigError("multiplier", "required for mult-check");
  const CheckKind kind = check_kind(param_string(c, "check", "frame"));
  const auto opts = mult_options(c);
  const ScalarFn phi = expression_fn(c.multiplier);
  BaseFactory base = dft_base;
  if (has_points(c)) {
    const PointSet ps = build_points(c);
    base = [ps](const GridPtr& g) { return exponential_system(g, ps); };
  }
  RunResult r;
  if (!c.refine.empty()) {
    const auto sweep = sweep_multiplication(kind, dom, phi, c.refine, base, opts);
    r.report["result"] = {{"sweep", io::to_json(sweep)}};
    r.consistent = sweep.consistent;
    r.verdict = yes_no(sweep.measured, to_string(kind)) + ", " + to_string(sweep.measured_trend);
    r.csv = io::sweep_csv(sweep);
    return r;
  }
  const GridPtr grid = make_grid(dom, c.n_per_unit);
  const auto rep = run_check(kind, base(grid), sample(grid, phi), opts);
  r.report["grid"] = io::to_json(*grid);
  r.report["result"] = {{"check", io::to_json(rep)}};
  r.consistent = rep.consistent;
  r.verdict = std::string(to_string(kind)) + " check " + (rep.consistent ? "consistent" : "inconsistent");
  r.csv = io::spectrum_csv(rep.mult_report);
  return r;
}

RunResult cmd_translate_check(const RunConfig& c) {
  allow_params(c, {"convolution"});
  const Domain dom = require_domain(c);
  const PointSet ps = build_points(c);
  const GridPtr grid = make_grid(dom, c.n_per_unit);
  const Generator gen = build_generator(c.generator, grid, "generator");
  const auto opts = mult_options(c);
  const auto rep = classify_translates(gen, ps, grid, opts);
  RunResult r;
  r.report["grid"] = io::to_json(*grid);
  r.report["result"] = {{"translates", io::to_json(rep)},
                        {"bounds", {rep.mult_report.lower, rep.mult_report.upper}},
                        {"frame_for_PE", rep.measured.frame},
                        {"frame_sequence", rep.measured.frame_sequence}};
  r.consistent = rep.consistent;
  r.verdict = rep.measured.frame ? "frame" : (rep.measured.frame_sequence ? "frame sequence" : "not a frame sequence");
  if (c.params.contains("convolution")) {
    const auto& cv = c.params["convolution"];
    if (!cv.is_object()) throw ConfigError("params.convolution", "expected an object");
    for (const auto& [k, v] : cv.items()) {
      if (k != "generator" && k != "mode") throw ConfigError("params.convolution." + k, "unknown key");
    }
    if (!cv.contains("generator") || !cv["generator"].is_string()) {
      throw ConfigError("params.convolution.generator", "expected an expression string");
    }
    GeneratorConfig second;
    second.expr = cv["generator"].get<std::string>();
    const Generator g2 = build_generator(second, grid, "params.convolution.generator");
    const auto mode = convolution_mode_from_string(cv.value("mode", std::string("frame")));
    const auto conv = convolution_closure_check(gen, g2, ps, grid, mode, opts);
    r.report["result"]["convolution"] = io::to_json(conv);
    r.consistent = r.consistent && conv.consistent;
  }
  r.csv = io::spectrum_csv(rep.mult_report);
  return r;
}

RunResult cmd_build_generator(const RunConfig& c) {
  allow_params(c, {"decay_points"});
  if (!c.bump) throw ConfigError("bump", "required for build-generator");
  const BumpSpec spec{Domain(c.bump->intervals), c.bump->delta};
  const Domain dil = dilate(spec.base_domain, spec.delta);
  const GridPtr grid = make_grid(dil, c.n_per_unit);
  const Generator gen = build_bump_generator(spec, grid);
  std::vector<double> xs = {5.0, 10.0, 20.0};
  if (c.params.contains("decay_points")) {
    xs.clear();
    for (const auto& v : c.params["decay_points"]) {
      if (!v.is_number()) throw ConfigError("params.decay_points", "expected numbers");
      xs.push_back(v.get<double>());
    }
  }
  const double cst = bump_decay_constant(gen);
  json decay = json::array();
  bool decay_ok = true;
  for (double x : xs) {
    const double v = (1.0 + x * x) * std::abs(gen.time_eval(x));
    decay_ok = decay_ok && v <= cst;
    decay.push_back({{"x", x}, {"weighted_abs", v}});
  }
  double lo = 1.0;
  double hi = 0.0;
  for (const auto& v : gen.hat_h.values) {
    lo = std::min(lo, v.real());
    hi = std::max(hi, v.real());
  }
  RunResult r;
  r.report["grid"] = io::to_json(*grid);
  r.report["result"] = {{"dilated_domain", io::to_json(dil)}, {"min", lo}, {"max", hi}, {"norm_sq", gen.norm_sq()},
                        {"decay_constant", cst}, {"decay", decay}, {"decay_ok", decay_ok}};
  r.consistent = decay_ok && lo >= 0.0 && hi <= 1.0;
  r.verdict = r.consistent ? "bump generator built" : "bump generator violates its bounds";
  r.csv = io::generator_csv(gen);
  return r;
}

RunResult cmd_reconstruct(const RunConfig& c) {
  allow_params(c, {"target_gap", "sep_min", "samples", "terms", "f"});
  if (!c.bump) throw ConfigError("bump", "required for reconstruct");
  const BumpSpec spec{Domain(c.bump->intervals), c.bump->delta};
  const Domain& e = spec.base_domain;
  const GridPtr grid = make_grid(dilate(e, spec.delta), c.n_per_unit);
  const Generator g = build_bump_generator(spec, grid);
  const PointSet ps = build_points(c);
  const PointSet ps_prime = densify(ps, param_positive(c, "target_gap", 0.2), param_positive(c, "sep_min", 0.1));
  ExpansionOptions eo;
  eo.recon.tol = c.recon_tol;
  eo.recon.max_iter = c.max_iter;
  eo.rank_tol = c.rank_tol;
  eo.seed = c.seed;
  const OversampledExpander ex(e, g, ps_prime, eo);

  std::vector<SampledFunction> fs;
  if (c.params.contains("f")) {
    if (!c.params["f"].is_string()) throw ConfigError("params.f", "expected an expression string");
    const auto node = expr::parse(c.params["f"].get<std::string>());
    fs.push_back(sample(grid, [&](double w) { return e.contains(w) ? expr::evaluate(node, w) : cplx(0.0); }));
  } else {
    const std::size_t samples = param_count(c, "samples", 10);
    const auto terms = static_cast<int>(param_count(c, "terms", 8));
    const double lo = e.intervals().front().lo;
    const double len = e.intervals().back().hi - lo;
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> nd;
    for (std::size_t s = 0; s < samples; ++s) {
      std::vector<cplx> coef;
      for (int j = -terms; j <= terms; ++j) coef.emplace_back(nd(rng), nd(rng));
      fs.push_back(sample(grid, [&](double w) {
        if (!e.contains(w)) return cplx(0.0);
        cplx acc = 0.0;
        for (int j = -terms; j <= terms; ++j) {
          acc += coef[static_cast<std::size_t>(j + terms)] * std::polar(1.0, 2.0 * std::numbers::pi * j * (w - lo) / len);
        }
        return acc;
      }));
    }
  }
  json samples = json::array();
  double worst_res = 0.0;
  double worst_van = 0.0;
  double worst_perm = 0.0;
  bool coeff_ok = true;
  std::string csv;
  for (std::size_t s = 0; s < fs.size(); ++s) {
    const auto res = ex.expand(fs[s]);
    worst_res = std::max(worst_res, res.residual);
    worst_van = std::max(worst_van, res.vanishing);
    worst_perm = std::max(worst_perm, res.permutation_change);
    coeff_ok = coeff_ok && res.warnings.empty();
    samples.push_back(io::to_json(res, fs.size() == 1));
    if (s == 0) csv = io::coeffs_csv(res);
  }
  RunResult r;
  r.report["grid"] = io::to_json(*grid);
  r.report["result"] = {{"points", ps.size()},
                        {"densified_points", ps_prime.size()},
                        {"gap", gap(ps_prime).value},
                        {"separation", separation(ps_prime)},
                        {"frame_E_delta", io::to_json(ex.frame())},
                        {"max_residual", worst_res},
                        {"max_vanishing", worst_van},
                        {"max_permutation_change", worst_perm},
                        {"coefficients_bounded", coeff_ok},
                        {"samples", samples}};
  r.consistent = worst_res <= 1e-8 && worst_van <= 1e-8 && worst_perm <= 1e-9 && coeff_ok;
  r.verdict = "max residual " + std::to_string(worst_res);
  r.csv = csv;
  return r;
}

Domain union_domain(const std::vector<PartConfig>& parts) {
  std::vector<Interval> all;
  for (const auto& p : parts) all.insert(all.end(), p.intervals.begin(), p.intervals.end());
  std::sort(all.begin(), all.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& iv : all) {
    if (!merged.empty() && iv.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    } else {
      merged.push_back(iv);
    }
  }
  return Domain(merged);
}

RunResult cmd_union_check(const RunConfig& c) {
  allow_params(c, {});
  if (c.parts.empty()) throw ConfigError("parts", "required for union-check");
  const Domain common = union_domain(c.parts);
  const auto opts = mult_options(c);
  std::optional<PointSet> fixed;
  if (has_points(c)) fixed = build_points(c);
  const LatticeRule rule = [fixed](const Grid& g) { return fixed ? *fixed : dft_lattice(g); };
  for (std::size_t j = 0; j < c.parts.size(); ++j) {
    if (!c.parts[j].generator.csv.empty()) {
      throw ConfigError("parts[" + std::to_string(j) + "].generator", "union-check takes expressions only");
    }
  }
  RunResult r;
  if (!c.refine.empty()) {
    std::vector<std::pair<Domain, ScalarFn>> parts;
    for (const auto& p : c.parts) parts.emplace_back(Domain(p.intervals), expression_fn(p.generator.expr));
    const auto sweep = union_sweep(parts, common, c.refine, rule, opts);
    r.report["result"] = {{"sweep", io::to_json(sweep)}};
    const bool p_zero = sweep.p_trend == Trend::ToZero;
    const bool l_zero = sweep.lower_trend == Trend::ToZero;
    r.consistent = p_zero == l_zero;
    r.verdict = std::string(l_zero ? "not frame" : "frame") + ", p_hat " + to_string(sweep.p_trend) + ", lower " +
                to_string(sweep.lower_trend);
    std::string csv = "n_per_unit,p_hat,lower\n";
    for (std::size_t k = 0; k < sweep.refinements.size(); ++k) {
      csv += std::to_string(sweep.refinements[k]) + "," + std::to_string(sweep.p_hat[k]) + "," +
             std::to_string(sweep.lower[k]) + "\n";
    }
    r.csv = csv;
    return r;
  }
  const GridPtr grid = make_grid(common, c.n_per_unit);
  UnionSpec spec{{}, rule(*grid)};
  for (const auto& p : c.parts) {
    spec.parts.push_back({Domain(p.intervals), build_generator(p.generator, grid, "parts.generator").hat_h});
  }
  const auto rep = union_check(spec, grid, opts);
  r.report["grid"] = io::to_json(*grid);
  r.report["result"] = {{"union", io::to_json(rep)}};
  r.consistent = rep.consistent;
  r.verdict = yes_no(rep.measured_frame, "frame") + ", bounds [" + std::to_string(rep.report.lower) + ", " +
              std::to_string(rep.report.upper) + "]";
  r.csv = io::spectrum_csv(rep.report);
  return r;
}

RunResult cmd_corollary_demo(const RunConfig& c) {
  allow_params(c, {"max_ratio"});
  const Domain dom = require_domain(c);
  if (!c.generator.present() || c.generator.expr.empty()) throw ConfigError("generator", "an expression is required");
  const auto refs = refinements_or(c, {64, 128, 256});
  const auto rep = corollary_obstruction_demo(expression_fn(c.generator.expr), dom, refs, {},
                                              param_positive(c, "max_ratio", 0.6), c.rank_tol);
  const bool predicted = classify_trend(rep.min_hat_sq) == Trend::ToZero;
  const bool measured = rep.trend == Trend::ToZero;
  RunResult r;
  r.report["result"] = {{"obstruction", io::to_json(rep)},
                        {"min_hat_trend", to_string(classify_trend(rep.min_hat_sq))},
                        {"predicted_vanishing", predicted},
                        {"measured_vanishing", measured}};
  r.consistent = predicted == measured && (!predicted || rep.obstruction_shown);
  r.verdict = measured ? "lower bound trends to zero" : std::string("lower bound ") + to_string(rep.trend);
  std::string csv = "n_per_unit,lower,min_hat_sq\n";
  for (std::size_t k = 0; k < rep.refinements.size(); ++k) {
    csv += std::to_string(rep.refinements[k]) + "," + std::to_string(rep.lower[k]) + "," +
           std::to_string(rep.min_hat_sq[k]) + "\n";
  }
  r.csv = csv;
  return r;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

}  // namespace

RunResult run(const RunConfig& config) {
  RunResult r;
  switch (config.command) {
    case Command::Density: r = cmd_density(config); break;
    case Command::Gap: r = cmd_gap(config); break;
    case Command::FrameBounds: r = cmd_frame_bounds(config); break;
    case Command::MultCheck: r = cmd_mult_check(config); break;
    case Command::TranslateCheck: r = cmd_translate_check(config); break;
    case Command::BuildGenerator: r = cmd_build_generator(config); break;
    case Command::Reconstruct: r = cmd_reconstruct(config); break;
    case Command::UnionCheck: r = cmd_union_check(config); break;
    case Command::CorollaryDemo: r = cmd_corollary_demo(config); break;
  }
  r.report["command"] = to_string(config.command);
  r.report["inputs"] = config_to_json(config);
  const MultCheckOptions mo = mult_options(config);
  r.report["tolerances"] = {{"rank_tol", config.rank_tol},
                            {"recon_tol", config.recon_tol},
                            {"max_iter", config.max_iter},
                            {"envelope_slack", mo.envelope_slack},
                            {"zero_tol", mo.zero_tol},
                            {"frame_eps", mo.effective_frame_eps()}};
  if (!r.report.contains("grid")) r.report["grid"] = {{"n_per_unit", config.n_per_unit}, {"refine", config.refine}};
  r.report["grid"]["n_per_unit"] = config.n_per_unit;
  r.report["grid"]["refine"] = config.refine;
  r.report["verdict"] = r.verdict;
  r.report["consistent"] = r.consistent;
  r.report["exit_code"] = r.consistent ? kExitConsistent : kExitInconsistent;
  return r;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericalError*>(&e) != nullptr) return kExitNumerical;
  if (dynamic_cast<const Error*>(&e) != nullptr) return kExitUsage;
  if (dynamic_cast<const nlohmann::json::exception*>(&e) != nullptr) return kExitUsage;
  return kExitNumerical;
}

int run_and_write(const RunConfig& config, std::ostream& out, std::ostream& err) {
  RunResult r;
  try {
    r = run(config);
  } catch (const std::exception& e) {
    err << "framelab: " << e.what() << "\n";
    return exit_code_for(e);
  }
  r.report["timestamp"] = utc_timestamp();
  const std::string body = config.format == "csv" ? r.csv : r.report.dump(2) + "\n";
  if (config.output_path.empty()) {
    out << body;
  } else {
    try {
      io::atomic_write(config.output_path, body);
    } catch (const std::exception& e) {
      err << "framelab: " << e.what() << "\n";
      return kExitUsage;
    }
  }
  err << "framelab: " << to_string(config.command) << ": " << r.verdict << "\n";
  return r.consistent ? kExitConsistent : kExitInconsistent;
}

}  // namespace framelab
