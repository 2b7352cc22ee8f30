#include "framelab/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace framelab {

using nlohmann::json;

namespace {

struct Commands {
  Command c;
  const char* name;
};

constexpr Commands kCommands[] = {
    {Command::Density, "density"},
    {Command::Gap, "gap"},
    {Command::FrameBounds, "frame-bounds"},
    {Command::MultCheck, "mult-check"},
    {Command::TranslateCheck, "translate-check"},
    {Command::BuildGenerator, "build-generator"},
    {Command::Reconstruct, "reconstruct"},
    {Command::UnionCheck, "union-check"},
    {Command::CorollaryDemo, "corollary-demo"},
};

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) throw ConfigError(join(path, k), "unknown key");
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

double get_positive(const json& j, const std::string& path) {
  const double v = get_number(j, path);
  if (!(v > 0.0)) throw ConfigError(path, "must be positive");
  return v;
}

std::size_t get_count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(path, "expected a non-negative integer");
  return j.get<std::size_t>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<Interval> get_intervals(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty list of [lo, hi] pairs");
  std::vector<Interval> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string p = path + "[" + std::to_string(k) + "]";
    if (!j[k].is_array() || j[k].size() != 2) throw ConfigError(p, "expected [lo, hi]");
    Interval iv{get_number(j[k][0], p + "[0]"), get_number(j[k][1], p + "[1]")};
    if (!(iv.lo < iv.hi)) throw ConfigError(p, "lo must be smaller than hi");
    out.push_back(iv);
  }
  try {
    Domain d(out);
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
  return out;
}

std::vector<Interval> get_domain(const json& j, const std::string& path) {
  check_keys(j, path, {"intervals"});
  if (!j.contains("intervals")) throw ConfigError(join(path, "intervals"), "required");
  return get_intervals(j["intervals"], join(path, "intervals"));
}

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty() || base.empty() || std::filesystem::path(p).is_absolute()) return p;
  return (std::filesystem::path(base) / p).string();
}

GeneratorConfig get_generator(const json& j, const std::string& path, const std::string& base) {
  GeneratorConfig g;
  if (j.is_string()) {
    g.expr = j.get<std::string>();
    return g;
  }
  check_keys(j, path, {"expr", "csv"});
  if (j.contains("expr") == j.contains("csv")) throw ConfigError(path, "give exactly one of expr, csv");
  if (j.contains("expr")) g.expr = get_string(j["expr"], join(path, "expr"));
  if (j.contains("csv")) g.csv = resolve(base, get_string(j["csv"], join(path, "csv")));
  if (g.expr.empty() && g.csv.empty()) throw ConfigError(path, "empty generator");
  return g;
}

PointsConfig get_points(const json& j, const std::string& path, const std::string& base) {
  check_keys(j, path, {"path", "values", "coords", "dim", "box", "lattice", "jittered"});
  PointsConfig p;
  int kinds = 0;
  for (const char* k : {"path", "values", "coords", "lattice", "jittered"}) kinds += j.contains(k) ? 1 : 0;
  if (kinds != 1) throw ConfigError(path, "give exactly one of path, values, coords, lattice, jittered");
  if (j.contains("box")) {
    const auto& b = j["box"];
    const std::string bp = join(path, "box");
    if (!b.is_array() || b.empty()) throw ConfigError(bp, "expected a list of [lo, hi] pairs");
    for (std::size_t k = 0; k < b.size(); ++k) {
      const std::string q = bp + "[" + std::to_string(k) + "]";
      if (!b[k].is_array() || b[k].size() != 2) throw ConfigError(q, "expected [lo, hi]");
      p.box.emplace_back(get_number(b[k][0], q + "[0]"), get_number(b[k][1], q + "[1]"));
    }
  }
  if (j.contains("path")) {
    p.kind = PointsConfig::Kind::Path;
    p.path = resolve(base, get_string(j["path"], join(path, "path")));
  } else if (j.contains("values")) {
    p.kind = PointsConfig::Kind::Inline;
    const auto& v = j["values"];
    if (!v.is_array() || v.empty()) throw ConfigError(join(path, "values"), "expected a non-empty list");
    for (std::size_t k = 0; k < v.size(); ++k) {
      p.coords.push_back(get_number(v[k], join(path, "values") + "[" + std::to_string(k) + "]"));
    }
  } else if (j.contains("coords")) {
    p.kind = PointsConfig::Kind::Inline;
    const auto& v = j["coords"];
    const std::string cp = join(path, "coords");
    if (!v.is_array() || v.empty()) throw ConfigError(cp, "expected a non-empty list of points");
    p.dim = j.contains("dim") ? get_count(j["dim"], join(path, "dim")) : v[0].size();
    for (std::size_t k = 0; k < v.size(); ++k) {
      const std::string q = cp + "[" + std::to_string(k) + "]";
      if (!v[k].is_array() || v[k].size() != p.dim) throw ConfigError(q, "expected a point of dimension " + std::to_string(p.dim));
      for (std::size_t c = 0; c < p.dim; ++c) p.coords.push_back(get_number(v[k][c], q));
    }
  } else {
    const bool jit = j.contains("jittered");
    const std::string lp = join(path, jit ? "jittered" : "lattice");
    const auto& l = j[jit ? "jittered" : "lattice"];
    if (jit) {
      check_keys(l, lp, {"start", "count", "step", "amplitude"});
    } else {
      check_keys(l, lp, {"start", "count", "step"});
    }
    p.kind = jit ? PointsConfig::Kind::Jittered : PointsConfig::Kind::Lattice;
    if (!l.contains("count")) throw ConfigError(join(lp, "count"), "required");
    p.count = get_count(l["count"], join(lp, "count"));
    if (p.count == 0) throw ConfigError(join(lp, "count"), "must be positive");
    if (l.contains("start")) p.start = get_number(l["start"], join(lp, "start"));
    if (l.contains("step")) p.step = get_positive(l["step"], join(lp, "step"));
    if (jit) {
      if (!l.contains("amplitude")) throw ConfigError(join(lp, "amplitude"), "required");
      p.amplitude = get_number(l["amplitude"], join(lp, "amplitude"));
      if (p.amplitude < 0.0) throw ConfigError(join(lp, "amplitude"), "must be non-negative");
    }
  }
  if (j.contains("dim") && !j.contains("coords")) throw ConfigError(join(path, "dim"), "only valid with coords");
  return p;
}

std::vector<int> get_refine(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected a list of integers");
  std::vector<int> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string p = path + "[" + std::to_string(k) + "]";
    if (!j[k].is_number_integer()) throw ConfigError(p, "expected an integer");
    const int v = j[k].get<int>();
    if (v < 8) throw ConfigError(p, "must be at least 8");
    if (!out.empty() && v <= out.back()) throw ConfigError(path, "must be strictly increasing");
    out.push_back(v);
  }
  return out;
}

json intervals_json(const std::vector<Interval>& ivs) {
  json a = json::array();
  for (const auto& iv : ivs) a.push_back({iv.lo, iv.hi});
  return a;
}

json generator_json(const GeneratorConfig& g) {
  if (!g.csv.empty()) return {{"csv", g.csv}};
  return {{"expr", g.expr}};
}

}  // namespace

const char* to_string(Command c) {
  for (const auto& e : kCommands) {
    if (e.c == c) return e.name;
  }
  return "unknown";
}

RunConfig parse_config_json(const json& j, const std::string& base_dir) {
  check_keys(j, "", {"command", "domain", "points", "multiplier", "generator", "bump", "parts", "grid", "tolerances",
                     "seed", "output", "params"});
  RunConfig c;
  c.base_dir = base_dir;
  if (!j.contains("command")) throw ConfigError("command", "required");
  const std::string cmd = get_string(j["command"], "command");
  bool found = false;
  for (const auto& e : kCommands) {
    if (cmd == e.name) {
      c.command = e.c;
      found = true;
    }
  }
  if (!found) throw ConfigError("command", "unknown command '" + cmd + "'");

  if (j.contains("domain")) c.domain = get_domain(j["domain"], "domain");
  if (j.contains("points")) c.points = get_points(j["points"], "points", base_dir);
  if (j.contains("multiplier")) c.multiplier = get_string(j["multiplier"], "multiplier");
  if (j.contains("generator")) c.generator = get_generator(j["generator"], "generator", base_dir);
  if (j.contains("bump")) {
    const auto& b = j["bump"];
    check_keys(b, "bump", {"intervals", "delta"});
    if (!b.contains("intervals")) throw ConfigError("bump.intervals", "required");
    if (!b.contains("delta")) throw ConfigError("bump.delta", "required");
    c.bump = BumpConfig{get_intervals(b["intervals"], "bump.intervals"), get_positive(b["delta"], "bump.delta")};
  }
  if (j.contains("parts")) {
    const auto& ps = j["parts"];
    if (!ps.is_array() || ps.empty()) throw ConfigError("parts", "expected a non-empty list");
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const std::string p = "parts[" + std::to_string(k) + "]";
      check_keys(ps[k], p, {"domain", "generator"});
      if (!ps[k].contains("domain")) throw ConfigError(p + ".domain", "required");
      if (!ps[k].contains("generator")) throw ConfigError(p + ".generator", "required");
      c.parts.push_back({get_domain(ps[k]["domain"], p + ".domain"),
                         get_generator(ps[k]["generator"], p + ".generator", base_dir)});
    }
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    check_keys(g, "grid", {"n_per_unit", "refine"});
    if (g.contains("n_per_unit")) {
      if (!g["n_per_unit"].is_number_integer() || g["n_per_unit"].get<int>() < 8) {
        throw ConfigError("grid.n_per_unit", "expected an integer >= 8");
      }
      c.n_per_unit = g["n_per_unit"].get<int>();
    }
    if (g.contains("refine")) c.refine = get_refine(g["refine"], "grid.refine");
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    check_keys(t, "tolerances", {"rank_tol", "recon_tol", "max_iter"});
    if (t.contains("rank_tol")) c.rank_tol = get_positive(t["rank_tol"], "tolerances.rank_tol");
    if (t.contains("recon_tol")) c.recon_tol = get_positive(t["recon_tol"], "tolerances.recon_tol");
    if (t.contains("max_iter")) {
      c.max_iter = get_count(t["max_iter"], "tolerances.max_iter");
      if (c.max_iter == 0) throw ConfigError("tolerances.max_iter", "must be positive");
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0) {
      throw ConfigError("seed", "expected a non-negative integer");
    }
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    check_keys(o, "output", {"path", "format"});
    if (o.contains("path")) c.output_path = resolve(base_dir, get_string(o["path"], "output.path"));
    if (o.contains("format")) c.format = get_string(o["format"], "output.format");
  }
  if (c.format != "json" && c.format != "csv") throw ConfigError("output.format", "expected json or csv");
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError("params", "expected an object");
    c.params = j["params"];
  }
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  return parse_config_json(j, std::filesystem::path(path).parent_path().string());
}

json config_to_json(const RunConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  if (!c.domain.empty()) j["domain"] = {{"intervals", intervals_json(c.domain)}};
  const auto& p = c.points;
  switch (p.kind) {
    case PointsConfig::Kind::None: break;
    case PointsConfig::Kind::Path: j["points"] = {{"path", p.path}}; break;
    case PointsConfig::Kind::Inline:
      j["points"] = {{"dim", p.dim}, {"coords", p.coords}};
      break;
    case PointsConfig::Kind::Lattice:
      j["points"] = {{"lattice", {{"start", p.start}, {"count", p.count}, {"step", p.step}}}};
      break;
    case PointsConfig::Kind::Jittered:
      j["points"] = {{"jittered", {{"start", p.start}, {"count", p.count}, {"step", p.step}, {"amplitude", p.amplitude}}}};
      break;
  }
  if (p.kind != PointsConfig::Kind::None && !p.box.empty()) {
    json b = json::array();
    for (const auto& [lo, hi] : p.box) b.push_back({lo, hi});
    j["points"]["box"] = b;
  }
  if (!c.multiplier.empty()) j["multiplier"] = c.multiplier;
  if (c.generator.present()) j["generator"] = generator_json(c.generator);
  if (c.bump) j["bump"] = {{"intervals", intervals_json(c.bump->intervals)}, {"delta", c.bump->delta}};
  if (!c.parts.empty()) {
    json a = json::array();
    for (const auto& part : c.parts) {
      a.push_back({{"domain", {{"intervals", intervals_json(part.intervals)}}}, {"generator", generator_json(part.generator)}});
    }
    j["parts"] = a;
  }
  j["grid"] = {{"n_per_unit", c.n_per_unit}, {"refine", c.refine}};
  j["tolerances"] = {{"rank_tol", c.rank_tol}, {"recon_tol", c.recon_tol}, {"max_iter", c.max_iter}};
  j["seed"] = c.seed;
  j["output"] = {{"format", c.format}};
  j["params"] = c.params;
  return j;
}

std::vector<int> parse_refine_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("--refine", "'" + item + "' is not an integer");
    }
    while (used < item.size() && item[used] == ' ') ++used;
    if (used != item.size()) throw ConfigError("--refine", "'" + item + "' is not an integer");
    if (v < 8) throw ConfigError("--refine", "values must be at least 8");
    if (!out.empty() && v <= out.back()) throw ConfigError("--refine", "must be strictly increasing");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--refine", "empty list");
  return out;
}

}  // namespace framelab
