#include "multifrac/cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace multifrac::cli {
namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!keys.count(item.key())) throw ValidationError(where + ": unknown key '" + item.key() + "'");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(where + ": must be finite");
  return v;
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ValidationError(where + ": expected an integer");
  const auto v = j.get<long long>();
  if (v < -1000000 || v > 1000000) throw ValidationError(where + ": out of range");
  return static_cast<int>(v);
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Interval interval(const json& j, const std::string& where) {
  const auto v = numbers(j, where);
  if (v.size() != 2 || !(v[0] < v[1])) throw ValidationError(where + ": expected [lo, hi] with lo < hi");
  return {v[0], v[1]};
}

int positive_depth(const json& j, const std::string& where) {
  const int v = integer(j, where);
  if (v < 1 || v > 60) throw ValidationError(where + ": depth must lie in [1, 60]");
  return v;
}

void check_potential(const json& p, const SceneConfig& config) {
  require_object(p, "potential", {"type", "values", "weights", "depth", "table", "random", "of", "scale",
                                  "hoelder_bound"});
  if (!p.contains("type") || !p["type"].is_string()) throw ValidationError("potential.type: expected a string");
  const std::string type = p["type"];
  auto only = [&](std::initializer_list<const char*> keys) {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& item : p.items()) {
      if (item.key() != "type" && item.key() != "hoelder_bound" && !ok.count(item.key())) {
        throw ValidationError("potential: key '" + item.key() + "' does not apply to type " + type);
      }
    }
  };
  const auto s = config.ifs.branches.size();
  if (type == "symbol_log_weights") {
    only({"values"});
    if (numbers(p.at("values"), "potential.values").size() != s) {
      throw ValidationError("potential.values: need one value per branch");
    }
  } else if (type == "symbol_weights") {
    only({"weights"});
    const auto w = numbers(p.at("weights"), "potential.weights");
    if (w.size() != s) throw ValidationError("potential.weights: need one weight per branch");
    for (double v : w) {
      if (!(v > 0.0)) throw ValidationError("potential.weights: weights must be positive");
    }
  } else if (type == "locally_constant") {
    only({"depth", "table", "random"});
    if (!p.contains("depth")) throw ValidationError("potential.depth: missing");
    const int m = positive_depth(p["depth"], "potential.depth");
    if (m > 16) throw ValidationError("potential.depth: at most 16");
    if (p.contains("table") == p.contains("random")) {
      throw ValidationError("potential: give exactly one of 'table' and 'random'");
    }
    if (p.contains("table")) {
      if (numbers(p["table"], "potential.table").size() != ipow(static_cast<int>(s), static_cast<std::size_t>(m))) {
        throw ValidationError("potential.table: need s^depth entries");
      }
    } else {
      require_object(p["random"], "potential.random", {"lo", "hi"});
      const double lo = number(p["random"].at("lo"), "potential.random.lo");
      const double hi = number(p["random"].at("hi"), "potential.random.hi");
      if (!(lo < hi)) throw ValidationError("potential.random: need lo < hi");
    }
  } else if (type == "geometric") {
    only({"of", "scale"});
    const std::string of = p.value("of", std::string("ifs"));
    if (of != "ifs" && of != "ifs_g") throw ValidationError("potential.of: expected 'ifs' or 'ifs_g'");
    if (of == "ifs_g" && !config.ifs_g) throw ValidationError("potential.of: ifs_g is not configured");
    if (p.contains("scale")) number(p["scale"], "potential.scale");
  } else {
    throw ValidationError("potential.type: unknown type '" + type + "'");
  }
  if (p.contains("hoelder_bound")) {
    require_object(p["hoelder_bound"], "potential.hoelder_bound", {"constant", "theta"});
    const double c = number(p["hoelder_bound"].at("constant"), "potential.hoelder_bound.constant");
    const double th = number(p["hoelder_bound"].at("theta"), "potential.hoelder_bound.theta");
    if (!(c > 0.0) || !(th > 0.0 && th < 1.0)) throw ValidationError("potential.hoelder_bound: need C > 0, 0 < theta < 1");
  }
}

}  // namespace

IfsSpec parse_ifs(const json& j, const std::string& where) {
  require_object(j, where, {"branches", "hull", "osc"});
  if (!j.contains("branches") || !j["branches"].is_array()) throw ValidationError(where + ".branches: expected an array");
  IfsSpec spec;
  for (std::size_t i = 0; i < j["branches"].size(); ++i) {
    const json& b = j["branches"][i];
    const std::string at = where + ".branches[" + std::to_string(i) + "]";
    if (!b.is_object() || !b.contains("type") || !b["type"].is_string()) {
      throw ValidationError(at + ": expected an object with a type");
    }
    const std::string type = b["type"];
    if (type == "affine") {
      require_object(b, at, {"type", "ratio", "offset"});
      spec.branches.push_back(
          BranchMap::affine(number(b.at("ratio"), at + ".ratio"), number(b.value("offset", json(0.0)), at + ".offset")));
    } else if (type == "moebius") {
      require_object(b, at, {"type", "a", "b", "c", "d"});
      spec.branches.push_back(BranchMap::moebius(number(b.at("a"), at + ".a"), number(b.at("b"), at + ".b"),
                                                 number(b.at("c"), at + ".c"), number(b.at("d"), at + ".d")));
    } else {
      throw ValidationError(at + ": unknown branch type '" + type + "'");
    }
  }
  if (j.contains("hull")) spec.hull = interval(j["hull"], where + ".hull");
  if (j.contains("osc")) spec.osc = interval(j["osc"], where + ".osc");
  return spec;
}

SceneConfig parse_config(const json& document) {
  try {
    require_object(document, "config", {"ifs", "ifs_g", "potential", "beta_grid", "depths", "q_grid",
                                        "radius_schedule", "range", "points", "conjugacy_samples", "seed", "output"});
    SceneConfig c;
    c.document = document;
    if (!document.contains("ifs")) throw ValidationError("config: missing 'ifs'");
    c.ifs = parse_ifs(document["ifs"], "ifs");
    if (document.contains("ifs_g")) c.ifs_g = parse_ifs(document["ifs_g"], "ifs_g");

    if (document.contains("seed")) {
      const json& s = document["seed"];
      if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<long long>() < 0)) {
        throw ValidationError("seed: expected a nonnegative integer");
      }
      c.seed = s.get<std::uint64_t>();
    }
    if (document.contains("potential")) {
      c.potential = document["potential"];
    } else {
      // Default: uniform symbol weights.
      c.potential = json{{"type", "symbol_weights"}, {"weights", std::vector<double>(c.ifs.branches.size(), 1.0)}};
    }
    check_potential(c.potential, c);

    if (document.contains("beta_grid")) {
      const json& g = document["beta_grid"];
      require_object(g, "beta_grid", {"min", "max", "step"});
      c.beta_grid = {number(g.at("min"), "beta_grid.min"), number(g.at("max"), "beta_grid.max"),
                     number(g.at("step"), "beta_grid.step")};
    }
    c.beta_grid.values();

    if (document.contains("depths")) {
      const json& d = document["depths"];
      require_object(d, "depths", {"pressure", "measure", "staircase", "coarse"});
      if (d.contains("pressure")) c.depths.pressure = positive_depth(d["pressure"], "depths.pressure");
      if (d.contains("measure")) c.depths.measure = positive_depth(d["measure"], "depths.measure");
      if (d.contains("staircase")) c.depths.staircase = positive_depth(d["staircase"], "depths.staircase");
      if (d.contains("coarse")) c.depths.coarse = positive_depth(d["coarse"], "depths.coarse");
    }
    if (document.contains("q_grid")) {
      c.q_grid = numbers(document["q_grid"], "q_grid");
      if (c.q_grid.empty()) throw ValidationError("q_grid: must be nonempty");
      for (std::size_t i = 1; i < c.q_grid.size(); ++i) {
        if (!(c.q_grid[i - 1] < c.q_grid[i])) throw ValidationError("q_grid: must be strictly increasing");
      }
    }
    if (document.contains("radius_schedule")) {
      const json& r = document["radius_schedule"];
      require_object(r, "radius_schedule", {"r0", "rho", "K", "window", "depth"});
      if (r.contains("r0")) c.radius.r0 = number(r["r0"], "radius_schedule.r0");
      if (r.contains("rho")) c.radius.rho = number(r["rho"], "radius_schedule.rho");
      if (r.contains("K")) c.radius.K = integer(r["K"], "radius_schedule.K");
      if (r.contains("window")) c.radius.window = integer(r["window"], "radius_schedule.window");
      if (r.contains("depth")) c.radius.depth = positive_depth(r["depth"], "radius_schedule.depth");
    }
    if (!(c.radius.rho > 0.0 && c.radius.rho < 1.0)) throw ValidationError("radius_schedule.rho: must lie in (0, 1)");
    if (!(c.radius.r0 > 0.0)) throw ValidationError("radius_schedule.r0: must be positive");
    if (c.radius.window < 1 || c.radius.K < 2 * c.radius.window || c.radius.K > 1000) {
      throw ValidationError("radius_schedule: need 1 <= window and 2 * window <= K <= 1000");
    }
    if (document.contains("range")) {
      const json& r = document["range"];
      require_object(r, "range", {"cycle_length", "beta_max"});
      if (r.contains("cycle_length")) c.range.cycle_length = integer(r["cycle_length"], "range.cycle_length");
      if (r.contains("beta_max")) c.range.beta_max = number(r["beta_max"], "range.beta_max");
      if (c.range.cycle_length < 1 || !(c.range.beta_max > 0.0)) {
        throw ValidationError("range: need cycle_length >= 1 and beta_max > 0");
      }
    }
    if (document.contains("points")) c.points = numbers(document["points"], "points");
    if (document.contains("conjugacy_samples")) {
      c.conjugacy_samples = integer(document["conjugacy_samples"], "conjugacy_samples");
      if (c.conjugacy_samples < 2) throw ValidationError("conjugacy_samples: need at least 2");
    }
    if (document.contains("output")) {
      const json& o = document["output"];
      require_object(o, "output", {"dir"});
      if (o.contains("dir")) {
        if (!o["dir"].is_string()) throw ValidationError("output.dir: expected a string");
        c.output_dir = o["dir"];
      }
    }
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

SceneConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  json document;
  try {
    document = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(document);
}

std::string SceneConfig::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : document.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Potential build_psi(const SceneConfig& config, const std::shared_ptr<const Ifs>& ifs,
                    const std::shared_ptr<const Ifs>& ifs_g) {
  const json& p = config.potential;
  const std::string type = p["type"];
  const int s = ifs->size();
  std::optional<Potential> out;
  if (type == "symbol_log_weights") {
    out = Potential::symbol_log_weights(p["values"].get<std::vector<double>>());
  } else if (type == "symbol_weights") {
    std::vector<double> v;
    for (double w : p["weights"].get<std::vector<double>>()) v.push_back(std::log(w));
    out = Potential::symbol_log_weights(std::move(v));
  } else if (type == "locally_constant") {
    const int m = p["depth"];
    std::vector<double> table;
    if (p.contains("table")) {
      table = p["table"].get<std::vector<double>>();
    } else {
      std::mt19937_64 rng(config.seed);
      std::uniform_real_distribution<double> dist(p["random"]["lo"].get<double>(), p["random"]["hi"].get<double>());
      table.resize(ipow(s, static_cast<std::size_t>(m)));
      for (double& v : table) v = dist(rng);
    }
    out = Potential::locally_constant(s, m, std::move(table));
  } else {
    const std::string of = p.value("of", std::string("ifs"));
    const auto& target = of == "ifs" ? ifs : ifs_g;
    if (!target) throw ValidationError("potential.of: system not available");
    out = Potential::geometric(target, p.value("scale", 1.0));
  }
  if (p.contains("hoelder_bound")) {
    out = out->with_hoelder_bound({p["hoelder_bound"]["constant"].get<double>(), p["hoelder_bound"]["theta"].get<double>()});
  }
  if (!(out->alphabet() == ifs->alphabet())) throw ValidationError("potential alphabet does not match the IFS");
  return *out;
}

void apply_depth_override(SceneConfig& config, int n) {
  if (n < 1 || n > 60) throw ValidationError("--depth-override must lie in [1, 60]");
  config.depths = {n, n, n, n};
}

PressureOptions pressure_options(const SceneConfig& config) {
  PressureOptions options;
  options.approximation_depth = config.depths.pressure;
  return options;
}

}  // namespace multifrac::cli
