#include "capsym/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "capsym/harmonic.hpp"

namespace capsym {

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"polya_szego", "sobolev", "moser", "talenti", "bossel_daners"};
  return names;
}

std::string canonical_experiment(const std::string& name) {
  std::string s = name;
  std::replace(s.begin(), s.end(), '-', '_');
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& raw, int line, const std::string& key) {
  const std::string s = trim(raw);
  auto bad = [&] { return ConfigError(fmt::format("line {}: '{}' expects a number, got '{}'", line, key, s)); };
  const auto slash = s.find('/');
  try {
    std::size_t used = 0;
    if (slash != std::string::npos) {
      const std::string a = trim(s.substr(0, slash)), b = trim(s.substr(slash + 1));
      const double num = std::stod(a, &used);
      if (used != a.size()) throw bad();
      const double den = std::stod(b, &used);
      if (used != b.size() || den == 0.0) throw bad();
      return num / den;
    }
    const double v = std::stod(s, &used);
    if (used != s.size()) throw bad();
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw bad();
  }
}

int parse_int(const std::string& raw, int line, const std::string& key) {
  const double v = parse_number(raw, line, key);
  if (v != std::floor(v) || std::abs(v) > 2e9)
    throw ConfigError(fmt::format("line {}: '{}' expects an integer, got '{}'", line, key, trim(raw)));
  return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& raw, int line, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, line, key));
  if (out.empty()) throw ConfigError(fmt::format("line {}: '{}' expects a list of numbers", line, key));
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, int)>;

// Keys by section; the empty section name holds top-level keys.
const std::map<std::string, std::map<std::string, Setter>>& key_table() {
  static const std::map<std::string, std::map<std::string, Setter>> table = [] {
    std::map<std::string, std::map<std::string, Setter>> t;
    auto& top = t[""];
    top["experiment"] = [](ExperimentConfig& c, const std::string& v, int) {
      c.experiment = canonical_experiment(trim(v));
    };
    top["obstacle"] = [](ExperimentConfig& c, const std::string& v, int) { c.obstacle.kind = trim(v); };
    top["outer"] = [](ExperimentConfig& c, const std::string& v, int) { c.outer.kind = trim(v); };
    top["lambda"] = [](ExperimentConfig& c, const std::string& v, int l) { c.lambda = parse_number(v, l, "lambda"); };
    top["p"] = [](ExperimentConfig& c, const std::string& v, int l) { c.p = parse_number(v, l, "p"); };
    top["n"] = [](ExperimentConfig& c, const std::string& v, int l) { c.n = parse_int(v, l, "n"); };
    top["spacing"] = [](ExperimentConfig& c, const std::string& v, int l) {
      c.spacing = parse_number(v, l, "spacing");
    };
    top["spacings"] = [](ExperimentConfig& c, const std::string& v, int l) {
      c.spacings = parse_list(v, l, "spacings");
    };
    top["seed"] = [](ExperimentConfig& c, const std::string& v, int l) {
      const int s = parse_int(v, l, "seed");
      if (s < 0) throw ConfigError(fmt::format("line {}: seed must be non-negative", l));
      c.seed = static_cast<std::uint64_t>(s);
    };
    top["drift"] = [](ExperimentConfig& c, const std::string& v, int) { c.drift = trim(v); };
    top["moser_convention"] = [](ExperimentConfig& c, const std::string& v, int l) {
      try {
        c.moser_convention = parse_moser_convention(trim(v));
      } catch (const InvalidInput& e) {
        throw ConfigError(fmt::format("line {}: {}", l, e.what()));
      }
    };
    top["samples"] = [](ExperimentConfig& c, const std::string& v, int l) { c.samples = parse_int(v, l, "samples"); };
    t["experiment"] = top;

    auto& ob = t["obstacle"];
    ob["kind"] = top["obstacle"];
    ob["normal"] = [](ExperimentConfig& c, const std::string& v, int l) {
      c.obstacle.normal = parse_list(v, l, "normal");
    };
    ob["offset"] = [](ExperimentConfig& c, const std::string& v, int l) {
      c.obstacle.offset = parse_number(v, l, "offset");
    };
    ob["center"] = [](ExperimentConfig& c, const std::string& v, int l) {
      c.obstacle.center = parse_list(v, l, "center");
    };
    ob["radius"] = [](ExperimentConfig& c, const std::string& v, int l) {
      c.obstacle.radius = parse_number(v, l, "radius");
    };
    ob["plane"] = [](ExperimentConfig& c, const std::string& v, int l) {
      Vec w = parse_list(v, l, "plane");
      if (w.size() < 3) throw ConfigError(fmt::format("line {}: plane expects normal components then offset", l));
      const double b = w.back();
      w.pop_back();
      c.obstacle.planes.emplace_back(w, b);
    };

    auto& out = t["outer"];
    out["kind"] = top["outer"];
    out["center"] = [](ExperimentConfig& c, const std::string& v, int l) {
      c.outer.center = parse_list(v, l, "center");
    };
    out["radius"] = [](ExperimentConfig& c, const std::string& v, int l) {
      c.outer.radius = parse_number(v, l, "radius");
    };
    out["lo"] = [](ExperimentConfig& c, const std::string& v, int l) { c.outer.lo = parse_list(v, l, "lo"); };
    out["hi"] = [](ExperimentConfig& c, const std::string& v, int l) { c.outer.hi = parse_list(v, l, "hi"); };

    auto& tol = t["tolerance"];
    tol["c_grid"] = [](ExperimentConfig& c, const std::string& v, int l) { c.c_grid = parse_number(v, l, "c_grid"); };
    tol["solver"] = [](ExperimentConfig& c, const std::string& v, int l) {
      c.solver_tolerance = parse_number(v, l, "solver");
    };
    tol["eigen"] = [](ExperimentConfig& c, const std::string& v, int l) {
      c.eigen_tolerance = parse_number(v, l, "eigen");
    };

    auto& o = t["output"];
    o["report"] = [](ExperimentConfig& c, const std::string& v, int) { c.report_path = trim(v); };
    o["csv"] = [](ExperimentConfig& c, const std::string& v, int) { c.csv_path = trim(v); };
    o["svg"] = [](ExperimentConfig& c, const std::string& v, int) { c.svg_path = trim(v); };

    auto& m = t["moser"];
    m["convention"] = top["moser_convention"];
    m["k"] = [](ExperimentConfig& c, const std::string& v, int l) {
      c.moser_k.clear();
      for (double x : parse_list(v, l, "k")) {
        if (x != std::floor(x)) throw ConfigError(fmt::format("line {}: 'k' expects integers", l));
        c.moser_k.push_back(static_cast<int>(x));
      }
    };
    m["scales"] = [](ExperimentConfig& c, const std::string& v, int l) {
      c.moser_scales = parse_list(v, l, "scales");
    };

    auto& s = t["sobolev"];
    s["radii"] = [](ExperimentConfig& c, const std::string& v, int l) { c.sobolev_radii = parse_list(v, l, "radii"); };
    s["spacing"] = [](ExperimentConfig& c, const std::string& v, int l) {
      c.sobolev_spacing = parse_number(v, l, "spacing");
    };
    s["samples"] = top["samples"];

    auto& ta = t["talenti"];
    ta["source"] = [](ExperimentConfig& c, const std::string& v, int) { c.source = trim(v); };
    ta["source_radius"] = [](ExperimentConfig& c, const std::string& v, int l) {
      c.source_radius = parse_number(v, l, "source_radius");
    };

    t["polya_szego"]["samples"] = top["samples"];
    return t;
  }();
  return table;
}

void require_dim(const Vec& v, int n, const std::string& what) {
  if (!v.empty() && static_cast<int>(v.size()) != n)
    throw ConfigError(fmt::format("{} has {} components but n = {}", what, v.size(), n));
}

Vec or_default(const Vec& v, Vec def) { return v.empty() ? def : v; }

}  // namespace

void validate_config(const ExperimentConfig& c) {
  const auto& names = experiment_names();
  if (c.experiment.empty()) throw ConfigError("missing key 'experiment'");
  if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    throw ConfigError(fmt::format("unknown experiment '{}'", c.experiment));
  if (!(c.lambda > -1.0 && c.lambda < 1.0)) throw ConfigError("lambda must lie strictly inside (-1,1)");
  if (c.n != 2 && c.n != 3) throw ConfigError("n must be 2 or 3");
  if (!(c.spacing > 0.0)) throw ConfigError("spacing must be positive");
  for (double h : c.spacings)
    if (!(h > 0.0)) throw ConfigError("spacings must be positive");
  if (c.experiment == "sobolev") {
    if (!(c.p > 1.0 && c.p < c.n)) throw ConfigError("p must satisfy 1 < p < n for the sobolev experiment");
    if (c.sobolev_radii.size() < 3) throw ConfigError("sobolev radii need at least three entries");
    if (!(c.sobolev_spacing > 0.0)) throw ConfigError("sobolev spacing must be positive");
  } else if (!(c.p >= 1.0)) {
    throw ConfigError("p must be at least 1");
  }
  if (c.samples < 1) throw ConfigError("samples must be at least 1");
  for (int k : c.moser_k)
    if (k < 1) throw ConfigError("Moser indices k must be at least 1");
  if (c.drift != "auto" && c.drift != "analytic" && c.drift != "numeric")
    throw ConfigError(fmt::format("drift must be auto, analytic or numeric, got '{}'", c.drift));
  if (c.source != "constant" && c.source != "indicator")
    throw ConfigError(fmt::format("source must be constant or indicator, got '{}'", c.source));
  if (!(c.source_radius > 0.0)) throw ConfigError("source_radius must be positive");
  if (c.c_grid && !(*c.c_grid > 0.0)) throw ConfigError("c_grid must be positive");
  if (c.solver_tolerance && !(*c.solver_tolerance > 0.0)) throw ConfigError("solver tolerance must be positive");
  if (c.eigen_tolerance && !(*c.eigen_tolerance > 0.0)) throw ConfigError("eigen tolerance must be positive");

  const std::string& ok = c.obstacle.kind;
  if (ok != "halfspace" && ok != "ball" && ok != "polytope")
    throw ConfigError(fmt::format("unknown obstacle kind '{}'", ok));
  require_dim(c.obstacle.normal, c.n, "obstacle normal");
  require_dim(c.obstacle.center, c.n, "obstacle center");
  if (ok == "ball" && !(c.obstacle.radius > 0.0)) throw ConfigError("obstacle radius must be positive");
  if (ok == "polytope") {
    if (c.obstacle.planes.empty()) throw ConfigError("polytope obstacle needs at least one plane");
    for (const auto& pl : c.obstacle.planes) require_dim(pl.first, c.n, "plane normal");
  }
  const std::string& ou = c.outer.kind;
  if (ou != "cap" && ou != "ball" && ou != "box" && ou != "lshape")
    throw ConfigError(fmt::format("unknown outer kind '{}'", ou));
  require_dim(c.outer.center, c.n, "outer center");
  require_dim(c.outer.lo, c.n, "outer lo");
  require_dim(c.outer.hi, c.n, "outer hi");
  if ((ou == "cap" || ou == "ball") && !(c.outer.radius > 0.0)) throw ConfigError("outer radius must be positive");
  if (ou == "box" || ou == "lshape") {
    if (c.outer.lo.empty() || c.outer.hi.empty()) throw ConfigError("box and lshape outer regions need lo and hi");
    for (int a = 0; a < c.n; ++a)
      if (!(c.outer.lo[a] < c.outer.hi[a])) throw ConfigError("outer lo must be below hi in every coordinate");
  }
  if (ou == "cap") {
    Vec e(c.n, 0.0);
    e[c.n - 1] = 1.0;
    const Vec nu = or_default(c.obstacle.normal, e);
    const double len = norm(nu);
    const bool flat = ok == "halfspace" && c.obstacle.offset == 0.0 && len > 0.0 &&
                      std::abs(nu[c.n - 1] / len - 1.0) < 1e-14;
    if (!flat) throw ConfigError("outer kind 'cap' requires the half-space obstacle {x_n <= 0}");
  }
  if (c.experiment == "moser" && ou != "cap")
    throw ConfigError("the moser experiment runs on the unit cap (outer = cap)");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  const auto& table = key_table();
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find_first_of("#;");
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(fmt::format("line {}: malformed section header '{}'", line, s));
      section = canonical_experiment(trim(s.substr(1, s.size() - 2)));
      if (!table.count(section)) throw ConfigError(fmt::format("line {}: unknown section '{}'", line, section));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected key = value, got '{}'", line, s));
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(fmt::format("line {}: missing key before '='", line));
    const auto& keys = table.at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) {
      if (section.empty()) throw ConfigError(fmt::format("line {}: unknown key '{}'", line, key));
      throw ConfigError(fmt::format("line {}: unknown key '{}' in section [{}]", line, key, section));
    }
    if (value.empty()) throw ConfigError(fmt::format("line {}: key '{}' has no value", line, key));
    it->second(c, value, line);
  }
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

ConvexObstacle make_obstacle(const ExperimentConfig& c) {
  const int n = c.n;
  if (c.obstacle.kind == "ball") return ConvexObstacle::ball(or_default(c.obstacle.center, Vec(n, 0.0)), c.obstacle.radius);
  if (c.obstacle.kind == "polytope") return ConvexObstacle::polytope(c.obstacle.planes);
  Vec e(n, 0.0);
  e[n - 1] = 1.0;
  return ConvexObstacle::half_space(or_default(c.obstacle.normal, e), c.obstacle.offset);
}

Region make_outer(const ExperimentConfig& c) {
  const int n = c.n;
  const std::string& k = c.outer.kind;
  if (k == "ball") return Region::ball(or_default(c.outer.center, Vec(n, 0.0)), c.outer.radius);
  if (k == "box") return Region::box(c.outer.lo, c.outer.hi);
  if (k == "lshape") return Region::l_shape(c.outer.lo, c.outer.hi);
  // The cap B_r(-r lambda e_n) above {x_n = 0}.
  Vec center(n, 0.0), lo(n), hi(n);
  const double r = c.outer.radius;
  center[n - 1] = -r * c.lambda;
  for (int a = 0; a < n; ++a) {
    lo[a] = -r;
    hi[a] = r;
  }
  lo[n - 1] = 0.0;
  hi[n - 1] = r * (1.0 - c.lambda);
  return Region::intersect(Region::ball(center, r), Region::box(lo, hi));
}

MaskedGrid make_grid(const ExperimentConfig& c, double h) {
  if (c.outer.kind == "cap") return build_cap_grid(c.lambda, c.n, c.outer.radius, h);
  return build_domain(make_obstacle(c), make_outer(c), h);
}

GaugeDescriptor make_gauge(const ExperimentConfig& c, const MaskedGrid& grid) {
  std::shared_ptr<const DriftField> drift;
  if (c.drift != "numeric") drift = analytic_h_for(grid.obstacle, c.lambda);
  if (!drift) {
    if (c.drift == "analytic") throw ConfigError("no closed-form drift for this obstacle; use drift = numeric");
    drift = std::make_shared<HarmonicField>(solve_h(grid, c.lambda, OuterBC::HomogeneousNeumann));
  }
  return GaugeDescriptor::obstacle(c.lambda, std::move(drift));
}

}  // namespace capsym
