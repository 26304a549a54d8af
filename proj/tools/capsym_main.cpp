// Command-line front end: gauge, geometry, harmonic, rearrangement, PDE and verification tools.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "capsym/config.hpp"
#include "capsym/experiments.hpp"
#include "capsym/harmonic.hpp"
#include "capsym/io.hpp"
#include "capsym/kernels.hpp"
#include "capsym/pde.hpp"
#include "capsym/rearrange.hpp"
#include "capsym/verify.hpp"

using namespace capsym;

namespace {

struct Globals {
  std::string config;
  std::string out = ".";
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  bool svg = false;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("capsym");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* lv = std::getenv("CAPSYM_LOG")) {
    const std::string s(lv);
    if (s == "error") spdlog::set_level(spdlog::level::err);
    else if (s == "warn") spdlog::set_level(spdlog::level::warn);
    else if (s == "info") spdlog::set_level(spdlog::level::info);
    else if (s == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::warn("ignoring CAPSYM_LOG='{}' (expected error, warn, info or debug)", s);
  }
}

ExperimentConfig require_config(const Globals& g) {
  if (g.config.empty()) throw ConfigError("this command needs --config <path>");
  ExperimentConfig c = load_config(g.config);
  if (g.seed) c.seed = *g.seed;
  return c;
}

std::string out_path(const Globals& g, const std::string& name) {
  return (std::filesystem::path(g.out) / name).string();
}

CsvTable field_table(const MaskedGrid& grid, const std::vector<std::pair<std::string, const Field*>>& cols) {
  static const char* axes[] = {"x", "y", "z"};
  CsvTable t;
  for (int a = 0; a < grid.dim; ++a) t.header.push_back(axes[a]);
  for (const auto& c : cols) t.header.push_back(c.first);
  for (int cell : grid.domain) {
    const Point x = grid.center(cell);
    std::vector<double> row(x.begin(), x.begin() + grid.dim);
    for (const auto& c : cols) row.push_back((*c.second)[cell]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

// Built-in configurations used by `verify all`.
std::vector<ExperimentConfig> default_suite(const ExperimentConfig* base) {
  std::vector<ExperimentConfig> v;
  auto make = [&](const std::string& name) {
    ExperimentConfig c;
    c.experiment = name;
    if (base) {
      c.lambda = base->lambda;
      c.seed = base->seed;
      c.c_grid = base->c_grid;
      c.moser_convention = base->moser_convention;
    }
    return c;
  };
  ExperimentConfig ps = make("polya_szego");
  ps.samples = 3;
  v.push_back(ps);
  ExperimentConfig so = make("sobolev");
  so.n = 3;
  so.p = 2.0;
  so.spacing = 1.0 / 16.0;
  so.samples = 5;
  v.push_back(so);
  ExperimentConfig mo = make("moser");
  mo.spacing = 1.0 / 256.0;
  v.push_back(mo);
  v.push_back(make("talenti"));
  ExperimentConfig bd = make("bossel_daners");
  bd.obstacle.kind = "ball";
  bd.outer.kind = "box";
  bd.outer.lo = {-1.2, 0.6};
  bd.outer.hi = {1.2, 1.3};
  v.push_back(bd);
  for (auto& c : v) validate_config(c);
  return v;
}

int report_exit(const RunResult& r) {
  for (const auto& rep : r.reports) std::cout << rep.to_line() << '\n';
  for (const auto& e : r.errors) std::cerr << "error: " << e << '\n';
  for (const auto& a : r.artifacts) spdlog::info("wrote {}", a);
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"capsym: capillary symmetrization toolkit"};
  app.require_subcommand(1);
  Globals G;
  app.add_option("--config", G.config, "experiment configuration file");
  app.add_option("--out", G.out, "output directory");
  app.add_option("--jobs", G.jobs, "worker threads for experiment batches")->check(CLI::PositiveNumber);
  app.add_option_function<std::uint64_t>(
      "--seed", [&](const std::uint64_t& v) { G.seed = v; }, "random seed (overrides the config)");
  app.add_flag("--svg", G.svg, "also write SVG plots");

  int code = 0;
  auto finish = [&](int c) { code = c; };

  // gauge
  auto* gauge = app.add_subcommand("gauge", "gauge and dual gauge evaluation");
  gauge->require_subcommand(1);
  gauge->fallthrough();
  double g_lambda = 0.0;
  int g_n = 2;
  std::vector<double> g_xi, g_x;
  std::string g_kind = "capillary";
  auto* geval = gauge->add_subcommand("eval", "evaluate F, DF and optionally F^o");
  geval->fallthrough();
  geval->add_option("--lambda", g_lambda);
  geval->add_option("--n", g_n);
  geval->add_option("--kind", g_kind)->check(CLI::IsMember({"euclidean", "capillary"}));
  geval->add_option("--xi", g_xi, "covector, comma separated")->delimiter(',')->required();
  geval->add_option("--x", g_x, "point for the dual gauge")->delimiter(',');
  geval->callback([&] {
    const GaugeDescriptor gd =
        g_kind == "euclidean" ? GaugeDescriptor::euclidean(g_n) : GaugeDescriptor::capillary(g_lambda, g_n);
    if (static_cast<int>(g_xi.size()) != g_n) throw InvalidInput("--xi must have n components");
    Json j = {{"value", eval_gauge(gd, g_xi)}, {"gradient", grad_gauge(gd, g_xi)}};
    if (!g_x.empty()) {
      if (static_cast<int>(g_x.size()) != g_n) throw InvalidInput("--x must have n components");
      j["dual"] = eval_dual(gd, g_x).value;
    }
    std::cout << j.dump() << '\n';
    finish(0);
  });
  int g_samples = 1000;
  auto* gcheck = gauge->add_subcommand("check", "polarity residuals on random samples");
  gcheck->fallthrough();
  gcheck->add_option("--lambda", g_lambda);
  gcheck->add_option("--n", g_n);
  gcheck->add_option("--samples", g_samples)->check(CLI::PositiveNumber);
  gcheck->callback([&] {
    const GaugeDescriptor gd = GaugeDescriptor::capillary(g_lambda, g_n);
    std::mt19937_64 rng(G.seed.value_or(1));
    std::normal_distribution<double> nd;
    std::vector<Vec> xs(g_samples, Vec(g_n));
    for (auto& x : xs)
      for (double& v : x) v = nd(rng);
    const PolarityReport pr = check_polarity(gd, xs);
    VerificationReport r = make_identity("polarity", pr.max_residual, 0.0, 1e-8);
    r.params = {{"lambda", g_lambda}, {"n", g_n}, {"seed", G.seed.value_or(1)}};
    r.metadata["unit_residual"] = pr.unit_residual;
    r.metadata["euler_residual"] = pr.euler_residual;
    r.metadata["inverse_residual"] = pr.inverse_residual;
    r.metadata["samples"] = pr.samples;
    std::cout << r.to_line() << '\n';
    finish(r.passed ? 0 : 1);
  });

  // geom
  auto* geom = app.add_subcommand("geom", "capillary perimeters of the configured domain");
  geom->require_subcommand(1);
  geom->fallthrough();
  geom->add_subcommand("perimeter", "free perimeter, wetted area and capillary energy")
      ->fallthrough()
      ->callback([&] {
        const ExperimentConfig c = require_config(G);
        const MaskedGrid g = make_grid(c, c.spacing);
        std::vector<std::uint8_t> inside(g.size(), 0);
        for (int cell : g.domain) inside[cell] = 1;
        const CapillaryPerimeter cp = capillary_perimeter(g, CellSet::from_indicator(g, inside), c.lambda);
        std::cout << Json{{"P", cp.P}, {"wet", cp.wet}, {"energy", cp.energy}, {"volume", g.volume()}}.dump() << '\n';
        finish(0);
      });
  geom->add_subcommand("isoperimetric", "relative isoperimetric inequality for the domain")
      ->fallthrough()
      ->callback([&] {
        const ExperimentConfig c = require_config(G);
        const MaskedGrid g = make_grid(c, c.spacing);
        std::vector<std::uint8_t> inside(g.size(), 0);
        for (int cell : g.domain) inside[cell] = 1;
        IsoperimetricOptions o;
        if (c.c_grid) o.c_grid = *c.c_grid;
        VerificationReport r = isoperimetric_check(g, CellSet::from_indicator(g, inside), c.lambda, o);
        r.params["seed"] = c.seed;
        append_jsonl(out_path(G, c.report_path), {r});
        std::cout << r.to_line() << '\n';
        finish(r.passed ? 0 : 1);
      });

  // harmonic
  auto* harm = app.add_subcommand("harmonic", "Neumann potential h of the obstacle");
  harm->require_subcommand(1);
  harm->fallthrough();
  harm->add_subcommand("solve", "solve for h on the configured domain")->fallthrough()->callback([&] {
    const ExperimentConfig c = require_config(G);
    const MaskedGrid g = make_grid(c, c.spacing);
    const auto analytic = analytic_h_for(g.obstacle, c.lambda);
    const HarmonicField hf = solve_h(g, c.lambda, analytic ? OuterBC::MatchAnalytic : OuterBC::HomogeneousNeumann,
                                     analytic.get());
    Field gx(g.size()), gy(g.size()), gz(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      gx[i] = hf.grad[i * g.dim];
      gy[i] = hf.grad[i * g.dim + 1];
      if (g.dim == 3) gz[i] = hf.grad[i * g.dim + 2];
    }
    std::vector<std::pair<std::string, const Field*>> cols{{"h", &hf.h}, {"dh_x", &gx}, {"dh_y", &gy}};
    if (g.dim == 3) cols.push_back({"dh_z", &gz});
    write_csv(out_path(G, "harmonic_h.csv"), field_table(g, cols));
    Json j = {{"iterations", hf.diag.iterations},
              {"relative_residual", hf.diag.relative_residual},
              {"unknowns", hf.diag.unknowns},
              {"cut_cells", hf.diag.cut_cells},
              {"wall_flux", hf.diag.wall_flux},
              {"flux_defect", hf.diag.flux_defect},
              {"sup_grad", hf.sup_grad}};
    if (analytic) {
      double err = 0.0, ref = 0.0;
      for (int cell : g.domain) {
        const Point x = g.center(cell);
        double ga[3];
        analytic->gradient(x.data(), ga);
        for (int a = 0; a < g.dim; ++a) {
          err = std::max(err, std::abs(hf.grad[cell * g.dim + a] - ga[a]));
          ref = std::max(ref, std::abs(ga[a]));
        }
      }
      j["max_gradient_error"] = err;
      j["relative_gradient_error"] = ref > 0 ? err / ref : err;
    }
    std::cout << j.dump() << '\n';
    finish(0);
  });

  // rearrange
  app.add_subcommand("rearrange", "capillary symmetrization of a seeded random field")->fallthrough()->callback([&] {
    const ExperimentConfig c = require_config(G);
    const MaskedGrid g = make_grid(c, c.spacing);
    const Field u = random_admissible_field(g, c.seed);
    const RadialProfile rp = capillary_symmetrize(g, u, c.lambda);
    CsvTable t{{"s", "u_sharp"}, {}};
    for (std::size_t k = 0; k < rp.values.size(); ++k) t.rows.push_back({(k + 0.5) * rp.cell_volume, rp.values[k]});
    write_csv(out_path(G, "rearrangement.csv"), t);
    std::cout << Json{{"volume", rp.total_volume}, {"cap_radius", rp.r_max}, {"max", rp.norm(INFINITY)},
                      {"l1", rp.norm(1.0)}, {"l2", rp.norm(2.0)}}
                     .dump()
              << '\n';
    finish(0);
  });

  // pde
  auto* pde = app.add_subcommand("pde", "mixed boundary value problems");
  pde->require_subcommand(1);
  pde->fallthrough();
  auto source_field = [](const ExperimentConfig& c, const MaskedGrid& g) {
    return sample_field(g, [&](const double* x) {
      if (c.source == "constant") return 1.0;
      return norm(x, c.n) < c.source_radius ? 1.0 : 0.0;
    });
  };
  pde->add_subcommand("solve", "minimise the mixed energy for the configured source")->fallthrough()->callback([&] {
    const ExperimentConfig c = require_config(G);
    MixedProblem pr;
    pr.grid = make_grid(c, c.spacing);
    pr.gauge = make_gauge(c, pr.grid);
    pr.f = source_field(c, pr.grid);
    SolverOptions so;
    if (c.solver_tolerance) so.tolerance = *c.solver_tolerance;
    const MixedSolution s = solve_mixed_bvp(pr, so);
    write_csv(out_path(G, "pde_solution.csv"), field_table(pr.grid, {{"u", &s.u}}));
    std::cout << Json{{"energy", s.energy}, {"residual", s.residual}, {"iterations", s.iterations},
                      {"energy_trace", s.energy_trace}}
                     .dump()
              << '\n';
    finish(0);
  });
  pde->add_subcommand("ode", "radial solution of the symmetrized problem")->fallthrough()->callback([&] {
    const ExperimentConfig c = require_config(G);
    const MaskedGrid g = make_grid(c, c.spacing);
    const RadialProfile fs = decreasing_rearrangement(g, source_field(c, g));
    const double r = cap_radius_for_volume(g.volume(), c.lambda, c.n);
    const RadialSolution rs = solve_radial_ode(SharpFunction::staircase(fs.values, g.cell_volume()), r, c.lambda, c.n);
    CsvTable t{{"rho", "v", "dv", "s", "G"}, {}};
    for (std::size_t i = 0; i < rs.rho.size(); ++i) t.rows.push_back({rs.rho[i], rs.v[i], rs.dv[i], rs.s[i], rs.G[i]});
    write_csv(out_path(G, "radial_solution.csv"), t);
    std::cout << Json{{"r", r}, {"kappa", rs.kappa}, {"v0", rs.v.front()}, {"mesh", rs.rho.size()}}.dump() << '\n';
    finish(0);
  });
  pde->add_subcommand("eigen", "first mixed eigenvalue of the configured domain")->fallthrough()->callback([&] {
    const ExperimentConfig c = require_config(G);
    const MaskedGrid g = make_grid(c, c.spacing);
    EigenOptions eo;
    if (c.eigen_tolerance) eo.tolerance = *c.eigen_tolerance;
    const EigenResult er = first_eigenvalue(g, make_gauge(c, g), eo);
    CsvTable t{{"iteration", "quotient"}, {}};
    for (std::size_t i = 0; i < er.history.size(); ++i) t.rows.push_back({static_cast<double>(i), er.history[i]});
    write_csv(out_path(G, "eigen_history.csv"), t);
    write_csv(out_path(G, "eigenfunction.csv"), field_table(g, {{"u", &er.eigenfunction}}));
    std::cout << Json{{"eigenvalue", er.eigenvalue}, {"poincare_constant", 1.0 / er.eigenvalue},
                      {"iterations", er.iterations}}
                     .dump()
              << '\n';
    finish(0);
  });

  // verify
  auto* verify = app.add_subcommand("verify", "theorem-level experiments");
  verify->require_subcommand(1);
  verify->fallthrough();
  for (const std::string name : {"polya-szego", "sobolev", "moser", "talenti", "bossel-daners"}) {
    verify->add_subcommand(name, "run the " + name + " experiment")->fallthrough()->callback([&, name] {
      ExperimentConfig c;
      if (!G.config.empty()) {
        c = load_config(G.config);
      } else {
        for (const auto& d : default_suite(nullptr))
          if (d.experiment == canonical_experiment(name)) c = d;
      }
      c.experiment = canonical_experiment(name);
      validate_config(c);
      finish(report_exit(run_experiment(c, {G.out, G.svg, G.seed, G.jobs})));
    });
  }
  verify->add_subcommand("all", "run every experiment with built-in settings")->fallthrough()->callback([&] {
    std::optional<ExperimentConfig> base;
    if (!G.config.empty()) base = load_config(G.config);
    const auto suite = default_suite(base ? &*base : nullptr);
    finish(report_exit(run_batch(suite, {G.out, G.svg, G.seed, G.jobs})));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return code;
}
