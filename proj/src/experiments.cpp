#include "capsym/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "capsym/harmonic.hpp"
#include "capsym/kernels.hpp"
#include "capsym/pde.hpp"
#include "capsym/rearrange.hpp"
#include "capsym/verify.hpp"

namespace capsym {

Field random_admissible_field(const MaskedGrid& g, std::uint64_t seed) {
  const int n = g.dim;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double lo[3], hi[3], diam = 0.0;
  for (int a = 0; a < n; ++a) {
    lo[a] = g.origin[a];
    hi[a] = g.origin[a] + g.dims[a] * g.h;
    diam = std::max(diam, hi[a] - lo[a]);
  }
  const int count = 2 + static_cast<int>(uni(rng) * 5.0);
  struct Bump {
    double c[3];
    double w, amp;
  };
  std::vector<Bump> bumps(count);
  for (auto& b : bumps) {
    for (int a = 0; a < n; ++a) b.c[a] = lo[a] + uni(rng) * (hi[a] - lo[a]);
    b.w = diam * (0.12 + 0.35 * uni(rng));
    b.amp = 0.3 + uni(rng);
  }
  Field u = sample_field(g, [&](const double* x) {
    double v = 0.0;
    for (const auto& b : bumps) {
      double d2 = 0.0;
      for (int a = 0; a < n; ++a) d2 += (x[a] - b.c[a]) * (x[a] - b.c[a]);
      v += b.amp * std::exp(-d2 / (2.0 * b.w * b.w));
    }
    return v;
  });
  // Taper by the distance-like outer level so the field vanishes at the rim.
  for (std::size_t i = 0; i < u.size(); ++i) u[i] *= std::max(0.0, -g.outer_level[i]);
  apply_dirichlet_zero(g, u);
  return u;
}

namespace {

std::vector<double> spacings_of(const ExperimentConfig& c) {
  return c.spacings.empty() ? std::vector<double>{c.spacing} : c.spacings;
}

std::string annotation(const ExperimentConfig& c) {
  return fmt::format("lambda={} p={} n={} h={:.6g} seed={} obstacle={} outer={}", c.lambda, c.p, c.n, c.spacing,
                     c.seed, c.obstacle.kind, c.outer.kind);
}

void stamp(VerificationReport& r, const ExperimentConfig& c, double h) {
  r.params["lambda"] = c.lambda;
  r.params["p"] = c.p;
  r.params["n"] = c.n;
  r.params["h"] = h;
  r.params["seed"] = c.seed;
  r.metadata["outer"] = c.outer.kind;
}

SvgPlot margin_plot(const ExperimentConfig& c, const std::vector<double>& hs, const std::vector<VerificationReport>& rs) {
  SvgPlot p;
  p.title = fmt::format("{}: margin and tolerance vs h", c.experiment);
  p.annotation = annotation(c);
  p.x_label = "h";
  p.y_label = "value";
  p.log_x = true;
  SvgSeries m{"margin", {}, {}, true}, t{"-tolerance", {}, {}, true};
  for (std::size_t i = 0; i < rs.size(); ++i) {
    m.x.push_back(hs[i]);
    m.y.push_back(rs[i].margin);
    t.x.push_back(hs[i]);
    t.y.push_back(-rs[i].tolerance);
  }
  p.series = {m, t};
  return p;
}

ExperimentOutput run_polya_szego(const ExperimentConfig& c) {
  ExperimentOutput out;
  const std::vector<double> hs = spacings_of(c);
  std::vector<VerificationReport> last;
  for (double h : hs) {
    const MaskedGrid g = make_grid(c, h);
    const GaugeDescriptor gauge = make_gauge(c, g);
    PolyaSzegoOptions o;
    if (c.c_grid) o.c_grid = *c.c_grid;
    for (int s = 0; s < c.samples; ++s) {
      const Field u = random_admissible_field(g, c.seed + static_cast<std::uint64_t>(s));
      PolyaSzegoResult r = polya_szego_check(g, u, c.lambda, c.p, gauge.drift_ptr(), o);
      stamp(r.report, c, h);
      r.report.metadata["sample"] = s;
      out.reports.push_back(r.report);
      if (s == 0) last.push_back(r.report);
      if (h == hs.back() && s == 0) {
        CsvTable t{{"s", "u_sharp"}, {}};
        for (std::size_t k = 0; k < r.profile.values.size(); ++k)
          t.rows.push_back({(k + 0.5) * r.profile.cell_volume, r.profile.values[k]});
        SvgPlot p;
        p.title = "decreasing rearrangement u#";
        p.annotation = annotation(c);
        p.x_label = "s";
        p.y_label = "u#(s)";
        p.series = {{"u#", t.column("s"), t.column("u_sharp"), false}};
        out.tables["polya_szego_profile"] = std::move(t);
        out.plots["polya_szego_profile"] = std::move(p);
      }
    }
  }
  if (hs.size() > 1) out.plots["polya_szego_margin"] = margin_plot(c, hs, last);
  return out;
}

ExperimentOutput run_sobolev(const ExperimentConfig& c) {
  ExperimentOutput out;
  BestConstantOptions bo;
  bo.h = c.sobolev_spacing;
  bo.seed = c.seed;
  const BestConstantEstimate est = best_constant_estimate(c.lambda, c.p, c.n, c.sobolev_radii, bo);
  const double h = c.spacing;
  const MaskedGrid g = make_grid(c, h);
  const GaugeDescriptor gauge = make_gauge(c, g);
  double qmin = std::numeric_limits<double>::infinity(), scale_err = 0.0;
  std::vector<double> qs;
  for (int s = 0; s < c.samples; ++s) {
    Field u = random_admissible_field(g, c.seed + static_cast<std::uint64_t>(s));
    const double q = sobolev_quotient(g, u, gauge, c.p);
    for (double& v : u) v *= 3.7;
    scale_err = std::max(scale_err, std::abs(sobolev_quotient(g, u, gauge, c.p) - q) / q);
    qs.push_back(q);
    qmin = std::min(qmin, q);
  }
  VerificationReport r = make_inequality("sobolev", qmin, est.estimate, 0.03 * est.estimate);
  stamp(r, c, h);
  r.metadata["estimate_trace"] = est.trace();
  r.metadata["sample_quotients"] = qs;
  r.metadata["scale_invariance_error"] = scale_err;
  r.metadata["subcritical_non_increasing"] = est.non_increasing;
  r.flag_rigidity("near-extremal field");
  out.reports.push_back(r);
  CsvTable t{{"radius", "quotient"}, {}};
  for (std::size_t i = 0; i < est.radii.size(); ++i) t.rows.push_back({est.radii[i], est.quotients[i]});
  SvgPlot p;
  p.title = "cut-off extremal quotients vs cap radius";
  p.annotation = annotation(c);
  p.x_label = "radius";
  p.y_label = "quotient";
  p.series = {{"cut-off extremal", est.radii, est.quotients, true},
              {"extrapolated", {est.radii.front(), est.radii.back()}, {est.estimate, est.estimate}, false}};
  out.tables["sobolev_quotients"] = std::move(t);
  out.plots["sobolev_quotients"] = std::move(p);
  return out;
}

ExperimentOutput run_moser(const ExperimentConfig& c) {
  ExperimentOutput out;
  const double h = c.spacing;
  const MaskedGrid g = make_grid(c, h);
  const GaugeDescriptor gauge = GaugeDescriptor::capillary(c.lambda, c.n);
  const MoserConstants mc = MoserConstants::make(c.lambda, c.n, c.moser_convention);
  std::vector<int> ks = c.moser_k;
  if (ks.empty())
    for (int k = 1; k <= 1.0 / (8.0 * h); k *= 2) ks.push_back(k);
  std::sort(ks.begin(), ks.end());
  std::vector<double> scales = c.moser_scales;
  std::sort(scales.begin(), scales.end());
  CsvTable t;
  t.header.push_back("k");
  for (double s : scales) t.header.push_back(fmt::format("scale_{:g}", s));
  std::vector<std::vector<double>> vals(scales.size());
  for (int k : ks) {
    const Field u = moser_sequence(k, c.lambda, c.n, g);
    std::vector<double> row{static_cast<double>(k)};
    for (std::size_t j = 0; j < scales.size(); ++j) {
      const double v = moser_functional(g, u, gauge, mc, scales[j]);
      vals[j].push_back(v);
      row.push_back(v);
    }
    t.rows.push_back(row);
  }
  Json consts = {{"kappa_tilde", mc.kappa_tilde},
                 {"lambda_tilde", mc.lambda_tilde},
                 {"convention", to_string(mc.convention)},
                 {"k", ks}};
  for (std::size_t j = 0; j < scales.size(); ++j) {
    const double s = scales[j];
    if (s <= 1.0) {
      // Boundedness: spread of the functional over k >= 8 (all k when fewer).
      std::vector<double> tail;
      for (std::size_t i = 0; i < ks.size(); ++i)
        if (ks[i] >= 8) tail.push_back(vals[j][i]);
      if (tail.size() < 2) tail = vals[j];
      const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
      const double spread = *hi / *lo - 1.0;
      VerificationReport r = make_inequality("moser_bounded", 0.2, spread, 1e-8);
      stamp(r, c, h);
      r.params["scale"] = s;
      r.metadata["constants"] = consts;
      r.metadata["values"] = vals[j];
      r.metadata["relative_spread"] = spread;
      out.reports.push_back(r);
    } else {
      // Supercritical growth per doubling of k.
      double growth = std::numeric_limits<double>::infinity();
      for (std::size_t i = 1; i < ks.size(); ++i) {
        const double doublings = std::log2(static_cast<double>(ks[i]) / ks[i - 1]);
        growth = std::min(growth, std::pow(vals[j][i] / vals[j][i - 1], 1.0 / doublings) - 1.0);
      }
      if (ks.size() < 2) growth = 0.0;
      VerificationReport r = make_inequality("moser_supercritical", growth, 0.10, 1e-8);
      stamp(r, c, h);
      r.params["scale"] = s;
      r.metadata["constants"] = consts;
      r.metadata["values"] = vals[j];
      out.reports.push_back(r);
    }
  }
  SvgPlot p;
  p.title = "Moser functional along the concentrating sequence";
  p.annotation = annotation(c) + " convention=" + to_string(mc.convention);
  p.x_label = "k";
  p.y_label = "functional";
  p.log_x = true;
  for (std::size_t j = 0; j < scales.size(); ++j)
    p.series.push_back({fmt::format("scale {:g}", scales[j]), t.column("k"), vals[j], true});
  out.tables["moser_functional"] = std::move(t);
  out.plots["moser_functional"] = std::move(p);
  return out;
}

ExperimentOutput run_talenti(const ExperimentConfig& c) {
  ExperimentOutput out;
  const std::vector<double> hs = spacings_of(c);
  std::vector<VerificationReport> all;
  for (double h : hs) {
    const MaskedGrid g = make_grid(c, h);
    const GaugeDescriptor gauge = make_gauge(c, g);
    Field f = sample_field(g, [&](const double* x) {
      if (c.source == "constant") return 1.0;
      return norm(x, c.n) < c.source_radius ? 1.0 : 0.0;
    });
    TalentiOptions o;
    if (c.c_grid) o.c_grid = *c.c_grid;
    if (c.solver_tolerance) o.solver.tolerance = *c.solver_tolerance;
    TalentiResult r = talenti_compare(g, f, gauge, o);
    stamp(r.report, c, h);
    r.report.metadata["source"] = c.source;
    out.reports.push_back(r.report);
    all.push_back(r.report);
    if (h == hs.back()) {
      CsvTable t{{"s", "u_sharp", "v_sharp"}, {}};
      for (std::size_t k = 0; k < r.s.size(); ++k) t.rows.push_back({r.s[k], r.u_sharp[k], r.v_sharp[k]});
      SvgPlot p;
      p.title = "rearranged solution u# against radial solution v#";
      p.annotation = annotation(c);
      p.x_label = "s";
      p.y_label = "profile";
      p.series = {{"u#", r.s, r.u_sharp, false}, {"v#", r.s, r.v_sharp, false}};
      out.tables["talenti_profiles"] = std::move(t);
      out.plots["talenti_profiles"] = std::move(p);
    }
  }
  if (hs.size() > 1) out.plots["talenti_margin"] = margin_plot(c, hs, all);
  return out;
}

ExperimentOutput run_bossel_daners(const ExperimentConfig& c) {
  ExperimentOutput out;
  const std::vector<double> hs = spacings_of(c);
  std::vector<VerificationReport> all;
  for (double h : hs) {
    const MaskedGrid g = make_grid(c, h);
    const GaugeDescriptor gauge = make_gauge(c, g);
    BosselDanersOptions o;
    if (c.c_grid) o.c_grid = *c.c_grid;
    if (c.eigen_tolerance) o.eigen.tolerance = *c.eigen_tolerance;
    BosselDanersResult r = bossel_daners_compare(g, gauge, o);
    stamp(r.report, c, h);
    out.reports.push_back(r.report);
    all.push_back(r.report);
    if (h == hs.back()) {
      CsvTable t{{"iteration", "domain_quotient", "cap_quotient"}, {}};
      const std::size_t m = std::max(r.domain.history.size(), r.cap.history.size());
      for (std::size_t i = 0; i < m; ++i)
        t.rows.push_back({static_cast<double>(i), r.domain.history[std::min(i, r.domain.history.size() - 1)],
                          r.cap.history[std::min(i, r.cap.history.size() - 1)]});
      SvgPlot p;
      p.title = "Rayleigh quotient history";
      p.annotation = annotation(c);
      p.x_label = "iteration";
      p.y_label = "quotient";
      p.log_y = true;
      p.series = {{"domain", t.column("iteration"), t.column("domain_quotient"), false},
                  {"cap", t.column("iteration"), t.column("cap_quotient"), false}};
      out.tables["bossel_daners_history"] = std::move(t);
      out.plots["bossel_daners_history"] = std::move(p);
    }
  }
  if (hs.size() > 1) out.plots["bossel_daners_margin"] = margin_plot(c, hs, all);
  return out;
}

std::string resolve(const std::string& dir, const std::string& path) {
  if (path.empty()) return path;
  const std::filesystem::path p(path);
  return p.is_absolute() ? path : (std::filesystem::path(dir) / p).string();
}

}  // namespace

ExperimentOutput compute_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  spdlog::info("running {} (lambda={}, n={}, h={})", cfg.experiment, cfg.lambda, cfg.n, cfg.spacing);
  if (cfg.experiment == "polya_szego") return run_polya_szego(cfg);
  if (cfg.experiment == "sobolev") return run_sobolev(cfg);
  if (cfg.experiment == "moser") return run_moser(cfg);
  if (cfg.experiment == "talenti") return run_talenti(cfg);
  if (cfg.experiment == "bossel_daners") return run_bossel_daners(cfg);
  throw ConfigError(fmt::format("unknown experiment '{}'", cfg.experiment));
}

RunResult run_batch(const std::vector<ExperimentConfig>& configs, const RunOptions& opt) {
  const std::size_t N = configs.size();
  std::vector<ExperimentOutput> outputs(N);
  std::vector<std::string> errors(N);
  std::vector<int> error_code(N, 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < N; i = next++) {
      ExperimentConfig c = configs[i];
      if (opt.seed) c.seed = *opt.seed;
      try {
        outputs[i] = compute_experiment(c);
      } catch (const std::exception& e) {
        errors[i] = fmt::format("{}: {}", c.experiment, e.what());
        error_code[i] = 2;
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(N)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  RunResult res;
  for (std::size_t i = 0; i < N; ++i) {
    if (error_code[i]) {
      res.errors.push_back(errors[i]);
      res.exit_code = 2;
      continue;
    }
    const ExperimentConfig& c = configs[i];
    const ExperimentOutput& o = outputs[i];
    try {
      const std::string report = resolve(opt.out_dir, c.report_path);
      append_jsonl(report, o.reports);
      if (std::find(res.artifacts.begin(), res.artifacts.end(), report) == res.artifacts.end())
        res.artifacts.push_back(report);
      for (const auto& [stem, table] : o.tables) {
        const std::string path =
            resolve(opt.out_dir, c.csv_path.empty() || o.tables.size() > 1 ? stem + ".csv" : c.csv_path);
        write_csv(path, table);
        res.artifacts.push_back(path);
      }
      if (opt.svg || !c.svg_path.empty())
        for (const auto& [stem, plot] : o.plots) {
          const std::string path =
              resolve(opt.out_dir, c.svg_path.empty() || o.plots.size() > 1 ? stem + ".svg" : c.svg_path);
          write_text(path, render_svg(plot));
          res.artifacts.push_back(path);
        }
    } catch (const std::exception& e) {
      res.errors.push_back(fmt::format("{}: {}", c.experiment, e.what()));
      res.exit_code = 2;
      continue;
    }
    for (const auto& r : o.reports) {
      res.reports.push_back(r);
      if (!r.passed && res.exit_code == 0) res.exit_code = 1;
    }
  }
  return res;
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) { return run_batch({cfg}, opt); }

}  // namespace capsym
