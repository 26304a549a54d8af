#include "capsym/gauge.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <numbers>

namespace capsym {

double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

GaugeDescriptor GaugeDescriptor::euclidean(int n) {
  if (n < 2) throw InvalidInput("gauge dimension must be at least 2");
  GaugeDescriptor g;
  g.kind_ = GaugeKind::Euclidean;
  g.dim_ = n;
  return g;
}

GaugeDescriptor GaugeDescriptor::capillary(double lambda, int n) {
  check_lambda(lambda);
  if (n < 2) throw InvalidInput("gauge dimension must be at least 2");
  GaugeDescriptor g;
  g.kind_ = GaugeKind::CapillaryHalfSpace;
  g.lambda_ = lambda;
  g.dim_ = n;
  return g;
}

GaugeDescriptor GaugeDescriptor::obstacle(double lambda, std::shared_ptr<const DriftField> drift) {
  check_lambda(lambda);
  if (!drift) throw InvalidInput("obstacle gauge requires a drift field");
  if (!(drift->sup_gradient() < 1.0))
    throw InvalidInput("drift field must satisfy sup|grad h| < 1");
  GaugeDescriptor g;
  g.kind_ = GaugeKind::Obstacle;
  g.lambda_ = lambda;
  g.dim_ = drift->dim();
  g.drift_ = std::move(drift);
  return g;
}

void GaugeDescriptor::drift_at(const double* at, double* a) const {
  for (int i = 0; i < dim_; ++i) a[i] = 0.0;
  switch (kind_) {
    case GaugeKind::Euclidean:
      return;
    case GaugeKind::CapillaryHalfSpace:
      a[dim_ - 1] = -lambda_;
      return;
    case GaugeKind::Obstacle:
      if (!at) throw InvalidInput("obstacle gauge evaluation needs a base point");
      drift_->gradient(at, a);
      if (!(norm(a, dim_) < 1.0)) throw InvalidInput("drift magnitude must be < 1");
      return;
  }
}

Vec GaugeDescriptor::drift_at(const Vec* at) const {
  if (at && static_cast<int>(at->size()) != dim_) throw InvalidInput("base point has wrong dimension");
  Vec a(dim_);
  drift_at(at ? at->data() : nullptr, a.data());
  return a;
}

namespace {

void require_dim(const GaugeDescriptor& g, const Vec& v) {
  if (static_cast<int>(v.size()) != g.dim()) throw InvalidInput("vector has wrong dimension");
  for (double c : v)
    if (!std::isfinite(c)) throw InvalidInput("vector must be finite");
}

}  // namespace

double eval_gauge(const GaugeDescriptor& g, const Vec& xi, const Vec* at) {
  require_dim(g, xi);
  const Vec a = g.drift_at(at);
  return gk::value(xi.data(), a.data(), g.dim());
}

Vec grad_gauge(const GaugeDescriptor& g, const Vec& xi, const Vec* at) {
  require_dim(g, xi);
  const double r = norm(xi);
  if (r == 0.0) throw InvalidInput("gauge is not differentiable at the origin");
  Vec d = g.drift_at(at);
  for (int i = 0; i < g.dim(); ++i) d[i] += xi[i] / r;
  return d;
}

DualEvaluation eval_dual(const GaugeDescriptor& g, const Vec& x, const Vec* at) {
  require_dim(g, x);
  DualEvaluation out;
  out.drift_used = g.drift_at(at);
  out.at_point = at ? *at : Vec(g.dim(), 0.0);
  out.value = gk::dual_value(x.data(), out.drift_used.data(), g.dim());
  return out;
}

namespace {

// Central difference of the dual gauge evaluated in extended precision, so the
// round-off of the quotient stays far below the polarity thresholds.
Vec fd_dual_gradient(const Vec& x, const Vec& a) {
  const int n = static_cast<int>(x.size());
  const long double step = 1e-6L * static_cast<long double>(norm(x));
  std::vector<long double> xp(x.begin(), x.end()), xm(x.begin(), x.end()), al(a.begin(), a.end());
  Vec d(n);
  for (int i = 0; i < n; ++i) {
    xp[i] = x[i] + step;
    xm[i] = x[i] - step;
    const long double fp = gk::dual_value(xp.data(), al.data(), n);
    const long double fm = gk::dual_value(xm.data(), al.data(), n);
    d[i] = static_cast<double>((fp - fm) / (2 * step));
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return d;
}

}  // namespace

Vec dual_gradient_fd(const GaugeDescriptor& g, const Vec& x, const Vec* at) {
  require_dim(g, x);
  if (norm(x) == 0.0) throw InvalidInput("dual gauge gradient undefined at the origin");
  return fd_dual_gradient(x, g.drift_at(at));
}

PolarityReport check_polarity(const GaugeDescriptor& g, const std::vector<Vec>& samples,
                              const Vec* at) {
  const int n = g.dim();
  const Vec a = g.drift_at(at);
  PolarityReport rep;
  for (const Vec& x : samples) {
    require_dim(g, x);
    const double r = norm(x);
    if (r == 0.0) throw InvalidInput("polarity samples must be nonzero");
    const Vec d = fd_dual_gradient(x, a);
    const double fo = gk::dual_value(x.data(), a.data(), n);
    rep.unit_residual = std::max(rep.unit_residual, std::abs(gk::value(d.data(), a.data(), n) - 1.0));

    const double fx = gk::value(x.data(), a.data(), n);
    double euler = -fx;
    for (int i = 0; i < n; ++i) euler += (x[i] / r + a[i]) * x[i];
    rep.euler_residual = std::max(rep.euler_residual, std::abs(euler) / r);

    const double dn = norm(d);
    double inv2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = fo * (d[i] / dn + a[i]) - x[i];
      inv2 += e * e;
    }
    rep.inverse_residual = std::max(rep.inverse_residual, std::sqrt(inv2) / r);
    ++rep.samples;
  }
  rep.max_residual = std::max({rep.unit_residual, rep.euler_residual, rep.inverse_residual});
  return rep;
}

double wulff_ball_volume(const GaugeDescriptor& g, const Vec* at) {
  const int n = g.dim();
  const Vec a = g.drift_at(at);
  const double s = norm(a);
  // The dual gauge only depends on the angle phi between x and a, so the
  // radial-function integral reduces to one dimension.
  auto radial = [s](double phi) {
    const double b = s * std::cos(phi);
    const double c = 1.0 - s * s;
    const double root = std::sqrt(b * b + c);
    const double fo = b >= 0.0 ? 1.0 / (root + b) : (root - b) / c;
    return 1.0 / fo;
  };
  auto integrand = [&](double phi) {
    return std::pow(radial(phi), n) * std::pow(std::sin(phi), n - 2);
  };
  double err = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, std::numbers::pi, 20, 1e-13, &err);
  return unit_sphere_area(n - 1) / n * integral;
}

}  // namespace capsym
