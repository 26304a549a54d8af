#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "capsym/core.hpp"

namespace capsym {

// A gradient field a(x) = grad h(x) used as the drift of the obstacle gauge.
class DriftField {
 public:
  virtual ~DriftField() = default;
  virtual int dim() const = 0;
  virtual void gradient(const double* x, double* out) const = 0;
  // Upper bound of |grad h| over the region where the field is used.
  virtual double sup_gradient() const = 0;
};

enum class GaugeKind { Euclidean, CapillaryHalfSpace, Obstacle };

// All three kinds share the form F(xi) = |xi| + a.xi with a drift vector a:
// a = 0, a = -lambda e_n, or a = grad h(at).
class GaugeDescriptor {
 public:
  static GaugeDescriptor euclidean(int n);
  static GaugeDescriptor capillary(double lambda, int n);
  static GaugeDescriptor obstacle(double lambda, std::shared_ptr<const DriftField> drift);

  GaugeKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  int dim() const { return dim_; }
  const DriftField* drift() const { return drift_.get(); }
  std::shared_ptr<const DriftField> drift_ptr() const { return drift_; }
  bool constant_drift() const { return kind_ != GaugeKind::Obstacle; }

  // Writes the drift vector at `at` (ignored unless kind is Obstacle).
  void drift_at(const double* at, double* a) const;
  Vec drift_at(const Vec* at) const;

 private:
  GaugeKind kind_ = GaugeKind::Euclidean;
  double lambda_ = 0.0;
  int dim_ = 2;
  std::shared_ptr<const DriftField> drift_;
};

// Pointwise kernels on an explicit drift vector a with |a| < 1.
namespace gk {

inline double value(const double* xi, const double* a, int n) {
  return norm(xi, n) + dot(a, xi, n);
}

template <class T>
T dual_value(const T* x, const T* a, int n) {
  T xx = 0, xa = 0, aa = 0;
  for (int i = 0; i < n; ++i) {
    xx += x[i] * x[i];
    xa += x[i] * a[i];
    aa += a[i] * a[i];
  }
  if (xx == T(0)) return T(0);
  const T c = T(1) - aa;
  const T root = std::sqrt(xa * xa + xx * c);
  // Two algebraically equal forms; pick the one free of cancellation.
  if (xa >= T(0)) return xx / (root + xa);
  return (root - xa) / c;
}

}  // namespace gk

double eval_gauge(const GaugeDescriptor& g, const Vec& xi, const Vec* at = nullptr);
Vec grad_gauge(const GaugeDescriptor& g, const Vec& xi, const Vec* at = nullptr);

struct DualEvaluation {
  double value = 0.0;
  Vec at_point;
  Vec drift_used;
};

DualEvaluation eval_dual(const GaugeDescriptor& g, const Vec& x, const Vec* at = nullptr);

// Gradient of the dual gauge by central differences with step 1e-6|x|.
Vec dual_gradient_fd(const GaugeDescriptor& g, const Vec& x, const Vec* at = nullptr);

struct PolarityReport {
  std::size_t samples = 0;
  double unit_residual = 0.0;     // max |F(DF^o(x)) - 1|
  double euler_residual = 0.0;    // max |DF(x).x - F(x)| / |x|
  double inverse_residual = 0.0;  // max |F^o(x) DF(DF^o(x)) - x| / |x|
  double max_residual = 0.0;
};

PolarityReport check_polarity(const GaugeDescriptor& g, const std::vector<Vec>& samples,
                              const Vec* at = nullptr);

// Lebesgue measure of {x : F^o(x) <= 1}.
double wulff_ball_volume(const GaugeDescriptor& g, const Vec* at = nullptr);

}  // namespace capsym
