#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "berglab/geometry.hpp"
#include "berglab/quadrature.hpp"

namespace berglab {

/// Positive weight sigma together with its Lebesgue exponent p > 1.
class Weight {
 public:
  static Weight constant(double value, double p);
  /// sigma(z) = (-rho(z))^t, which is (1 - |z|^2)^t on the disk and ball.
  static Weight power(const Domain& domain, double t, double p);
  /// Nearest-neighbour interpolation of sampled values.
  static Weight table(std::vector<CPoint> points, std::vector<double> values, double p);
  /// CSV with header re_1,im_1,...,re_n,im_n,value.
  static Weight table_from_csv(const std::string& path, int dim, double p);
  static Weight custom(std::function<double(const CPoint&)> f, std::string tag, double p);

  double operator()(const CPoint& z) const { return f_(z); }
  double p() const { return p_; }
  /// Dual exponent p / (p - 1).
  double q() const { return p_ / (p_ - 1.0); }
  const std::string& tag() const { return tag_; }
  /// Exponent t for the power family (including duals of power weights).
  std::optional<double> power_exponent() const { return t_; }
  bool is_constant() const { return constant_.has_value(); }
  std::optional<double> constant_value() const { return constant_; }

  Weight scaled(double factor) const;

 private:
  friend Weight dual_weight(const Weight& w);
  Weight(std::function<double(const CPoint&)> f, std::string tag, double p);
  std::function<double(const CPoint&)> f_;
  std::string tag_;
  double p_ = 2.0;
  std::optional<double> t_;
  std::optional<double> constant_;
};

/// sigma' = sigma^{-1/(p-1)} with exponent q = p/(p-1).
Weight dual_weight(const Weight& w);

struct BallFamilySpec {
  bool boundary_touching = true;
  int n_centers = 16;
  std::vector<double> radius_grid{0.25, 0.125, 0.0625, 0.03125};
  std::uint64_t seed = 1;
  /// Boundary-touching centres sit at boundary distance u R with u uniform in this range.
  double depth_lo = 0.05;
  double depth_hi = 0.95;
};

/// Deterministic seeded family: n_centers balls per radius. Boundary-touching balls satisfy
/// R > d(center, bOmega); otherwise d(center, bOmega) = v R with v log-uniform in [1, 16].
std::vector<QuasiBall> ball_family(const Domain& domain, const BallFamilySpec& spec);
double min_radius(const std::vector<QuasiBall>& family);

struct BpEstimate {
  double value = 0.0;
  double p = 2.0;
  int n_balls = 0;
  QuasiBall argmax_ball;
  double min_radius = 0.0;
  std::vector<double> per_ball_values;
  std::vector<double> per_ball_se;
  /// Some ball's dual mass did not decay between the two deepest complete boundary bins (by 2 SE).
  bool divergent = false;
  /// Some per-ball estimate failed the relative-error rule.
  bool flagged = false;
};

/// Depth floor for stratified sampling of B_p families: family radius floor times this factor.
inline constexpr double kFamilyDepthFactor = 1.0 / 16.0;

/// Per-ball averages of sigma and sigma' on shared nodes; product <sigma>(<sigma'>)^{p-1}.
/// Stratified specs with depth_floor = 0 use min_radius(family) * kFamilyDepthFactor.
BpEstimate bp_characteristic(const Domain& domain, const Weight& sigma, const std::vector<QuasiBall>& family,
                             const QuadratureSpec& spec);
/// Same product over an unconstrained family.
BpEstimate ap_characteristic(const Domain& domain, const Weight& sigma, const std::vector<QuasiBall>& family,
                             const QuadratureSpec& spec);

/// B_k(z) = B(z, k d(z, bOmega)).
QuasiBall regularizing_ball(const Domain& domain, double k, const CPoint& z);

/// R_k(sigma)(z): average of |sigma| over B_k(z). Requires 0 < k < 1/(2 C_d).
IntegralEstimate regularize(const Domain& domain, const Weight& sigma, double k, const CPoint& z,
                            const QuadratureSpec& spec, double C_d = 1.0, std::uint64_t stream = 0);

/// The weight z -> R_k(sigma)(z), each evaluation a fresh seeded quadrature.
Weight regularized_weight(const Domain& domain, const Weight& sigma, double k, const QuadratureSpec& spec,
                          double C_d = 1.0);

/// k' = C_d k / (1 - C_d k).
double k_prime(double k, double C_d);

/// sigma(lambda' B) / sigma(B); throws when lambda B does not touch the boundary.
IntegralEstimate weight_doubling_probe(const Domain& domain, const Weight& sigma, const QuasiBall& ball, double lambda,
                                       double lambda_prime, const QuadratureSpec& spec, std::uint64_t stream = 0);

struct DualityCheck {
  double max_abs_deviation = 0.0;
  /// max |deviation| / combined standard error (0 when both errors vanish and deviation is 0).
  double max_deviation_in_se = 0.0;
  int n_balls = 0;
};

/// Per ball: B_q product of sigma' against (B_p product of sigma)^{q-1}, on shared nodes.
DualityCheck duality_identity_check(const Domain& domain, const Weight& sigma, const std::vector<QuasiBall>& family,
                                    const QuadratureSpec& spec);

}  // namespace berglab
