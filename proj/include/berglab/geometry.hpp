#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "berglab/cpoint.hpp"
#include "berglab/domain.hpp"

namespace berglab {

/// Raised when a bisection cannot find a sign change inside its search bracket.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MetricTag { BallFormula, PolydiscSymmetrized, ProductSum };

/// The single metric used for a domain kind: explicit formula on disk/ball,
/// symmetrized polydisc metric on the egg, sum of factor disk metrics on the product.
MetricTag canonical_metric(const Domain& domain);
std::string to_string(MetricTag tag);

/// A metric or distance value with a flag for fallback branches (origin input,
/// saturation at delta_max).
struct FlaggedValue {
  double value = 0.0;
  bool flagged = false;
};

struct GeometryConfig {
  double delta_max = 0.5;
  int angle_grid = 16;
  double rel_tol = 1e-3;
};

/// d(w,z) = ||w|-|z|| + |1 - <w,z>/(|w||z|)| on the disk or ball.
/// At the origin the angular term is undefined; the radial term plus 1 (0 if both
/// points are the origin) is returned with the flag set.
FlaggedValue ball_metric(const Domain& domain, const CPoint& z, const CPoint& w);

/// Sum over coordinates of the one-dimensional disk formula.
FlaggedValue product_metric(const Domain& domain, const CPoint& z, const CPoint& w);

/// Unitary frame at q: dirs[0] is the complex normal (normalized gradient of rho),
/// the remaining directions complete an orthonormal basis of C^n.
struct FrameBasis {
  CPoint center;
  std::array<CPoint, CPoint::kMaxDim> dirs{};
  int dim = 0;

  /// Coordinates of w - center in the frame.
  std::array<cplx, CPoint::kMaxDim> coordinates(const CPoint& w) const;
  CPoint point(const std::array<cplx, CPoint::kMaxDim>& coords) const;
};

FrameBasis frame_basis(const Domain& domain, const CPoint& q);

/// tau_j(q, delta) for j >= 1: the largest t such that every displacement t e^{i theta} dirs[j]
/// (theta on the angle grid) changes rho by at most delta. Bisection to rel_tol.
double tangential_radius(const Domain& domain, const FrameBasis& basis, int j, double delta,
                         const GeometryConfig& cfg = {});

/// The polydisc P(q, delta) = { q + sum c_j dirs[j] : |c_j| < tau_j }.
struct PolydiscFrame {
  FrameBasis basis;
  double delta = 0.0;
  std::array<double, CPoint::kMaxDim> tau{};

  const CPoint& center() const { return basis.center; }
  const CPoint& normal_dir() const { return basis.dirs[0]; }
  int dim() const { return basis.dim; }
  /// Smallest s such that w lies in the s-dilate of the polydisc.
  double dilation_needed(const CPoint& w) const;
  bool contains(const CPoint& w) const { return dilation_needed(w) < 1.0; }
  double volume() const;
};

PolydiscFrame polydisc_frame(const Domain& domain, const CPoint& q, double delta,
                             const GeometryConfig& cfg = {});

/// One-sided M(z,w) = inf{eps : w in P(z, eps)}. Saturates at delta_max with the flag set.
FlaggedValue polydisc_quasi_distance(const Domain& domain, const CPoint& z, const CPoint& w,
                                     const GeometryConfig& cfg = {});

/// Symmetrized polydisc metric M(z,w) + M(w,z).
FlaggedValue polydisc_metric(const Domain& domain, const CPoint& z, const CPoint& w,
                             const GeometryConfig& cfg = {});

/// The domain's canonical quasi-metric.
FlaggedValue metric(const Domain& domain, const CPoint& z, const CPoint& w);
inline double distance(const Domain& domain, const CPoint& z, const CPoint& w) {
  return metric(domain, z, w).value;
}

/// Boundary point reached from z along the outward real normal (bisection on rho = 0).
CPoint normal_projection(const Domain& domain, const CPoint& z);

/// d(z, pi(z)) for the normal projection pi(z). When the gradient of rho vanishes
/// (the origin of the disk or ball) the radial term alone is returned, flagged.
FlaggedValue boundary_distance(const Domain& domain, const CPoint& z);

struct QuasiBall {
  CPoint center;
  double radius = 0.0;
  MetricTag metric_tag = MetricTag::BallFormula;

  bool contains(const Domain& domain, const CPoint& w) const {
    return domain.contains(w) && distance(domain, center, w) < radius;
  }
  QuasiBall dilate(double factor) const { return {center, radius * factor, metric_tag}; }
};

/// Validated constructor: positive radius, interior center.
QuasiBall make_ball(const Domain& domain, const CPoint& center, double radius);

struct GeometryCalibration {
  double triangle_constant = 1.0;
  double homogeneity_c0 = 1.0;
  double homogeneity_m = 1.0;
  double engulf_C = 1.0;
  double engulf_D = 1.0;

  void validate() const;
};

}  // namespace berglab
