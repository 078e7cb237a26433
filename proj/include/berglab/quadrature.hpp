#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "berglab/cpoint.hpp"
#include "berglab/domain.hpp"
#include "berglab/geometry.hpp"

namespace berglab {

enum class Strategy {
  UniformRejection,
  BoundaryStratified,
  PolarGauss,
  /// Panel Gauss rule on the disk graded toward a focus point; used for kernel integrals.
  GradedPolar,
};

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

struct QuadratureSpec {
  Strategy strategy = Strategy::UniformRejection;
  int layer_count = 12;
  int radial_nodes = 64;
  int angular_nodes = 64;
  std::int64_t n_samples = 100000;
  double rel_tolerance = 1e-2;
  std::uint64_t seed = 1;
  /// Boundary distances below this are not sampled (stratified strategies only).
  /// Zero means the innermost layer reaches the boundary.
  double depth_floor = 0.0;

  void validate() const;

  static QuadratureSpec uniform(std::int64_t n, std::uint64_t seed);
  static QuadratureSpec stratified(int layers, std::int64_t n, std::uint64_t seed);
  static QuadratureSpec polar_gauss(int radial, int angular);
  static QuadratureSpec graded(int panels_per_decade, int nodes_per_panel);
};

inline constexpr int kJackknifeBlocks = 32;
inline constexpr double kAbsoluteFloor = 1e-12;

struct IntegralEstimate {
  cplx value = 0.0;
  double std_error = 0.0;
  std::int64_t n_effective = 0;
  bool flagged = false;
  std::int64_t nonfinite_count = 0;

  double real() const { return value.real(); }
};

/// Weighted nodes. Monte Carlo sets carry jackknife block ids; deterministic rules use a single block.
struct PointSet {
  std::vector<CPoint> points;
  std::vector<double> weights;
  std::vector<int> blocks;
  int n_blocks = 1;
  bool exact = false;
  std::int64_t n_drawn = 0;

  std::size_t size() const { return points.size(); }
  double total_weight() const;
};

/// Polar region for disk/ball: w = s u with s in (s_lo, s_hi) and |1 - <u, axis>| < cap.
/// cap >= 2 covers the whole sphere.
struct PolarRegion {
  CPoint axis;
  double s_lo = 0.0;
  double s_hi = 1.0;
  double cap = 2.0;
};

/// Product of complex discs of radii[j] in the unitary frame centred at basis.center.
struct BoxRegion {
  FrameBasis basis;
  std::array<double, CPoint::kMaxDim> radii{};
};

using SampleRegion = std::variant<PolarRegion, BoxRegion>;

SampleRegion whole_domain_region(const Domain& domain);
/// A region containing the quasi-ball.
SampleRegion bounding_region(const Domain& domain, const QuasiBall& ball);

using Keep = std::function<bool(const CPoint&)>;

/// Monte Carlo nodes in region ∩ domain (∩ keep). Stratified strategies split the radial
/// window of a PolarRegion into dyadic layers of boundary distance.
PointSet sample_region(const Domain& domain, const SampleRegion& region, const QuadratureSpec& spec,
                       std::uint64_t stream, const Keep& keep = nullptr);

/// Nodes for the whole domain under spec. UniformRejection is hit-or-miss over the real cube [-1, 1]^{2n}.
PointSet sample_domain(const Domain& domain, const QuadratureSpec& spec);

/// Tensor Gauss-Legendre rule in polar coordinates (disk, or ball in C^2).
PointSet polar_gauss_rule(const Domain& domain, int radial_nodes, int angular_nodes);

/// Composite Gauss rule on the disk with radial panels graded toward |w| = 1 and angular
/// panels graded toward arg(focus), resolving the scale 1 - |focus|.
PointSet graded_polar_rule(const CPoint& focus, int panels_per_octave, int nodes_per_panel);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

using Integrand = std::function<cplx(const CPoint&)>;

/// Block sums for several quantities; jackknife errors for smooth functions of the totals.
class BlockSums {
 public:
  BlockSums(int n_quantities, int n_blocks);
  void add(int quantity, int block, double v) { data_[quantity * n_blocks_ + block] += v; }
  double total(int quantity) const;
  std::vector<double> totals() const;
  int n_blocks() const { return n_blocks_; }
  /// Jackknife standard error of stat(totals); zero for a single block.
  double jackknife_se(const std::function<double(std::span<const double>)>& stat) const;

 private:
  int n_quantities_;
  int n_blocks_;
  std::vector<double> data_;
};

/// Weighted sum over a node set with jackknife error.
IntegralEstimate integrate_points(const PointSet& nodes, const Integrand& f, double rel_tolerance);

IntegralEstimate integrate(const Domain& domain, const Integrand& f, const QuadratureSpec& spec);

/// Integral of f over the quasi-ball (membership-restricted).
IntegralEstimate integrate_ball(const Domain& domain, const QuasiBall& ball, const Integrand& f,
                                const QuadratureSpec& spec, std::uint64_t stream = 0);

/// Flag rule shared by all estimates.
bool quality_flag(double value_abs, double std_error, double rel_tolerance);

}  // namespace berglab
