#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "berglab/geometry.hpp"
#include "berglab/quadrature.hpp"

namespace berglab {

struct MaximalFamilySpec {
  /// Levels 0..max_level with radii R_j = 2^{1-j}; level 0 is the single ball B(0, 2) = Omega.
  int max_level = 12;
  /// Per-ball node count and strategy come from the quadrature spec handed to the family.
  std::uint64_t seed = 1;
};

/// Ball of the family: level plus grid indices of its centre direction.
struct BallKey {
  int level = 0;
  std::array<int, 3> index{};
  auto operator<=>(const BallKey&) const = default;
};

/// Seeded family of boundary-touching balls on the disk or ball in C^2. At level j the centres
/// sit at boundary distance R_j/2 on an angular grid of step ~R_j/2 in the complex-normal
/// angles (and ~sqrt(R_j)/2 in the tangential angle of C^2), so every point at depth below
/// ~1.25 R_j lies in some level-j ball.
class MaximalFamily {
 public:
  MaximalFamily(const Domain& domain, const MaximalFamilySpec& spec, const QuadratureSpec& ball_spec);

  const Domain& domain() const { return domain_; }
  double radius(int level) const;
  QuasiBall ball(const BallKey& key) const;
  /// Family balls containing z, coarse levels first.
  std::vector<BallKey> balls_containing(const CPoint& z) const;
  /// Seeded nodes of one ball (membership-restricted).
  PointSet nodes(const BallKey& key) const;

 private:
  struct Grid {
    int n_phi = 1, n_theta = 1;
  };
  Grid grid(int level) const;

  Domain domain_;
  MaximalFamilySpec spec_;
  QuadratureSpec ball_spec_;
};

/// M applied to a fixed bundle of functions; per-ball averages of |f_i| are cached.
/// Values do not depend on evaluation order or thread count.
class MaximalEvaluator {
 public:
  MaximalEvaluator(const MaximalFamily& family, std::vector<Integrand> fs);

  /// One value per function: max over family balls containing z of the average of |f_i|.
  std::vector<double> operator()(const CPoint& z) const;
  /// Averages of |f_i| over one ball.
  std::vector<double> averages(const BallKey& key) const;
  std::size_t cached_balls() const;

 private:
  const MaximalFamily& family_;
  std::vector<Integrand> fs_;
  mutable std::mutex mutex_;
  mutable std::map<BallKey, std::vector<double>> cache_;
};

/// Single-function convenience wrapper.
double maximal_function(const Domain& domain, const Integrand& f, const CPoint& z, const MaximalFamilySpec& family_spec,
                        const QuadratureSpec& spec);

}  // namespace berglab
