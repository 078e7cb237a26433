#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "berglab/geometry.hpp"
#include "berglab/kernels.hpp"
#include "berglab/quadrature.hpp"

namespace berglab {

struct EstimateFit {
  double constant = 0.0;
  double exponent = 0.0;
  std::int64_t n_samples = 0;
  /// Sup (or inf) statistic divided by the median per-sample statistic.
  double max_violation_ratio = 0.0;
  std::int64_t n_excluded = 0;
  std::int64_t n_flagged = 0;
  /// Statistic per input pair (NaN when excluded or flagged), for prefix comparisons.
  std::vector<double> per_sample;
};

/// Sup / inf of the per-sample statistic over the first n inputs. Pair samplers are prefix-stable,
/// so this equals the probe result on the first n pairs.
double sup_over_prefix(const std::vector<double>& per_sample, std::size_t n);
double inf_over_prefix(const std::vector<double>& per_sample, std::size_t n);

using PointPair = std::pair<CPoint, CPoint>;

/// Pair i depends only on (seed, i), so a larger request extends a smaller one.
/// z has boundary depth log-uniform in [h_min, h_max]; w is global for even i, local for odd i.
std::vector<PointPair> near_boundary_pairs(const Domain& domain, int n, std::uint64_t seed, double h_min = 1e-3,
                                           double h_max = 0.1);

/// Disk/ball pairs with d(z,w) = r exactly and both boundary distances below kappa r.
std::vector<PointPair> separated_pairs(const Domain& domain, const std::vector<double>& radii, double kappa,
                                       int per_radius, std::uint64_t seed);

/// C1: sup |K(z,w)| mu(B(z, d(z,w))).
EstimateFit size_probe(const KernelEvaluator& ev, const std::vector<PointPair>& pairs, const QuadratureSpec& spec);

/// nu and C1 from |K(z,w) - K(z',w)| mu(B(z,d(z,w))) against d(z,z')/d(z,w) on triples with
/// d(z,w) >= C2 d(z,z'). z' is placed at seeded relative distance t/C2, t log-uniform in [1e-3, 1].
EstimateFit smoothness_probe(const KernelEvaluator& ev, const std::vector<PointPair>& pairs, double C2,
                             const QuadratureSpec& spec);

/// C3: sup |K(z,w)| max(mu(B(z, d(z,bOmega))), mu(B(w, d(w,bOmega)))).
EstimateFit boundary_size_probe(const KernelEvaluator& ev, const std::vector<PointPair>& pairs,
                                const QuadratureSpec& spec);

enum class DerivativeSide { None, Z, W };

/// sup |D K| delta^{2+a_1+b_1} prod_{k>=2} tau_k^{2+a_k+b_k} with delta = |rho(z)| + |rho(w)| + M(z,w),
/// for the first derivative along frame direction `direction` (0 = complex normal) on `side`.
EstimateFit derivative_probe(const KernelEvaluator& ev, const std::vector<PointPair>& pairs, DerivativeSide side,
                             int direction, const QuadratureSpec& spec);

/// inf |K(z,w)| mu(B(w, d(z,w))) over pairs with max(d(z,bOmega), d(w,bOmega)) <= kappa d(z,w) <= kappa eps0.
EstimateFit lower_bound_probe(const KernelEvaluator& ev, double kappa, double eps0, const std::vector<PointPair>& pairs,
                              const QuadratureSpec& spec);

/// max over pairs of |int K(z,w) K(w,u) dmu(w) - K(z,u)| / |K(z,u)|.
double reproducing_check(const KernelEvaluator& ev, const std::vector<PointPair>& pairs, const QuadratureSpec& spec);

}  // namespace berglab
