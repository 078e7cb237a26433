#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "berglab/geometry.hpp"
#include "berglab/quadrature.hpp"

namespace berglab {

/// Interior point at Euclidean-scaled depth h along a ray: z = (1 - h) * (boundary point of the
/// ray through a uniformly drawn domain point). h is drawn log-uniformly in [h_min, h_max].
CPoint random_interior_point(const Domain& domain, std::mt19937_64& rng, double h_min = 1e-4, double h_max = 1.0);

/// Lebesgue measure of the quasi-ball.
IntegralEstimate quasi_ball_measure(const Domain& domain, const QuasiBall& ball, const QuadratureSpec& spec,
                                    std::uint64_t stream = 0);

/// max d(z,w)/(d(z,u)+d(u,w)) over seeded triples (half local, half global).
double triangle_constant_probe(const Domain& domain, std::int64_t n_triples, std::uint64_t seed);

struct HomogeneityFit {
  double c0 = 1.0;
  double m = 0.0;
  int n_points = 0;
  int n_flagged = 0;
};

/// Least squares of log mu(lambda B) - log mu(B) on log lambda (with intercept); c0 is the
/// smallest constant >= 1 with mu(lambda B) <= c0 lambda^m mu(B) on the sample.
HomogeneityFit homogeneity_fit(const Domain& domain, const std::vector<QuasiBall>& family,
                               const std::vector<double>& lambdas, const QuadratureSpec& spec);

struct EngulfingResult {
  /// Empty when P(q1,delta) and P(q2,delta) do not meet on the sample.
  std::optional<double> C;
  double D = 1.0;
};

EngulfingResult engulfing_probe(const Domain& domain, const CPoint& q1, const CPoint& q2, double delta,
                                std::int64_t n_samples, std::uint64_t seed = 1);

/// mu({z in B0 : d(z, bOmega) <= s R0}) / mu(B0), with jackknife error.
IntegralEstimate boundary_slab_measure(const Domain& domain, const QuasiBall& B0, double s, const QuadratureSpec& spec,
                                       std::uint64_t stream = 0);

struct RatioRange {
  double min = 0.0;
  double max = 0.0;
  int n = 0;
};

/// boundary_distance / Euclidean boundary distance over seeded near-boundary points.
RatioRange comparability_probe(const Domain& domain, int n_points, std::uint64_t seed, double h_max = 0.1);

/// max |rho(z) - rho(q)| / delta over points of P(q,delta) for seeded q and delta in deltas.
double defining_function_probe(const Domain& domain, const std::vector<double>& deltas, int n_centers,
                               int points_per_frame, std::uint64_t seed);

/// max d(z,bOmega) / (d(z',bOmega) + d(z,z')) over seeded pairs.
double boundary_subadditivity_probe(const Domain& domain, int n_pairs, std::uint64_t seed);

}  // namespace berglab
