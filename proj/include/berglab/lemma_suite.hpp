#pragma once

#include <cstdint>

#include "berglab/maximal.hpp"
#include "berglab/quadrature.hpp"

namespace berglab {

struct LemmaSuiteSpec {
  /// Triangle constant of the quasi-metric (1 on the disk).
  double C_d = 1.0;
  int n_instances = 200;
  std::uint64_t seed = 1;
  /// Nodes for each R_k average.
  QuadratureSpec regularizer = QuadratureSpec::uniform(128, 21);
  /// Domain nodes for the integrals of the switching lemma.
  QuadratureSpec outer = QuadratureSpec::stratified(8, 512, 23);
  MaximalFamilySpec family{10, 1};
  QuadratureSpec family_balls = QuadratureSpec::uniform(64, 25);
  int containment_pairs = 2000;
};

struct LemmaStat {
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  double max_abs_log = 0.0;
  int n = 0;
  int n_nonfinite = 0;
};

struct LemmaSuiteReport {
  double k = 0.0;
  double k_prime = 0.0;
  /// Inflation factor of the inflated containment check, C_d (1 + 2 C_d).
  double alpha = 0.0;
  /// M f(z0) / M(R_k f)(z0).
  LemmaStat maximal_inside;
  /// int f R_k g / int R_k' f g.
  LemmaStat switching;
  /// R_k(M g)(z) / M g(z).
  LemmaStat maximal_outside;
  int containment_pairs = 0;
  int containment_holds = 0;
  int inflated_containment_pairs = 0;
  int inflated_containment_holds = 0;
};

/// Random (f, g, z0) instances for the regularizer lemmas plus point-sampled containment checks.
LemmaSuiteReport regularizer_lemma_suite(const Domain& domain, double k, const LemmaSuiteSpec& spec);

}  // namespace berglab
