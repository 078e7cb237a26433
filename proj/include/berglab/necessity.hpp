#pragma once

#include <vector>

#include "berglab/kernels.hpp"
#include "berglab/quadrature.hpp"
#include "berglab/weights.hpp"

namespace berglab {

struct TwoBallSpec {
  /// B2 centres are scanned at quasi-distance t C R from the centre of B1, t in [0.5, 1.5].
  double C = 5.0;
  /// Separation d(zeta0, z) >= C2 d(zeta0, zeta) for z in B2, zeta in B1.
  double C2 = 4.0;
  /// Centre of B1 sits at boundary distance depth_fraction * R.
  double depth_fraction = 0.5;
  int scan_steps = 21;
  int grid_points = 64;
  QuadratureSpec ball_nodes = QuadratureSpec::uniform(20000, 31);
};

struct TwoBallResult {
  QuasiBall b1;
  QuasiBall b2;
  /// inf over the B2 grid of |P chi_B1(z)| / <chi_B1>_B1.
  double inf_constant = 0.0;
  /// Same with the roles of B1 and B2 exchanged.
  double inf_constant_swapped = 0.0;
  /// min d(zeta0, z) / (C2 max d(zeta0, zeta)); at least 1 for the chosen B2.
  double separation_margin = 0.0;
  double scan_t = 0.0;
};

/// Boundary-touching B1 of radius R and the nearest admissible B2 along the boundary (disk and ball).
TwoBallResult two_ball_lower_bound(const KernelEvaluator& ev, double R, const TwoBallSpec& spec);

struct NecessitySpec {
  TwoBallSpec two_ball;
  /// Nodes on B1 and B2 (stratified specs use depth floor R / 16 unless set).
  QuadratureSpec ball_nodes = QuadratureSpec::stratified(12, 8000, 33);
  /// Nodes for ||P f|| on the dilated ball B(zeta0, outer_dilation C R).
  QuadratureSpec outer = QuadratureSpec::stratified(12, 4000, 35);
  double outer_dilation = 4.0;
};

struct NecessityRow {
  double radius = 0.0;
  /// <sigma>_B1 (<sigma'>_B1)^{p-1}.
  double bp_product = 0.0;
  /// ||P f|| / ||f|| in L^p_sigma for f = chi_B2 and f = sigma' chi_B1 (norms of P f restricted to the dilated ball).
  double ratio_chi_b2 = 0.0;
  double ratio_dual_b1 = 0.0;
  double max_ratio = 0.0;
  double inf_constant = 0.0;
};

std::vector<NecessityRow> necessity_probe(const KernelEvaluator& ev, const Weight& sigma, double p,
                                          const std::vector<double>& radii, const NecessitySpec& spec);

}  // namespace berglab
