#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "berglab/geometry.hpp"
#include "berglab/kernels.hpp"
#include "berglab/maximal.hpp"
#include "berglab/quadrature.hpp"
#include "berglab/weights.hpp"

namespace berglab {

enum class TestFunctionKind { HoloPoly, AntiHolo, IndicatorBall, WeightedIndicator, RandomBump, Constant };
std::string to_string(TestFunctionKind k);

/// Monomial c z^alpha of a holomorphic polynomial; unused exponents are zero.
struct Monomial {
  cplx coeff;
  std::array<int, CPoint::kMaxDim> alpha{};
};

class TestFunction {
 public:
  static TestFunction holo_poly(std::vector<Monomial> terms);
  /// conj(w_j)^k.
  static TestFunction anti_holo(int k, int coordinate = 0);
  static TestFunction indicator_ball(const Domain& domain, const QuasiBall& ball);
  /// sigma'(w) chi_B(w).
  static TestFunction weighted_indicator(const Domain& domain, const Weight& dual, const QuasiBall& ball);
  /// a exp(-|w - c|^2 / s^2) with centre at a seeded depth in [0.05, 0.5] and s log-uniform in [0.15, 0.4].
  static TestFunction random_bump(const Domain& domain, std::uint64_t seed);
  static TestFunction constant(cplx value);

  cplx operator()(const CPoint& w) const { return eval_(w); }
  TestFunctionKind kind() const { return kind_; }
  const std::string& tag() const { return tag_; }
  /// Support ball for the indicator kinds.
  const std::optional<QuasiBall>& support() const { return support_; }
  bool nonnegative() const { return nonnegative_; }
  TestFunction scaled(double factor) const;

 private:
  TestFunction(std::function<cplx(const CPoint&)> f, TestFunctionKind kind, std::string tag, bool nonneg)
      : eval_(std::move(f)), kind_(kind), tag_(std::move(tag)), nonnegative_(nonneg) {}
  std::function<cplx(const CPoint&)> eval_;
  TestFunctionKind kind_;
  std::string tag_;
  std::optional<QuasiBall> support_;
  bool nonnegative_ = false;
};

/// Seeded mixed bundle: bumps, indicators of boundary-touching balls, holomorphic polynomials and
/// antiholomorphic monomials. With nonnegative_only the last two kinds are replaced by bumps.
std::vector<TestFunction> random_bundle(const Domain& domain, int n, std::uint64_t seed, bool nonnegative_only = false);

/// Inner nodes for w -> K(z, w): graded panels focused at z on the disk for GradedPolar, the
/// tensor rule for PolarGauss, seeded Monte Carlo otherwise.
PointSet projection_nodes(const Domain& domain, const CPoint& z, const QuadratureSpec& spec, std::uint64_t stream = 0);

/// P f(z) = int K(z, w) f(w) dmu(w). Deterministic rules are cross-checked against half the nodes.
IntegralEstimate bergman_project(const KernelEvaluator& ev, const TestFunction& f, const CPoint& z,
                                 const QuadratureSpec& spec);
/// P+ f(z) = int |K(z, w)| f(w) dmu(w).
IntegralEstimate positive_project(const KernelEvaluator& ev, const TestFunction& f, const CPoint& z,
                                  const QuadratureSpec& spec);

/// P f_i(z) (or P+ f_i(z)) for a bundle on shared nodes.
std::vector<cplx> project_bundle(const KernelEvaluator& ev, const std::vector<TestFunction>& fs, const CPoint& z,
                                 const PointSet& nodes, bool positive);

enum class OperatorTag { P, PPlus, M };
std::string to_string(OperatorTag t);
OperatorTag operator_from_string(const std::string& s);

struct NormRatioReport {
  double sup_ratio = 0.0;
  int argmax = -1;
  /// Per bundle member; NaN for excluded members.
  std::vector<double> ratios;
  int n_excluded = 0;
  int n_probe_points = 0;
};

struct NormRatioSpec {
  /// Probe grid: nodes of this spec over the domain (PolarGauss recommended).
  QuadratureSpec outer = QuadratureSpec::polar_gauss(32, 64);
  /// Inner rule for P and P+.
  QuadratureSpec inner = QuadratureSpec::graded(1, 6);
  /// Family and per-ball rule for M.
  MaximalFamilySpec family;
  QuadratureSpec family_balls = QuadratureSpec::uniform(256, 7);
};

/// max over the bundle of ||T f||_{L^p_sigma} / ||f||_{L^p_sigma}, both norms on the probe grid.
NormRatioReport weighted_norm_ratio(OperatorTag op, const KernelEvaluator& ev, const Weight& sigma, double p,
                                    const std::vector<TestFunction>& bundle, const NormRatioSpec& spec);

struct GoodLambdaSpec {
  /// sigma-measure nodes over the domain.
  QuadratureSpec outer = QuadratureSpec::stratified(12, 20000, 11);
  /// Nodes for P+ f: seeded Monte Carlo on the support ball when f is an indicator, else the domain.
  QuadratureSpec inner = QuadratureSpec::uniform(20000, 13);
  MaximalFamilySpec family;
  QuadratureSpec family_balls = QuadratureSpec::uniform(256, 17);
  double m_used = 2.0;
};

struct GoodLambdaReport {
  std::vector<double> gamma_grid;
  std::vector<double> lambda_grid;
  /// ratio_table[g][l] = sigma(E_{2 lambda, gamma}) / sigma(E_lambda); NaN for undefined cells.
  std::vector<std::vector<double>> ratio_table;
  std::vector<std::vector<double>> se_table;
  /// Ratio per gamma averaged over the defined lambda cells (NaN when none is defined).
  std::vector<double> mean_ratio;
  std::vector<double> mean_se;
  double fitted_exponent = 0.0;
  double fitted_C = 0.0;
  int fit_points = 0;
  double m_used = 2.0;
};

/// Checks sigma({P+ f > 2 lambda, M f <= gamma lambda}) <= C gamma^delta sigma({P+ f > lambda}) on
/// sampled level sets. Cells with an empty superlevel set are undefined.
GoodLambdaReport good_lambda_experiment(const KernelEvaluator& ev, const TestFunction& f, const Weight& sigma,
                                        double p, const std::vector<double>& gamma_grid,
                                        const std::vector<double>& lambda_grid, const GoodLambdaSpec& spec);

}  // namespace berglab
