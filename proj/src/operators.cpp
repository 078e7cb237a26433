#include "berglab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "berglab/geometry_probes.hpp"
#include "berglab/parallel.hpp"

namespace berglab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo * std::exp(std::log(hi / lo) * uniform01(rng));
}

cplx normal_cplx(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const double re = g(rng);
  return {re, g(rng)};
}

QuadratureSpec half_rule(const QuadratureSpec& spec) {
  QuadratureSpec h = spec;
  if (spec.strategy == Strategy::PolarGauss) {
    h.radial_nodes = std::max(1, spec.radial_nodes / 2);
    h.angular_nodes = std::max(1, spec.angular_nodes / 2);
  } else {
    h.angular_nodes = std::max(2, spec.angular_nodes / 2);
  }
  return h;
}

IntegralEstimate project_single(const KernelEvaluator& ev, const TestFunction& f, const CPoint& z,
                                const QuadratureSpec& spec, bool positive) {
  const Domain& d = ev.domain();
  d.check_point(z);
  if (!d.contains(z)) throw std::invalid_argument("projection: z must be interior");
  const Integrand g = [&](const CPoint& w) {
    const cplx k = ev(z, w);
    return (positive ? cplx(std::abs(k)) : k) * f(w);
  };
  IntegralEstimate est = integrate_points(projection_nodes(d, z, spec), g, spec.rel_tolerance);
  if (spec.strategy == Strategy::PolarGauss || spec.strategy == Strategy::GradedPolar) {
    const IntegralEstimate coarse = integrate_points(projection_nodes(d, z, half_rule(spec)), g, spec.rel_tolerance);
    est.std_error = std::abs(est.value - coarse.value);
    est.flagged = quality_flag(std::abs(est.value), est.std_error, spec.rel_tolerance) || est.nonfinite_count > 0;
  }
  return est;
}

}  // namespace

std::string to_string(TestFunctionKind k) {
  switch (k) {
    case TestFunctionKind::HoloPoly:
      return "holo_poly";
    case TestFunctionKind::AntiHolo:
      return "anti_holo";
    case TestFunctionKind::IndicatorBall:
      return "indicator_ball";
    case TestFunctionKind::WeightedIndicator:
      return "weighted_indicator";
    case TestFunctionKind::RandomBump:
      return "random_bump";
    case TestFunctionKind::Constant:
      return "constant";
  }
  return "unknown";
}

TestFunction TestFunction::holo_poly(std::vector<Monomial> terms) {
  std::ostringstream tag;
  tag << "holo_poly(" << terms.size() << " terms)";
  auto f = [terms = std::move(terms)](const CPoint& w) {
    cplx s = 0.0;
    for (const auto& t : terms) {
      cplx m = t.coeff;
      for (int j = 0; j < w.dim(); ++j)
        if (t.alpha[j] > 0) m *= std::pow(w[j], t.alpha[j]);
      s += m;
    }
    return s;
  };
  return TestFunction(std::move(f), TestFunctionKind::HoloPoly, tag.str(), false);
}

TestFunction TestFunction::anti_holo(int k, int coordinate) {
  if (k < 1 || coordinate < 0 || coordinate >= CPoint::kMaxDim) throw std::invalid_argument("anti_holo: bad exponent");
  auto f = [k, coordinate](const CPoint& w) { return std::pow(std::conj(w[coordinate]), k); };
  return TestFunction(std::move(f), TestFunctionKind::AntiHolo,
                      "anti_holo(k=" + std::to_string(k) + ",j=" + std::to_string(coordinate) + ")", false);
}

TestFunction TestFunction::indicator_ball(const Domain& domain, const QuasiBall& ball) {
  if (!domain.contains(ball.center)) throw std::invalid_argument("indicator_ball: centre outside the domain");
  auto f = [domain, ball](const CPoint& w) { return cplx(ball.contains(domain, w) ? 1.0 : 0.0); };
  TestFunction t(std::move(f), TestFunctionKind::IndicatorBall, "indicator_ball", true);
  t.support_ = ball;
  return t;
}

TestFunction TestFunction::weighted_indicator(const Domain& domain, const Weight& dual, const QuasiBall& ball) {
  if (!domain.contains(ball.center)) throw std::invalid_argument("weighted_indicator: centre outside the domain");
  auto f = [domain, dual, ball](const CPoint& w) { return cplx(ball.contains(domain, w) ? dual(w) : 0.0); };
  TestFunction t(std::move(f), TestFunctionKind::WeightedIndicator, "weighted_indicator(" + dual.tag() + ")", true);
  t.support_ = ball;
  return t;
}

TestFunction TestFunction::random_bump(const Domain& domain, std::uint64_t seed) {
  auto rng = substream(seed, 0xB4, 0);
  const CPoint c = random_interior_point(domain, rng, 0.05, 0.5);
  const double s = log_uniform(rng, 0.15, 0.4);
  const double a = log_uniform(rng, 0.5, 2.0);
  auto f = [c, s, a](const CPoint& w) { return cplx(a * std::exp(-(w - c).norm2() / (s * s))); };
  return TestFunction(std::move(f), TestFunctionKind::RandomBump, "random_bump(seed=" + std::to_string(seed) + ")",
                      true);
}

TestFunction TestFunction::constant(cplx value) {
  auto f = [value](const CPoint&) { return value; };
  const bool nonneg = value.imag() == 0.0 && value.real() >= 0.0;
  return TestFunction(std::move(f), TestFunctionKind::Constant, "constant", nonneg);
}

TestFunction TestFunction::scaled(double factor) const {
  TestFunction t = *this;
  t.eval_ = [g = eval_, factor](const CPoint& w) { return factor * g(w); };
  t.nonnegative_ = nonnegative_ && factor >= 0.0;
  return t;
}

std::vector<TestFunction> random_bundle(const Domain& domain, int n, std::uint64_t seed, bool nonnegative_only) {
  if (n < 1) throw std::invalid_argument("random_bundle: n must be positive");
  std::vector<TestFunction> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    auto rng = substream(seed, 0xB0D1E, static_cast<std::uint64_t>(i));
    int kind = i % 4;
    if (nonnegative_only && kind >= 2) kind = 0;
    if (kind == 0) {
      out.push_back(TestFunction::random_bump(domain, seed * 1000003ULL + i));
    } else if (kind == 1) {
      const CPoint c = random_interior_point(domain, rng, 0.1, 0.3);
      const double h = boundary_distance(domain, c).value;
      out.push_back(TestFunction::indicator_ball(domain, {c, h * log_uniform(rng, 1.2, 3.0), canonical_metric(domain)}));
    } else if (kind == 2) {
      std::vector<Monomial> terms;
      const int deg = 1 + static_cast<int>(uniform01(rng) * 4.0);
      for (int a = 0; a <= deg; ++a)
        for (int b = 0; b <= (domain.dim() > 1 ? deg - a : 0); ++b) {
          Monomial m{normal_cplx(rng), {}};
          m.alpha[0] = a;
          if (domain.dim() > 1) m.alpha[1] = b;
          terms.push_back(m);
        }
      out.push_back(TestFunction::holo_poly(std::move(terms)));
    } else {
      const int k = 1 + static_cast<int>(uniform01(rng) * 3.0);
      const int j = static_cast<int>(uniform01(rng) * domain.dim());
      out.push_back(TestFunction::anti_holo(k, j));
    }
  }
  return out;
}

PointSet projection_nodes(const Domain& domain, const CPoint& z, const QuadratureSpec& spec, std::uint64_t stream) {
  switch (spec.strategy) {
    case Strategy::GradedPolar:
      if (domain.kind() != DomainKind::UnitDisk) throw std::invalid_argument("graded projection rule: disk only");
      return graded_polar_rule(z, spec.radial_nodes, spec.angular_nodes);
    case Strategy::PolarGauss:
      return polar_gauss_rule(domain, spec.radial_nodes, spec.angular_nodes);
    default:
      return sample_region(domain, whole_domain_region(domain), spec, stream);
  }
}

IntegralEstimate bergman_project(const KernelEvaluator& ev, const TestFunction& f, const CPoint& z,
                                 const QuadratureSpec& spec) {
  return project_single(ev, f, z, spec, false);
}

IntegralEstimate positive_project(const KernelEvaluator& ev, const TestFunction& f, const CPoint& z,
                                  const QuadratureSpec& spec) {
  IntegralEstimate e = project_single(ev, f, z, spec, true);
  e.value = e.value.real();
  return e;
}

std::vector<cplx> project_bundle(const KernelEvaluator& ev, const std::vector<TestFunction>& fs, const CPoint& z,
                                 const PointSet& nodes, bool positive) {
  std::vector<cplx> out(fs.size(), 0.0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    cplx k = ev(z, nodes.points[i]) * nodes.weights[i];
    if (positive) k = std::abs(k);
    for (std::size_t f = 0; f < fs.size(); ++f) out[f] += k * fs[f](nodes.points[i]);
  }
  return out;
}

std::string to_string(OperatorTag t) {
  switch (t) {
    case OperatorTag::P:
      return "P";
    case OperatorTag::PPlus:
      return "P+";
    case OperatorTag::M:
      return "M";
  }
  return "unknown";
}

OperatorTag operator_from_string(const std::string& s) {
  if (s == "P") return OperatorTag::P;
  if (s == "P+" || s == "Pplus") return OperatorTag::PPlus;
  if (s == "M") return OperatorTag::M;
  throw std::invalid_argument("unknown operator tag: " + s);
}

NormRatioReport weighted_norm_ratio(OperatorTag op, const KernelEvaluator& ev, const Weight& sigma, double p,
                                    const std::vector<TestFunction>& bundle, const NormRatioSpec& spec) {
  if (bundle.empty()) throw std::invalid_argument("weighted_norm_ratio: empty bundle");
  if (!(p > 1.0)) throw std::invalid_argument("weighted_norm_ratio: p must exceed 1");
  const Domain& d = ev.domain();
  const PointSet probe = sample_domain(d, spec.outer);
  const std::size_t nf = bundle.size();
  const std::size_t np = probe.size();
  std::vector<cplx> tf(np * nf);

  std::optional<MaximalFamily> family;
  std::optional<MaximalEvaluator> maximal;
  if (op == OperatorTag::M) {
    family.emplace(d, spec.family, spec.family_balls);
    std::vector<Integrand> fs;
    for (const auto& f : bundle) fs.push_back([f](const CPoint& w) { return f(w); });
    maximal.emplace(*family, std::move(fs));
  }
  parallel_for(np, [&](std::size_t i) {
    const CPoint& z = probe.points[i];
    if (op == OperatorTag::M) {
      const auto v = (*maximal)(z);
      for (std::size_t f = 0; f < nf; ++f) tf[i * nf + f] = v[f];
    } else {
      const PointSet inner = projection_nodes(d, z, spec.inner, i);
      const auto v = project_bundle(ev, bundle, z, inner, op == OperatorTag::PPlus);
      for (std::size_t f = 0; f < nf; ++f) tf[i * nf + f] = v[f];
    }
  });

  NormRatioReport rep;
  rep.n_probe_points = static_cast<int>(np);
  rep.ratios.assign(nf, kNaN);
  for (std::size_t f = 0; f < nf; ++f) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
      const double w = probe.weights[i] * sigma(probe.points[i]);
      num += w * std::pow(std::abs(tf[i * nf + f]), p);
      den += w * std::pow(std::abs(bundle[f](probe.points[i])), p);
    }
    if (!(den > 0.0) || !std::isfinite(den) || !std::isfinite(num)) {
      ++rep.n_excluded;
      continue;
    }
    const double r = std::pow(num / den, 1.0 / p);
    rep.ratios[f] = r;
    if (rep.argmax < 0 || r > rep.sup_ratio) rep.sup_ratio = r, rep.argmax = static_cast<int>(f);
  }
  return rep;
}

GoodLambdaReport good_lambda_experiment(const KernelEvaluator& ev, const TestFunction& f, const Weight& sigma,
                                        double /*p*/, const std::vector<double>& gamma_grid,
                                        const std::vector<double>& lambda_grid, const GoodLambdaSpec& spec) {
  if (gamma_grid.empty() || lambda_grid.empty()) throw std::invalid_argument("good_lambda: empty grid");
  for (double v : gamma_grid)
    if (!(v > 0.0)) throw std::invalid_argument("good_lambda: gamma must be positive");
  for (double v : lambda_grid)
    if (!(v > 0.0)) throw std::invalid_argument("good_lambda: lambda must be positive");
  const Domain& d = ev.domain();

  const PointSet inner = f.support()
                             ? sample_region(d, bounding_region(d, *f.support()), spec.inner, 0x600D,
                                             [&](const CPoint& w) { return f.support()->contains(d, w); })
                             : sample_region(d, whole_domain_region(d), spec.inner, 0x600D);
  std::vector<double> fw(inner.size());
  for (std::size_t j = 0; j < inner.size(); ++j) {
    const cplx v = f(inner.points[j]);
    if (v.real() < 0.0 || std::abs(v.imag()) > 0.0) throw std::invalid_argument("good_lambda: f must be nonnegative");
    fw[j] = v.real() * inner.weights[j];
  }

  const PointSet outer = sample_domain(d, spec.outer);
  const std::size_t n = outer.size();
  std::vector<double> pplus(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t j = 0; j < inner.size(); ++j)
      if (fw[j] != 0.0) s += std::abs(ev(outer.points[i], inner.points[j])) * fw[j];
    pplus[i] = s;
  });

  // M f is only needed where P+ f exceeds the smallest 2 lambda.
  const double lambda_min = *std::min_element(lambda_grid.begin(), lambda_grid.end());
  std::vector<double> mf(n, kNaN);
  const MaximalFamily family(d, spec.family, spec.family_balls);
  const MaximalEvaluator maximal(family, {[&f](const CPoint& w) { return f(w); }});
  parallel_for(n, [&](std::size_t i) {
    if (pplus[i] > 2.0 * lambda_min) mf[i] = maximal(outer.points[i])[0];
  });

  GoodLambdaReport rep;
  rep.gamma_grid = gamma_grid;
  rep.lambda_grid = lambda_grid;
  rep.m_used = spec.m_used;
  const std::size_t ng = gamma_grid.size(), nl = lambda_grid.size();
  rep.ratio_table.assign(ng, std::vector<double>(nl, kNaN));
  rep.se_table.assign(ng, std::vector<double>(nl, kNaN));
  rep.mean_ratio.assign(ng, kNaN);
  rep.mean_se.assign(ng, kNaN);

  for (std::size_t g = 0; g < ng; ++g) {
    // Quantities per lambda: numerator then denominator.
    BlockSums sums(static_cast<int>(2 * nl), outer.n_blocks);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = outer.weights[i] * sigma(outer.points[i]);
      for (std::size_t l = 0; l < nl; ++l) {
        const double lam = lambda_grid[l];
        if (pplus[i] > lam) sums.add(static_cast<int>(2 * l + 1), outer.blocks[i], w);
        if (pplus[i] > 2.0 * lam && mf[i] <= gamma_grid[g] * lam) sums.add(static_cast<int>(2 * l), outer.blocks[i], w);
      }
    }
    std::vector<std::size_t> defined;
    for (std::size_t l = 0; l < nl; ++l) {
      if (!(sums.total(static_cast<int>(2 * l + 1)) > 0.0)) continue;
      defined.push_back(l);
      auto ratio = [l](std::span<const double> t) { return t[2 * l + 1] > 0.0 ? t[2 * l] / t[2 * l + 1] : 0.0; };
      rep.ratio_table[g][l] = ratio(sums.totals());
      rep.se_table[g][l] = sums.jackknife_se(ratio);
    }
    if (defined.empty()) continue;
    auto mean = [&defined](std::span<const double> t) {
      double s = 0.0;
      for (auto l : defined) s += t[2 * l + 1] > 0.0 ? t[2 * l] / t[2 * l + 1] : 0.0;
      return s / static_cast<double>(defined.size());
    };
    rep.mean_ratio[g] = mean(sums.totals());
    rep.mean_se[g] = sums.jackknife_se(mean);
  }

  // log-log regression of the lambda-averaged ratio against gamma over positive cells.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (std::size_t g = 0; g < ng; ++g) {
    if (!(rep.mean_ratio[g] > 0.0)) continue;
    const double x = std::log(gamma_grid[g]), y = std::log(rep.mean_ratio[g]);
    sx += x, sy += y, sxx += x * x, sxy += x * y, ++k;
  }
  rep.fit_points = k;
  if (k >= 2 && sxx * k - sx * sx > 0.0) {
    rep.fitted_exponent = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    rep.fitted_C = std::exp((sy - rep.fitted_exponent * sx) / k);
  } else {
    rep.fitted_exponent = kNaN;
    rep.fitted_C = kNaN;
  }
  return rep;
}

}  // namespace berglab
