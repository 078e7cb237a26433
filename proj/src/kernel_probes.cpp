#include "berglab/kernel_probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "berglab/geometry_probes.hpp"
#include "berglab/parallel.hpp"

namespace berglab {

namespace {

constexpr std::uint64_t kPairStream = 0x9A12;

CPoint random_direction(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CPoint v(dim);
  for (int j = 0; j < dim; ++j) v[j] = cplx(g(rng), g(rng));
  return (1.0 / v.norm()) * v;
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo * std::exp(uniform01(rng) * std::log(hi / lo));
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

/// Per-sample statistic with an exclusion code.
struct Sample {
  double value = 0.0;
  double x = 0.0;
  int status = 0;  // 0 ok, 1 excluded, 2 flagged
};

struct Summary {
  std::vector<double> values, xs;
  std::vector<double> ordered;  // per input index, NaN when excluded or flagged
  std::int64_t excluded = 0, flagged = 0;
};

Summary collect(const std::vector<Sample>& samples) {
  Summary s;
  for (const auto& smp : samples) {
    s.ordered.push_back(smp.status == 0 ? smp.value : std::numeric_limits<double>::quiet_NaN());
    if (smp.status == 1) {
      ++s.excluded;
    } else if (smp.status == 2) {
      ++s.flagged;
    } else {
      s.values.push_back(smp.value);
      s.xs.push_back(smp.x);
    }
  }
  return s;
}

EstimateFit sup_fit(const Summary& s) {
  EstimateFit fit;
  fit.n_samples = static_cast<std::int64_t>(s.values.size());
  fit.n_excluded = s.excluded;
  fit.n_flagged = s.flagged;
  fit.per_sample = s.ordered;
  if (s.values.empty()) return fit;
  fit.constant = *std::max_element(s.values.begin(), s.values.end());
  const double med = median(s.values);
  fit.max_violation_ratio = med > 0.0 ? fit.constant / med : 0.0;
  return fit;
}

/// mu(B(c, r)); returns a negative value when the estimate is flagged.
double measure_or_flag(const Domain& domain, const CPoint& c, double r, const QuadratureSpec& spec,
                       std::uint64_t stream) {
  const auto est = quasi_ball_measure(domain, make_ball(domain, c, r), spec, stream);
  if (est.flagged || !(est.real() > 0.0)) return -1.0;
  return est.real();
}

QuadratureSpec mc_spec(const QuadratureSpec& spec) {
  QuadratureSpec s = spec;
  if (s.strategy == Strategy::PolarGauss || s.strategy == Strategy::GradedPolar) s.strategy = Strategy::UniformRejection;
  return s;
}

}  // namespace

namespace {

/// w at depth h_w and angular offset |1 - <u, v>| = a from z = (1 - h_z) u (disk/ball).
PointPair polar_pair(int n, std::mt19937_64& rng, double hz, double hw, double a) {
  const CPoint u = random_direction(n, rng);
  a = std::min(a, 2.0);
  // |1 - alpha| = a with |alpha| <= 1 requires cos(psi) >= a/2.
  const double psi_max = std::acos(std::min(1.0, a / 2.0));
  // For n >= 2 the distance to the edge |alpha| = 1 (pure complex-normal rotation) is log-uniform,
  // which is where the kernel is largest for a given d(z,w).
  const double side = uniform01(rng) < 0.5 ? -1.0 : 1.0;
  const double psi = n == 1 ? side * psi_max : side * psi_max * (1.0 - log_uniform(rng, 1e-4, 1.0));
  const cplx alpha = 1.0 - a * std::polar(1.0, psi);
  CPoint v = alpha * u;
  if (n == 1) {
    v = (1.0 / std::abs(alpha)) * v;
  } else {
    CPoint xi = random_direction(n, rng);
    xi -= inner(xi, u) * u;
    xi = (1.0 / xi.norm()) * xi;
    v += std::sqrt(std::max(0.0, 1.0 - std::norm(alpha))) * xi;
  }
  return {(1.0 - hz) * u, (1.0 - hw) * v};
}

}  // namespace

std::vector<PointPair> near_boundary_pairs(const Domain& domain, int n, std::uint64_t seed, double h_min,
                                           double h_max) {
  std::vector<PointPair> pairs(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    auto rng = substream(seed, kPairStream, i);
    if (domain.is_ball_like() && i % 4 != 0) {
      // Scale-adapted: depth of w and angular offset relative to the depth of z, log-uniform over
      // four decades each, so every relative configuration is sampled at comparable density.
      const double hz = log_uniform(rng, h_min, h_max);
      const double hw = std::min(0.5, hz * log_uniform(rng, 1e-2, 1e2));
      const double a = hz * log_uniform(rng, 1e-2, 1e2);
      pairs[i] = polar_pair(domain.dim(), rng, hz, hw, a);
      return;
    }
    const CPoint z = random_interior_point(domain, rng, h_min, h_max);
    CPoint w;
    if (i % 2 == 0) {
      w = random_interior_point(domain, rng, h_min, h_max);
    } else {
      do {
        w = z + log_uniform(rng, 1e-3, 0.3) * random_direction(domain.dim(), rng);
      } while (!domain.contains(w));
    }
    pairs[i] = {z, w};
  });
  return pairs;
}

std::vector<PointPair> separated_pairs(const Domain& domain, const std::vector<double>& radii, double kappa,
                                       int per_radius, std::uint64_t seed) {
  if (!domain.is_ball_like()) throw std::invalid_argument("separated_pairs: disk or ball only");
  std::vector<PointPair> pairs(radii.size() * per_radius);
  parallel_for(pairs.size(), [&](std::size_t i) {
    auto rng = substream(seed, kPairStream + 1, i);
    const double r = radii[i / per_radius];
    const double h1 = uniform01(rng) * kappa * r;
    const double h2 = uniform01(rng) * kappa * r;
    pairs[i] = polar_pair(domain.dim(), rng, h1, h2, r - std::abs(h1 - h2));
  });
  return pairs;
}

EstimateFit size_probe(const KernelEvaluator& ev, const std::vector<PointPair>& pairs, const QuadratureSpec& spec) {
  const Domain& D = ev.domain();
  const QuadratureSpec s = mc_spec(spec);
  std::vector<Sample> samples(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto& [z, w] = pairs[i];
    Sample& out = samples[i];
    const double r = distance(D, z, w);
    if (!(r > 0.0)) {
      out.status = 1;
      return;
    }
    const auto k = ev.evaluate(z, w);
    const double mu = measure_or_flag(D, z, r, s, i);
    if (k.flagged || mu < 0.0) {
      out.status = 2;
      return;
    }
    out.value = std::abs(k.value) * mu;
  });
  return sup_fit(collect(samples));
}

EstimateFit smoothness_probe(const KernelEvaluator& ev, const std::vector<PointPair>& pairs, double C2,
                             const QuadratureSpec& spec) {
  if (!(C2 >= 1.0)) throw std::invalid_argument("smoothness_probe: C2 must be >= 1");
  const Domain& D = ev.domain();
  const QuadratureSpec s = mc_spec(spec);
  std::vector<Sample> samples(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    auto rng = substream(spec.seed, kPairStream + 2, i);
    const auto& [z, w] = pairs[i];
    Sample& out = samples[i];
    const double dzw = distance(D, z, w);
    const double t = log_uniform(rng, 1e-3, 1.0);
    const CPoint dir = random_direction(D.dim(), rng);
    if (!(dzw > 0.0)) {
      out.status = 1;
      return;
    }
    // Geometric bisection for z' = z + eps dir at quasi-distance t d(z,w) / C2.
    const double target = t * dzw / C2;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
      const CPoint zp = z + mid * dir;
      if (D.contains(zp) && distance(D, z, zp) < target) {
        lo = mid;
      } else {
        hi = mid;
      }
      if (lo > 0.0 && hi < lo * (1.0 + 1e-6)) break;
    }
    const CPoint zp = z + lo * dir;
    const double dzz = distance(D, z, zp);
    if (!(lo > 0.0) || !(dzz > 0.0) || dzw < C2 * dzz) {
      out.status = 1;
      return;
    }
    const auto k1 = ev.evaluate(z, w);
    const auto k2 = ev.evaluate(zp, w);
    const double mu = measure_or_flag(D, z, dzw, s, i);
    if (k1.flagged || k2.flagged || mu < 0.0) {
      out.status = 2;
      return;
    }
    out.value = std::abs(k1.value - k2.value) * mu;
    out.x = dzz / dzw;
  });
  Summary sum = collect(samples);
  EstimateFit fit;
  fit.n_samples = static_cast<std::int64_t>(sum.values.size());
  fit.n_excluded = sum.excluded;
  fit.n_flagged = sum.flagged;
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < sum.values.size(); ++k)
    if (sum.values[k] > 0.0) {
      lx.push_back(std::log(sum.xs[k]));
      ly.push_back(std::log(sum.values[k]));
    }
  if (lx.size() < 3) throw std::runtime_error("smoothness_probe: too few admissible triples");
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) sx += lx[k], sy += ly[k], sxx += lx[k] * lx[k], sxy += lx[k] * ly[k];
  fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  std::vector<double> c(lx.size());
  for (std::size_t k = 0; k < lx.size(); ++k) c[k] = std::exp(ly[k] - fit.exponent * lx[k]);
  fit.constant = *std::max_element(c.begin(), c.end());
  const double med = median(c);
  fit.max_violation_ratio = med > 0.0 ? fit.constant / med : 0.0;
  return fit;
}

EstimateFit boundary_size_probe(const KernelEvaluator& ev, const std::vector<PointPair>& pairs,
                                const QuadratureSpec& spec) {
  const Domain& D = ev.domain();
  const QuadratureSpec s = mc_spec(spec);
  std::vector<Sample> samples(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto& [z, w] = pairs[i];
    Sample& out = samples[i];
    const auto k = ev.evaluate(z, w);
    const double mz = measure_or_flag(D, z, boundary_distance(D, z).value, s, 2 * i);
    const double mw = measure_or_flag(D, w, boundary_distance(D, w).value, s, 2 * i + 1);
    if (k.flagged || mz < 0.0 || mw < 0.0) {
      out.status = 2;
      return;
    }
    out.value = std::abs(k.value) * std::max(mz, mw);
  });
  return sup_fit(collect(samples));
}

EstimateFit derivative_probe(const KernelEvaluator& ev, const std::vector<PointPair>& pairs, DerivativeSide side,
                             int direction, const QuadratureSpec& spec) {
  const Domain& D = ev.domain();
  if (direction < 0 || direction >= D.dim()) throw std::out_of_range("derivative_probe: direction out of range");
  (void)spec;
  const GeometryConfig cfg;
  std::vector<Sample> samples(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto& [z, w] = pairs[i];
    Sample& out = samples[i];
    if (z == w) {
      out.status = 1;
      return;
    }
    const auto M = polydisc_quasi_distance(D, z, w, cfg);
    const double delta = std::abs(D.rho(z)) + std::abs(D.rho(w)) + M.value;
    if (M.flagged || !(delta < cfg.delta_max)) {
      out.status = 1;
      return;
    }
    const PolydiscFrame frame = polydisc_frame(D, z, delta, cfg);
    double weight = 1.0;
    for (int k = 0; k < D.dim(); ++k) {
      const int order = (side != DerivativeSide::None && k == direction) ? 3 : 2;
      weight *= std::pow(frame.tau[k], order);
    }
    double magnitude = 0.0;
    bool flagged = false;
    if (side == DerivativeSide::None) {
      const auto k = ev.evaluate(z, w);
      magnitude = std::abs(k.value);
      flagged = k.flagged;
    } else {
      const CPoint base = side == DerivativeSide::Z ? z : w;
      const double h = 1e-2 * std::min(delta, D.euclidean_boundary_distance(base));
      const CPoint step = h * frame.basis.dirs[direction];
      const CPoint plus = base + step, minus = base - step;
      if (!(h > 1e-13) || !D.contains(plus) || !D.contains(minus)) {
        out.status = 2;
        return;
      }
      const auto kp = side == DerivativeSide::Z ? ev.evaluate(plus, w) : ev.evaluate(z, plus);
      const auto km = side == DerivativeSide::Z ? ev.evaluate(minus, w) : ev.evaluate(z, minus);
      // Real directional difference equals the complex derivative (holomorphic in z, antiholomorphic in w).
      magnitude = std::abs(kp.value - km.value) / (2.0 * h);
      flagged = kp.flagged || km.flagged;
    }
    if (flagged) {
      out.status = 2;
      return;
    }
    out.value = magnitude * weight;
  });
  return sup_fit(collect(samples));
}

EstimateFit lower_bound_probe(const KernelEvaluator& ev, double kappa, double eps0, const std::vector<PointPair>& pairs,
                              const QuadratureSpec& spec) {
  const Domain& D = ev.domain();
  const QuadratureSpec s = mc_spec(spec);
  std::vector<Sample> samples(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto& [z, w] = pairs[i];
    Sample& out = samples[i];
    const double r = distance(D, z, w);
    const double depth = std::max(boundary_distance(D, z).value, boundary_distance(D, w).value);
    if (!(r > 0.0) || r > eps0 || depth > kappa * r) {
      out.status = 1;
      return;
    }
    const auto k = ev.evaluate(z, w);
    const double mu = measure_or_flag(D, w, r, s, i);
    if (k.flagged || mu < 0.0) {
      out.status = 2;
      return;
    }
    out.value = std::abs(k.value) * mu;
  });
  const Summary sum = collect(samples);
  if (sum.values.empty()) throw std::runtime_error("lower_bound_probe: no admissible pairs");
  EstimateFit fit;
  fit.n_samples = static_cast<std::int64_t>(sum.values.size());
  fit.n_excluded = sum.excluded;
  fit.n_flagged = sum.flagged;
  fit.per_sample = sum.ordered;
  fit.constant = *std::min_element(sum.values.begin(), sum.values.end());
  const double med = median(sum.values);
  fit.max_violation_ratio = fit.constant > 0.0 ? med / fit.constant : std::numeric_limits<double>::infinity();
  return fit;
}

double sup_over_prefix(const std::vector<double>& per_sample, std::size_t n) {
  double best = 0.0;
  for (std::size_t i = 0; i < std::min(n, per_sample.size()); ++i)
    if (!std::isnan(per_sample[i])) best = std::max(best, per_sample[i]);
  return best;
}

double inf_over_prefix(const std::vector<double>& per_sample, std::size_t n) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < std::min(n, per_sample.size()); ++i)
    if (!std::isnan(per_sample[i])) best = std::min(best, per_sample[i]);
  return best;
}

double reproducing_check(const KernelEvaluator& ev, const std::vector<PointPair>& pairs, const QuadratureSpec& spec) {
  const Domain& D = ev.domain();
  const PointSet nodes = sample_domain(D, spec);
  double worst = 0.0;
  for (const auto& [z, u] : pairs) {
    const auto est =
        integrate_points(nodes, [&](const CPoint& w) { return ev(z, w) * ev(w, u); }, spec.rel_tolerance);
    const cplx target = ev(z, u);
    worst = std::max(worst, std::abs(est.value - target) / std::abs(target));
  }
  return worst;
}

}  // namespace berglab
