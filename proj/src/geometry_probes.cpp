#include "berglab/geometry_probes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "berglab/parallel.hpp"

namespace berglab {

namespace {

constexpr std::size_t kProbeChunks = 64;

CPoint gaussian_direction(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CPoint v(dim);
  for (int j = 0; j < dim; ++j) v[j] = cplx(g(rng), g(rng));
  return (1.0 / v.norm()) * v;
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo * std::exp(uniform01(rng) * std::log(hi / lo));
}

CPoint sample_frame_point(const PolydiscFrame& frame, std::mt19937_64& rng) {
  std::array<cplx, CPoint::kMaxDim> c{};
  for (int j = 0; j < frame.dim(); ++j)
    c[j] = std::polar(frame.tau[j] * std::sqrt(uniform01(rng)), 2.0 * kPi * uniform01(rng));
  return frame.basis.point(c);
}

template <typename T, typename F>
std::vector<T> chunked(std::int64_t n, std::uint64_t seed, std::uint64_t stream, F body) {
  std::vector<T> out(kProbeChunks);
  const std::int64_t per = (n + static_cast<std::int64_t>(kProbeChunks) - 1) / static_cast<std::int64_t>(kProbeChunks);
  parallel_for(kProbeChunks, [&](std::size_t c) {
    auto rng = substream(seed, stream, c);
    const std::int64_t begin = static_cast<std::int64_t>(c) * per;
    const std::int64_t count = std::max<std::int64_t>(0, std::min(n, begin + per) - begin);
    out[c] = body(rng, count);
  });
  return out;
}

}  // namespace

CPoint random_interior_point(const Domain& domain, std::mt19937_64& rng, double h_min, double h_max) {
  const int n = domain.dim();
  CPoint p(n);
  double pmax = 0.0;
  do {
    for (int j = 0; j < n; ++j) p[j] = std::polar(std::sqrt(uniform01(rng)), 2.0 * kPi * uniform01(rng));
    pmax = 0.0;
    for (int j = 0; j < n; ++j) pmax = std::max(pmax, std::abs(p[j]));
  } while (!domain.contains(p) || pmax < 1e-6);
  // The model domains are star-shaped about 0 and lie in the unit polydisc.
  double lo = 1.0, hi = 1.0 / pmax;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (domain.contains(mid * p) ? lo : hi) = mid;
  }
  const double h = log_uniform(rng, h_min, h_max);
  return ((1.0 - h) * lo) * p;
}

IntegralEstimate quasi_ball_measure(const Domain& domain, const QuasiBall& ball, const QuadratureSpec& spec,
                                    std::uint64_t stream) {
  return integrate_ball(domain, ball, [](const CPoint&) { return cplx(1.0); }, spec, stream);
}

double triangle_constant_probe(const Domain& domain, std::int64_t n_triples, std::uint64_t seed) {
  if (n_triples < 1) throw std::invalid_argument("triangle_constant_probe: n_triples must be >= 1");
  const auto parts = chunked<double>(n_triples, seed, 0x7121, [&](std::mt19937_64& rng, std::int64_t count) {
    double worst = 0.0;
    for (std::int64_t i = 0; i < count; ++i) {
      const CPoint z = random_interior_point(domain, rng);
      CPoint u, w;
      if (i % 2 == 0) {
        u = random_interior_point(domain, rng);
        w = random_interior_point(domain, rng);
      } else {
        const double s = log_uniform(rng, 1e-4, 0.5);
        u = z + (s * uniform01(rng)) * gaussian_direction(domain.dim(), rng);
        w = z + s * gaussian_direction(domain.dim(), rng);
        if (!domain.contains(u) || !domain.contains(w)) continue;
      }
      const double den = distance(domain, z, u) + distance(domain, u, w);
      if (!(den > 0.0)) continue;
      worst = std::max(worst, distance(domain, z, w) / den);
    }
    return worst;
  });
  return std::max(1.0, *std::max_element(parts.begin(), parts.end()));
}

HomogeneityFit homogeneity_fit(const Domain& domain, const std::vector<QuasiBall>& family,
                               const std::vector<double>& lambdas, const QuadratureSpec& spec) {
  if (family.empty()) throw std::invalid_argument("homogeneity_fit: empty ball family");
  std::vector<double> distinct = lambdas;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) throw std::invalid_argument("homogeneity_fit: need at least two distinct lambdas");
  for (double l : distinct)
    if (!(l >= 1.0)) throw std::invalid_argument("homogeneity_fit: lambdas must be >= 1");

  const std::size_t L = distinct.size();
  std::vector<IntegralEstimate> mu(family.size() * L);
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = 0; j < L; ++j)
      mu[i * L + j] = quasi_ball_measure(domain, family[i].dilate(distinct[j]), spec, 1 + i * L + j);

  HomogeneityFit fit;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double base = mu[i * L].real();
    for (std::size_t j = 0; j < L; ++j) {
      const auto& e = mu[i * L + j];
      if (e.flagged) ++fit.n_flagged;
      if (!(base > 0.0) || !(e.real() > 0.0)) continue;
      xs.push_back(std::log(distinct[j] / distinct[0]));
      ys.push_back(std::log(e.real() / base));
    }
  }
  if (xs.size() < 2) throw std::runtime_error("homogeneity_fit: too few nonzero measures");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k], sy += ys[k], sxx += xs[k] * xs[k], sxy += xs[k] * ys[k];
  }
  fit.m = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double c0 = 1.0;
  for (std::size_t k = 0; k < xs.size(); ++k) c0 = std::max(c0, std::exp(ys[k] - fit.m * xs[k]));
  fit.c0 = c0;
  fit.n_points = static_cast<int>(xs.size());
  return fit;
}

EngulfingResult engulfing_probe(const Domain& domain, const CPoint& q1, const CPoint& q2, double delta,
                                std::int64_t n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("engulfing_probe: n_samples must be >= 1");
  const PolydiscFrame p1 = polydisc_frame(domain, q1, delta);
  const PolydiscFrame p1_double = polydisc_frame(domain, q1, 2.0 * delta);
  const PolydiscFrame p2 = polydisc_frame(domain, q2, delta);

  struct Part {
    double D = 0.0, C = 0.0;
    bool meet = false;
  };
  const auto parts = chunked<Part>(n_samples, seed, 0xE9, [&](std::mt19937_64& rng, std::int64_t count) {
    Part part;
    for (std::int64_t i = 0; i < count; ++i) {
      part.D = std::max(part.D, p1.dilation_needed(sample_frame_point(p1_double, rng)));
      const double s = p2.dilation_needed(sample_frame_point(p1, rng));
      part.C = std::max(part.C, s);
      part.meet = part.meet || s < 1.0;
    }
    return part;
  });
  EngulfingResult r;
  bool meet = false;
  double C = 0.0;
  for (const auto& p : parts) {
    r.D = std::max(r.D, p.D);
    C = std::max(C, p.C);
    meet = meet || p.meet;
  }
  r.D = std::max(1.0, r.D);
  if (meet || q1 == q2) r.C = std::max(1.0, C);
  return r;
}

IntegralEstimate boundary_slab_measure(const Domain& domain, const QuasiBall& B0, double s, const QuadratureSpec& spec,
                                       std::uint64_t stream) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("boundary_slab_measure: s must lie in (0,1)");
  if (!(B0.radius > boundary_distance(domain, B0.center).value))
    throw std::invalid_argument("boundary_slab_measure: B0 does not touch the boundary");
  QuadratureSpec sp = spec;
  if (sp.strategy == Strategy::PolarGauss || sp.strategy == Strategy::GradedPolar) sp.strategy = Strategy::UniformRejection;
  const PointSet nodes = sample_region(domain, bounding_region(domain, B0), sp, stream,
                                       [&](const CPoint& w) { return distance(domain, B0.center, w) < B0.radius; });
  std::vector<char> in_slab(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    in_slab[i] = boundary_distance(domain, nodes.points[i]).value <= s * B0.radius;
  });
  BlockSums sums(2, nodes.n_blocks);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    sums.add(0, nodes.blocks[i], nodes.weights[i]);
    if (in_slab[i]) sums.add(1, nodes.blocks[i], nodes.weights[i]);
  }
  auto ratio = [](std::span<const double> t) { return t[0] > 0.0 ? t[1] / t[0] : 0.0; };
  IntegralEstimate est;
  const auto totals = sums.totals();
  if (!(totals[0] > 0.0)) throw std::runtime_error("boundary_slab_measure: no sample points inside B0");
  est.value = ratio(totals);
  est.std_error = sums.jackknife_se(ratio);
  est.n_effective = static_cast<std::int64_t>(nodes.size());
  est.flagged = quality_flag(est.real(), est.std_error, spec.rel_tolerance);
  return est;
}

RatioRange comparability_probe(const Domain& domain, int n_points, std::uint64_t seed, double h_max) {
  RatioRange r{std::numeric_limits<double>::infinity(), 0.0, 0};
  auto rng = substream(seed, 0xC0, 0);
  for (int i = 0; i < n_points; ++i) {
    const CPoint z = random_interior_point(domain, rng, 1e-4, h_max);
    const double e = domain.euclidean_boundary_distance(z);
    if (!(e > 0.0)) continue;
    const double ratio = boundary_distance(domain, z).value / e;
    r.min = std::min(r.min, ratio);
    r.max = std::max(r.max, ratio);
    ++r.n;
  }
  return r;
}

double defining_function_probe(const Domain& domain, const std::vector<double>& deltas, int n_centers,
                               int points_per_frame, std::uint64_t seed) {
  auto rng = substream(seed, 0xDF, 0);
  double worst = 0.0;
  for (int i = 0; i < n_centers; ++i) {
    const CPoint q = random_interior_point(domain, rng, 1e-3, 0.1);
    for (double delta : deltas) {
      const PolydiscFrame frame = polydisc_frame(domain, q, delta);
      for (int k = 0; k < points_per_frame; ++k) {
        const CPoint z = sample_frame_point(frame, rng);
        if (!domain.contains(z)) continue;
        worst = std::max(worst, std::abs(domain.rho(z) - domain.rho(q)) / delta);
      }
    }
  }
  return worst;
}

double boundary_subadditivity_probe(const Domain& domain, int n_pairs, std::uint64_t seed) {
  auto rng = substream(seed, 0x5B, 0);
  double worst = 0.0;
  for (int i = 0; i < n_pairs; ++i) {
    const CPoint z = random_interior_point(domain, rng, 1e-4, 0.5);
    CPoint zp = (i % 2 == 0) ? random_interior_point(domain, rng, 1e-4, 0.5)
                             : z + log_uniform(rng, 1e-4, 0.3) * gaussian_direction(domain.dim(), rng);
    if (!domain.contains(zp)) continue;
    const double den = boundary_distance(domain, zp).value + distance(domain, z, zp);
    if (!(den > 0.0)) continue;
    worst = std::max(worst, boundary_distance(domain, z).value / den);
  }
  return worst;
}

}  // namespace berglab
