#include "berglab/lemma_suite.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "berglab/geometry_probes.hpp"
#include "berglab/operators.hpp"
#include "berglab/parallel.hpp"
#include "berglab/weights.hpp"

namespace berglab {

namespace {

std::uint64_t point_stream(const CPoint& z, std::uint64_t salt) {
  std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ salt;
  for (int j = 0; j < z.dim(); ++j) {
    h ^= std::bit_cast<std::uint64_t>(z[j].real()) + (h << 6) + (h >> 2);
    h ^= std::bit_cast<std::uint64_t>(z[j].imag()) + (h << 6) + (h >> 2);
  }
  return h;
}

PointSet ball_nodes(const Domain& domain, const QuasiBall& ball, const QuadratureSpec& spec, std::uint64_t stream) {
  QuadratureSpec s = spec;
  s.strategy = Strategy::UniformRejection;
  return sample_region(domain, bounding_region(domain, ball), s, stream,
                       [&](const CPoint& w) { return ball.contains(domain, w); });
}

// Average of |f| over B_k(z) for any k in (0, 1).
double ball_average(const Domain& domain, const Integrand& f, double k, const CPoint& z, const QuadratureSpec& spec,
                    std::uint64_t salt) {
  const PointSet nodes = ball_nodes(domain, regularizing_ball(domain, k, z), spec, point_stream(z, salt));
  if (nodes.size() == 0) throw std::runtime_error("lemma suite: B_k(z) not resolved by the sample");
  double s = 0.0, t = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    s += nodes.weights[i] * std::abs(f(nodes.points[i]));
    t += nodes.weights[i];
  }
  return s / t;
}

void record(LemmaStat& st, double r) {
  if (!std::isfinite(r) || !(r > 0.0)) {
    ++st.n_nonfinite;
    return;
  }
  if (st.n == 0) st.max_ratio = st.min_ratio = r;
  st.max_ratio = std::max(st.max_ratio, r);
  st.min_ratio = std::min(st.min_ratio, r);
  st.max_abs_log = std::max(st.max_abs_log, std::abs(std::log(r)));
  ++st.n;
}

Integrand as_integrand(const TestFunction& f) {
  return [f](const CPoint& w) { return f(w); };
}

}  // namespace

LemmaSuiteReport regularizer_lemma_suite(const Domain& domain, double k, const LemmaSuiteSpec& spec) {
  if (!(spec.C_d >= 1.0)) throw std::invalid_argument("lemma suite: C_d must be at least 1");
  if (!(k > 0.0 && k < 1.0 / (2.0 * spec.C_d))) throw std::invalid_argument("lemma suite: k must lie in (0, 1/(2 C_d))");
  if (spec.n_instances < 1) throw std::invalid_argument("lemma suite: n_instances must be positive");

  LemmaSuiteReport rep;
  rep.k = k;
  rep.k_prime = k_prime(k, spec.C_d);
  rep.alpha = spec.C_d * (1.0 + 2.0 * spec.C_d);
  const MaximalFamily family(domain, spec.family, spec.family_balls);
  const std::size_t n = static_cast<std::size_t>(spec.n_instances);

  std::vector<double> inside(n), switching(n), outside(n);
  parallel_for(n, [&](std::size_t i) {
    auto rng = substream(spec.seed, 0x1E44A, i);
    const Integrand f = as_integrand(TestFunction::random_bump(domain, spec.seed * 7919ULL + 2 * i));
    const Integrand g = as_integrand(TestFunction::random_bump(domain, spec.seed * 7919ULL + 2 * i + 1));
    const CPoint z0 = random_interior_point(domain, rng, 1e-2, 0.5);

    // M f(z0) against M(R_k f)(z0).
    const Integrand rkf = [&](const CPoint& w) { return cplx(ball_average(domain, f, k, w, spec.regularizer, 0xA1)); };
    const MaximalEvaluator mf(family, {f, rkf});
    const auto m = mf(z0);
    inside[i] = m[0] / m[1];

    // int f R_k g against int R_k' f g on common domain nodes.
    QuadratureSpec os = spec.outer;
    os.seed = spec.outer.seed + i;
    const PointSet nodes = sample_domain(domain, os);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const CPoint& w = nodes.points[j];
      lhs += nodes.weights[j] * std::abs(f(w)) * ball_average(domain, g, k, w, spec.regularizer, 0xA2);
      rhs += nodes.weights[j] * std::abs(g(w)) * ball_average(domain, f, rep.k_prime, w, spec.regularizer, 0xA3);
    }
    switching[i] = lhs / rhs;

    // R_k(M g)(z0) against M g(z0).
    const MaximalEvaluator mg(family, {g});
    const PointSet bk = ball_nodes(domain, regularizing_ball(domain, k, z0), spec.regularizer, point_stream(z0, 0xA4));
    double s = 0.0, t = 0.0;
    for (std::size_t j = 0; j < bk.size(); ++j) {
      s += bk.weights[j] * mg(bk.points[j])[0];
      t += bk.weights[j];
    }
    outside[i] = t > 0.0 ? (s / t) / mg(z0)[0] : std::nan("");
  });
  for (std::size_t i = 0; i < n; ++i) {
    record(rep.maximal_inside, inside[i]);
    record(rep.switching, switching[i]);
    record(rep.maximal_outside, outside[i]);
  }

  // Containment checks by point sampling.
  const std::size_t np = static_cast<std::size_t>(spec.containment_pairs);
  std::vector<int> contain(np, -1), inflated(np, -1);
  parallel_for(np, [&](std::size_t i) {
    auto rng = substream(spec.seed, 0xC0A7, i);
    const CPoint z = random_interior_point(domain, rng, 1e-3, 1.0);
    const PointSet bz = ball_nodes(domain, regularizing_ball(domain, k, z), QuadratureSpec::uniform(64, spec.seed + i), 1);
    if (bz.size() > 0) {
      const CPoint& zp = bz.points[static_cast<std::size_t>(uniform01(rng) * bz.size()) % bz.size()];
      contain[i] = distance(domain, zp, z) < rep.k_prime * boundary_distance(domain, zp).value ? 1 : 0;
    }
    const CPoint c = random_interior_point(domain, rng, 1e-3, 0.5);
    const double r = boundary_distance(domain, c).value * (1.05 + 3.0 * uniform01(rng));
    const QuasiBall b{c, r, canonical_metric(domain)};
    const PointSet bw = ball_nodes(domain, b, QuadratureSpec::uniform(64, spec.seed + i), 2);
    if (bw.size() == 0) return;
    const CPoint& w = bw.points[static_cast<std::size_t>(uniform01(rng) * bw.size()) % bw.size()];
    const PointSet bx = ball_nodes(domain, regularizing_ball(domain, k, w), QuadratureSpec::uniform(64, spec.seed + i), 3);
    if (bx.size() == 0) return;
    const CPoint& x = bx.points[static_cast<std::size_t>(uniform01(rng) * bx.size()) % bx.size()];
    inflated[i] = distance(domain, c, x) < rep.alpha * r ? 1 : 0;
  });
  for (std::size_t i = 0; i < np; ++i) {
    if (contain[i] >= 0) ++rep.containment_pairs, rep.containment_holds += contain[i];
    if (inflated[i] >= 0) ++rep.inflated_containment_pairs, rep.inflated_containment_holds += inflated[i];
  }
  return rep;
}

}  // namespace berglab
