#include <doctest.h>

#include <cmath>

#include "berglab/geometry_probes.hpp"
#include "berglab/kernel_probes.hpp"
#include "berglab/kernels.hpp"
#include "berglab/parallel.hpp"
#include "berglab/quadrature.hpp"

using namespace berglab;

namespace {

cplx hermitian(const CPoint& z, const CPoint& w) {
  cplx s = 0.0;
  for (int j = 0; j < z.dim(); ++j) s += z[j] * std::conj(w[j]);
  return s;
}

// ||z1^a z2^b||^2 on |z1|^2 + |z2|^{2m} < 1 via the Dirichlet integral.
double egg_norm(int a, int b, int m) {
  const double beta = (b + 1.0) / m;
  return kPi * kPi / m * std::exp(std::lgamma(a + 1.0) + std::lgamma(beta) - std::lgamma(a + beta + 2.0));
}

}  // namespace

TEST_CASE("closed forms match the textbook kernels") {
  const auto disk = KernelEvaluator::closed_form(Domain::unit_disk());
  const auto ball = KernelEvaluator::closed_form(Domain::unit_ball(2));
  for (int i = 0; i < 20; ++i) {
    auto rng = substream(3, 1, i);
    const CPoint z = random_interior_point(Domain::unit_disk(), rng), w = random_interior_point(Domain::unit_disk(), rng);
    const cplx k = 1.0 / (kPi * std::pow(1.0 - z[0] * std::conj(w[0]), 2));
    CHECK(std::abs(disk(z, w) - k) <= 1e-12 * std::abs(k));
    const CPoint a = random_interior_point(Domain::unit_ball(2), rng), b = random_interior_point(Domain::unit_ball(2), rng);
    const cplx kb = 2.0 / (kPi * kPi * std::pow(1.0 - hermitian(a, b), 3));
    CHECK(std::abs(ball(a, b) - kb) <= 1e-12 * std::abs(kb));
    CHECK(std::abs(ball(a, b) - std::conj(ball(b, a))) <= 1e-12 * std::abs(kb));
  }
}

TEST_CASE("egg basis norms match the Dirichlet integral") {
  for (int m : {1, 2, 3}) {
    const int N = 8;
    const auto t = basis_norms(Domain::egg(m), N);
    for (int a = 0; a <= N; ++a)
      for (int b = 0; b <= N; ++b) CHECK(t[a * (N + 1) + b] == doctest::Approx(egg_norm(a, b, m)).epsilon(1e-12));
  }
}

TEST_CASE("truncated egg kernel is Hermitian and agrees with the ball for m = 1") {
  const auto egg = KernelEvaluator::truncated(Domain::egg(2), 60);
  const auto e1 = KernelEvaluator::truncated(Domain::egg(1), 60);
  const auto ball = KernelEvaluator::closed_form(Domain::unit_ball(2));
  const CPoint z{cplx(0.3, 0.1), cplx(0.2, -0.3)}, w{cplx(-0.1, 0.2), cplx(0.4, 0.1)};
  CHECK(std::abs(egg(z, w) - std::conj(egg(w, z))) <= 1e-12 * std::abs(egg(z, w)));
  CHECK(std::abs(e1(z, w) - ball(z, w)) <= 1e-9 * std::abs(ball(z, w)));
  CHECK_FALSE(egg.evaluate(z, w).flagged);
  const CPoint near{cplx(0.999, 0.0), 0.0};
  CHECK(egg.evaluate(near, near).flagged);
}

TEST_CASE("diagonal equals the squared L2 norm of the kernel") {
  const Domain d = Domain::unit_disk();
  const auto ev = KernelEvaluator::closed_form(d);
  const CPoint z{cplx(0.4, 0.2)};
  const auto e = integrate(d, [&](const CPoint& w) { return cplx(std::norm(ev(z, w))); }, QuadratureSpec::polar_gauss(64, 64));
  CHECK(e.real() == doctest::Approx(ev(z, z).real()).epsilon(1e-8));
}

TEST_CASE("size statistic is finite and prefix-stable") {
  const auto ev = KernelEvaluator::closed_form(Domain::unit_disk());
  auto spec = QuadratureSpec::uniform(4000, 1);
  spec.rel_tolerance = 0.05;
  const auto small = near_boundary_pairs(Domain::unit_disk(), 50, 7);
  const auto big = near_boundary_pairs(Domain::unit_disk(), 100, 7);
  for (int i = 0; i < 50; ++i) CHECK(small[i].first == big[i].first);
  const auto fit = size_probe(ev, big, spec);
  CHECK(std::isfinite(fit.constant));
  CHECK(sup_over_prefix(fit.per_sample, 50) <= fit.constant);
}
