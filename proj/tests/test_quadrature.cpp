#include <doctest.h>

#include <cmath>

#include "berglab/parallel.hpp"
#include "berglab/quadrature.hpp"

using namespace berglab;

namespace {
const Integrand one = [](const CPoint&) { return cplx(1.0); };
const Integrand modsq = [](const CPoint& w) { return cplx(w.norm2()); };
}  // namespace

TEST_CASE("polar Gauss integrates polynomial moments exactly") {
  const Domain disk = Domain::unit_disk();
  CHECK(integrate(disk, one, QuadratureSpec::polar_gauss(16, 16)).real() == doctest::Approx(kPi).epsilon(1e-13));
  // int_D |w|^2 = pi/2, int_D |w|^4 = pi/3
  CHECK(integrate(disk, modsq, QuadratureSpec::polar_gauss(16, 16)).real() == doctest::Approx(kPi / 2).epsilon(1e-13));
  const Integrand quartic = [](const CPoint& w) { return cplx(w.norm2() * w.norm2()); };
  CHECK(integrate(disk, quartic, QuadratureSpec::polar_gauss(16, 16)).real() == doctest::Approx(kPi / 3).epsilon(1e-13));
  // vol(B^4) = pi^2 / 2
  const Domain ball = Domain::unit_ball(2);
  CHECK(integrate(ball, one, QuadratureSpec::polar_gauss(16, 16)).real() == doctest::Approx(kPi * kPi / 2).epsilon(1e-12));
  CHECK(ball.volume() == doctest::Approx(kPi * kPi / 2));
}

TEST_CASE("Gauss-Legendre nodes match the three-point rule") {
  std::vector<double> x, w;
  gauss_legendre(3, x, w);
  REQUIRE(x.size() == 3);
  CHECK(x[0] == doctest::Approx(-std::sqrt(0.6)));
  CHECK(x[1] == doctest::Approx(0.0));
  CHECK(w[0] == doctest::Approx(5.0 / 9.0));
  CHECK(w[1] == doctest::Approx(8.0 / 9.0));
}

TEST_CASE("Monte Carlo estimates are within a few standard errors") {
  // int |w|^2: disk pi/2, ball vol * 4/6, bidisc 2 (pi/2) pi; egg ||z1||^2 + ||z2||^2 by the Dirichlet integral.
  const double egg2 = kPi * kPi / 2.0 * (std::tgamma(2.0) * std::tgamma(0.5) / std::tgamma(3.5) +
                                          std::tgamma(1.0) * std::tgamma(1.0) / std::tgamma(3.0));
  const std::vector<std::pair<Domain, double>> cases{{Domain::unit_disk(), kPi / 2},
                                                     {Domain::unit_ball(2), kPi * kPi / 3},
                                                     {Domain::egg(2), egg2},
                                                     {Domain::product_disk(2), kPi * kPi}};
  for (const auto& [d, exact] : cases) {
    CAPTURE(d.name());
    for (auto spec : {QuadratureSpec::uniform(50000, 3), QuadratureSpec::stratified(8, 50000, 3)}) {
      if (spec.strategy == Strategy::BoundaryStratified && !d.is_ball_like()) continue;
      const auto e = integrate(d, modsq, spec);
      CHECK(e.std_error > 0.0);
      CHECK(std::abs(e.real() - exact) <= 4.0 * e.std_error);
    }
  }
}

TEST_CASE("sampling is reproducible and thread-count invariant") {
  const Domain d = Domain::unit_ball(2);
  const auto spec = QuadratureSpec::stratified(12, 40000, 99);
  const int saved = thread_count();
  set_thread_count(1);
  const auto a = integrate(d, modsq, spec);
  set_thread_count(3);
  const auto b = integrate(d, modsq, spec);
  set_thread_count(saved);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  const auto c = integrate(d, modsq, QuadratureSpec::stratified(12, 40000, 100));
  CHECK(c.value != a.value);
}

TEST_CASE("substreams are deterministic and distinct") {
  auto a = substream(1, 2, 3), b = substream(1, 2, 3), c = substream(1, 2, 4), e = substream(2, 2, 3);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != e());
}

TEST_CASE("quality flag and jackknife") {
  CHECK_FALSE(quality_flag(1.0, 1e-3, 1e-2));
  CHECK(quality_flag(1.0, 0.5, 1e-2));
  BlockSums s(1, 4);
  for (int b = 0; b < 4; ++b) s.add(0, b, 1.0);
  CHECK(s.total(0) == 4.0);
  CHECK(s.jackknife_se([](std::span<const double> t) { return t[0]; }) == doctest::Approx(0.0));
}

TEST_CASE("invalid specs are rejected") {
  auto s = QuadratureSpec::uniform(0, 1);
  CHECK_THROWS(s.validate());
  CHECK_THROWS(strategy_from_string("simpson"));
  CHECK(strategy_from_string(to_string(Strategy::GradedPolar)) == Strategy::GradedPolar);
}
