#include <doctest.h>

#include <cmath>
#include <fstream>

#include "berglab/weights.hpp"

using namespace berglab;

TEST_CASE("power weight and its dual") {
  const Domain d = Domain::unit_disk();
  const Weight s = Weight::power(d, 0.5, 3.0);
  const CPoint z{cplx(0.6, 0.0)};
  CHECK(s(z) == doctest::Approx(std::pow(1.0 - 0.36, 0.5)));
  const Weight sd = dual_weight(s);
  CHECK(sd.p() == doctest::Approx(1.5));
  CHECK(sd(z) == doctest::Approx(std::pow(s(z), -0.5)));
  REQUIRE(sd.power_exponent().has_value());
  CHECK(*sd.power_exponent() == doctest::Approx(-0.25));
}

TEST_CASE("B_p characteristic of a constant is exactly one") {
  const Domain d = Domain::unit_disk();
  const auto fam = ball_family(d, BallFamilySpec{});
  for (double p : {1.5, 2.0, 4.0}) {
    const auto e = bp_characteristic(d, Weight::constant(3.0, p), fam, QuadratureSpec::stratified(12, 2000, 1));
    CHECK(e.value == 1.0);
    CHECK_FALSE(e.divergent);
  }
}

TEST_CASE("B_p characteristic is invariant under scaling the weight") {
  const Domain d = Domain::unit_disk();
  const auto fam = ball_family(d, BallFamilySpec{});
  const auto spec = QuadratureSpec::stratified(12, 4000, 1);
  const Weight s = Weight::power(d, 0.5, 2.0);
  const double a = bp_characteristic(d, s, fam, spec).value;
  const double b = bp_characteristic(d, s.scaled(7.0), fam, spec).value;
  CHECK(b == doctest::Approx(a).epsilon(1e-12));
  CHECK(a >= 1.0);
}

TEST_CASE("ball families are seeded and well formed") {
  const Domain d = Domain::unit_ball(2);
  BallFamilySpec fs;
  const auto a = ball_family(d, fs), b = ball_family(d, fs);
  REQUIRE(a.size() == fs.radius_grid.size() * fs.n_centers);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].center == b[i].center);
    CHECK(d.contains(a[i].center));
  }
  CHECK(min_radius(a) == doctest::Approx(fs.radius_grid.back()));
}

TEST_CASE("regularization fixes constants and k' follows the formula") {
  const Domain d = Domain::unit_disk();
  const auto r = regularize(d, Weight::constant(2.5, 2.0), 0.1, CPoint{0.9}, QuadratureSpec::uniform(500, 1));
  CHECK(r.real() == doctest::Approx(2.5));
  CHECK(k_prime(0.1, 1.0) == doctest::Approx(0.1 / 0.9));
  CHECK_THROWS(regularize(d, Weight::constant(1.0, 2.0), 0.6, CPoint{0.9}, QuadratureSpec::uniform(500, 1)));
}

TEST_CASE("duality identity holds per ball") {
  const Domain d = Domain::unit_disk();
  const auto fam = ball_family(d, BallFamilySpec{});
  const auto dc = duality_identity_check(d, Weight::power(d, 0.5, 3.0), fam, QuadratureSpec::stratified(12, 4000, 1));
  CHECK(dc.max_deviation_in_se <= 3.0);
}

TEST_CASE("table weights read CSV") {
  const std::string path = "weights_table_test.csv";
  {
    std::ofstream out(path);
    out << "re_1,im_1,value\n0.0,0.0,1.0\n0.9,0.0,4.0\n";
  }
  const Weight w = Weight::table_from_csv(path, 1, 2.0);
  CHECK(w(CPoint{cplx(0.1, 0.0)}) == 1.0);
  CHECK(w(CPoint{cplx(0.8, 0.0)}) == 4.0);
  std::remove(path.c_str());
}
