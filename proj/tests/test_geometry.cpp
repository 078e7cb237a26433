#include <doctest.h>

#include <cmath>

#include "berglab/geometry.hpp"
#include "berglab/geometry_probes.hpp"
#include "berglab/parallel.hpp"

using namespace berglab;

TEST_CASE("domain names round-trip") {
  for (const char* n : {"disk", "ball2", "ball3", "egg2", "polydisc2"}) CHECK(Domain::from_name(n).name() == n);
  CHECK_THROWS(Domain::from_name("annulus"));
}

TEST_CASE("ball metric matches the explicit formula") {
  const Domain d = Domain::unit_disk();
  const cplx z(0.3, 0.4), w(-0.5, 0.1);
  // ||w|-|z|| + |1 - w conj(z) / (|w||z|)|
  const double expect = std::abs(std::abs(w) - std::abs(z)) + std::abs(1.0 - w * std::conj(z) / (std::abs(w) * std::abs(z)));
  CHECK(distance(d, CPoint{z}, CPoint{w}) == doctest::Approx(expect));
  CHECK(ball_metric(d, CPoint{0.0}, CPoint{w}).flagged);
}

TEST_CASE("canonical metrics are symmetric and vanish on the diagonal") {
  for (const Domain& d : {Domain::unit_disk(), Domain::unit_ball(2), Domain::egg(2), Domain::product_disk(2)}) {
    CAPTURE(d.name());
    for (int i = 0; i < 20; ++i) {
      auto rng = substream(5, 0, i);
      const CPoint z = random_interior_point(d, rng, 1e-3, 0.3), w = random_interior_point(d, rng, 1e-3, 0.3);
      CHECK(distance(d, z, z) == doctest::Approx(0.0).epsilon(1e-9));
      CHECK(distance(d, z, w) >= 0.0);
      CHECK(distance(d, z, w) == doctest::Approx(distance(d, w, z)).epsilon(1e-6));
    }
  }
}

TEST_CASE("quasi-triangle constant is finite") {
  CHECK(triangle_constant_probe(Domain::unit_disk(), 20000, 1) <= 2.0);
  CHECK(triangle_constant_probe(Domain::unit_ball(2), 20000, 1) <= 2.0);
}

TEST_CASE("boundary distance is comparable to Euclidean depth") {
  const Domain d = Domain::unit_disk();
  for (double h : {0.1, 0.01, 0.001}) {
    const double r = boundary_distance(d, CPoint{1.0 - h}).value / h;
    CHECK(r > 0.5);
    CHECK(r < 2.0);
  }
  const auto rr = comparability_probe(Domain::egg(2), 200, 1);
  CHECK(rr.min > 0.0);
}

TEST_CASE("quasi-ball validation") {
  const Domain d = Domain::unit_disk();
  CHECK_THROWS(make_ball(d, CPoint{0.5}, 0.0));
  CHECK_THROWS(make_ball(d, CPoint{1.5}, 0.1));
  const auto b = make_ball(d, CPoint{0.5}, 0.1);
  CHECK(b.contains(d, CPoint{0.5}));
  CHECK_FALSE(b.contains(d, CPoint{-0.5}));
}

TEST_CASE("ball measure scales like R^m near the boundary") {
  const Domain d = Domain::unit_disk();
  const auto spec = QuadratureSpec::stratified(12, 20000, 1);
  std::vector<QuasiBall> fam;
  for (int k = 6; k <= 8; ++k) fam.push_back(make_ball(d, CPoint{1.0 - 0.1 * std::ldexp(1.0, -k)}, std::ldexp(1.0, -k)));
  const auto fit = homogeneity_fit(d, fam, {1, 2, 4}, spec);
  CHECK(fit.m == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("slab fraction is monotone in s") {
  const Domain d = Domain::unit_disk();
  const auto B0 = make_ball(d, CPoint{0.9}, 0.2);
  const auto spec = QuadratureSpec::stratified(12, 20000, 1);
  const double a = boundary_slab_measure(d, B0, 0.1, spec).real();
  const double b = boundary_slab_measure(d, B0, 0.2, spec).real();
  CHECK(a > 0.0);
  CHECK(a < b);
  CHECK(b <= 1.0);
}
