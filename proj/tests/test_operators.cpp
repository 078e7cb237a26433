#include <doctest.h>

#include <cmath>

#include "berglab/geometry_probes.hpp"
#include "berglab/lemma_suite.hpp"
#include "berglab/maximal.hpp"
#include "berglab/necessity.hpp"
#include "berglab/operators.hpp"
#include "berglab/parallel.hpp"

using namespace berglab;

TEST_CASE("projection reproduces holomorphic functions and kills conjugates") {
  const Domain d = Domain::unit_disk();
  const auto ev = KernelEvaluator::closed_form(d);
  const auto sq = TestFunction::holo_poly({Monomial{1.0, {2}}});
  const CPoint z{cplx(0.3, 0.0)};
  CHECK(std::abs(bergman_project(ev, sq, z, QuadratureSpec::polar_gauss(64, 64)).value - 0.09) < 1e-12);
  const CPoint deep{cplx(0.95, 0.2)};
  CHECK(std::abs(bergman_project(ev, sq, deep, QuadratureSpec::graded(1, 6)).value - deep[0] * deep[0]) < 1e-6);
  CHECK(std::abs(bergman_project(ev, TestFunction::anti_holo(1), z, QuadratureSpec::polar_gauss(64, 64)).value) < 1e-12);
}

TEST_CASE("positive operator of the constant at the origin") {
  // |K(0, w)| = 1/pi, so P+ 1 (0) = 1.
  const Domain d = Domain::unit_disk();
  const auto ev = KernelEvaluator::closed_form(d);
  const auto e = positive_project(ev, TestFunction::constant(1.0), CPoint{0.0}, QuadratureSpec::polar_gauss(16, 16));
  CHECK(e.real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("maximal function of a constant is exact") {
  const Domain d = Domain::unit_disk();
  MaximalFamily fam(d, {12, 1}, QuadratureSpec::uniform(256, 3));
  MaximalEvaluator M(fam, {[](const CPoint&) { return cplx(1.0); }});
  for (double r : {0.0, 0.5, 0.9, 0.999}) CHECK(M(CPoint{cplx(r, 0.0)})[0] == 1.0);
}

TEST_CASE("every point near the boundary lies in a family ball") {
  for (const Domain& d : {Domain::unit_disk(), Domain::unit_ball(2)}) {
    MaximalFamily fam(d, {10, 1}, QuadratureSpec::uniform(64, 3));
    for (int i = 0; i < 50; ++i) {
      auto rng = substream(11, 0, i);
      const CPoint z = random_interior_point(d, rng, 1e-3, 0.5);
      const auto keys = fam.balls_containing(z);
      REQUIRE_FALSE(keys.empty());
      for (const auto& k : keys) CHECK(fam.ball(k).contains(d, z));
    }
  }
}

TEST_CASE("maximal function dominates pointwise averages and is order independent") {
  const Domain d = Domain::unit_disk();
  MaximalFamily fam(d, {10, 1}, QuadratureSpec::uniform(256, 3));
  const auto f = TestFunction::indicator_ball(d, make_ball(d, CPoint{0.9}, 0.1));
  const Integrand g = [&](const CPoint& w) { return f(w); };
  MaximalEvaluator a(fam, {g}), b(fam, {g});
  const CPoint z1{cplx(0.95, 0.0)}, z2{cplx(0.5, 0.3)};
  const double a1 = a(z1)[0], a2 = a(z2)[0];
  const double b2 = b(z2)[0], b1 = b(z1)[0];
  CHECK(a1 == b1);
  CHECK(a2 == b2);
  CHECK(a1 > 0.0);
  CHECK(a1 <= 1.0);
}

TEST_CASE("weighted norm ratio of P on holomorphic polynomials with constant weight") {
  const Domain d = Domain::unit_disk();
  const auto ev = KernelEvaluator::closed_form(d);
  NormRatioSpec ns;
  ns.outer = QuadratureSpec::polar_gauss(8, 16);
  const auto rep = weighted_norm_ratio(OperatorTag::P, ev, Weight::constant(1.0, 2.0), 2.0,
                                       {TestFunction::holo_poly({Monomial{1.0, {1}}}), TestFunction::constant(2.0)}, ns);
  CHECK(rep.sup_ratio == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(operator_from_string(to_string(OperatorTag::PPlus)) == OperatorTag::PPlus);
}

TEST_CASE("random bundles are seeded") {
  const Domain d = Domain::unit_disk();
  const auto a = random_bundle(d, 8, 4), b = random_bundle(d, 8, 4);
  const CPoint z{cplx(0.7, -0.2)};
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].tag() == b[i].tag());
    CHECK(a[i](z) == b[i](z));
  }
  for (const auto& f : random_bundle(d, 8, 4, true)) CHECK(f.nonnegative());
}

TEST_CASE("lemma suite on a small sample") {
  LemmaSuiteSpec ls;
  ls.n_instances = 4;
  ls.containment_pairs = 200;
  const auto r = regularizer_lemma_suite(Domain::unit_disk(), 0.05, ls);
  CHECK(r.containment_holds == r.containment_pairs);
  CHECK(r.maximal_inside.n_nonfinite == 0);
  CHECK(r.alpha == doctest::Approx(3.0));
}

TEST_CASE("two-ball construction separates the balls") {
  const auto ev = KernelEvaluator::closed_form(Domain::unit_disk());
  TwoBallSpec spec;
  spec.ball_nodes = QuadratureSpec::uniform(4000, 31);
  const auto r = two_ball_lower_bound(ev, 0.0625, spec);
  CHECK(r.separation_margin >= 1.0);
  CHECK(r.inf_constant > 0.0);
}
