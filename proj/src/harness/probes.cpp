#include <algorithm>
#include <cmath>

#include "berglab/geometry_probes.hpp"
#include "berglab/harness/checks.hpp"
#include "berglab/kernel_probes.hpp"
#include "berglab/lemma_suite.hpp"
#include "berglab/necessity.hpp"
#include "berglab/operators.hpp"
#include "berglab/parallel.hpp"

namespace berglab::harness {

namespace {

using nlohmann::json;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

CheckResult make(const std::string& id, const std::string& title) {
  CheckResult r;
  r.id = id;
  r.title = title;
  return r;
}

Verdict verdict_of(bool ok, bool flagged) {
  if (!ok) return Verdict::Fail;
  return flagged ? Verdict::Flagged : Verdict::Pass;
}

bool maximal_supported(const Domain& d) {
  return d.kind() == DomainKind::UnitDisk || (d.kind() == DomainKind::UnitBall && d.dim() <= 2);
}

void require_maximal(const Domain& d, const std::string& sub) {
  if (!maximal_supported(d)) throw ConfigError(sub + ": domain must be disk or ball2, got " + d.name());
}

// Monte Carlo spec from the config: deterministic rules become uniform sampling, and boundary
// stratification falls back to uniform off the disk and ball.
QuadratureSpec mc_spec(const ExperimentConfig& cfg, const Domain& d) {
  QuadratureSpec s = cfg.quadrature;
  if (s.strategy == Strategy::PolarGauss || s.strategy == Strategy::GradedPolar ||
      (s.strategy == Strategy::BoundaryStratified && !d.is_ball_like()))
    s.strategy = Strategy::UniformRejection;
  s.n_samples = cfg.knob<std::int64_t>("samples", s.n_samples);
  return s;
}

// Boundary-touching family at radii 2^-2..2^-kmax with centres at depth in [0.05, 0.25] R.
std::vector<QuasiBall> touching_family(const Domain& d, int n, int kmax, std::uint64_t seed) {
  std::vector<QuasiBall> fam;
  for (int i = 0; i < n; ++i) {
    auto rng = substream(seed, 0x6E0, i);
    const double R = std::ldexp(1.0, -2 - i % (kmax - 1));
    const double h = (0.05 + 0.2 * uniform01(rng)) * R;
    fam.push_back(make_ball(d, random_interior_point(d, rng, h, h), R));
  }
  return fam;
}

std::vector<CheckResult> geometry_check(const ExperimentConfig& cfg) {
  const Domain d = cfg.make_domain();
  std::vector<CheckResult> out;

  auto tri = make("triangle", "Quasi-triangle constant");
  const double C = triangle_constant_probe(d, cfg.knob<std::int64_t>("triples", 20000), cfg.seed);
  tri.verdict = verdict_of(std::isfinite(C) && C >= 1.0, false);
  tri.detail = "C_d = " + format_number(C);
  out.push_back(std::move(tri));

  auto hom = make("homogeneity", "Doubling exponent");
  const QuadratureSpec spec = mc_spec(cfg, d);
  const auto fit = homogeneity_fit(d, touching_family(d, 8, 6, cfg.seed), {1, 2, 4, 8}, spec);
  hom.verdict = verdict_of(std::isfinite(fit.m) && fit.m > 0.0, fit.n_flagged > 0);
  hom.detail = "m = " + format_number(fit.m) + ", c0 = " + format_number(fit.c0);
  Table th{"fit", {"m", "c0", "n_points", "n_flagged"}, {}};
  th.add_row({num(fit.m), num(fit.c0), fit.n_points, fit.n_flagged});
  hom.tables.push_back(std::move(th));
  out.push_back(std::move(hom));

  auto eng = make("engulfing", "Engulfing constants");
  Table te{"engulfing", {"delta", "C", "D"}, {}};
  bool eng_ok = true;
  for (double delta : {1e-2, 1e-3}) {
    auto rng = substream(cfg.seed, 0x6E1, static_cast<std::uint64_t>(-std::log10(delta)));
    const CPoint q1 = random_interior_point(d, rng, delta, delta);
    CPoint q2 = q1;
    q2[0] *= std::polar(1.0, delta);
    const auto e = engulfing_probe(d, q1, q2, delta, cfg.knob<std::int64_t>("engulf_samples", 10000), cfg.seed);
    te.add_row({delta, e.C ? json(*e.C) : json(nullptr), num(e.D)});
    eng_ok = eng_ok && std::isfinite(e.D) && (!e.C || std::isfinite(*e.C));
  }
  eng.verdict = verdict_of(eng_ok, false);
  eng.detail = "engulfing constants finite on sampled polydisc pairs";
  eng.tables.push_back(std::move(te));
  out.push_back(std::move(eng));

  auto slab = make("slab", "Boundary slab ratio");
  Table ts{"slabs", {"s", "ratio", "std_error"}, {}};
  const QuasiBall B0 = touching_family(d, 1, 3, cfg.seed + 1).front();
  bool slab_flag = false;
  for (double s : {0.2, 0.1, 0.05}) {
    const auto e = boundary_slab_measure(d, B0, s, spec);
    slab_flag = slab_flag || e.flagged;
    ts.add_row({s, num(e.real()), num(e.std_error)});
  }
  slab.verdict = verdict_of(true, slab_flag);
  slab.detail = "slab fractions of a boundary-touching ball";
  slab.tables.push_back(std::move(ts));
  out.push_back(std::move(slab));

  auto cmp = make("comparability", "Boundary distance comparability");
  const auto rr = comparability_probe(d, cfg.knob<int>("points", 1000), cfg.seed);
  cmp.verdict = verdict_of(rr.min > 0.0 && std::isfinite(rr.max), false);
  cmp.detail = "ratio range [" + format_number(rr.min) + ", " + format_number(rr.max) + "] on " + std::to_string(rr.n) + " points";
  out.push_back(std::move(cmp));
  return out;
}

CheckResult fit_result(const std::string& id, const std::string& title, const EstimateFit& f, bool want_exponent) {
  auto r = make(id, title);
  const double v = want_exponent ? f.exponent : f.constant;
  if (f.n_samples == 0) {
    r.verdict = Verdict::Flagged;
    r.detail = "no admissible samples (" + std::to_string(f.n_excluded) + " excluded by the probe's admissibility rule)";
  } else {
    r.verdict = verdict_of(std::isfinite(f.constant) && f.constant > 0.0 && std::isfinite(v), f.n_flagged > 0);
    r.detail = (want_exponent ? "exponent " + format_number(f.exponent) + ", " : std::string()) + "constant " +
               format_number(f.constant) + " over " + std::to_string(f.n_samples) + " samples";
  }
  Table t{"fit", {"constant", "exponent", "n_samples", "n_excluded", "n_flagged", "max_violation_ratio"}, {}};
  t.add_row({num(f.constant), num(f.exponent), f.n_samples, f.n_excluded, f.n_flagged, num(f.max_violation_ratio)});
  r.tables.push_back(std::move(t));
  return r;
}

std::vector<CheckResult> kernel_check(const ExperimentConfig& cfg) {
  const Domain d = cfg.make_domain();
  const auto ev = cfg.make_kernel(d);
  QuadratureSpec spec = QuadratureSpec::uniform(cfg.knob<std::int64_t>("ball_samples", 10000), cfg.seed);
  spec.rel_tolerance = 0.05;
  // The truncated expansion is only resolved where |z|^{2N} is negligible.
  const bool truncated = ev.mode() == KernelMode::TruncatedBasis;
  const double h_min = cfg.knob<double>("h_min", truncated ? 0.15 : 1e-3);
  const double h_max = cfg.knob<double>("h_max", truncated ? 0.5 : 0.1);
  const auto pairs = near_boundary_pairs(d, cfg.knob<int>("pairs", 500), cfg.seed, h_min, h_max);
  std::vector<CheckResult> out;
  out.push_back(fit_result("size", "Size estimate", size_probe(ev, pairs, spec), false));
  out.push_back(fit_result("smoothness", "Smoothness estimate", smoothness_probe(ev, pairs, 4.0, spec), true));
  out.push_back(fit_result("boundary_size", "Boundary-size estimate", boundary_size_probe(ev, pairs, spec), false));
  for (int dir = 0; dir < d.dim(); ++dir)
    out.push_back(fit_result("derivative_z" + std::to_string(dir), "Derivative estimate",
                             derivative_probe(ev, pairs, DerivativeSide::Z, dir, spec), false));
  if (d.is_ball_like()) {
    std::vector<double> radii;
    for (int k = 3; k <= 7; ++k) radii.push_back(std::ldexp(1.0, -k));
    const auto sep = separated_pairs(d, radii, 0.5, 20, cfg.seed);
    out.push_back(fit_result("lower_bound", "Lower bound", lower_bound_probe(ev, 0.5, 0.125, sep, spec), false));
  }

  auto rep = make("reproducing", "Reproducing identity");
  std::vector<PointPair> inner;
  for (int i = 0; i < cfg.knob<int>("reproducing_pairs", truncated ? 4 : 20); ++i) {
    auto rng = substream(cfg.seed, 0x6E2, i);
    inner.emplace_back(random_interior_point(d, rng, 0.2, 0.8), random_interior_point(d, rng, 0.2, 0.8));
  }
  QuadratureSpec rq = d.kind() == DomainKind::UnitDisk ? QuadratureSpec::polar_gauss(64, 64)
                      : d.is_ball_like()               ? QuadratureSpec::polar_gauss(24, 32)
                                                       : QuadratureSpec::uniform(200000, cfg.seed);
  rq.n_samples = cfg.knob<std::int64_t>("reproducing_samples", rq.n_samples);
  const double err = reproducing_check(ev, inner, rq);
  const double tolerance = cfg.knob<double>("reproducing_tolerance", rq.strategy == Strategy::PolarGauss ? 1e-3 : 0.05);
  rep.verdict = verdict_of(err <= tolerance, false);
  rep.detail = "max relative error " + format_number(err) + " (<= " + format_number(tolerance) + ") with " +
               to_string(rq.strategy) + " nodes";
  out.push_back(std::move(rep));
  return out;
}

BallFamilySpec family_spec(const ExperimentConfig& cfg, bool touching) {
  BallFamilySpec fs;
  fs.boundary_touching = touching;
  fs.radius_grid.clear();
  for (int k = 2; k <= cfg.knob<int>("floor_exponent", 7); ++k) fs.radius_grid.push_back(std::ldexp(1.0, -k));
  fs.n_centers = cfg.knob<int>("centers", 8);
  fs.seed = cfg.seed;
  return fs;
}

std::vector<CheckResult> bp_check(const ExperimentConfig& cfg) {
  const Domain d = cfg.make_domain();
  const Weight sigma = cfg.make_weight(d);
  std::vector<CheckResult> out;
  const QuadratureSpec spec = mc_spec(cfg, d);
  const auto touching = ball_family(d, family_spec(cfg, true));

  auto bp = make("bp", "B_p characteristic");
  const auto e = bp_characteristic(d, sigma, touching, spec);
  bp.verdict = verdict_of(std::isfinite(e.value) && !e.divergent, e.flagged);
  bp.detail = "[sigma]_{B_p} = " + format_number(e.value) + (e.divergent ? " (divergent)" : "");
  Table tb{"per_ball", {"index", "value", "std_error"}, {}};
  for (std::size_t i = 0; i < e.per_ball_values.size(); ++i) tb.add_row({i, num(e.per_ball_values[i]), num(e.per_ball_se[i])});
  bp.tables.push_back(std::move(tb));
  out.push_back(std::move(bp));

  auto ap = make("ap", "A_p characteristic");
  const auto a = ap_characteristic(d, sigma, ball_family(d, family_spec(cfg, false)), spec);
  ap.verdict = verdict_of(std::isfinite(a.value), a.flagged);
  ap.detail = "[sigma]_{A_p} = " + format_number(a.value);
  out.push_back(std::move(ap));

  auto dbl = make("doubling", "Weight doubling");
  Table td{"ratios", {"index", "ratio", "std_error"}, {}};
  bool dbl_flag = false;
  for (std::size_t i = 0; i < std::min<std::size_t>(touching.size(), 8); ++i) {
    const auto r = weight_doubling_probe(d, sigma, touching[i], 2.0, 2.0, spec, i);
    dbl_flag = dbl_flag || r.flagged;
    td.add_row({i, num(r.real()), num(r.std_error)});
  }
  dbl.verdict = verdict_of(true, dbl_flag);
  dbl.detail = "sigma(2B)/sigma(B) on boundary-touching balls";
  dbl.tables.push_back(std::move(td));
  out.push_back(std::move(dbl));

  auto dual = make("duality", "Duality identity");
  const auto dc = duality_identity_check(d, sigma, touching, spec);
  dual.verdict = verdict_of(dc.max_deviation_in_se <= 3.0, false);
  dual.detail = "max deviation " + format_number(dc.max_abs_deviation) + " (" + format_number(dc.max_deviation_in_se) + " SE)";
  out.push_back(std::move(dual));
  return out;
}

std::vector<CheckResult> operator_norm(const ExperimentConfig& cfg) {
  const Domain d = cfg.make_domain();
  require_maximal(d, "operator-norm");
  const auto ev = cfg.make_kernel(d);
  const Weight sigma = cfg.make_weight(d);
  const auto bundle = random_bundle(d, cfg.knob<int>("bundle", 12), cfg.seed);
  NormRatioSpec ns;
  ns.family.seed = cfg.seed;
  if (d.kind() != DomainKind::UnitDisk) {
    const auto o = cfg.knob<std::vector<int>>("outer_grid", {4, 8});
    const auto i = cfg.knob<std::vector<int>>("inner_grid", {12, 16});
    if (o.size() != 2 || i.size() != 2) throw ConfigError("outer_grid and inner_grid take two node counts");
    ns.outer = QuadratureSpec::polar_gauss(o[0], o[1]);
    ns.inner = QuadratureSpec::polar_gauss(i[0], i[1]);
  }
  // P must reproduce w_1 on the probe grid; otherwise the inner rule is too coarse for P and P+.
  const auto calib = weighted_norm_ratio(OperatorTag::P, ev, Weight::constant(1.0, 2.0), 2.0,
                                         {TestFunction::holo_poly({Monomial{1.0, {1}}})}, ns);
  const bool unresolved = !(std::abs(calib.sup_ratio - 1.0) <= 0.05);
  std::vector<CheckResult> out;
  for (OperatorTag op : {OperatorTag::P, OperatorTag::PPlus, OperatorTag::M}) {
    auto r = make("norm_" + to_string(op), "Weighted norm ratio");
    const auto rep = weighted_norm_ratio(op, ev, sigma, cfg.p, bundle, ns);
    const bool flag = unresolved && op != OperatorTag::M;
    r.verdict = verdict_of(std::isfinite(rep.sup_ratio), flag);
    r.detail = "sup ratio " + format_number(rep.sup_ratio) + " over " + std::to_string(bundle.size()) + " functions";
    if (flag) r.detail += "; inner rule unresolved (||P w_1|| / ||w_1|| = " + format_number(calib.sup_ratio) + ")";
    Table t{"ratios", {"function", "ratio"}, {}};
    for (std::size_t i = 0; i < rep.ratios.size(); ++i) t.add_row({bundle[i].tag(), num(rep.ratios[i])});
    r.tables.push_back(std::move(t));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckResult> good_lambda(const ExperimentConfig& cfg) {
  const Domain d = cfg.make_domain();
  require_maximal(d, "good-lambda");
  const auto ev = cfg.make_kernel(d);
  CPoint center = CPoint(d.dim());
  center[0] = 0.9;
  const auto f = TestFunction::indicator_ball(d, make_ball(d, center, cfg.knob<double>("support_radius", 0.1)));
  GoodLambdaSpec gs;
  gs.outer.seed = cfg.seed;
  gs.outer.n_samples = cfg.knob<std::int64_t>("samples", 20000);
  gs.inner.seed = cfg.seed + 1;
  gs.family.seed = cfg.seed;
  const auto gammas = cfg.knob<std::vector<double>>("gammas", {10, 3, 1, 0.3, 0.1, 0.03, 0.01});
  const auto lambdas = cfg.knob<std::vector<double>>("lambdas", {0.05, 0.1, 0.2});
  const auto rep = good_lambda_experiment(ev, f, cfg.make_weight(d), cfg.p, gammas, lambdas, gs);
  auto r = make("good_lambda", "Good-lambda ratios");
  Table t{"ratios", {"gamma", "lambda", "ratio", "std_error"}, {}};
  for (std::size_t g = 0; g < gammas.size(); ++g)
    for (std::size_t l = 0; l < lambdas.size(); ++l)
      t.add_row({gammas[g], lambdas[l], num(rep.ratio_table[g][l]), num(rep.se_table[g][l])});
  r.verdict = verdict_of(rep.mean_ratio.back() < 0.3, false);
  r.detail = "mean ratio at smallest gamma " + format_number(rep.mean_ratio.back()) + "; fitted exponent " +
             format_number(rep.fitted_exponent) + " on " + std::to_string(rep.fit_points) + " cells";
  r.tables.push_back(std::move(t));
  return {r};
}

std::vector<CheckResult> lemma_suite(const ExperimentConfig& cfg) {
  const Domain d = cfg.make_domain();
  require_maximal(d, "lemma-suite");
  LemmaSuiteSpec ls;
  ls.seed = cfg.seed;
  ls.n_instances = cfg.knob<int>("instances", 50);
  std::vector<CheckResult> out;
  for (double k : cfg.knob<std::vector<double>>("k", {0.05, 0.1})) {
    const auto s = regularizer_lemma_suite(d, k, ls);
    auto r = make("lemmas_k" + format_number(k), "Regularizer lemmas");
    Table t{"lemmas", {"lemma", "max_ratio", "min_ratio", "max_abs_log", "nonfinite"}, {}};
    bool ok = s.containment_holds == s.containment_pairs;
    for (const auto& [name, st] : {std::pair<std::string, const LemmaStat&>{"maximal_inside", s.maximal_inside},
                                   {"switching", s.switching},
                                   {"maximal_outside", s.maximal_outside}}) {
      t.add_row({name, num(st.max_ratio), num(st.min_ratio), num(st.max_abs_log), st.n_nonfinite});
      ok = ok && st.n_nonfinite == 0;
    }
    r.verdict = verdict_of(ok, s.inflated_containment_holds < s.inflated_containment_pairs);
    r.detail = "k' = " + format_number(s.k_prime) + "; containment " + std::to_string(s.containment_holds) + "/" +
               std::to_string(s.containment_pairs) + ", inflated containment " + std::to_string(s.inflated_containment_holds) + "/" + std::to_string(s.inflated_containment_pairs);
    r.tables.push_back(std::move(t));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckResult> necessity(const ExperimentConfig& cfg) {
  const Domain d = cfg.make_domain();
  if (!d.is_ball_like()) throw ConfigError("necessity: domain must be disk or ball, got " + d.name());
  const auto ev = cfg.make_kernel(d);
  std::vector<double> radii;
  for (int k = 3; k <= cfg.knob<int>("floor_exponent", 7); ++k) radii.push_back(std::ldexp(1.0, -k));
  NecessitySpec ns;
  ns.two_ball.ball_nodes.seed = cfg.seed;
  ns.ball_nodes.seed = cfg.seed + 1;
  ns.outer.seed = cfg.seed + 2;

  auto tb = make("two_ball", "Two-ball lower bound");
  Table t1{"two_ball", {"radius", "inf_constant", "inf_constant_swapped"}, {}};
  double lo = INFINITY;
  for (double R : radii) {
    const auto r = two_ball_lower_bound(ev, R, ns.two_ball);
    lo = std::min(lo, r.inf_constant);
    t1.add_row({R, num(r.inf_constant), num(r.inf_constant_swapped)});
  }
  tb.verdict = verdict_of(lo > 0.0, false);
  tb.detail = "min inf constant " + format_number(lo);
  tb.tables.push_back(std::move(t1));

  auto np = make("necessity", "Necessity probe");
  Table t2{"rows", {"radius", "bp_product", "ratio_chi_b2", "ratio_dual_b1", "max_ratio"}, {}};
  bool finite = true;
  for (const auto& row : necessity_probe(ev, cfg.make_weight(d), cfg.p, radii, ns)) {
    finite = finite && std::isfinite(row.bp_product) && std::isfinite(row.max_ratio);
    t2.add_row({row.radius, num(row.bp_product), num(row.ratio_chi_b2), num(row.ratio_dual_b1), num(row.max_ratio)});
  }
  np.verdict = verdict_of(finite, false);
  np.detail = "per-ball B_p products against norm ratios of the two-ball test functions";
  np.tables.push_back(std::move(t2));
  return {tb, np};
}

}  // namespace

std::vector<CheckResult> run_probes(const std::string& subcommand, const ExperimentConfig& cfg) {
  if (subcommand == "geometry-check") return geometry_check(cfg);
  if (subcommand == "kernel-check") return kernel_check(cfg);
  if (subcommand == "bp") return bp_check(cfg);
  if (subcommand == "operator-norm") return operator_norm(cfg);
  if (subcommand == "good-lambda") return good_lambda(cfg);
  if (subcommand == "lemma-suite") return lemma_suite(cfg);
  if (subcommand == "necessity") return necessity(cfg);
  throw ConfigError("unknown subcommand: " + subcommand);
}

}  // namespace berglab::harness
