#include "berglab/harness/checks.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "berglab/geometry_probes.hpp"
#include "berglab/kernel_probes.hpp"
#include "berglab/lemma_suite.hpp"
#include "berglab/necessity.hpp"
#include "berglab/operators.hpp"
#include "berglab/parallel.hpp"

namespace berglab::harness {

namespace tol {
constexpr double kReproducing = 1e-3;
constexpr double kCrossValidation = 1e-6;
constexpr double kDoublingChange = 0.20;
constexpr double kMinSmoothness = 0.5;
constexpr double kSmoothnessShift = 0.2;
constexpr double kDiskMLo = 1.8, kDiskMHi = 2.2;
constexpr double kBallMLo = 2.6, kBallMHi = 3.4;
constexpr double kSlabFactor = 2.0;
constexpr double kBpStable = 0.10;
constexpr double kBpGrowthPerDecade = 2.0;
constexpr double kApStable = 0.20;
constexpr double kLemmaKFactor = 3.0;
constexpr double kGoodLambdaFinal = 0.3;
constexpr double kGoodLambdaSe = 3.0;
constexpr double kNormStable = 0.20;
constexpr double kTwoBallMin = 0.01;
constexpr double kTwoBallSpread = 0.20;
constexpr double kNecessityProductGrowth = 1.5;
constexpr double kNecessityRatioGrowth = 1.3;
constexpr double kNecessityBounded = 2.0;
constexpr double kPiExact = 1e-10;
constexpr double kMcSigmas = 3.0;
constexpr double kSlopeLo = -0.6, kSlopeHi = -0.4;
}  // namespace tol

namespace {

using nlohmann::json;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

CheckResult make(const std::string& id, const std::string& title) {
  CheckResult r;
  r.id = id;
  r.title = title;
  return r;
}

Verdict verdict_of(bool ok, bool flagged = false) {
  if (!ok) return Verdict::Fail;
  return flagged ? Verdict::Flagged : Verdict::Pass;
}

double rel_change(double a, double b) { return std::abs(b - a) / std::max(std::abs(a), 1e-300); }

// Per-halving (or per-step) geometric growth of a positive sequence.
double growth_per_step(const std::vector<double>& v) {
  if (v.size() < 2 || !(v.front() > 0.0) || !(v.back() > 0.0)) return std::nan("");
  return std::pow(v.back() / v.front(), 1.0 / static_cast<double>(v.size() - 1));
}

CPoint random_point_in_radius(const Domain& d, std::mt19937_64& rng, double rmax) {
  CPoint z(d.dim());
  std::normal_distribution<double> g;
  double n2 = 0.0;
  for (int j = 0; j < d.dim(); ++j) {
    z[j] = cplx(g(rng), g(rng));
    n2 += std::norm(z[j]);
  }
  const double r = rmax * std::pow(uniform01(rng), 1.0 / (2.0 * d.dim()));
  return (r / std::sqrt(n2)) * z;
}

// --- 1 -----------------------------------------------------------------------------------

CheckResult reproducing(const ExperimentConfig& cfg) {
  auto r = make("c01_reproducing", "Reproducing property");
  Table t{"errors", {"domain", "function", "max_error", "scale", "relative"}, {}};
  bool ok = true;
  const int n_probe = cfg.knob<int>("probe_points", 50);
  struct Case {
    Domain domain;
    QuadratureSpec rule;
    double rmax;
  };
  for (const auto& c : {Case{Domain::unit_disk(), QuadratureSpec::polar_gauss(64, 64), 0.7},
                        Case{Domain::unit_ball(2), QuadratureSpec::polar_gauss(24, 32), 0.5}}) {
    const auto ev = KernelEvaluator::closed_form(c.domain);
    std::vector<TestFunction> fs;
    std::vector<std::string> names;
    auto rng = substream(cfg.seed, 0xC1, 0);
    for (int deg = 0; deg <= 4; ++deg) {
      std::vector<Monomial> terms;
      for (int a = 0; a <= deg; ++a) {
        if (c.domain.dim() == 1 && a != deg) continue;
        Monomial m{cplx(uniform01(rng) - 0.5, uniform01(rng) - 0.5) + 1.0, {}};
        m.alpha[0] = a;
        if (c.domain.dim() > 1) m.alpha[1] = deg - a;
        terms.push_back(m);
      }
      fs.push_back(TestFunction::holo_poly(terms));
      names.push_back("holo_degree_" + std::to_string(deg));
    }
    const std::size_t n_holo = fs.size();
    for (int k = 1; k <= 3; ++k) {
      fs.push_back(TestFunction::anti_holo(k, 0));
      names.push_back("conj_power_" + std::to_string(k));
    }
    const PointSet nodes = polar_gauss_rule(c.domain, c.rule.radial_nodes, c.rule.angular_nodes);
    std::vector<CPoint> probe;
    for (int i = 0; i < n_probe; ++i) probe.push_back(random_point_in_radius(c.domain, rng, c.rmax));
    std::vector<std::vector<cplx>> pf(probe.size());
    parallel_for(probe.size(), [&](std::size_t i) { pf[i] = project_bundle(ev, fs, probe[i], nodes, false); });
    for (std::size_t f = 0; f < fs.size(); ++f) {
      double err = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < probe.size(); ++i) {
        const cplx target = f < n_holo ? fs[f](probe[i]) : cplx(0.0);
        err = std::max(err, std::abs(pf[i][f] - target));
        scale = std::max(scale, std::abs(fs[f](probe[i])));
      }
      const double rel = f < n_holo ? err / scale : err;
      ok = ok && rel <= tol::kReproducing;
      t.add_row({c.domain.name(), names[f], num(err), num(scale), num(rel)});
    }
  }
  r.verdict = verdict_of(ok);
  r.detail = "max |Pf - f| / max|f| and max |P conj^k| <= 1e-3 on " + std::to_string(n_probe) + " probe points, disk and ball2";
  r.tables.push_back(std::move(t));
  return r;
}

// --- 2 -----------------------------------------------------------------------------------

CheckResult cross_validation(const ExperimentConfig& cfg) {
  auto r = make("c02_kernel_cross_validation", "Kernel cross-validation");
  const Domain ball = Domain::unit_ball(2), egg = Domain::egg(1);
  const auto closed = KernelEvaluator::closed_form(ball);
  const auto trunc = KernelEvaluator::truncated(egg, 60);
  const int n = cfg.knob<int>("pairs", 100);
  double worst = 0.0;
  int flagged = 0;
  Table t{"pairs", {"index", "relative_error"}, {}};
  for (int i = 0; i < n; ++i) {
    auto rng = substream(cfg.seed, 0xC2, i);
    const CPoint z = random_point_in_radius(ball, rng, 0.6);
    const CPoint w = random_point_in_radius(ball, rng, 0.6);
    const KernelValue a = trunc.evaluate(z, w);
    const cplx b = closed(z, w);
    const double rel = std::abs(a.value - b) / std::abs(b);
    flagged += a.flagged;
    worst = std::max(worst, rel);
    t.add_row({i, num(rel)});
  }
  r.verdict = verdict_of(worst <= tol::kCrossValidation, flagged > 0);
  r.detail = "max relative error " + format_number(worst) + " (<= 1e-6), truncation-flagged pairs " + std::to_string(flagged);
  r.tables.push_back(std::move(t));
  return r;
}

// --- 3 -----------------------------------------------------------------------------------

CheckResult size_estimates(const ExperimentConfig& cfg) {
  auto r = make("c03_size_estimates", "Size and boundary-size estimates");
  const int n = cfg.knob<int>("pairs", 1000);
  QuadratureSpec spec = QuadratureSpec::uniform(cfg.knob<std::int64_t>("ball_samples", 10000), cfg.seed);
  spec.rel_tolerance = 0.05;
  Table t{"sup_statistics", {"domain", "statistic", "sup_n", "sup_2n", "relative_change", "flagged"}, {}};
  bool ok = true;
  for (const Domain& d : {Domain::unit_disk(), Domain::unit_ball(2)}) {
    const auto ev = KernelEvaluator::closed_form(d);
    const auto pairs = near_boundary_pairs(d, 2 * n, cfg.seed + 7);
    const auto s = size_probe(ev, pairs, spec);
    const auto b = boundary_size_probe(ev, pairs, spec);
    for (const auto& [name, fit] : {std::pair<std::string, const EstimateFit&>{"C1_size", s}, {"C3_boundary_size", b}}) {
      const double a = sup_over_prefix(fit.per_sample, n), full = fit.constant;
      const double ch = rel_change(a, full);
      ok = ok && std::isfinite(full) && ch < tol::kDoublingChange;
      t.add_row({d.name(), name, num(a), num(full), num(ch), fit.n_flagged});
    }
  }
  r.verdict = verdict_of(ok);
  r.detail = "sups finite and change < 20% from " + std::to_string(n) + " to " + std::to_string(2 * n) + " pairs";
  r.tables.push_back(std::move(t));
  return r;
}

// --- 4 -----------------------------------------------------------------------------------

CheckResult smoothness(const ExperimentConfig& cfg) {
  auto r = make("c04_smoothness", "Smoothness exponent");
  const Domain d = Domain::unit_disk();
  const auto ev = KernelEvaluator::closed_form(d);
  QuadratureSpec spec = QuadratureSpec::uniform(cfg.knob<std::int64_t>("ball_samples", 10000), cfg.seed);
  spec.rel_tolerance = 0.05;
  const auto pairs = near_boundary_pairs(d, cfg.knob<int>("pairs", 1000), cfg.seed + 11);
  const auto a = smoothness_probe(ev, pairs, 4.0, spec);
  const auto b = smoothness_probe(ev, pairs, 8.0, spec);
  Table t{"fits", {"C2", "nu", "constant", "n_samples", "n_excluded"}, {}};
  t.add_row({4.0, num(a.exponent), num(a.constant), a.n_samples, a.n_excluded});
  t.add_row({8.0, num(b.exponent), num(b.constant), b.n_samples, b.n_excluded});
  const bool ok = a.exponent >= tol::kMinSmoothness && std::abs(a.exponent - b.exponent) <= tol::kSmoothnessShift;
  r.verdict = verdict_of(ok);
  r.detail = "nu(C2=4) = " + format_number(a.exponent) + ", nu(C2=8) = " + format_number(b.exponent);
  r.tables.push_back(std::move(t));
  return r;
}

// --- 5 -----------------------------------------------------------------------------------

std::vector<QuasiBall> homogeneity_family(const Domain& d, std::uint64_t seed) {
  std::vector<QuasiBall> fam;
  for (int i = 0; i < 8; ++i) {
    auto rng = substream(seed, 0xC5, i);
    const double R = std::ldexp(1.0, -6 - (i % 4));
    const double h = (0.05 + 0.2 * uniform01(rng)) * R;
    CPoint u = random_point_in_radius(d, rng, 1.0);
    u = (1.0 / u.norm()) * u;
    fam.push_back(make_ball(d, (1.0 - h) * u, R));
  }
  return fam;
}

CheckResult homogeneity(const ExperimentConfig& cfg) {
  auto r = make("c05_homogeneity", "Strong homogeneity");
  QuadratureSpec spec = QuadratureSpec::stratified(12, cfg.knob<std::int64_t>("samples", 50000), cfg.seed);
  spec.rel_tolerance = 0.02;
  Table t{"fits", {"domain", "m", "c0", "lo", "hi", "n_points", "n_flagged"}, {}};
  bool ok = true;
  bool flagged = false;
  std::vector<double> ms;
  for (const auto& [d, lo, hi] : {std::tuple{Domain::unit_disk(), tol::kDiskMLo, tol::kDiskMHi},
                                  std::tuple{Domain::unit_ball(2), tol::kBallMLo, tol::kBallMHi}}) {
    const auto fit = homogeneity_fit(d, homogeneity_family(d, cfg.seed), {1, 2, 4, 8, 16}, spec);
    ms.push_back(fit.m);
    ok = ok && fit.m >= lo && fit.m <= hi;
    flagged = flagged || fit.n_flagged > 0;
    t.add_row({d.name(), num(fit.m), num(fit.c0), lo, hi, fit.n_points, fit.n_flagged});
  }
  r.verdict = verdict_of(ok, flagged);
  r.detail = "fitted m: disk " + format_number(ms[0]) + ", ball2 " + format_number(ms[1]);
  r.tables.push_back(std::move(t));
  return r;
}

// --- 6 -----------------------------------------------------------------------------------

CheckResult slab(const ExperimentConfig& cfg) {
  auto r = make("c06_boundary_slab", "Boundary slab");
  const Domain d = Domain::unit_disk();
  const QuasiBall B0 = make_ball(d, CPoint{0.9}, 0.2);
  QuadratureSpec spec = QuadratureSpec::stratified(12, cfg.knob<std::int64_t>("samples", 100000), cfg.seed);
  Table t{"slabs", {"s", "ratio", "std_error", "ratio_over_s"}, {}};
  std::vector<double> v;
  bool flagged = false;
  for (double s : {0.2, 0.1, 0.05}) {
    const auto e = boundary_slab_measure(d, B0, s, spec);
    v.push_back(e.real() / s);
    flagged = flagged || e.flagged;
    t.add_row({s, num(e.real()), num(e.std_error), num(e.real() / s)});
  }
  const double spread = *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
  r.verdict = verdict_of(spread <= tol::kSlabFactor, flagged);
  r.detail = "max/min of ratio/s = " + format_number(spread) + " (<= 2)";
  r.tables.push_back(std::move(t));
  return r;
}

// --- 7 -----------------------------------------------------------------------------------

BpEstimate bp_at_floor(const Domain& d, const Weight& w, int kmax, std::uint64_t seed, std::int64_t n) {
  BallFamilySpec fs;
  fs.radius_grid.clear();
  for (int k = 2; k <= kmax; ++k) fs.radius_grid.push_back(std::ldexp(1.0, -k));
  fs.n_centers = 8;
  fs.seed = seed;
  QuadratureSpec sp = QuadratureSpec::stratified(12, n, seed);
  sp.rel_tolerance = 0.05;
  return bp_characteristic(d, w, ball_family(d, fs), sp);
}

CheckResult bp(const ExperimentConfig& cfg) {
  auto r = make("c07_bp_characteristic", "B_p characteristic");
  const Domain d = Domain::unit_disk();
  const std::int64_t n = cfg.knob<std::int64_t>("samples", 20000);
  Table t{"characteristics", {"weight", "floor_exponent", "value", "divergent", "flagged"}, {}};
  const auto one = bp_at_floor(d, Weight::constant(1.0, 2.0), 8, cfg.seed, n);
  t.add_row({"constant", 8, num(one.value), one.divergent, one.flagged});
  const auto a7 = bp_at_floor(d, Weight::power(d, 0.5, 2.0), 7, cfg.seed, n);
  const auto a8 = bp_at_floor(d, Weight::power(d, 0.5, 2.0), 8, cfg.seed, n);
  t.add_row({"power_0.5", 7, num(a7.value), a7.divergent, a7.flagged});
  t.add_row({"power_0.5", 8, num(a8.value), a8.divergent, a8.flagged});
  const auto b5 = bp_at_floor(d, Weight::power(d, 1.5, 2.0), 5, cfg.seed, n);
  const auto b8 = bp_at_floor(d, Weight::power(d, 1.5, 2.0), 8, cfg.seed, n);
  t.add_row({"power_1.5", 5, num(b5.value), b5.divergent, b5.flagged});
  t.add_row({"power_1.5", 8, num(b8.value), b8.divergent, b8.flagged});
  const double change = rel_change(a7.value, a8.value);
  const double per_decade = std::pow(b8.value / b5.value, 1.0 / (3.0 * std::log10(2.0)));
  const bool ok = one.value == 1.0 && change < tol::kBpStable && per_decade >= tol::kBpGrowthPerDecade;
  r.verdict = verdict_of(ok);
  r.detail = "[1] = " + format_number(one.value, 17) + "; t=0.5 change " + format_number(change) +
             " (< 0.1); t=1.5 growth per decade x" + format_number(per_decade) + " (>= 2)";
  r.tables.push_back(std::move(t));
  return r;
}

// --- 8 -----------------------------------------------------------------------------------

CheckResult regularizer(const ExperimentConfig& cfg) {
  auto r = make("c08_regularizer", "Regularizer machinery");
  const Domain d = Domain::unit_disk();
  const Weight sigma = Weight::power(d, 0.5, 2.0);
  QuadratureSpec inner = QuadratureSpec::uniform(128, cfg.seed);
  const Weight reg = regularized_weight(d, sigma, 0.1, inner);
  QuadratureSpec sp = QuadratureSpec::uniform(cfg.knob<std::int64_t>("ap_samples", 2000), cfg.seed);
  sp.rel_tolerance = 0.05;
  std::vector<double> ap;
  Table ta{"ap_characteristic", {"floor_exponent", "value", "flagged"}, {}};
  for (int kmax : {5, 6}) {
    BallFamilySpec fs;
    fs.boundary_touching = false;
    fs.radius_grid.clear();
    for (int k = 2; k <= kmax; ++k) fs.radius_grid.push_back(std::ldexp(1.0, -k));
    fs.n_centers = 8;
    fs.seed = cfg.seed;
    const auto e = ap_characteristic(d, reg, ball_family(d, fs), sp);
    ap.push_back(e.value);
    ta.add_row({kmax, num(e.value), e.flagged});
  }
  const double ap_change = rel_change(ap[0], ap[1]);
  bool ok = std::isfinite(ap[1]) && ap_change < tol::kApStable;

  LemmaSuiteSpec ls;
  ls.seed = cfg.seed;
  ls.n_instances = cfg.knob<int>("instances", 200);
  Table tl{"lemmas", {"k", "k_prime", "lemma", "max_ratio", "min_ratio", "max_abs_log", "nonfinite"}, {}};
  Table tc{"containment", {"k", "check", "holds", "pairs"}, {}};
  std::vector<LemmaSuiteReport> reps;
  for (double k : {0.05, 0.1}) {
    reps.push_back(regularizer_lemma_suite(d, k, ls));
    const auto& s = reps.back();
    for (const auto& [name, st] : {std::pair<std::string, const LemmaStat&>{"maximal_inside", s.maximal_inside},
                                   {"switching", s.switching},
                                   {"maximal_outside", s.maximal_outside}}) {
      tl.add_row({k, num(s.k_prime), name, num(st.max_ratio), num(st.min_ratio), num(st.max_abs_log), st.n_nonfinite});
      ok = ok && st.n_nonfinite == 0 && std::isfinite(st.max_ratio);
    }
    tc.add_row({k, "containment", s.containment_holds, s.containment_pairs});
    tc.add_row({k, "inflated_containment", s.inflated_containment_holds, s.inflated_containment_pairs});
    ok = ok && s.containment_pairs > 0 && s.containment_holds == s.containment_pairs;
  }
  auto within = [](double a, double b) { return std::max(a, b) / std::min(a, b) <= tol::kLemmaKFactor; };
  const auto &a = reps[0], &b = reps[1];
  const bool kind = within(a.maximal_inside.max_ratio, b.maximal_inside.max_ratio) &&
                    within(a.switching.max_ratio, b.switching.max_ratio) &&
                    within(std::exp(a.maximal_outside.max_abs_log), std::exp(b.maximal_outside.max_abs_log));
  ok = ok && kind;
  r.verdict = verdict_of(ok);
  r.detail = "A_p(R_k sigma) " + format_number(ap[0]) + " -> " + format_number(ap[1]) + "; lemma maxima within x3 across k: " +
             (kind ? "yes" : "no") + "; containment " + std::to_string(a.containment_holds + b.containment_holds) + "/" +
             std::to_string(a.containment_pairs + b.containment_pairs);
  r.tables.push_back(std::move(ta));
  r.tables.push_back(std::move(tl));
  r.tables.push_back(std::move(tc));
  return r;
}

// --- 9 -----------------------------------------------------------------------------------

CheckResult good_lambda(const ExperimentConfig& cfg) {
  auto r = make("c09_good_lambda", "Good-lambda inequality");
  const Domain d = Domain::unit_disk();
  const auto ev = KernelEvaluator::closed_form(d);
  const auto f = TestFunction::indicator_ball(d, make_ball(d, CPoint{0.9}, 0.1));
  const std::vector<double> criterion_grid{0.3, 0.1, 0.03, 0.01};
  std::vector<double> gammas{10.0, 3.0, 1.0};
  gammas.insert(gammas.end(), criterion_grid.begin(), criterion_grid.end());
  GoodLambdaSpec gs;
  gs.outer.seed = cfg.seed;
  gs.outer.n_samples = cfg.knob<std::int64_t>("samples", 20000);
  gs.inner.seed = cfg.seed + 1;
  gs.family.seed = cfg.seed;
  const auto rep = good_lambda_experiment(ev, f, Weight::power(d, 0.5, 2.0), 2.0, gammas, {0.05, 0.1, 0.2}, gs);
  Table t{"ratios", {"gamma", "lambda", "ratio", "std_error"}, {}};
  for (std::size_t g = 0; g < gammas.size(); ++g)
    for (std::size_t l = 0; l < rep.lambda_grid.size(); ++l)
      t.add_row({gammas[g], rep.lambda_grid[l], num(rep.ratio_table[g][l]), num(rep.se_table[g][l])});
  Table tm{"mean_ratio", {"gamma", "ratio", "std_error"}, {}};
  for (std::size_t g = 0; g < gammas.size(); ++g) tm.add_row({gammas[g], num(rep.mean_ratio[g]), num(rep.mean_se[g])});

  bool monotone = true;
  const std::size_t first = gammas.size() - criterion_grid.size();
  for (std::size_t g = first + 1; g < gammas.size(); ++g)
    for (std::size_t l = 0; l < rep.lambda_grid.size(); ++l) {
      const double prev = rep.ratio_table[g - 1][l], cur = rep.ratio_table[g][l];
      if (std::isnan(prev) || std::isnan(cur)) continue;
      const double se = std::hypot(rep.se_table[g - 1][l], rep.se_table[g][l]);
      monotone = monotone && cur <= prev + tol::kGoodLambdaSe * se;
    }
  const double final_ratio = rep.mean_ratio.back();
  const bool ok = monotone && final_ratio < tol::kGoodLambdaFinal && rep.fitted_exponent > 0.0;
  r.verdict = verdict_of(ok);
  r.detail = std::string("nonincreasing over {0.3,0.1,0.03,0.01}: ") + (monotone ? "yes" : "no") + "; ratio at 0.01 = " +
             format_number(final_ratio) + "; fitted exponent " + format_number(rep.fitted_exponent) + " on " +
             std::to_string(rep.fit_points) + " positive gamma cells (1/m = " + format_number(1.0 / rep.m_used) + ")";
  r.tables.push_back(std::move(t));
  r.tables.push_back(std::move(tm));
  return r;
}

// --- 10 ----------------------------------------------------------------------------------

CheckResult weighted_norms(const ExperimentConfig& cfg) {
  auto r = make("c10_weighted_boundedness", "Weighted boundedness");
  const Domain d = Domain::unit_disk();
  const auto ev = KernelEvaluator::closed_form(d);
  const Weight sigma = Weight::power(d, 0.5, 2.0);
  const auto bundle = random_bundle(d, cfg.knob<int>("bundle", 20), cfg.seed);
  Table t{"norm_ratios", {"operator", "grid", "sup_ratio", "argmax", "excluded"}, {}};
  bool ok = true;
  std::string detail;
  for (OperatorTag op : {OperatorTag::P, OperatorTag::PPlus, OperatorTag::M}) {
    std::vector<double> sups;
    for (int s : {1, 2}) {
      NormRatioSpec ns;
      ns.outer = QuadratureSpec::polar_gauss(32 * s, 64 * s);
      ns.family.seed = cfg.seed;
      const auto rep = weighted_norm_ratio(op, ev, sigma, 2.0, bundle, ns);
      sups.push_back(rep.sup_ratio);
      t.add_row({to_string(op), std::to_string(32 * s) + "x" + std::to_string(64 * s), num(rep.sup_ratio),
                 rep.argmax >= 0 ? json(bundle[rep.argmax].tag()) : json(nullptr), rep.n_excluded});
    }
    const double ch = rel_change(sups[0], sups[1]);
    ok = ok && std::isfinite(sups[1]) && ch < tol::kNormStable;
    detail += to_string(op) + " " + format_number(sups[1]) + " (change " + format_number(ch) + "); ";
  }
  NormRatioSpec ns;
  ns.family.seed = cfg.seed;
  const auto one = weighted_norm_ratio(OperatorTag::M, ev, sigma, 2.0, {TestFunction::constant(1.0)}, ns);
  t.add_row({"M", "f=1", num(one.sup_ratio), "constant", one.n_excluded});
  ok = ok && one.sup_ratio == 1.0;
  r.verdict = verdict_of(ok);
  r.detail = detail + "M(1) ratio " + format_number(one.sup_ratio, 17);
  r.tables.push_back(std::move(t));
  return r;
}

// --- 11 ----------------------------------------------------------------------------------

CheckResult necessity(const ExperimentConfig& cfg) {
  auto r = make("c11_necessity", "Necessity");
  const Domain d = Domain::unit_disk();
  const auto ev = KernelEvaluator::closed_form(d);
  std::vector<double> radii;
  for (int k = 3; k <= 7; ++k) radii.push_back(std::ldexp(1.0, -k));
  NecessitySpec ns;
  ns.two_ball.ball_nodes.seed = cfg.seed;
  ns.ball_nodes.seed = cfg.seed + 1;
  ns.outer.seed = cfg.seed + 2;

  Table tb{"two_ball", {"radius", "inf_constant", "inf_constant_swapped", "separation_margin"}, {}};
  std::vector<double> infs;
  for (double R : radii) {
    const auto tbr = two_ball_lower_bound(ev, R, ns.two_ball);
    infs.push_back(tbr.inf_constant);
    tb.add_row({R, num(tbr.inf_constant), num(tbr.inf_constant_swapped), num(tbr.separation_margin)});
  }
  const double mean = std::accumulate(infs.begin(), infs.end(), 0.0) / infs.size();
  bool two_ok = true;
  for (double v : infs) two_ok = two_ok && v >= tol::kTwoBallMin && std::abs(v / mean - 1.0) <= tol::kTwoBallSpread;

  Table tn{"necessity", {"t", "radius", "bp_product", "ratio_chi_b2", "ratio_dual_b1", "max_ratio"}, {}};
  auto column = [&](double t, auto get) {
    const auto rows = necessity_probe(ev, Weight::power(d, t, 2.0), 2.0, radii, ns);
    std::vector<double> prod, ratio;
    for (const auto& row : rows) {
      tn.add_row({t, row.radius, num(row.bp_product), num(row.ratio_chi_b2), num(row.ratio_dual_b1), num(row.max_ratio)});
      prod.push_back(row.bp_product);
      ratio.push_back(get(row));
    }
    return std::pair{prod, ratio};
  };
  const auto max_ratio = [](const NecessityRow& row) { return row.max_ratio; };
  const auto [p_in, r_in] = column(0.5, max_ratio);
  const auto [p_out, r_out] = column(1.2, max_ratio);
  auto spread = [](const std::vector<double>& v) {
    return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
  };
  const bool bounded = spread(p_in) <= tol::kNecessityBounded && spread(r_in) <= tol::kNecessityBounded;
  const double gp = growth_per_step(p_out), gr = growth_per_step(r_out);
  const bool diverges = gp >= tol::kNecessityProductGrowth && gr >= tol::kNecessityRatioGrowth;
  r.verdict = verdict_of(two_ok && bounded && diverges);
  r.detail = "two-ball inf " + format_number(*std::min_element(infs.begin(), infs.end())) + ".." +
             format_number(*std::max_element(infs.begin(), infs.end())) + (two_ok ? " ok" : " FAIL") +
             "; t=0.5 bounded " + (bounded ? "yes" : "no") + "; t=1.2 growth per halving: product x" +
             format_number(gp) + " (>= 1.5), ratio x" + format_number(gr) + " (>= 1.3)";
  r.tables.push_back(std::move(tb));
  r.tables.push_back(std::move(tn));
  return r;
}

// --- 12 ----------------------------------------------------------------------------------

CheckResult quadrature(const ExperimentConfig& cfg) {
  auto r = make("c12_quadrature", "Quadrature engine");
  const Domain d = Domain::unit_disk();
  const Integrand one = [](const CPoint&) { return cplx(1.0); };
  Table t{"estimates", {"rule", "n", "value", "std_error", "error"}, {}};
  const auto pg = integrate(d, one, QuadratureSpec::polar_gauss(64, 64));
  const double pg_err = std::abs(pg.real() - kPi);
  t.add_row({"polar_gauss_64x64", 4096, num(pg.real()), num(pg.std_error), num(pg_err)});
  std::vector<double> ns{1e4, 1e5, 1e6}, ses;
  IntegralEstimate big;
  for (double n : ns) {
    const auto e = integrate(d, one, QuadratureSpec::uniform(static_cast<std::int64_t>(n), cfg.seed));
    ses.push_back(e.std_error);
    t.add_row({"uniform", static_cast<std::int64_t>(n), num(e.real()), num(e.std_error), num(e.real() - kPi)});
    big = e;
  }
  const double slope = std::log(ses[2] / ses[0]) / std::log(ns[2] / ns[0]);
  const bool mc_ok = std::abs(big.real() - kPi) <= tol::kMcSigmas * big.std_error;

  // Bit-identical reruns across thread counts.
  const Integrand g = [](const CPoint& w) { return cplx(std::exp(-std::norm(w[0])), std::sin(3.0 * w[0].real())); };
  const int saved = thread_count();
  std::vector<std::pair<std::uint64_t, std::uint64_t>> bits;
  for (int threads : {1, 2, 4}) {
    set_thread_count(threads);
    const auto e = integrate(d, g, QuadratureSpec::stratified(12, 200000, cfg.seed));
    bits.emplace_back(std::bit_cast<std::uint64_t>(e.real()), std::bit_cast<std::uint64_t>(e.std_error));
  }
  set_thread_count(saved);
  const bool identical = std::all_of(bits.begin(), bits.end(), [&](const auto& b) { return b == bits.front(); });
  const bool ok = pg_err <= tol::kPiExact && mc_ok && slope >= tol::kSlopeLo && slope <= tol::kSlopeHi && identical;
  r.verdict = verdict_of(ok);
  r.detail = "PolarGauss error " + format_number(pg_err) + "; MC n=1e6 within 3 SE: " + (mc_ok ? "yes" : "no") +
             "; SE slope " + format_number(slope) + "; identical across 1/2/4 threads: " + (identical ? "yes" : "no");
  r.tables.push_back(std::move(t));
  return r;
}

}  // namespace

std::string format_number(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> list{
      {1, "c01_reproducing", "Reproducing property", 30, reproducing},
      {2, "c02_kernel_cross_validation", "Kernel cross-validation", 30, cross_validation},
      {3, "c03_size_estimates", "Size and boundary-size estimates", 120, size_estimates},
      {4, "c04_smoothness", "Smoothness exponent", 120, smoothness},
      {5, "c05_homogeneity", "Strong homogeneity", 60, homogeneity},
      {6, "c06_boundary_slab", "Boundary slab", 60, slab},
      {7, "c07_bp_characteristic", "B_p characteristic", 120, bp},
      {8, "c08_regularizer", "Regularizer machinery", 180, regularizer},
      {9, "c09_good_lambda", "Good-lambda inequality", 300, good_lambda},
      {10, "c10_weighted_boundedness", "Weighted boundedness", 300, weighted_norms},
      {11, "c11_necessity", "Necessity", 300, necessity},
      {12, "c12_quadrature", "Quadrature engine", 120, quadrature},
  };
  return list;
}

bool known_unattainable(int number) { return number == 11; }

CheckResult run_criterion(const Criterion& c, const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  try {
    r = c.run(cfg);
  } catch (const std::exception& e) {
    r = make(c.id, c.title);
    r.verdict = Verdict::Fail;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.seconds > c.budget_seconds) {
    r.verdict = Verdict::Fail;
    r.detail += "; runtime " + format_number(r.seconds, 3) + " s exceeds budget " + format_number(c.budget_seconds, 3) + " s";
  }
  return r;
}

}  // namespace berglab::harness
