#include "berglab/necessity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "berglab/parallel.hpp"

namespace berglab {

namespace {

PointSet ball_nodes(const Domain& domain, const QuasiBall& b, QuadratureSpec spec, std::uint64_t stream) {
  if (spec.strategy == Strategy::PolarGauss || spec.strategy == Strategy::GradedPolar)
    spec.strategy = Strategy::UniformRejection;
  if (spec.strategy == Strategy::BoundaryStratified && spec.depth_floor == 0.0)
    spec.depth_floor = b.radius * kFamilyDepthFactor;
  PointSet ns = sample_region(domain, bounding_region(domain, b), spec, stream,
                              [&](const CPoint& w) { return b.contains(domain, w); });
  if (ns.size() == 0) throw std::runtime_error("necessity: no nodes landed in the ball");
  return ns;
}

CPoint rotate(const CPoint& z, double theta) {
  CPoint r = z;
  r[0] *= std::polar(1.0, theta);
  return r;
}

// |P chi_A(z)| / <chi_A>_A = |sum over A nodes of K(z, w) weight| on each grid point; inf over the grid.
double inf_projection(const KernelEvaluator& ev, const PointSet& support, const std::vector<CPoint>& grid) {
  std::vector<double> v(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < support.size(); ++j) s += ev(grid[i], support.points[j]) * support.weights[j];
    v[i] = std::abs(s);
  });
  return *std::min_element(v.begin(), v.end());
}

std::vector<CPoint> grid_in(const Domain& domain, const QuasiBall& b, int n, std::uint64_t seed) {
  std::vector<CPoint> g{b.center};
  const PointSet ns = ball_nodes(domain, b, QuadratureSpec::uniform(4 * n, seed), 0x6B1D);
  for (std::size_t i = 0; i < ns.size() && static_cast<int>(g.size()) < n; ++i) g.push_back(ns.points[i]);
  return g;
}

}  // namespace

TwoBallResult two_ball_lower_bound(const KernelEvaluator& ev, double R, const TwoBallSpec& spec) {
  const Domain& d = ev.domain();
  if (!d.is_ball_like()) throw std::invalid_argument("two_ball_lower_bound: disk and ball only");
  if (!(R > 0.0 && R < 0.5)) throw std::invalid_argument("two_ball_lower_bound: R must lie in (0, 0.5)");
  if (!(spec.depth_fraction > 0.0 && spec.depth_fraction < 1.0))
    throw std::invalid_argument("two_ball_lower_bound: depth_fraction must lie in (0, 1)");
  if (spec.grid_points < 1 || spec.scan_steps < 2) throw std::invalid_argument("two_ball_lower_bound: bad grid sizes");
  const MetricTag tag = canonical_metric(d);
  CPoint zeta0(d.dim());
  zeta0[0] = 1.0 - spec.depth_fraction * R;
  TwoBallResult out;
  out.b1 = {zeta0, R, tag};
  const PointSet n1 = ball_nodes(d, out.b1, spec.ball_nodes, 1);
  double max_d1 = 0.0;
  for (const auto& w : n1.points) max_d1 = std::max(max_d1, distance(d, zeta0, w));

  // Rotation angle giving d(zeta0, rotate(zeta0, theta)) = target, by bisection.
  auto angle_for = [&](double target) {
    double lo = 0.0, hi = kPi;
    if (distance(d, zeta0, rotate(zeta0, hi)) < target) return -1.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (distance(d, zeta0, rotate(zeta0, mid)) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };

  bool found = false;
  for (int s = 0; s < spec.scan_steps && !found; ++s) {
    const double t = 0.5 + static_cast<double>(s) / (spec.scan_steps - 1);
    const double theta = angle_for(t * spec.C * R);
    if (theta < 0.0) continue;
    const QuasiBall b2{rotate(zeta0, theta), R, tag};
    const auto grid = grid_in(d, b2, spec.grid_points, spec.ball_nodes.seed);
    double min_d2 = std::numeric_limits<double>::infinity();
    for (const auto& z : grid) min_d2 = std::min(min_d2, distance(d, zeta0, z));
    const double margin = min_d2 / (spec.C2 * max_d1);
    if (margin < 1.0) continue;
    found = true;
    out.b2 = b2;
    out.scan_t = t;
    out.separation_margin = margin;
    out.inf_constant = inf_projection(ev, n1, grid);
    const PointSet n2 = ball_nodes(d, b2, spec.ball_nodes, 2);
    const auto grid1 = grid_in(d, out.b1, spec.grid_points, spec.ball_nodes.seed + 1);
    out.inf_constant_swapped = inf_projection(ev, n2, grid1);
  }
  if (!found) {
    std::ostringstream msg;
    msg << "two_ball_lower_bound: no admissible B2 in the annulus d(zeta0, c) in [" << 0.5 * spec.C * R << ", "
        << 1.5 * spec.C * R << "]";
    throw std::runtime_error(msg.str());
  }
  return out;
}

std::vector<NecessityRow> necessity_probe(const KernelEvaluator& ev, const Weight& sigma, double p,
                                          const std::vector<double>& radii, const NecessitySpec& spec) {
  if (radii.empty()) throw std::invalid_argument("necessity_probe: empty radius list");
  if (!(p > 1.0)) throw std::invalid_argument("necessity_probe: p must exceed 1");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] < radii[i - 1])) throw std::invalid_argument("necessity_probe: radii must decrease");
  const Domain& d = ev.domain();
  const Weight dual = dual_weight(sigma);
  std::vector<NecessityRow> rows;
  for (std::size_t r = 0; r < radii.size(); ++r) {
    const double R = radii[r];
    const TwoBallResult tb = two_ball_lower_bound(ev, R, spec.two_ball);
    NecessityRow row;
    row.radius = R;
    row.inf_constant = tb.inf_constant;

    const PointSet n1 = ball_nodes(d, tb.b1, spec.ball_nodes, 10 + 3 * r);
    const PointSet n2 = ball_nodes(d, tb.b2, spec.ball_nodes, 11 + 3 * r);
    double m1 = 0.0, s1 = 0.0, d1 = 0.0;
    std::vector<double> dual1(n1.size());
    for (std::size_t i = 0; i < n1.size(); ++i) {
      dual1[i] = dual(n1.points[i]);
      m1 += n1.weights[i];
      s1 += n1.weights[i] * sigma(n1.points[i]);
      d1 += n1.weights[i] * dual1[i];
    }
    row.bp_product = sigma.is_constant() ? 1.0 : (s1 / m1) * std::pow(d1 / m1, p - 1.0);

    // ||f||^p: sigma(B2) for chi_B2, int_B1 sigma' for sigma' chi_B1.
    double norm_chi = 0.0;
    for (std::size_t i = 0; i < n2.size(); ++i) norm_chi += n2.weights[i] * sigma(n2.points[i]);
    const double norm_dual = d1;

    const QuasiBall outer_ball{tb.b1.center, spec.outer_dilation * spec.two_ball.C * R, tb.b1.metric_tag};
    const PointSet no = ball_nodes(d, outer_ball, spec.outer, 12 + 3 * r);
    std::vector<double> a(no.size()), b(no.size());
    parallel_for(no.size(), [&](std::size_t i) {
      const CPoint& z = no.points[i];
      cplx pc = 0.0, pd = 0.0;
      for (std::size_t j = 0; j < n2.size(); ++j) pc += ev(z, n2.points[j]) * n2.weights[j];
      for (std::size_t j = 0; j < n1.size(); ++j) pd += ev(z, n1.points[j]) * (n1.weights[j] * dual1[j]);
      const double s = no.weights[i] * sigma(z);
      a[i] = s * std::pow(std::abs(pc), p);
      b[i] = s * std::pow(std::abs(pd), p);
    });
    double pa = 0.0, pb = 0.0;
    for (std::size_t i = 0; i < no.size(); ++i) pa += a[i], pb += b[i];
    row.ratio_chi_b2 = std::pow(pa / norm_chi, 1.0 / p);
    row.ratio_dual_b1 = std::pow(pb / norm_dual, 1.0 / p);
    row.max_ratio = std::max(row.ratio_chi_b2, row.ratio_dual_b1);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace berglab
