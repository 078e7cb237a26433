#include "berglab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace berglab {

MetricTag canonical_metric(const Domain& domain) {
  switch (domain.kind()) {
    case DomainKind::UnitDisk:
    case DomainKind::UnitBall:
      return MetricTag::BallFormula;
    case DomainKind::EggDomain:
      return MetricTag::PolydiscSymmetrized;
    case DomainKind::ProductDisk:
      return MetricTag::ProductSum;
  }
  return MetricTag::BallFormula;
}

std::string to_string(MetricTag tag) {
  switch (tag) {
    case MetricTag::BallFormula:
      return "ball_formula";
    case MetricTag::PolydiscSymmetrized:
      return "polydisc_symmetrized";
    case MetricTag::ProductSum:
      return "product_sum";
  }
  return "?";
}

namespace {

constexpr double kOriginTol = 1e-300;

FlaggedValue radial_angular(double rz, double rw, cplx zw_inner) {
  if (rz <= kOriginTol || rw <= kOriginTol) {
    const bool both = rz <= kOriginTol && rw <= kOriginTol;
    return {std::abs(rw - rz) + (both ? 0.0 : 1.0), true};
  }
  return {std::abs(rw - rz) + std::abs(1.0 - zw_inner / (rw * rz)), false};
}

}  // namespace

FlaggedValue ball_metric(const Domain& domain, const CPoint& z, const CPoint& w) {
  if (!domain.is_ball_like()) throw std::invalid_argument("ball_metric: disk or ball only");
  // <w,z> and <z,w> are conjugate, so the formula is symmetric.
  return radial_angular(z.norm(), w.norm(), inner(w, z));
}

FlaggedValue product_metric(const Domain& domain, const CPoint& z, const CPoint& w) {
  if (domain.kind() != DomainKind::ProductDisk) throw std::invalid_argument("product_metric: ProductDisk only");
  FlaggedValue total;
  for (int j = 0; j < domain.dim(); ++j) {
    auto f = radial_angular(std::abs(z[j]), std::abs(w[j]), w[j] * std::conj(z[j]));
    total.value += f.value;
    total.flagged = total.flagged || f.flagged;
  }
  return total;
}

std::array<cplx, CPoint::kMaxDim> FrameBasis::coordinates(const CPoint& w) const {
  std::array<cplx, CPoint::kMaxDim> c{};
  const CPoint diff = w - center;
  for (int j = 0; j < dim; ++j) c[j] = inner(diff, dirs[j]);
  return c;
}

CPoint FrameBasis::point(const std::array<cplx, CPoint::kMaxDim>& coords) const {
  CPoint p = center;
  for (int j = 0; j < dim; ++j) p += coords[j] * dirs[j];
  return p;
}

FrameBasis frame_basis(const Domain& domain, const CPoint& q) {
  domain.check_point(q);
  FrameBasis basis;
  basis.center = q;
  basis.dim = domain.dim();
  CPoint g = domain.gradient(q);
  const double gn = g.norm();
  if (!(gn > 1e-14)) throw std::domain_error("polydisc frame undefined: gradient of rho vanishes");
  basis.dirs[0] = (1.0 / gn) * g;
  int filled = 1;
  for (int axis = 0; axis < basis.dim && filled < basis.dim; ++axis) {
    CPoint v = unit_vector(basis.dim, axis);
    for (int k = 0; k < filled; ++k) v -= inner(v, basis.dirs[k]) * basis.dirs[k];
    const double vn = v.norm();
    if (vn < 1e-8) continue;
    basis.dirs[filled++] = (1.0 / vn) * v;
  }
  return basis;
}

namespace {

double max_rho_change(const Domain& domain, const FrameBasis& basis, int j, double t, int angles) {
  const double r0 = domain.rho(basis.center);
  double worst = 0.0;
  for (int a = 0; a < angles; ++a) {
    const cplx step = std::polar(t, 2.0 * kPi * a / angles);
    worst = std::max(worst, std::abs(domain.rho(basis.center + step * basis.dirs[j]) - r0));
  }
  return worst;
}

}  // namespace

double tangential_radius(const Domain& domain, const FrameBasis& basis, int j, double delta,
                         const GeometryConfig& cfg) {
  if (j < 1 || j >= basis.dim) throw std::out_of_range("tangential_radius: j out of range");
  if (!(delta > 0.0)) throw std::invalid_argument("tangential_radius: delta must be positive");
  auto ok = [&](double t) { return max_rho_change(domain, basis, j, t, cfg.angle_grid) <= delta; };
  constexpr double kCap = 4.0;
  double lo = std::min(delta, 1.0);
  double hi = lo;
  if (ok(lo)) {
    while (ok(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > kCap)
        throw BracketError("tangential_radius: no violation below t = " + std::to_string(kCap) + " (delta = " +
                           std::to_string(delta) + ", direction " + std::to_string(j) + ")");
    }
  } else {
    while (!ok(lo)) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-15) throw BracketError("tangential_radius: rho changes by more than delta at t ~ 0");
    }
  }
  while (hi - lo > cfg.rel_tol * lo) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

double PolydiscFrame::dilation_needed(const CPoint& w) const {
  const auto c = basis.coordinates(w);
  double s = 0.0;
  for (int j = 0; j < basis.dim; ++j) s = std::max(s, std::abs(c[j]) / tau[j]);
  return s;
}

double PolydiscFrame::volume() const {
  double v = 1.0;
  for (int j = 0; j < basis.dim; ++j) v *= kPi * tau[j] * tau[j];
  return v;
}

PolydiscFrame polydisc_frame(const Domain& domain, const CPoint& q, double delta, const GeometryConfig& cfg) {
  if (!(delta > 0.0 && delta < cfg.delta_max)) throw std::invalid_argument("polydisc_frame: delta must lie in (0, delta_max)");
  PolydiscFrame frame;
  frame.basis = frame_basis(domain, q);
  frame.delta = delta;
  frame.tau[0] = delta;
  for (int j = 1; j < frame.basis.dim; ++j) frame.tau[j] = tangential_radius(domain, frame.basis, j, delta, cfg);
  return frame;
}

FlaggedValue polydisc_quasi_distance(const Domain& domain, const CPoint& z, const CPoint& w,
                                     const GeometryConfig& cfg) {
  if (z == w) return {0.0, false};
  const FrameBasis basis = frame_basis(domain, z);
  const auto c = basis.coordinates(w);
  // w lies in P(z, eps) iff |c_0| < eps and the rho-variation at radius |c_j| stays below eps,
  // so the infimum is read off directly instead of bisecting on eps.
  double m = std::abs(c[0]);
  for (int j = 1; j < basis.dim; ++j) m = std::max(m, max_rho_change(domain, basis, j, std::abs(c[j]), cfg.angle_grid));
  if (m >= cfg.delta_max) return {cfg.delta_max, true};
  return {m, false};
}

FlaggedValue polydisc_metric(const Domain& domain, const CPoint& z, const CPoint& w, const GeometryConfig& cfg) {
  const auto a = polydisc_quasi_distance(domain, z, w, cfg);
  const auto b = polydisc_quasi_distance(domain, w, z, cfg);
  return {a.value + b.value, a.flagged || b.flagged};
}

FlaggedValue metric(const Domain& domain, const CPoint& z, const CPoint& w) {
  switch (canonical_metric(domain)) {
    case MetricTag::BallFormula:
      return ball_metric(domain, z, w);
    case MetricTag::PolydiscSymmetrized:
      return polydisc_metric(domain, z, w);
    case MetricTag::ProductSum:
      return product_metric(domain, z, w);
  }
  return {};
}

CPoint normal_projection(const Domain& domain, const CPoint& z) {
  domain.check_point(z);
  CPoint g = domain.gradient(z);
  const double gn = g.norm();
  if (!(gn > 1e-14)) throw std::domain_error("normal_projection: gradient of rho vanishes");
  const CPoint n = (1.0 / gn) * g;
  double lo = 0.0, hi = std::max(1e-6, domain.euclidean_boundary_distance(z));
  while (domain.rho(z + hi * n) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 4.0) throw BracketError("normal_projection: normal ray does not exit the domain");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (domain.rho(z + mid * n) < 0.0 ? lo : hi) = mid;
  }
  return z + hi * n;
}

FlaggedValue boundary_distance(const Domain& domain, const CPoint& z) {
  domain.check_point(z);
  if (!domain.contains(z)) throw std::invalid_argument("boundary_distance: point is not interior");
  if (!(domain.gradient(z).norm() > 1e-14)) {
    // Radial term only; the angular term has no meaning at the centre.
    return {domain.euclidean_boundary_distance(z), true};
  }
  const CPoint p = normal_projection(domain, z);
  auto d = metric(domain, z, p);
  return d;
}

QuasiBall make_ball(const Domain& domain, const CPoint& center, double radius) {
  domain.check_point(center);
  if (!(radius > 0.0)) throw std::invalid_argument("quasi-ball radius must be positive");
  if (!domain.contains(center)) throw std::invalid_argument("quasi-ball center must be interior");
  return {center, radius, canonical_metric(domain)};
}

void GeometryCalibration::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v >= 1.0; };
  if (!ok(triangle_constant) || !ok(homogeneity_c0) || !ok(engulf_C) || !ok(engulf_D))
    throw std::invalid_argument("GeometryCalibration: constants must be finite and >= 1");
  if (!(std::isfinite(homogeneity_m) && homogeneity_m > 0.0))
    throw std::invalid_argument("GeometryCalibration: exponent m must be positive");
}

}  // namespace berglab
