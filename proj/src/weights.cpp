#include "berglab/weights.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "berglab/geometry_probes.hpp"
#include "berglab/parallel.hpp"

namespace berglab {

namespace {

void check_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("weight exponent p must be finite and > 1");
}

}  // namespace

Weight::Weight(std::function<double(const CPoint&)> f, std::string tag, double p)
    : f_(std::move(f)), tag_(std::move(tag)), p_(p) {
  check_p(p);
}

Weight Weight::constant(double value, double p) {
  if (!(value > 0.0)) throw std::invalid_argument("constant weight must be positive");
  Weight w([value](const CPoint&) { return value; }, "constant", p);
  w.constant_ = value;
  return w;
}

Weight Weight::power(const Domain& domain, double t, double p) {
  Weight w([domain, t](const CPoint& z) { return std::pow(-domain.rho(z), t); }, "power", p);
  w.t_ = t;
  if (t == 0.0) w.constant_ = 1.0;
  return w;
}

Weight Weight::table(std::vector<CPoint> points, std::vector<double> values, double p) {
  if (points.empty() || points.size() != values.size()) throw std::invalid_argument("table weight: bad point/value lists");
  for (double v : values)
    if (!(v > 0.0)) throw std::invalid_argument("table weight: values must be positive");
  auto eval = [points = std::move(points), values = std::move(values)](const CPoint& z) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double d = (points[i] - z).norm2();
      if (d < best_d) best_d = d, best = i;
    }
    return values[best];
  };
  return Weight(eval, "table", p);
}

Weight Weight::table_from_csv(const std::string& path, int dim, double p) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weight table '" + path + "'");
  std::string line;
  std::getline(in, line);  // header
  std::vector<CPoint> pts;
  std::vector<double> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<double> cols;
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(std::stod(cell));
    if (static_cast<int>(cols.size()) != 2 * dim + 1)
      throw std::runtime_error("weight table '" + path + "': expected " + std::to_string(2 * dim + 1) + " columns");
    CPoint z(dim);
    for (int j = 0; j < dim; ++j) z[j] = cplx(cols[2 * j], cols[2 * j + 1]);
    pts.push_back(z);
    vals.push_back(cols.back());
  }
  return table(std::move(pts), std::move(vals), p);
}

Weight Weight::custom(std::function<double(const CPoint&)> f, std::string tag, double p) {
  return Weight(std::move(f), std::move(tag), p);
}

Weight Weight::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("weight scale must be positive");
  Weight w([f = f_, factor](const CPoint& z) { return factor * f(z); }, tag_, p_);
  if (constant_) w.constant_ = *constant_ * factor;
  return w;
}

Weight dual_weight(const Weight& w) {
  check_p(w.p());
  const double e = -1.0 / (w.p() - 1.0);
  Weight d = Weight::custom([w, e](const CPoint& z) { return std::pow(w(z), e); }, w.tag(), w.q());
  if (w.power_exponent()) d.t_ = *w.power_exponent() * e;
  if (w.constant_value()) d.constant_ = std::pow(*w.constant_value(), e);
  return d;
}

std::vector<QuasiBall> ball_family(const Domain& domain, const BallFamilySpec& spec) {
  if (spec.radius_grid.empty() || spec.n_centers < 1) throw std::invalid_argument("ball_family: empty grid");
  std::vector<QuasiBall> family;
  for (std::size_t ri = 0; ri < spec.radius_grid.size(); ++ri) {
    const double R = spec.radius_grid[ri];
    if (!(R > 0.0)) throw std::invalid_argument("ball_family: radii must be positive");
    for (int c = 0; c < spec.n_centers; ++c) {
      auto rng = substream(spec.seed, 0xBA11 + ri, static_cast<std::uint64_t>(c));
      double depth;
      if (spec.boundary_touching) {
        depth = R * (spec.depth_lo + (spec.depth_hi - spec.depth_lo) * uniform01(rng));
      } else {
        depth = R * std::exp(uniform01(rng) * std::log(16.0));
      }
      depth = std::min(depth, 0.9);
      // Direction from a uniformly drawn point; depth is the metric boundary distance on disk/ball.
      CPoint z = random_interior_point(domain, rng, depth, depth);
      if (spec.boundary_touching) {
        // Non-ball-like domains: the quasi-distance to the boundary need not equal the depth.
        for (int it = 0; it < 60 && !(boundary_distance(domain, z).value < R); ++it) {
          depth *= 0.5;
          z = random_interior_point(domain, rng, depth, depth);
        }
      }
      family.push_back(make_ball(domain, z, R));
    }
  }
  return family;
}

double min_radius(const std::vector<QuasiBall>& family) {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& b : family) r = std::min(r, b.radius);
  return r;
}

namespace {

struct PerBall {
  double value = 0.0;
  double se = 0.0;
  bool divergent = false;
  bool flagged = false;
};

PerBall per_ball_product(const Domain& domain, const Weight& sigma, const QuasiBall& ball, const QuadratureSpec& spec,
                         std::uint64_t stream) {
  const PointSet nodes = sample_region(domain, bounding_region(domain, ball), spec, stream,
                                       [&](const CPoint& w) { return distance(domain, ball.center, w) < ball.radius; });
  const double p = sigma.p();
  const double e = -1.0 / (p - 1.0);
  // Quantities 3 and 4: sigma' mass in the dyadic boundary bins 2^{-k-1} < 1 - |w| <= 2^{-k} for
  // k = kf-2 and kf-1, the deepest complete bins above the depth floor (disk/ball only).
  const bool binned = domain.is_ball_like() && spec.depth_floor > 0.0;
  const int kf = binned ? static_cast<int>(std::floor(-std::log2(spec.depth_floor))) : 0;
  BlockSums sums(5, nodes.n_blocks);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double s = sigma(nodes.points[i]);
    const double sd = std::pow(s, e);
    const double w = nodes.weights[i];
    sums.add(0, nodes.blocks[i], w);
    sums.add(1, nodes.blocks[i], w * s);
    sums.add(2, nodes.blocks[i], w * sd);
    if (binned) {
      const double h = 1.0 - nodes.points[i].norm();
      const int k = std::clamp(static_cast<int>(std::floor(-std::log2(h))), 0, 63);
      if (k == kf - 2) sums.add(3, nodes.blocks[i], w * sd);
      if (k == kf - 1) sums.add(4, nodes.blocks[i], w * sd);
    }
  }
  auto product = [p](std::span<const double> t) {
    if (!(t[0] > 0.0)) return 0.0;
    return (t[1] / t[0]) * std::pow(t[2] / t[0], p - 1.0);
  };
  PerBall r;
  const auto totals = sums.totals();
  if (!(totals[0] > 0.0)) throw std::runtime_error("B_p product: no sample points inside the ball");
  r.value = product(totals);
  r.se = sums.jackknife_se(product);
  r.flagged = quality_flag(r.value, r.se, spec.rel_tolerance);
  if (binned && kf >= 2 && kf < 64 && totals[3] > 0.0) {
    // A non-decaying bin ratio, by more than two standard errors.
    auto ratio = [](std::span<const double> t) { return t[3] > 0.0 ? t[4] / t[3] : 0.0; };
    r.divergent = ratio(totals) - 2.0 * sums.jackknife_se(ratio) >= 0.95;
  }
  return r;
}

BpEstimate characteristic(const Domain& domain, const Weight& sigma, const std::vector<QuasiBall>& family,
                          const QuadratureSpec& spec, bool require_touching) {
  if (family.empty()) throw std::invalid_argument("characteristic: empty ball family");
  spec.validate();
  QuadratureSpec s = spec;
  if (s.strategy == Strategy::PolarGauss || s.strategy == Strategy::GradedPolar) s.strategy = Strategy::UniformRejection;
  if (s.strategy == Strategy::BoundaryStratified && s.depth_floor <= 0.0)
    s.depth_floor = min_radius(family) * kFamilyDepthFactor;

  BpEstimate est;
  est.p = sigma.p();
  est.n_balls = static_cast<int>(family.size());
  est.min_radius = min_radius(family);
  est.value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& ball = family[i];
    if (require_touching && !(ball.radius > boundary_distance(domain, ball.center).value))
      throw std::invalid_argument("bp_characteristic: family contains a ball that does not touch the boundary");
    PerBall pb;
    if (sigma.is_constant()) {
      pb.value = 1.0;  // closed-form averages
    } else {
      pb = per_ball_product(domain, sigma, ball, s, 0xB0 + i);
    }
    est.per_ball_values.push_back(pb.value);
    est.per_ball_se.push_back(pb.se);
    est.divergent = est.divergent || pb.divergent;
    est.flagged = est.flagged || pb.flagged;
    if (pb.value > est.value) {
      est.value = pb.value;
      est.argmax_ball = ball;
    }
  }
  return est;
}

}  // namespace

BpEstimate bp_characteristic(const Domain& domain, const Weight& sigma, const std::vector<QuasiBall>& family,
                             const QuadratureSpec& spec) {
  return characteristic(domain, sigma, family, spec, true);
}

BpEstimate ap_characteristic(const Domain& domain, const Weight& sigma, const std::vector<QuasiBall>& family,
                             const QuadratureSpec& spec) {
  return characteristic(domain, sigma, family, spec, false);
}

QuasiBall regularizing_ball(const Domain& domain, double k, const CPoint& z) {
  return make_ball(domain, z, k * boundary_distance(domain, z).value);
}

double k_prime(double k, double C_d) {
  if (!(C_d * k < 1.0)) throw std::invalid_argument("k_prime: C_d k must be < 1");
  return C_d * k / (1.0 - C_d * k);
}

IntegralEstimate regularize(const Domain& domain, const Weight& sigma, double k, const CPoint& z,
                            const QuadratureSpec& spec, double C_d, std::uint64_t stream) {
  if (!(k > 0.0 && k < 1.0 / (2.0 * C_d))) throw std::invalid_argument("regularize: k must lie in (0, 1/(2 C_d))");
  if (sigma.is_constant()) return {cplx(*sigma.constant_value()), 0.0, 1, false, 0};
  QuadratureSpec s = spec;
  if (s.strategy != Strategy::UniformRejection) s.strategy = Strategy::UniformRejection;
  const QuasiBall ball = regularizing_ball(domain, k, z);
  const PointSet nodes = sample_region(domain, bounding_region(domain, ball), s, stream,
                                       [&](const CPoint& w) { return distance(domain, z, w) < ball.radius; });
  if (nodes.size() == 0) throw std::runtime_error("regularize: B_k(z) not resolved by the sample");
  BlockSums sums(2, nodes.n_blocks);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    sums.add(0, nodes.blocks[i], nodes.weights[i]);
    sums.add(1, nodes.blocks[i], nodes.weights[i] * std::abs(sigma(nodes.points[i])));
  }
  auto avg = [](std::span<const double> t) { return t[0] > 0.0 ? t[1] / t[0] : 0.0; };
  IntegralEstimate est;
  est.value = avg(sums.totals());
  est.std_error = sums.jackknife_se(avg);
  est.n_effective = static_cast<std::int64_t>(nodes.size());
  est.flagged = quality_flag(est.real(), est.std_error, spec.rel_tolerance);
  return est;
}

Weight regularized_weight(const Domain& domain, const Weight& sigma, double k, const QuadratureSpec& spec, double C_d) {
  if (!(k > 0.0 && k < 1.0 / (2.0 * C_d))) throw std::invalid_argument("regularize: k must lie in (0, 1/(2 C_d))");
  auto f = [domain, sigma, k, spec, C_d](const CPoint& z) {
    // Stream keyed by the point so the weight is a deterministic function of z.
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    for (int j = 0; j < z.dim(); ++j) {
      h ^= std::bit_cast<std::uint64_t>(z[j].real()) + (h << 6) + (h >> 2);
      h ^= std::bit_cast<std::uint64_t>(z[j].imag()) + (h << 6) + (h >> 2);
    }
    return regularize(domain, sigma, k, z, spec, C_d, h).real();
  };
  return Weight::custom(f, "regularized " + sigma.tag(), sigma.p());
}

IntegralEstimate weight_doubling_probe(const Domain& domain, const Weight& sigma, const QuasiBall& ball, double lambda,
                                       double lambda_prime, const QuadratureSpec& spec, std::uint64_t stream) {
  if (!(lambda >= 1.0) || !(lambda_prime >= 1.0)) throw std::invalid_argument("weight_doubling_probe: lambdas must be >= 1");
  if (!(lambda * ball.radius > boundary_distance(domain, ball.center).value))
    throw std::invalid_argument("weight_doubling_probe: hypothesis unmet, lambda B does not touch the boundary");
  auto s = [&](const CPoint& w) { return cplx(sigma(w)); };
  const auto big = integrate_ball(domain, ball.dilate(lambda_prime), s, spec, stream);
  const auto small = integrate_ball(domain, ball, s, spec, stream);
  if (!(small.real() > 0.0)) throw std::runtime_error("weight_doubling_probe: sigma(B) estimate vanished");
  IntegralEstimate r;
  r.value = big.real() / small.real();
  r.std_error = std::abs(r.real()) * std::hypot(big.std_error / big.real(), small.std_error / small.real());
  if (lambda_prime == 1.0) r.std_error = 0.0;
  r.n_effective = std::min(big.n_effective, small.n_effective);
  r.flagged = big.flagged || small.flagged;
  return r;
}

DualityCheck duality_identity_check(const Domain& domain, const Weight& sigma, const std::vector<QuasiBall>& family,
                                    const QuadratureSpec& spec) {
  const Weight dual = dual_weight(sigma);
  const double q = sigma.q();
  DualityCheck out;
  out.n_balls = static_cast<int>(family.size());
  // Same nodes for both products: the identity is algebraic, so any deviation is rounding.
  const auto bp = ap_characteristic(domain, sigma, family, spec);
  const auto bq = ap_characteristic(domain, dual, family, spec);
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double vp = bp.per_ball_values[i], vq = bq.per_ball_values[i];
    const double dev = std::abs(vq - std::pow(vp, q - 1.0));
    const double se = std::hypot(bq.per_ball_se[i], (q - 1.0) * std::pow(vp, q - 2.0) * bp.per_ball_se[i]);
    out.max_abs_deviation = std::max(out.max_abs_deviation, dev);
    if (se > 0.0) {
      out.max_deviation_in_se = std::max(out.max_deviation_in_se, dev / se);
    } else if (dev > 0.0) {
      out.max_deviation_in_se = std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

}  // namespace berglab
