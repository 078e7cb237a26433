#include "berglab/quadrature.hpp"

#include <algorithm>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "berglab/parallel.hpp"

namespace berglab {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::UniformRejection:
      return "uniform";
    case Strategy::BoundaryStratified:
      return "stratified";
    case Strategy::PolarGauss:
      return "polar_gauss";
    case Strategy::GradedPolar:
      return "graded_polar";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "uniform") return Strategy::UniformRejection;
  if (s == "stratified") return Strategy::BoundaryStratified;
  if (s == "polar_gauss") return Strategy::PolarGauss;
  if (s == "graded_polar") return Strategy::GradedPolar;
  throw std::invalid_argument("unknown quadrature strategy '" + s + "'");
}

void QuadratureSpec::validate() const {
  if (n_samples < 1) throw std::invalid_argument("QuadratureSpec: n_samples must be >= 1");
  if (!(rel_tolerance > 0.0)) throw std::invalid_argument("QuadratureSpec: rel_tolerance must be > 0");
  if (layer_count < 1) throw std::invalid_argument("QuadratureSpec: layer_count must be >= 1");
  if (radial_nodes < 1 || angular_nodes < 1) throw std::invalid_argument("QuadratureSpec: node counts must be >= 1");
  if (depth_floor < 0.0) throw std::invalid_argument("QuadratureSpec: depth_floor must be >= 0");
}

QuadratureSpec QuadratureSpec::uniform(std::int64_t n, std::uint64_t seed) {
  QuadratureSpec s;
  s.strategy = Strategy::UniformRejection;
  s.n_samples = n;
  s.seed = seed;
  return s;
}

QuadratureSpec QuadratureSpec::stratified(int layers, std::int64_t n, std::uint64_t seed) {
  QuadratureSpec s;
  s.strategy = Strategy::BoundaryStratified;
  s.layer_count = layers;
  s.n_samples = n;
  s.seed = seed;
  return s;
}

QuadratureSpec QuadratureSpec::polar_gauss(int radial, int angular) {
  QuadratureSpec s;
  s.strategy = Strategy::PolarGauss;
  s.radial_nodes = radial;
  s.angular_nodes = angular;
  return s;
}

QuadratureSpec QuadratureSpec::graded(int panels_per_octave, int nodes_per_panel) {
  QuadratureSpec s;
  s.strategy = Strategy::GradedPolar;
  s.radial_nodes = panels_per_octave;
  s.angular_nodes = nodes_per_panel;
  return s;
}

double PointSet::total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

bool quality_flag(double value_abs, double std_error, double rel_tolerance) {
  return std_error > rel_tolerance * std::max(value_abs, kAbsoluteFloor);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  static std::mutex cache_mutex;
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    std::vector<double> x, w;
    const auto zeros = boost::math::legendre_p_zeros<double>(n);  // nonnegative half
    for (double z : zeros) {
      const double dp = boost::math::legendre_p_prime(n, z);
      const double wt = 2.0 / ((1.0 - z * z) * dp * dp);
      x.push_back(z);
      w.push_back(wt);
      if (z != 0.0) {
        x.push_back(-z);
        w.push_back(wt);
      }
    }
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    std::vector<double> xs, ws;
    for (auto i : order) xs.push_back(x[i]), ws.push_back(w[i]);
    it = cache.emplace(n, std::make_pair(xs, ws)).first;
  }
  nodes = it->second.first;
  weights = it->second.second;
}

// ---------------------------------------------------------------------------------------
// Regions

namespace {

FrameBasis complete_basis(const CPoint& axis) {
  FrameBasis b;
  b.dim = axis.dim();
  b.center = CPoint(axis.dim());
  const double an = axis.norm();
  b.dirs[0] = an > 0.0 ? (1.0 / an) * axis : unit_vector(axis.dim(), 0);
  int filled = 1;
  for (int k = 0; k < b.dim && filled < b.dim; ++k) {
    CPoint v = unit_vector(b.dim, k);
    for (int i = 0; i < filled; ++i) v -= inner(v, b.dirs[i]) * b.dirs[i];
    const double vn = v.norm();
    if (vn < 1e-8) continue;
    b.dirs[filled++] = (1.0 / vn) * v;
  }
  return b;
}

BoxRegion unit_box(const Domain& domain) {
  BoxRegion r;
  r.basis = complete_basis(unit_vector(domain.dim(), 0));
  for (int j = 0; j < domain.dim(); ++j) {
    r.basis.dirs[j] = unit_vector(domain.dim(), j);
    r.radii[j] = 1.0;
  }
  return r;
}

}  // namespace

SampleRegion whole_domain_region(const Domain& domain) {
  if (domain.is_ball_like()) return PolarRegion{unit_vector(domain.dim(), 0), 0.0, 1.0, 2.0};
  return unit_box(domain);
}

SampleRegion bounding_region(const Domain& domain, const QuasiBall& ball) {
  const double R = ball.radius;
  switch (canonical_metric(domain)) {
    case MetricTag::BallFormula: {
      const double rc = ball.center.norm();
      if (rc <= 1e-300) {
        // d(0, w) = |w| + 1 away from the origin.
        return PolarRegion{unit_vector(domain.dim(), 0), 0.0, std::clamp(R - 1.0, 0.0, 1.0), 2.0};
      }
      return PolarRegion{ball.center, std::max(0.0, rc - R), std::min(1.0, rc + R), R};
    }
    case MetricTag::ProductSum: {
      BoxRegion r;
      r.basis = complete_basis(unit_vector(domain.dim(), 0));
      r.basis.center = ball.center;
      for (int j = 0; j < domain.dim(); ++j) {
        r.basis.dirs[j] = unit_vector(domain.dim(), j);
        r.radii[j] = std::min(2.0 * R, 1.0 + std::abs(ball.center[j]));
      }
      return r;
    }
    case MetricTag::PolydiscSymmetrized: {
      const GeometryConfig cfg;
      if (R >= cfg.delta_max) return unit_box(domain);
      // d < R forces M(center, w) < R, i.e. w in P(center, R).
      const PolydiscFrame frame = polydisc_frame(domain, ball.center, R, cfg);
      BoxRegion r;
      r.basis = frame.basis;
      for (int j = 0; j < domain.dim(); ++j) r.radii[j] = frame.tau[j];
      return r;
    }
  }
  return unit_box(domain);
}

// ---------------------------------------------------------------------------------------
// Monte Carlo sampling

namespace {

struct Layer {
  double d_lo, d_hi;  // boundary-distance window (1 - s)
};

std::vector<Layer> make_layers(double d_lo, double d_hi, const QuadratureSpec& spec) {
  if (spec.strategy != Strategy::BoundaryStratified) return {{d_lo, d_hi}};
  const double lower = std::max(d_lo, spec.depth_floor);
  if (lower >= d_hi) return {};
  std::vector<Layer> layers;
  int count = spec.layer_count;
  if (lower > 0.0) count = std::clamp(static_cast<int>(std::ceil(std::log2(d_hi / lower) - 1e-12)), 1, 60);
  double top = d_hi;
  for (int j = 0; j < count; ++j) {
    const double bottom = (j == count - 1) ? lower : std::max(lower, top * 0.5);
    layers.push_back({bottom, top});
    top = bottom;
    if (top <= lower) break;
  }
  return layers;
}

double sphere_area(int real_dim_minus_one) {
  // |S^k| = 2 pi^{(k+1)/2} / Gamma((k+1)/2)
  const double h = 0.5 * (real_dim_minus_one + 1);
  return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

// Jackknife blocks for a sample of n draws split over `cells` strata: 32, or fewer so that each
// block keeps ~16 draws per stratum.
int block_count(std::int64_t n, std::size_t cells) {
  const std::int64_t per = n / (16 * static_cast<std::int64_t>(std::max<std::size_t>(cells, 1)));
  return static_cast<int>(std::clamp<std::int64_t>(per, 2, kJackknifeBlocks));
}

void sample_polar(const Domain& domain, const PolarRegion& region, const QuadratureSpec& spec, std::uint64_t stream,
                  const Keep& keep, PointSet& out) {
  const int n = domain.dim();
  const double s_lo = std::clamp(region.s_lo, 0.0, 1.0);
  const double s_hi = std::clamp(region.s_hi, 0.0, 1.0);
  out.n_blocks = kJackknifeBlocks;
  if (s_hi <= s_lo) return;
  const auto layers = make_layers(1.0 - s_hi, 1.0 - s_lo, spec);
  if (layers.empty()) return;
  const int n_blocks = block_count(spec.n_samples, layers.size());
  out.n_blocks = n_blocks;

  const FrameBasis frame = complete_basis(region.axis);
  const bool full = region.cap >= 2.0 || region.axis.norm() <= 1e-300;

  // Angular parametrisation and its measure.
  double phi_half = kPi;               // n == 1
  double re_lo = -1.0, im_half = 1.0;  // n >= 2: alpha = <u, axis> in a box
  double angular_measure = 0.0;
  if (n == 1) {
    if (!full) phi_half = 2.0 * std::asin(std::min(1.0, region.cap / 2.0));
    angular_measure = 2.0 * phi_half;
  } else {
    if (!full) {
      re_lo = std::max(-1.0, 1.0 - region.cap);
      im_half = std::min(1.0, region.cap);
    }
    angular_measure = (1.0 - re_lo) * 2.0 * im_half * sphere_area(2 * n - 3);
  }

  const std::int64_t per_cell =
      std::max<std::int64_t>(1, (spec.n_samples + static_cast<std::int64_t>(layers.size()) * n_blocks - 1) /
                                    (static_cast<std::int64_t>(layers.size()) * n_blocks));
  const std::int64_t per_layer = per_cell * n_blocks;
  out.n_drawn = per_layer * static_cast<std::int64_t>(layers.size());

  struct LayerInfo {
    double t_lo, t_hi, weight;
  };
  std::vector<LayerInfo> info;
  for (const auto& L : layers) {
    // s^{2n} at the layer ends via log1p for accuracy near the boundary.
    const double a = std::exp(2.0 * n * std::log1p(-std::min(L.d_hi, 1.0)));
    const double b = std::exp(2.0 * n * std::log1p(-L.d_lo));
    const double radial = (b - a) / (2.0 * n);
    info.push_back({a, b, radial * angular_measure / static_cast<double>(per_layer)});
  }

  std::vector<PointSet> parts(n_blocks);
  parallel_for(n_blocks, [&](std::size_t blk) {
    auto rng = substream(spec.seed, stream, blk);
    std::normal_distribution<double> gauss;
    PointSet& part = parts[blk];
    for (std::size_t li = 0; li < info.size(); ++li) {
      const auto& L = info[li];
      for (std::int64_t k = 0; k < per_cell; ++k) {
        const double t = L.t_lo + uniform01(rng) * (L.t_hi - L.t_lo);
        const double s = std::pow(t, 1.0 / (2.0 * n));
        CPoint u(n);
        double density = 1.0;
        if (n == 1) {
          const double phi = (2.0 * uniform01(rng) - 1.0) * phi_half;
          u = std::polar(1.0, phi) * frame.dirs[0];
        } else {
          const cplx alpha(re_lo + uniform01(rng) * (1.0 - re_lo), (2.0 * uniform01(rng) - 1.0) * im_half);
          const double rest2 = 1.0 - std::norm(alpha);
          CPoint xi(n);
          double xn = 0.0;
          std::array<cplx, CPoint::kMaxDim> g{};
          for (int j = 1; j < n; ++j) {
            g[j] = cplx(gauss(rng), gauss(rng));
            xn += std::norm(g[j]);
          }
          if (rest2 <= 0.0) continue;
          xn = std::sqrt(xn);
          for (int j = 1; j < n; ++j) xi += (g[j] / xn) * frame.dirs[j];
          density = std::pow(rest2, n - 2);
          // <u, axis> = alpha: u = conj-free combination since dirs[0] is the unit axis.
          u = alpha * frame.dirs[0] + std::sqrt(rest2) * xi;
        }
        const CPoint w = s * u;
        if (!domain.contains(w)) continue;
        if (keep && !keep(w)) continue;
        part.points.push_back(w);
        part.weights.push_back(L.weight * density);
        part.blocks.push_back(static_cast<int>(blk));
      }
    }
  });
  for (auto& p : parts) {
    out.points.insert(out.points.end(), p.points.begin(), p.points.end());
    out.weights.insert(out.weights.end(), p.weights.begin(), p.weights.end());
    out.blocks.insert(out.blocks.end(), p.blocks.begin(), p.blocks.end());
  }
}

void sample_box(const Domain& domain, const BoxRegion& region, const QuadratureSpec& spec, std::uint64_t stream,
                const Keep& keep, PointSet& out) {
  const int n = domain.dim();
  const int n_blocks = block_count(spec.n_samples, 1);
  out.n_blocks = n_blocks;
  const std::int64_t per_block = std::max<std::int64_t>(1, (spec.n_samples + n_blocks - 1) / n_blocks);
  out.n_drawn = per_block * n_blocks;
  double volume = 1.0;
  for (int j = 0; j < n; ++j) volume *= kPi * region.radii[j] * region.radii[j];
  const double weight = volume / static_cast<double>(out.n_drawn);

  std::vector<PointSet> parts(n_blocks);
  parallel_for(n_blocks, [&](std::size_t blk) {
    auto rng = substream(spec.seed, stream, blk);
    PointSet& part = parts[blk];
    std::array<cplx, CPoint::kMaxDim> c{};
    for (std::int64_t k = 0; k < per_block; ++k) {
      for (int j = 0; j < n; ++j) {
        const double r = region.radii[j] * std::sqrt(uniform01(rng));
        c[j] = std::polar(r, 2.0 * kPi * uniform01(rng));
      }
      const CPoint w = region.basis.point(c);
      if (!domain.contains(w)) continue;
      if (keep && !keep(w)) continue;
      part.points.push_back(w);
      part.weights.push_back(weight);
      part.blocks.push_back(static_cast<int>(blk));
    }
  });
  for (auto& p : parts) {
    out.points.insert(out.points.end(), p.points.begin(), p.points.end());
    out.weights.insert(out.weights.end(), p.weights.begin(), p.weights.end());
    out.blocks.insert(out.blocks.end(), p.blocks.begin(), p.blocks.end());
  }
}

// Hit-or-miss: i.i.d. points of the real cube [-1, 1]^{2n}, which contains every model domain.
PointSet sample_cube(const Domain& domain, const QuadratureSpec& spec) {
  const int n = domain.dim();
  PointSet out;
  const int n_blocks = block_count(spec.n_samples, 1);
  out.n_blocks = n_blocks;
  const std::int64_t per_block = std::max<std::int64_t>(1, (spec.n_samples + n_blocks - 1) / n_blocks);
  out.n_drawn = per_block * n_blocks;
  const double weight = std::pow(4.0, n) / static_cast<double>(out.n_drawn);

  std::vector<PointSet> parts(n_blocks);
  parallel_for(n_blocks, [&](std::size_t blk) {
    auto rng = substream(spec.seed, 0xC0BE, blk);
    PointSet& part = parts[blk];
    CPoint w(n);
    for (std::int64_t k = 0; k < per_block; ++k) {
      for (int j = 0; j < n; ++j) w[j] = cplx(2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0);
      if (!domain.contains(w)) continue;
      part.points.push_back(w);
      part.weights.push_back(weight);
      part.blocks.push_back(static_cast<int>(blk));
    }
  });
  for (auto& p : parts) {
    out.points.insert(out.points.end(), p.points.begin(), p.points.end());
    out.weights.insert(out.weights.end(), p.weights.begin(), p.weights.end());
    out.blocks.insert(out.blocks.end(), p.blocks.begin(), p.blocks.end());
  }
  return out;
}

}  // namespace

PointSet sample_region(const Domain& domain, const SampleRegion& region, const QuadratureSpec& spec,
                       std::uint64_t stream, const Keep& keep) {
  spec.validate();
  PointSet out;
  if (const auto* polar = std::get_if<PolarRegion>(&region)) {
    if (!domain.is_ball_like()) throw std::invalid_argument("polar regions need the disk or ball");
    sample_polar(domain, *polar, spec, stream, keep, out);
  } else {
    if (spec.strategy == Strategy::BoundaryStratified)
      throw std::invalid_argument("boundary stratification is implemented for the disk and ball only");
    sample_box(domain, std::get<BoxRegion>(region), spec, stream, keep, out);
  }
  return out;
}

PointSet sample_domain(const Domain& domain, const QuadratureSpec& spec) {
  spec.validate();
  switch (spec.strategy) {
    case Strategy::PolarGauss:
      return polar_gauss_rule(domain, spec.radial_nodes, spec.angular_nodes);
    case Strategy::GradedPolar:
      if (domain.kind() != DomainKind::UnitDisk) throw std::invalid_argument("graded polar rule: disk only");
      return graded_polar_rule(CPoint{0.0}, spec.radial_nodes, spec.angular_nodes);
    case Strategy::UniformRejection: {
      PointSet s = sample_cube(domain, spec);
      if (static_cast<double>(s.size()) / static_cast<double>(s.n_drawn) < 1e-3)
        throw std::runtime_error("sample_domain: rejection acceptance rate below 1e-3");
      return s;
    }
    case Strategy::BoundaryStratified:
      return sample_region(domain, whole_domain_region(domain), spec, 0);
  }
  return {};
}

PointSet polar_gauss_rule(const Domain& domain, int radial_nodes, int angular_nodes) {
  PointSet out;
  out.exact = true;
  std::vector<double> x, w;
  gauss_legendre(radial_nodes, x, w);
  const double dtheta = 2.0 * kPi / angular_nodes;
  if (domain.kind() == DomainKind::UnitDisk) {
    for (int i = 0; i < radial_nodes; ++i) {
      const double r = 0.5 * (x[i] + 1.0);
      const double wr = 0.5 * w[i] * r;
      for (int k = 0; k < angular_nodes; ++k) {
        out.points.push_back(CPoint{std::polar(r, k * dtheta)});
        out.weights.push_back(wr * dtheta);
      }
    }
  } else if (domain.kind() == DomainKind::UnitBall && domain.dim() == 2) {
    // (|z1|, |z2|) = rho (cos phi, sin phi); dmu = rho^3 cos phi sin phi drho dphi dtheta1 dtheta2.
    for (int i = 0; i < radial_nodes; ++i) {
      const double rho = 0.5 * (x[i] + 1.0);
      const double wrho = 0.5 * w[i] * rho * rho * rho;
      for (int j = 0; j < radial_nodes; ++j) {
        const double phi = 0.25 * kPi * (x[j] + 1.0);
        const double wphi = 0.25 * kPi * w[j] * std::cos(phi) * std::sin(phi);
        for (int a = 0; a < angular_nodes; ++a)
          for (int b = 0; b < angular_nodes; ++b) {
            out.points.push_back(CPoint{std::polar(rho * std::cos(phi), a * dtheta), std::polar(rho * std::sin(phi), b * dtheta)});
            out.weights.push_back(wrho * wphi * dtheta * dtheta);
          }
      }
    }
  } else {
    throw std::invalid_argument("polar Gauss rule: disk or ball in C^2 only");
  }
  out.blocks.assign(out.points.size(), 0);
  out.n_drawn = static_cast<std::int64_t>(out.points.size());
  return out;
}

PointSet graded_polar_rule(const CPoint& focus, int panels_per_octave, int nodes_per_panel) {
  if (focus.dim() != 1) throw std::invalid_argument("graded polar rule: disk only");
  const double h = std::max(1.0 - std::abs(focus[0]), 1e-12);
  const double theta0 = std::abs(focus[0]) > 0.0 ? std::arg(focus[0]) : 0.0;

  auto subdivide = [&](std::vector<double> edges) {
    std::vector<double> fine;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
      for (int p = 0; p < panels_per_octave; ++p)
        fine.push_back(edges[i] + (edges[i + 1] - edges[i]) * p / panels_per_octave);
    fine.push_back(edges.back());
    return fine;
  };
  // Radial edges 0, 1/2, 3/4, ... down to a gap below h/4, then 1.
  std::vector<double> r_edges{0.0};
  for (double gap = 0.5; gap >= h / 4.0 && gap > 1e-14; gap *= 0.5) r_edges.push_back(1.0 - gap);
  r_edges.push_back(1.0);
  // Angular edges 0, a, 2a, 4a, ... up to pi (offsets from arg focus).
  std::vector<double> a_edges{0.0};
  for (double a = h / 4.0; a < kPi; a *= 2.0) a_edges.push_back(a);
  a_edges.push_back(kPi);
  r_edges = subdivide(r_edges);
  a_edges = subdivide(a_edges);

  std::vector<double> x, w;
  gauss_legendre(nodes_per_panel, x, w);
  std::vector<double> rs, rw, ts, tw;
  for (std::size_t i = 0; i + 1 < r_edges.size(); ++i) {
    const double lo = r_edges[i], hi = r_edges[i + 1], half = 0.5 * (hi - lo);
    for (int q = 0; q < nodes_per_panel; ++q) {
      const double r = lo + half * (x[q] + 1.0);
      rs.push_back(r);
      rw.push_back(half * w[q] * r);
    }
  }
  for (std::size_t i = 0; i + 1 < a_edges.size(); ++i) {
    const double lo = a_edges[i], hi = a_edges[i + 1], half = 0.5 * (hi - lo);
    for (int q = 0; q < nodes_per_panel; ++q) {
      const double t = lo + half * (x[q] + 1.0);
      ts.push_back(t), tw.push_back(half * w[q]);
      ts.push_back(-t), tw.push_back(half * w[q]);
    }
  }
  PointSet out;
  out.exact = true;
  out.points.reserve(rs.size() * ts.size());
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t k = 0; k < ts.size(); ++k) {
      out.points.push_back(CPoint{std::polar(rs[i], theta0 + ts[k])});
      out.weights.push_back(rw[i] * tw[k]);
    }
  out.blocks.assign(out.points.size(), 0);
  out.n_drawn = static_cast<std::int64_t>(out.points.size());
  return out;
}

// ---------------------------------------------------------------------------------------
// Estimation

BlockSums::BlockSums(int n_quantities, int n_blocks)
    : n_quantities_(n_quantities), n_blocks_(std::max(1, n_blocks)), data_(static_cast<std::size_t>(n_quantities) * n_blocks_, 0.0) {}

double BlockSums::total(int quantity) const {
  double s = 0.0;
  for (int b = 0; b < n_blocks_; ++b) s += data_[quantity * n_blocks_ + b];
  return s;
}

std::vector<double> BlockSums::totals() const {
  std::vector<double> t(n_quantities_);
  for (int q = 0; q < n_quantities_; ++q) t[q] = total(q);
  return t;
}

double BlockSums::jackknife_se(const std::function<double(std::span<const double>)>& stat) const {
  if (n_blocks_ < 2) return 0.0;
  const auto full = totals();
  const double B = n_blocks_;
  std::vector<double> loo(n_quantities_), theta(n_blocks_);
  for (int b = 0; b < n_blocks_; ++b) {
    for (int q = 0; q < n_quantities_; ++q) loo[q] = (full[q] - data_[q * n_blocks_ + b]) * B / (B - 1.0);
    theta[b] = stat(loo);
  }
  const double mean = std::accumulate(theta.begin(), theta.end(), 0.0) / B;
  double ss = 0.0;
  for (double t : theta) ss += (t - mean) * (t - mean);
  return std::sqrt((B - 1.0) / B * ss);
}

IntegralEstimate integrate_points(const PointSet& nodes, const Integrand& f, double rel_tolerance) {
  const std::size_t n = nodes.size();
  std::vector<cplx> values(n);
  constexpr std::size_t kChunk = 4096;
  parallel_for((n + kChunk - 1) / kChunk, [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) values[i] = f(nodes.points[i]);
  });
  BlockSums sums(2, nodes.n_blocks);
  IntegralEstimate est;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx v = values[i];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      ++est.nonfinite_count;
      continue;
    }
    sums.add(0, nodes.blocks[i], nodes.weights[i] * v.real());
    sums.add(1, nodes.blocks[i], nodes.weights[i] * v.imag());
  }
  est.value = cplx(sums.total(0), sums.total(1));
  if (!nodes.exact) {
    const double se_re = sums.jackknife_se([](std::span<const double> t) { return t[0]; });
    const double se_im = sums.jackknife_se([](std::span<const double> t) { return t[1]; });
    est.std_error = std::hypot(se_re, se_im);
  }
  est.n_effective = static_cast<std::int64_t>(n) - est.nonfinite_count;
  est.flagged = est.nonfinite_count > 0 || quality_flag(std::abs(est.value), est.std_error, rel_tolerance);
  return est;
}

IntegralEstimate integrate(const Domain& domain, const Integrand& f, const QuadratureSpec& spec) {
  spec.validate();
  IntegralEstimate est = integrate_points(sample_domain(domain, spec), f, spec.rel_tolerance);
  if (spec.strategy == Strategy::PolarGauss) {
    // Node-halving cross-check for the deterministic rule.
    QuadratureSpec coarse = spec;
    coarse.radial_nodes = std::max(1, spec.radial_nodes / 2);
    coarse.angular_nodes = std::max(1, spec.angular_nodes / 2);
    const auto check = integrate_points(sample_domain(domain, coarse), f, spec.rel_tolerance);
    if (quality_flag(std::abs(est.value), std::abs(est.value - check.value), spec.rel_tolerance)) est.flagged = true;
  }
  return est;
}

IntegralEstimate integrate_ball(const Domain& domain, const QuasiBall& ball, const Integrand& f,
                                const QuadratureSpec& spec, std::uint64_t stream) {
  spec.validate();
  QuadratureSpec s = spec;
  if (s.strategy == Strategy::PolarGauss || s.strategy == Strategy::GradedPolar) s.strategy = Strategy::UniformRejection;
  const PointSet nodes = sample_region(domain, bounding_region(domain, ball), s, stream,
                                       [&](const CPoint& w) { return distance(domain, ball.center, w) < ball.radius; });
  if (nodes.n_drawn > 0 && nodes.size() > 0 &&
      static_cast<double>(nodes.size()) / static_cast<double>(nodes.n_drawn) < 1e-4)
    throw std::runtime_error("integrate_ball: membership hit rate below 1e-4");
  return integrate_points(nodes, f, spec.rel_tolerance);
}

}  // namespace berglab
