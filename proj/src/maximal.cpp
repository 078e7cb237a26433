#include "berglab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace berglab {

namespace {

constexpr double kHalfPi = kPi / 2.0;

std::uint64_t key_stream(const MaximalFamilySpec& spec, const BallKey& key) {
  std::uint64_t h = spec.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(key.level);
  for (int v : key.index) h = (h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(v))) * 0xBF58476D1CE4E5B9ULL;
  return h ^ (h >> 31);
}

int wrap(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

MaximalFamily::MaximalFamily(const Domain& domain, const MaximalFamilySpec& spec, const QuadratureSpec& ball_spec)
    : domain_(domain), spec_(spec), ball_spec_(ball_spec) {
  if (!domain.is_ball_like() || domain.dim() > 2)
    throw std::invalid_argument("MaximalFamily: implemented for the disk and the ball in C^2");
  if (spec.max_level < 0 || spec.max_level > 40) throw std::invalid_argument("MaximalFamily: max_level out of range");
  if (ball_spec_.strategy == Strategy::PolarGauss || ball_spec_.strategy == Strategy::GradedPolar)
    ball_spec_.strategy = Strategy::UniformRejection;
  ball_spec_.validate();
}

double MaximalFamily::radius(int level) const { return std::ldexp(1.0, 1 - level); }

MaximalFamily::Grid MaximalFamily::grid(int level) const {
  const double r = radius(level);
  Grid g;
  g.n_theta = std::max(1, static_cast<int>(std::ceil(4.0 * kPi / r)));
  if (domain_.dim() == 2) g.n_phi = std::max(1, static_cast<int>(std::ceil(kHalfPi / (0.5 * std::sqrt(r)))));
  return g;
}

QuasiBall MaximalFamily::ball(const BallKey& key) const {
  const double r = radius(key.level);
  const int n = domain_.dim();
  CPoint c(n);
  if (key.level == 0) return {c, r, MetricTag::BallFormula};
  const Grid g = grid(key.level);
  const double s = 1.0 - 0.5 * r;
  const double t1 = 2.0 * kPi * key.index[1] / g.n_theta;
  if (n == 1) {
    c[0] = std::polar(s, t1);
  } else {
    const double phi = kHalfPi * (key.index[0] + 0.5) / g.n_phi;
    const double t2 = 2.0 * kPi * key.index[2] / g.n_theta;
    c[0] = std::polar(s * std::cos(phi), t1);
    c[1] = std::polar(s * std::sin(phi), t2);
  }
  return {c, r, MetricTag::BallFormula};
}

std::vector<BallKey> MaximalFamily::balls_containing(const CPoint& z) const {
  domain_.check_point(z);
  std::vector<BallKey> out;
  const double h = 1.0 - z.norm();
  out.push_back(BallKey{});
  const int n = domain_.dim();
  const double theta1 = std::arg(z[0]);
  const double theta2 = n == 2 ? std::arg(z[1]) : 0.0;
  const double phi = n == 2 ? std::atan2(std::abs(z[1]), std::abs(z[0])) : 0.0;
  for (int level = 1; level <= spec_.max_level; ++level) {
    const double r = radius(level);
    if (h >= 1.5 * r) continue;
    const Grid g = grid(level);
    const int k1 = static_cast<int>(std::lround(theta1 / (2.0 * kPi) * g.n_theta));
    const int k2 = static_cast<int>(std::lround(theta2 / (2.0 * kPi) * g.n_theta));
    const int kp = std::clamp(static_cast<int>(std::floor(phi / kHalfPi * g.n_phi)), 0, g.n_phi - 1);
    const int span = n == 2 ? 1 : 0;
    for (int dp = -span; dp <= span; ++dp) {
      const int ip = kp + dp;
      if (ip < 0 || ip >= g.n_phi) continue;
      for (int d1 = -1; d1 <= 1; ++d1)
        for (int d2 = -span; d2 <= span; ++d2) {
          BallKey key{level, {n == 2 ? ip : 0, wrap(k1 + d1, g.n_theta), n == 2 ? wrap(k2 + d2, g.n_theta) : 0}};
          if (std::find(out.begin(), out.end(), key) != out.end()) continue;
          if (ball(key).contains(domain_, z)) out.push_back(key);
        }
    }
  }
  return out;
}

PointSet MaximalFamily::nodes(const BallKey& key) const {
  const QuasiBall b = ball(key);
  return sample_region(domain_, bounding_region(domain_, b), ball_spec_, key_stream(spec_, key),
                       [&](const CPoint& w) { return b.contains(domain_, w); });
}

MaximalEvaluator::MaximalEvaluator(const MaximalFamily& family, std::vector<Integrand> fs)
    : family_(family), fs_(std::move(fs)) {
  if (fs_.empty()) throw std::invalid_argument("MaximalEvaluator: empty function bundle");
}

std::vector<double> MaximalEvaluator::averages(const BallKey& key) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  const PointSet ns = family_.nodes(key);
  if (ns.size() == 0) throw std::runtime_error("MaximalEvaluator: no nodes landed in a family ball");
  std::vector<double> sums(fs_.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    total += ns.weights[i];
    for (std::size_t f = 0; f < fs_.size(); ++f) sums[f] += ns.weights[i] * std::abs(fs_[f](ns.points[i]));
  }
  for (auto& s : sums) s /= total;
  std::lock_guard<std::mutex> lock(mutex_);
  cache_.emplace(key, sums);
  return sums;
}

std::vector<double> MaximalEvaluator::operator()(const CPoint& z) const {
  const auto keys = family_.balls_containing(z);
  if (keys.empty()) throw std::runtime_error("maximal function: no family ball contains the point");
  std::vector<double> out(fs_.size(), 0.0);
  for (const auto& key : keys) {
    const auto avg = averages(key);
    for (std::size_t f = 0; f < fs_.size(); ++f) out[f] = std::max(out[f], avg[f]);
  }
  return out;
}

std::size_t MaximalEvaluator::cached_balls() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}

double maximal_function(const Domain& domain, const Integrand& f, const CPoint& z, const MaximalFamilySpec& family_spec,
                        const QuadratureSpec& spec) {
  const MaximalFamily family(domain, family_spec, spec);
  const MaximalEvaluator ev(family, {f});
  return ev(z)[0];
}

}  // namespace berglab
