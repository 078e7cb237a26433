#include "berglab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace berglab {

Domain Domain::unit_ball(int n) {
  if (n < 2 || n > CPoint::kMaxDim) throw std::invalid_argument("UnitBall: n must be in [2, 4]");
  return Domain(DomainKind::UnitBall, n, 1);
}

Domain Domain::egg(int m) {
  if (m < 1) throw std::invalid_argument("EggDomain: m must be >= 1");
  return Domain(DomainKind::EggDomain, 2, m);
}

Domain Domain::product_disk(int n) {
  if (n < 2 || n > CPoint::kMaxDim) throw std::invalid_argument("ProductDisk: n must be in [2, 4]");
  return Domain(DomainKind::ProductDisk, n, 1);
}

Domain Domain::from_name(const std::string& name) {
  if (name == "disk") return unit_disk();
  auto suffix = [&](const std::string& prefix) -> int {
    if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) return -1;
    const std::string rest = name.substr(prefix.size());
    if (!std::all_of(rest.begin(), rest.end(), [](char c) { return c >= '0' && c <= '9'; }) || rest.size() > 3)
      return -1;
    return std::stoi(rest);
  };
  if (int n = suffix("ball"); n >= 0) return unit_ball(n);
  if (int m = suffix("egg"); m >= 0) return egg(m);
  if (int n = suffix("polydisc"); n >= 0) return product_disk(n);
  throw std::invalid_argument("unknown domain name: " + name);
}

std::string Domain::name() const {
  switch (kind_) {
    case DomainKind::UnitDisk:
      return "disk";
    case DomainKind::UnitBall:
      return "ball" + std::to_string(dim_);
    case DomainKind::EggDomain:
      return "egg" + std::to_string(m_);
    case DomainKind::ProductDisk:
      return "polydisc" + std::to_string(dim_);
  }
  return "?";
}

void Domain::check_point(const CPoint& z) const {
  if (z.dim() != dim_) throw std::invalid_argument("point dimension does not match domain " + name());
  if (!z.finite()) throw std::invalid_argument("point has non-finite coordinates");
}

double Domain::rho(const CPoint& z) const {
  switch (kind_) {
    case DomainKind::UnitDisk:
    case DomainKind::UnitBall:
      return z.norm2() - 1.0;
    case DomainKind::EggDomain:
      return std::norm(z[0]) + std::pow(std::norm(z[1]), m_) - 1.0;
    case DomainKind::ProductDisk: {
      double r = -1.0;
      for (int j = 0; j < dim_; ++j) r = std::max(r, std::norm(z[j]) - 1.0);
      return r;
    }
  }
  return 0.0;
}

CPoint Domain::gradient(const CPoint& z) const {
  CPoint g(dim_);
  switch (kind_) {
    case DomainKind::UnitDisk:
    case DomainKind::UnitBall:
      for (int j = 0; j < dim_; ++j) g[j] = 2.0 * z[j];
      break;
    case DomainKind::EggDomain:
      g[0] = 2.0 * z[0];
      g[1] = 2.0 * m_ * std::pow(std::norm(z[1]), m_ - 1) * z[1];
      break;
    case DomainKind::ProductDisk: {
      int active = 0;
      for (int j = 1; j < dim_; ++j)
        if (std::norm(z[j]) > std::norm(z[active])) active = j;
      g[active] = 2.0 * z[active];
      break;
    }
  }
  return g;
}

double Domain::euclidean_boundary_distance(const CPoint& z) const {
  switch (kind_) {
    case DomainKind::UnitDisk:
    case DomainKind::UnitBall:
      return std::max(0.0, 1.0 - z.norm());
    case DomainKind::ProductDisk: {
      double d = 1.0;
      for (int j = 0; j < dim_; ++j) d = std::min(d, 1.0 - std::abs(z[j]));
      return std::max(0.0, d);
    }
    case DomainKind::EggDomain: {
      // Reinhardt domain: reduce to the profile r1^2 + r2^(2m) = 1 in the quarter plane and
      // minimise the distance over the profile by golden-section search on the angle parameter.
      const double a = std::abs(z[0]);
      const double b = std::abs(z[1]);
      auto dist2 = [&](double t) {
        const double r2 = t;
        const double r1 = std::sqrt(std::max(0.0, 1.0 - std::pow(r2, 2 * m_)));
        return (r1 - a) * (r1 - a) + (r2 - b) * (r2 - b);
      };
      // Coarse scan to bracket the global minimum, then refine.
      const int n = 400;
      int best = 0;
      double best_val = dist2(0.0);
      for (int i = 1; i <= n; ++i) {
        double v = dist2(static_cast<double>(i) / n);
        if (v < best_val) best_val = v, best = i;
      }
      double lo = std::max(0.0, (best - 1.0) / n), hi = std::min(1.0, (best + 1.0) / n);
      const double g = 0.5 * (std::sqrt(5.0) - 1.0);
      for (int it = 0; it < 80; ++it) {
        double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        if (dist2(x1) < dist2(x2))
          hi = x2;
        else
          lo = x1;
      }
      return std::sqrt(std::min(best_val, dist2(0.5 * (lo + hi))));
    }
  }
  return 0.0;
}

double Domain::volume() const {
  switch (kind_) {
    case DomainKind::UnitDisk:
      return kPi;
    case DomainKind::UnitBall: {
      double v = 1.0;
      for (int k = 1; k <= dim_; ++k) v *= kPi / k;
      return v;
    }
    case DomainKind::EggDomain:
      // pi^2/m * Beta(1/m, 2)
      return kPi * kPi * std::tgamma(1.0 / m_) * std::tgamma(2.0) / (m_ * std::tgamma(1.0 / m_ + 2.0));
    case DomainKind::ProductDisk:
      return std::pow(kPi, dim_);
  }
  return 0.0;
}

}  // namespace berglab
