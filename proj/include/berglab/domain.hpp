#pragma once

#include <string>

#include "berglab/cpoint.hpp"

namespace berglab {

enum class DomainKind { UnitDisk, UnitBall, EggDomain, ProductDisk };

/// One of the four model pseudoconvex domains. Every kind lives inside the unit polydisc.
class Domain {
 public:
  static Domain unit_disk() { return Domain(DomainKind::UnitDisk, 1, 1); }
  static Domain unit_ball(int n);
  static Domain egg(int m);
  static Domain product_disk(int n);
  /// Inverse of name(): "disk", "ball<n>", "egg<m>", "polydisc<n>".
  static Domain from_name(const std::string& name);

  DomainKind kind() const { return kind_; }
  int dim() const { return dim_; }
  /// Exponent of the egg |z1|^2 + |z2|^{2m} < 1; 1 for the other kinds.
  int egg_exponent() const { return m_; }
  std::string name() const;

  /// Defining function, negative exactly on the interior.
  double rho(const CPoint& z) const;
  bool contains(const CPoint& z) const { return rho(z) < 0.0; }

  /// Complex gradient (d rho/dx_j + i d rho/dy_j); as a real vector it is the real gradient.
  /// For ProductDisk the gradient of the active factor is returned.
  CPoint gradient(const CPoint& z) const;

  /// Euclidean distance to the boundary, exact for disk/ball/product, by projection for the egg.
  double euclidean_boundary_distance(const CPoint& z) const;

  /// True for the kinds whose canonical metric is the explicit radial/angular formula.
  bool is_ball_like() const { return kind_ == DomainKind::UnitDisk || kind_ == DomainKind::UnitBall; }

  /// Lebesgue volume of the domain.
  double volume() const;

  void check_point(const CPoint& z) const;

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  Domain(DomainKind kind, int dim, int m) : kind_(kind), dim_(dim), m_(m) {}
  DomainKind kind_;
  int dim_;
  int m_;
};

}  // namespace berglab
