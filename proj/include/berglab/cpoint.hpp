#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>

namespace berglab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Point of C^n with inline storage; n is bounded by kMaxDim.
class CPoint {
 public:
  static constexpr int kMaxDim = 4;

  CPoint() = default;
  explicit CPoint(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("CPoint: dimension out of range");
  }
  CPoint(std::initializer_list<cplx> coords) : CPoint(static_cast<int>(coords.size())) {
    int j = 0;
    for (const auto& c : coords) c_[j++] = c;
  }

  int dim() const { return dim_; }
  cplx& operator[](int j) { return c_[j]; }
  const cplx& operator[](int j) const { return c_[j]; }

  bool finite() const {
    for (int j = 0; j < dim_; ++j)
      if (!std::isfinite(c_[j].real()) || !std::isfinite(c_[j].imag())) return false;
    return true;
  }

  double norm2() const {
    double s = 0.0;
    for (int j = 0; j < dim_; ++j) s += std::norm(c_[j]);
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }

  CPoint& operator+=(const CPoint& o) {
    for (int j = 0; j < dim_; ++j) c_[j] += o.c_[j];
    return *this;
  }
  CPoint& operator-=(const CPoint& o) {
    for (int j = 0; j < dim_; ++j) c_[j] -= o.c_[j];
    return *this;
  }
  CPoint& operator*=(cplx s) {
    for (int j = 0; j < dim_; ++j) c_[j] *= s;
    return *this;
  }

  friend CPoint operator+(CPoint a, const CPoint& b) { return a += b; }
  friend CPoint operator-(CPoint a, const CPoint& b) { return a -= b; }
  friend CPoint operator*(cplx s, CPoint a) { return a *= s; }
  friend CPoint operator*(double s, CPoint a) { return a *= cplx(s, 0.0); }
  friend bool operator==(const CPoint& a, const CPoint& b) {
    if (a.dim_ != b.dim_) return false;
    for (int j = 0; j < a.dim_; ++j)
      if (a.c_[j] != b.c_[j]) return false;
    return true;
  }

 private:
  std::array<cplx, kMaxDim> c_{};
  int dim_ = 0;
};

/// Hermitian product <z,w> = sum z_j conj(w_j).
inline cplx inner(const CPoint& z, const CPoint& w) {
  cplx s = 0.0;
  for (int j = 0; j < z.dim(); ++j) s += z[j] * std::conj(w[j]);
  return s;
}

inline double distance_euclid(const CPoint& z, const CPoint& w) { return (z - w).norm(); }

inline CPoint unit_vector(int dim, int axis) {
  CPoint e(dim);
  e[axis] = 1.0;
  return e;
}

}  // namespace berglab
