#pragma once

#include <iosfwd>
#include <vector>

#include "berglab/cpoint.hpp"
#include "berglab/domain.hpp"

namespace berglab {

enum class KernelMode { ClosedForm, TruncatedBasis };

/// Squared norms ||z1^a z2^b||^2 on EggDomain(m), row-major in a with stride max_degree + 1.
std::vector<double> basis_norms(const Domain& domain, int max_degree);

/// CSV with header "a,b,norm2".
void write_norm_table_csv(std::ostream& out, const std::vector<double>& table, int max_degree);

struct KernelValue {
  cplx value = 0.0;
  /// Estimated truncation tail (zero for closed forms).
  double tail = 0.0;
  bool flagged = false;
};

class KernelEvaluator {
 public:
  /// Disk, ball, product disk, and EggDomain(1) (which is the ball).
  static KernelEvaluator closed_form(const Domain& domain);
  /// Monomial expansion on EggDomain(m) over 0 <= a, b <= max_degree.
  static KernelEvaluator truncated(const Domain& domain, int max_degree = 60);

  const Domain& domain() const { return domain_; }
  KernelMode mode() const { return mode_; }
  int max_degree() const { return max_degree_; }
  const std::vector<double>& norm_table() const { return norms_; }

  /// Value with tail estimate; flagged when the tail exceeds 1e-8 |sum|.
  KernelValue evaluate(const CPoint& z, const CPoint& w) const;
  cplx operator()(const CPoint& z, const CPoint& w) const { return evaluate(z, w).value; }

 private:
  KernelEvaluator(const Domain& d, KernelMode mode) : domain_(d), mode_(mode) {}
  Domain domain_;
  KernelMode mode_;
  int max_degree_ = 0;
  std::vector<double> norms_;
};

inline constexpr double kTruncationTolerance = 1e-8;

}  // namespace berglab
