#include "berglab/kernels.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace berglab {

std::vector<double> basis_norms(const Domain& domain, int max_degree) {
  if (domain.kind() != DomainKind::EggDomain) throw std::invalid_argument("basis_norms: EggDomain only");
  if (max_degree < 0) throw std::invalid_argument("basis_norms: max_degree must be >= 0");
  const double m = domain.egg_exponent();
  const int n = max_degree + 1;
  std::vector<double> t(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      // (pi^2 / ((a+1) m)) * Beta((b+1)/m, a+2)
      const double x = (b + 1) / m, y = a + 2.0;
      const double log_beta = std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
      t[a * n + b] = kPi * kPi / ((a + 1) * m) * std::exp(log_beta);
    }
  return t;
}

void write_norm_table_csv(std::ostream& out, const std::vector<double>& table, int max_degree) {
  const int n = max_degree + 1;
  out << "a,b,norm2\n";
  out.precision(17);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out << a << ',' << b << ',' << table[a * n + b] << '\n';
}

KernelEvaluator KernelEvaluator::closed_form(const Domain& domain) {
  if (domain.kind() == DomainKind::EggDomain && domain.egg_exponent() != 1)
    throw std::invalid_argument("closed-form kernel: EggDomain(m) with m > 1 has none; use the truncated basis");
  return KernelEvaluator(domain, KernelMode::ClosedForm);
}

KernelEvaluator KernelEvaluator::truncated(const Domain& domain, int max_degree) {
  KernelEvaluator ev(domain, KernelMode::TruncatedBasis);
  ev.max_degree_ = max_degree;
  ev.norms_ = basis_norms(domain, max_degree);
  return ev;
}

namespace {

cplx disk_kernel(cplx z, cplx w) {
  const cplx d = 1.0 - z * std::conj(w);
  return 1.0 / (kPi * d * d);
}

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

KernelValue KernelEvaluator::evaluate(const CPoint& z, const CPoint& w) const {
  domain_.check_point(z);
  domain_.check_point(w);
  if (mode_ == KernelMode::ClosedForm) {
    switch (domain_.kind()) {
      case DomainKind::UnitDisk:
        return {disk_kernel(z[0], w[0])};
      case DomainKind::UnitBall:
      case DomainKind::EggDomain: {
        const int n = domain_.dim();
        return {factorial(n) / (std::pow(kPi, n) * std::pow(1.0 - inner(z, w), n + 1))};
      }
      case DomainKind::ProductDisk: {
        cplx k = 1.0;
        for (int j = 0; j < domain_.dim(); ++j) k *= disk_kernel(z[j], w[j]);
        return {k};
      }
    }
  }

  const int n = max_degree_ + 1;
  const cplx x = z[0] * std::conj(w[0]);
  const cplx y = z[1] * std::conj(w[1]);
  std::vector<cplx> ypow(n);
  ypow[0] = 1.0;
  for (int b = 1; b < n; ++b) ypow[b] = ypow[b - 1] * y;
  cplx sum = 0.0;
  std::vector<double> diag(n, 0.0);  // |terms| on complete diagonals a + b = k <= max_degree
  cplx xa = 1.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const cplx term = xa * ypow[b] / norms_[a * n + b];
      sum += term;
      if (a + b < n) diag[a + b] += std::abs(term);
    }
    xa *= x;
  }
  KernelValue v{sum};
  const double last = diag[n - 1];
  const double prev = n >= 2 ? diag[n - 2] : 0.0;
  if (last == 0.0) {
    v.tail = 0.0;
  } else if (prev > 0.0 && last < prev) {
    const double q = last / prev;
    v.tail = last * q / (1.0 - q);
  } else {
    v.tail = std::numeric_limits<double>::infinity();
  }
  v.flagged = v.tail > kTruncationTolerance * std::abs(sum);
  return v;
}

}  // namespace berglab
