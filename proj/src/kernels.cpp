#include "gpe/kernels.hpp"

#include <cmath>

#include "gpe/errors.hpp"

namespace gpe::kernels {

long double row_dot_ld(const SymBandMatrix& M, const double* x, std::size_t i) {
  long double s = 0.0L;
  for (std::size_t k = 0; k < M.offsets.size(); ++k) {
    const std::size_t d = M.offsets[k];
    const double* b = M.bands[k].data();
    if (d == 0) {
      s += static_cast<long double>(b[i]) * x[i];
      continue;
    }
    if (i + d < M.n) s += static_cast<long double>(b[i]) * x[i + d];
    if (i >= d) s += static_cast<long double>(b[i - d]) * x[i - d];
  }
  return s;
}

void matvec_serial(const SymBandMatrix& M, const double* x, double* y) {
  for (std::size_t i = 0; i < M.n; ++i) y[i] = static_cast<double>(row_dot_ld(M, x, i));
}

void matvec_parallel(const SymBandMatrix& M, const double* x, double* y) {
  const long long n = static_cast<long long>(M.n);
#ifdef GPE_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long i = 0; i < n; ++i)
    y[i] = static_cast<double>(row_dot_ld(M, x, static_cast<std::size_t>(i)));
}

void matvec(const SymBandMatrix& M, const double* x, double* y) {
  if (M.n >= 65536)
    matvec_parallel(M, x, y);
  else
    matvec_serial(M, x, y);
}

void combined_rows(const SymBandMatrix& A, double w_a, const SymBandMatrix& D,
                   double cube, double shift, const double* x, double* r) {
  if (w_a != 0.0 && A.n != D.n) throw ConfigError("combined_rows: size mismatch");
  for (std::size_t i = 0; i < D.n; ++i) {
    long double s = 0.0L;
    if (w_a != 0.0) s += static_cast<long double>(w_a) * row_dot_ld(A, x, i);
    s += row_dot_ld(D, x, i);
    const long double xi = x[i];
    if (cube != 0.0) s += static_cast<long double>(cube) * xi * xi * xi;
    s += static_cast<long double>(shift) * xi;
    r[i] = static_cast<double>(s);
  }
}

long double dot_ld(const double* a, const double* b, std::size_t n) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < n; ++i) s += static_cast<long double>(a[i]) * b[i];
  return s;
}

double norm2(const double* a, std::size_t n) {
  return std::sqrt(static_cast<double>(dot_ld(a, a, n)));
}

double norm_inf(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

}  // namespace gpe::kernels
