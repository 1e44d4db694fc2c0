#pragma once
#include <cstddef>

#include "gpe/band_matrix.hpp"

namespace gpe::kernels {

// One row of the symmetric banded product, accumulated in extended precision.
// The 1/h^2 entries make plain double sums lose ~6 digits to cancellation at
// fine grids; 80-bit accumulation keeps row residuals near 1e-13.
long double row_dot_ld(const SymBandMatrix& M, const double* x, std::size_t i);

// y = M x; rows are independent, each summed in a fixed order, so the parallel
// version is bit-identical to the serial one for any thread count.
void matvec_serial(const SymBandMatrix& M, const double* x, double* y);
void matvec_parallel(const SymBandMatrix& M, const double* x, double* y);
void matvec(const SymBandMatrix& M, const double* x, double* y);

// r_i = w_a*(A x)_i + (D x)_i + cube*x_i^3 + shift*x_i, per-row extended precision.
// w_a == 0 skips A entirely.
void combined_rows(const SymBandMatrix& A, double w_a, const SymBandMatrix& D,
                   double cube, double shift, const double* x, double* r);

long double dot_ld(const double* a, const double* b, std::size_t n);
double norm2(const double* a, std::size_t n);
double norm_inf(const double* a, std::size_t n);

}  // namespace gpe::kernels
