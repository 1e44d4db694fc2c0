#pragma once
#include <cstddef>
#include <vector>

#include "gpe/band_matrix.hpp"

namespace gpe {

// Eigendecomposition of a symmetric matrix: values ascending, vectors stored as
// columns of a row-major n*n array (vectors[i*n + k] = component i of pair k).
struct DenseSymEig {
  std::size_t n = 0;
  std::vector<double> values;
  std::vector<double> vectors;
  const double* column(std::size_t k) const { return col_.empty() ? nullptr : &col_[k * n]; }
  void build_columns();          // cache column-contiguous copies
 private:
  std::vector<double> col_;
};

// Householder reduction + implicit-shift QL; tridiagonal inputs skip the
// reduction. Deterministic. Throws NumericalError past the iteration cap and
// ConfigError when n exceeds the dense cap.
DenseSymEig sym_eigen_full(const SymBandMatrix& M, std::size_t dense_cap = 4096);

// max over rows of |diag| + sum of |off-diagonals|; upper bound for the spectral radius
double gershgorin_radius(const SymBandMatrix& M);

std::vector<double> matvec(const SymBandMatrix& M, const std::vector<double>& v);

// Banded LU with partial pivoting; row swaps widen the upper band to 2*kl.
class BandLU {
 public:
  static BandLU factor(const SymBandMatrix& M);
  void solve(double* x) const;            // in place
  void solve_transpose(double* x) const;  // in place
  int det_sign() const;                   // 0 on an exact zero pivot
  double min_pivot() const { return min_pivot_; }
  double scale() const { return scale_; }
  std::size_t n() const { return n_; }
  std::size_t worst_pivot_index() const { return worst_index_; }

 private:
  std::size_t n_ = 0, kl_ = 0, ku2_ = 0, ldab_ = 0;
  std::vector<double> ab_;  // column-major bands with fill space
  std::vector<std::size_t> piv_;
  int parity_ = 1;
  double min_pivot_ = 0, scale_ = 0;
  std::size_t worst_index_ = 0;
  double& at(std::size_t i, std::size_t j) { return ab_[j * ldab_ + (ku2_ + i - j)]; }
  double at(std::size_t i, std::size_t j) const { return ab_[j * ldab_ + (ku2_ + i - j)]; }
};

// Square system made of a banded symmetric core plus up to two bordering
// columns/rows and a corner block. Assembled dimension is core.n + bcols.size().
struct BorderedSystem {
  SymBandMatrix core;
  std::vector<std::vector<double>> bcols;   // each length core.n
  std::vector<std::vector<double>> brows;   // each length core.n
  std::vector<std::vector<double>> corner;  // k x k
  std::size_t dim() const { return core.n + bcols.size(); }
  std::vector<double> apply(const std::vector<double>& x) const;            // K x
  std::vector<double> apply_transpose(const std::vector<double>& x) const;  // K^T x
  double scale() const;  // largest |entry|
};

// Factorization of a BorderedSystem: banded LU of the core + block elimination
// over the borders, with extended-precision iterative refinement on every solve.
// Falls back to a dense partial-pivot LU of the assembled matrix when the core
// is (nearly) singular or refinement stalls; the fallback is what makes solves
// near fold points and at t=0 (singular core, well-conditioned border) reliable.
class BorderedFactor {
 public:
  explicit BorderedFactor(const BorderedSystem& sys);
  std::size_t dim() const { return sys_.dim(); }
  std::vector<double> solve(const std::vector<double>& rhs) const;
  std::vector<double> solve_transpose(const std::vector<double>& rhs) const;
  int det_sign() const;
  double min_singular_estimate() const;  // inverse power iteration on K^T K
  bool dense_mode() const { return dense_; }

 private:
  BorderedSystem sys_;
  std::size_t n_ = 0, k_ = 0;
  BandLU lu_;
  bool band_ok_ = false;
  std::vector<double> Y_;  // n x k, core^-1 * bcols
  std::vector<double> Z_;  // n x k, core^-T * brows
  double S_[4] = {0, 0, 0, 0};  // Schur complement (k x k), factored in place
  std::size_t sp_[2] = {0, 1};
  int s_parity_ = 1;
  double s_min_pivot_ = 0;
  bool s_zero_ = false;
  mutable bool dense_ = false;
  mutable std::vector<double> dlu_;
  mutable std::vector<std::size_t> dpiv_;
  mutable int dparity_ = 1;
  mutable double d_min_pivot_ = 0;
  mutable std::size_t d_worst_ = 0;

  void ensure_dense() const;
  void raw_solve(std::vector<double>& x, bool transpose) const;    // no refinement
  bool refine(std::vector<double>& x, const std::vector<double>& rhs, bool transpose) const;
};

// residual <= 1e-12 relative, or SingularError carrying the failing pivot index
std::vector<double> solve_bordered(const BorderedSystem& sys, const std::vector<double>& rhs);
int det_sign(const BorderedSystem& sys);
double min_singular_estimate(const BorderedSystem& sys);

}  // namespace gpe
