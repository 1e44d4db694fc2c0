#include "gpe/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "gpe/errors.hpp"
#include "gpe/kernels.hpp"

namespace gpe {

namespace {

constexpr double kTiny = 1e-300;

// Householder reduction of a symmetric matrix (row-major in z) to tridiagonal
// form; z accumulates the orthogonal transform, d/e receive diag/subdiag.
void tred2(std::vector<double>& z, std::size_t n, std::vector<double>& d, std::vector<double>& e) {
  for (std::size_t i = n - 1; i >= 1; --i) {
    const std::size_t l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(z[i * n + k]);
      if (scale == 0.0) {
        e[i] = z[i * n + l];
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          z[i * n + k] /= scale;
          h += z[i * n + k] * z[i * n + k];
        }
        double f = z[i * n + l];
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        z[i * n + l] = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          z[j * n + i] = z[i * n + j] / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += z[j * n + k] * z[i * n + k];
          for (std::size_t k = j + 1; k <= l; ++k) g += z[k * n + j] * z[i * n + k];
          e[j] = g / h;
          f += e[j] * z[i * n + j];
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = z[i * n + j];
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k) z[j * n + k] -= (f * e[k] + g * z[i * n + k]);
        }
      }
    } else {
      e[i] = z[i * n + l];
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] != 0.0) {
      for (std::size_t j = 0; j < i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k < i; ++k) g += z[i * n + k] * z[k * n + j];
        for (std::size_t k = 0; k < i; ++k) z[k * n + j] -= g * z[k * n + i];
      }
    }
    d[i] = z[i * n + i];
    z[i * n + i] = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      z[j * n + i] = 0.0;
      z[i * n + j] = 0.0;
    }
  }
}

// Implicit-shift QL on a symmetric tridiagonal (d diag, e[i]=subdiag below i),
// rotations accumulated into the columns of z.
void tql2(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z, std::size_t n) {
  constexpr std::size_t kIterCap = 60;
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    std::size_t iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == kIterCap) throw NumericalError("sym_eigen_full: QL iteration cap reached");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t ii = m; ii-- > l;) {
          double f = s * e[ii];
          const double b = c * e[ii];
          r = std::hypot(f, g);
          e[ii + 1] = r;
          if (r == 0.0) {
            d[ii + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[ii + 1] - p;
          r = (d[ii] - g) * s + 2.0 * c * b;
          p = s * r;
          d[ii + 1] = g + p;
          g = c * r - b;
          for (std::size_t k = 0; k < n; ++k) {
            f = z[k * n + ii + 1];
            z[k * n + ii + 1] = s * z[k * n + ii] + c * f;
            z[k * n + ii] = c * z[k * n + ii] - s * f;
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

bool is_tridiagonal(const SymBandMatrix& M) {
  for (std::size_t d : M.offsets)
    if (d > 1) return false;
  return true;
}

}  // namespace

void DenseSymEig::build_columns() {
  col_.assign(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) col_[k * n + i] = vectors[i * n + k];
}

DenseSymEig sym_eigen_full(const SymBandMatrix& M, std::size_t dense_cap) {
  const std::size_t n = M.n;
  if (n == 0) throw ConfigError("sym_eigen_full: empty matrix");
  if (n > dense_cap) throw ConfigError("sym_eigen_full: size exceeds the dense cap");
  DenseSymEig E;
  E.n = n;
  std::vector<double> d(n, 0.0), e(n, 0.0), z;
  if (is_tridiagonal(M)) {
    z.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
    for (std::size_t k = 0; k < M.offsets.size(); ++k) {
      if (M.offsets[k] == 0)
        for (std::size_t i = 0; i < n; ++i) d[i] = M.bands[k][i];
      else
        for (std::size_t i = 0; i + 1 < n; ++i) e[i + 1] = M.bands[k][i];
    }
  } else {
    z = M.dense();
    tred2(z, n, d, e);
  }
  if (n > 1) tql2(d, e, z, n);
  // sort ascending, carrying eigenvector columns
  std::vector<std::size_t> ord(n);
  for (std::size_t i = 0; i < n; ++i) ord[i] = i;
  std::stable_sort(ord.begin(), ord.end(), [&d](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  E.values.resize(n);
  E.vectors.assign(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    E.values[k] = d[ord[k]];
    for (std::size_t i = 0; i < n; ++i) E.vectors[i * n + k] = z[i * n + ord[k]];
  }
  E.build_columns();
  return E;
}

double gershgorin_radius(const SymBandMatrix& M) {
  double r = 0.0;
  for (std::size_t i = 0; i < M.n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < M.offsets.size(); ++k) {
      const std::size_t d = M.offsets[k];
      if (d == 0) {
        s += std::abs(M.bands[k][i]);
        continue;
      }
      if (i + d < M.n) s += std::abs(M.bands[k][i]);
      if (i >= d) s += std::abs(M.bands[k][i - d]);
    }
    r = std::max(r, s);
  }
  return r;
}

std::vector<double> matvec(const SymBandMatrix& M, const std::vector<double>& v) {
  if (v.size() != M.n) throw ConfigError("matvec: dimension mismatch");
  std::vector<double> y(M.n);
  kernels::matvec(M, v.data(), y.data());
  return y;
}

// ---- banded LU ------------------------------------------------------------

BandLU BandLU::factor(const SymBandMatrix& M) {
  BandLU F;
  const std::size_t n = M.n;
  if (n == 0) throw ConfigError("BandLU: empty matrix");
  F.n_ = n;
  F.kl_ = std::min(M.bandwidth(), n - 1);
  F.ku2_ = std::min(2 * F.kl_, n - 1);
  F.ldab_ = F.kl_ + F.ku2_ + 1;
  F.ab_.assign(F.ldab_ * n, 0.0);
  F.piv_.resize(n);
  F.scale_ = std::max(M.max_abs(), kTiny);
  for (std::size_t k = 0; k < M.offsets.size(); ++k) {
    const std::size_t d = M.offsets[k];
    for (std::size_t i = 0; i + d < n; ++i) {
      F.at(i, i + d) = M.bands[k][i];
      if (d > 0) F.at(i + d, i) = M.bands[k][i];
    }
  }
  F.min_pivot_ = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t iend = std::min(k + F.kl_, n - 1);
    std::size_t imax = k;
    double amax = std::abs(F.at(k, k));
    for (std::size_t i = k + 1; i <= iend; ++i) {
      const double a = std::abs(F.at(i, k));
      if (a > amax) {
        amax = a;
        imax = i;
      }
    }
    F.piv_[k] = imax;
    if (imax != k) {
      F.parity_ = -F.parity_;
      const std::size_t jend = std::min(k + F.ku2_, n - 1);
      for (std::size_t j = k; j <= jend; ++j) std::swap(F.at(k, j), F.at(imax, j));
    }
    const double pv = F.at(k, k);
    if (amax < F.min_pivot_) {
      F.min_pivot_ = amax;
      F.worst_index_ = k;
    }
    if (pv == 0.0) continue;  // exactly singular column; solves are guarded by min_pivot
    const std::size_t jend = std::min(k + F.ku2_, n - 1);
    for (std::size_t i = k + 1; i <= iend; ++i) {
      const double mlt = F.at(i, k) / pv;
      F.at(i, k) = mlt;
      if (mlt != 0.0)
        for (std::size_t j = k + 1; j <= jend; ++j) F.at(i, j) -= mlt * F.at(k, j);
    }
  }
  return F;
}

void BandLU::solve(double* x) const {
  const std::size_t n = n_;
  for (std::size_t k = 0; k < n; ++k) {
    if (piv_[k] != k) std::swap(x[k], x[piv_[k]]);
    const std::size_t iend = std::min(k + kl_, n - 1);
    const double xk = x[k];
    if (xk != 0.0)
      for (std::size_t i = k + 1; i <= iend; ++i) x[i] -= at(i, k) * xk;
  }
  for (std::size_t k = n; k-- > 0;) {
    const std::size_t jend = std::min(k + ku2_, n - 1);
    long double s = x[k];
    for (std::size_t j = k + 1; j <= jend; ++j) s -= static_cast<long double>(at(k, j)) * x[j];
    x[k] = static_cast<double>(s / at(k, k));
  }
}

void BandLU::solve_transpose(double* x) const {
  const std::size_t n = n_;
  // U^T z = b (forward; U^T is lower with bandwidth ku2_)
  for (std::size_t k = 0; k < n; ++k) {
    long double s = x[k];
    const std::size_t jstart = (k > ku2_) ? k - ku2_ : 0;
    for (std::size_t j = jstart; j < k; ++j) s -= static_cast<long double>(at(j, k)) * x[j];
    x[k] = static_cast<double>(s / at(k, k));
  }
  // Multipliers are stored un-permuted (factor() swaps only the active
  // columns), so the swaps must interleave with the eliminations here,
  // in reverse order.
  for (std::size_t k = n; k-- > 0;) {
    const std::size_t iend = std::min(k + kl_, n - 1);
    long double s = x[k];
    for (std::size_t i = k + 1; i <= iend; ++i) s -= static_cast<long double>(at(i, k)) * x[i];
    x[k] = static_cast<double>(s);
    if (piv_[k] != k) std::swap(x[k], x[piv_[k]]);
  }
}

int BandLU::det_sign() const {
  int s = parity_;
  for (std::size_t k = 0; k < n_; ++k) {
    const double v = at(k, k);
    if (v == 0.0) return 0;
    if (v < 0.0) s = -s;
  }
  return s;
}

// ---- bordered systems -------------------------------------------------------

std::vector<double> BorderedSystem::apply(const std::vector<double>& x) const {
  const std::size_t n = core.n, k = bcols.size();
  std::vector<double> y(n + k);
  for (std::size_t i = 0; i < n; ++i) {
    long double s = kernels::row_dot_ld(core, x.data(), i);
    for (std::size_t j = 0; j < k; ++j) s += static_cast<long double>(bcols[j][i]) * x[n + j];
    y[i] = static_cast<double>(s);
  }
  for (std::size_t r = 0; r < k; ++r) {
    long double s = kernels::dot_ld(brows[r].data(), x.data(), n);
    for (std::size_t j = 0; j < k; ++j) s += static_cast<long double>(corner[r][j]) * x[n + j];
    y[n + r] = static_cast<double>(s);
  }
  return y;
}

std::vector<double> BorderedSystem::apply_transpose(const std::vector<double>& x) const {
  const std::size_t n = core.n, k = bcols.size();
  std::vector<double> y(n + k);
  for (std::size_t i = 0; i < n; ++i) {
    long double s = kernels::row_dot_ld(core, x.data(), i);
    for (std::size_t r = 0; r < k; ++r) s += static_cast<long double>(brows[r][i]) * x[n + r];
    y[i] = static_cast<double>(s);
  }
  for (std::size_t j = 0; j < k; ++j) {
    long double s = kernels::dot_ld(bcols[j].data(), x.data(), n);
    for (std::size_t r = 0; r < k; ++r) s += static_cast<long double>(corner[r][j]) * x[n + r];
    y[n + j] = static_cast<double>(s);
  }
  return y;
}

double BorderedSystem::scale() const {
  double s = core.max_abs();
  for (const auto& v : bcols)
    for (double a : v) s = std::max(s, std::abs(a));
  for (const auto& v : brows)
    for (double a : v) s = std::max(s, std::abs(a));
  for (const auto& v : corner)
    for (double a : v) s = std::max(s, std::abs(a));
  return std::max(s, kTiny);
}

namespace {

// rhs - K x (or rhs - K^T x), rows accumulated in long double
std::vector<double> residual_ld(const BorderedSystem& sys, const std::vector<double>& x,
                                const std::vector<double>& rhs, bool transpose) {
  const std::size_t n = sys.core.n, k = sys.bcols.size();
  std::vector<double> r(n + k);
  for (std::size_t i = 0; i < n; ++i) {
    long double s = static_cast<long double>(rhs[i]) - kernels::row_dot_ld(sys.core, x.data(), i);
    if (!transpose) {
      for (std::size_t j = 0; j < k; ++j) s -= static_cast<long double>(sys.bcols[j][i]) * x[n + j];
    } else {
      for (std::size_t rr = 0; rr < k; ++rr) s -= static_cast<long double>(sys.brows[rr][i]) * x[n + rr];
    }
    r[i] = static_cast<double>(s);
  }
  for (std::size_t rr = 0; rr < k; ++rr) {
    const auto& row = !transpose ? sys.brows[rr] : sys.bcols[rr];
    long double s = static_cast<long double>(rhs[n + rr]) - kernels::dot_ld(row.data(), x.data(), n);
    for (std::size_t j = 0; j < k; ++j) {
      const double cj = !transpose ? sys.corner[rr][j] : sys.corner[j][rr];
      s -= static_cast<long double>(cj) * x[n + j];
    }
    r[n + rr] = static_cast<double>(s);
  }
  return r;
}

bool all_finite(const std::vector<double>& v) {
  for (double a : v)
    if (!std::isfinite(a)) return false;
  return true;
}

}  // namespace

BorderedFactor::BorderedFactor(const BorderedSystem& sys) : sys_(sys) {
  n_ = sys_.core.n;
  k_ = sys_.bcols.size();
  if (sys_.brows.size() != k_ || sys_.corner.size() != k_)
    throw ConfigError("BorderedFactor: border shape mismatch");
  for (const auto& c : sys_.bcols)
    if (c.size() != n_) throw ConfigError("BorderedFactor: border column length mismatch");
  for (const auto& r : sys_.brows)
    if (r.size() != n_) throw ConfigError("BorderedFactor: border row length mismatch");
  lu_ = BandLU::factor(sys_.core);
  band_ok_ = lu_.min_pivot() > 1e-10 * lu_.scale();
  if (band_ok_ && k_ > 0) {
    Y_.assign(n_ * k_, 0.0);
    Z_.assign(n_ * k_, 0.0);
    for (std::size_t j = 0; j < k_; ++j) {
      std::vector<double> y = sys_.bcols[j];
      lu_.solve(y.data());
      // one extended-precision refinement pass against the core
      std::vector<double> r(n_);
      for (std::size_t i = 0; i < n_; ++i)
        r[i] = static_cast<double>(static_cast<long double>(sys_.bcols[j][i]) -
                                   kernels::row_dot_ld(sys_.core, y.data(), i));
      lu_.solve(r.data());
      for (std::size_t i = 0; i < n_; ++i) Y_[j * n_ + i] = y[i] + r[i];

      std::vector<double> z = sys_.brows[j];
      lu_.solve_transpose(z.data());
      for (std::size_t i = 0; i < n_; ++i)
        r[i] = static_cast<double>(static_cast<long double>(sys_.brows[j][i]) -
                                   kernels::row_dot_ld(sys_.core, z.data(), i));
      lu_.solve_transpose(r.data());
      for (std::size_t i = 0; i < n_; ++i) Z_[j * n_ + i] = z[i] + r[i];
    }
    long double S[4] = {0, 0, 0, 0};
    for (std::size_t r = 0; r < k_; ++r)
      for (std::size_t j = 0; j < k_; ++j) {
        long double s = sys_.corner[r][j];
        s -= kernels::dot_ld(sys_.brows[r].data(), &Y_[j * n_], n_);
        S[r * k_ + j] = s;
      }
    long double det;
    if (k_ == 1) {
      det = S[0];
      if (det != 0.0L) S_[0] = static_cast<double>(1.0L / det);
    } else {
      det = S[0] * S[3] - S[1] * S[2];
      if (det != 0.0L) {
        S_[0] = static_cast<double>(S[3] / det);
        S_[1] = static_cast<double>(-S[1] / det);
        S_[2] = static_cast<double>(-S[2] / det);
        S_[3] = static_cast<double>(S[0] / det);
      }
    }
    s_zero_ = (det == 0.0L);
    s_parity_ = (det > 0.0L) ? 1 : (det < 0.0L ? -1 : 0);
    if (s_zero_) band_ok_ = false;
  }
  if (!band_ok_) ensure_dense();
}

void BorderedFactor::ensure_dense() const {
  if (dense_) return;
  const std::size_t N = n_ + k_;
  dlu_.assign(N * N, 0.0);
  std::vector<double> cd = sys_.core.dense();
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) dlu_[i * N + j] = cd[i * n_ + j];
  for (std::size_t j = 0; j < k_; ++j)
    for (std::size_t i = 0; i < n_; ++i) dlu_[i * N + (n_ + j)] = sys_.bcols[j][i];
  for (std::size_t r = 0; r < k_; ++r)
    for (std::size_t i = 0; i < n_; ++i) dlu_[(n_ + r) * N + i] = sys_.brows[r][i];
  for (std::size_t r = 0; r < k_; ++r)
    for (std::size_t j = 0; j < k_; ++j) dlu_[(n_ + r) * N + (n_ + j)] = sys_.corner[r][j];
  dpiv_.resize(N);
  dparity_ = 1;
  d_min_pivot_ = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < N; ++c) {
    std::size_t imax = c;
    double amax = std::abs(dlu_[c * N + c]);
    for (std::size_t i = c + 1; i < N; ++i) {
      const double a = std::abs(dlu_[i * N + c]);
      if (a > amax) {
        amax = a;
        imax = i;
      }
    }
    dpiv_[c] = imax;
    if (imax != c) {
      dparity_ = -dparity_;
      for (std::size_t j = 0; j < N; ++j) std::swap(dlu_[c * N + j], dlu_[imax * N + j]);
    }
    if (amax < d_min_pivot_) {
      d_min_pivot_ = amax;
      d_worst_ = c;
    }
    const double pv = dlu_[c * N + c];
    if (pv == 0.0) continue;
    for (std::size_t i = c + 1; i < N; ++i) {
      const double m = dlu_[i * N + c] / pv;
      dlu_[i * N + c] = m;
      if (m != 0.0)
        for (std::size_t j = c + 1; j < N; ++j) dlu_[i * N + j] -= m * dlu_[c * N + j];
    }
  }
  dense_ = true;
}

void BorderedFactor::raw_solve(std::vector<double>& x, bool transpose) const {
  const std::size_t N = n_ + k_;
  if (dense_) {
    if (!transpose) {
      for (std::size_t c = 0; c < N; ++c)
        if (dpiv_[c] != c) std::swap(x[c], x[dpiv_[c]]);
      for (std::size_t c = 0; c < N; ++c) {
        const double xc = x[c];
        if (xc != 0.0)
          for (std::size_t i = c + 1; i < N; ++i) x[i] -= dlu_[i * N + c] * xc;
      }
      for (std::size_t c = N; c-- > 0;) {
        long double s = x[c];
        for (std::size_t j = c + 1; j < N; ++j) s -= static_cast<long double>(dlu_[c * N + j]) * x[j];
        x[c] = static_cast<double>(s / dlu_[c * N + c]);
      }
    } else {
      for (std::size_t c = 0; c < N; ++c) {
        long double s = x[c];
        for (std::size_t j = 0; j < c; ++j) s -= static_cast<long double>(dlu_[j * N + c]) * x[j];
        x[c] = static_cast<double>(s / dlu_[c * N + c]);
      }
      for (std::size_t c = N; c-- > 0;) {
        long double s = x[c];
        for (std::size_t i = c + 1; i < N; ++i) s -= static_cast<long double>(dlu_[i * N + c]) * x[i];
        x[c] = static_cast<double>(s);
      }
      for (std::size_t c = N; c-- > 0;)
        if (dpiv_[c] != c) std::swap(x[c], x[dpiv_[c]]);
    }
    return;
  }
  if (!transpose) {
    lu_.solve(x.data());  // core part in place; border entries untouched yet
    double g[2] = {0, 0};
    for (std::size_t r = 0; r < k_; ++r)
      g[r] = x[n_ + r] - static_cast<double>(kernels::dot_ld(sys_.brows[r].data(), x.data(), n_));
    double y[2] = {0, 0};
    if (k_ == 1) y[0] = S_[0] * g[0];
    if (k_ == 2) {
      y[0] = S_[0] * g[0] + S_[1] * g[1];
      y[1] = S_[2] * g[0] + S_[3] * g[1];
    }
    for (std::size_t j = 0; j < k_; ++j) {
      x[n_ + j] = y[j];
      if (y[j] != 0.0)
        for (std::size_t i = 0; i < n_; ++i) x[i] -= Y_[j * n_ + i] * y[j];
    }
  } else {
    lu_.solve_transpose(x.data());
    double g[2] = {0, 0};
    for (std::size_t j = 0; j < k_; ++j)
      g[j] = x[n_ + j] - static_cast<double>(kernels::dot_ld(sys_.bcols[j].data(), x.data(), n_));
    double y[2] = {0, 0};
    if (k_ == 1) y[0] = S_[0] * g[0];
    if (k_ == 2) {  // solve S^T y = g via the transposed inverse
      y[0] = S_[0] * g[0] + S_[2] * g[1];
      y[1] = S_[1] * g[0] + S_[3] * g[1];
    }
    for (std::size_t r = 0; r < k_; ++r) {
      x[n_ + r] = y[r];
      if (y[r] != 0.0)
        for (std::size_t i = 0; i < n_; ++i) x[i] -= Z_[r * n_ + i] * y[r];
    }
  }
}

bool BorderedFactor::refine(std::vector<double>& x, const std::vector<double>& rhs,
                            bool transpose) const {
  const double sc = sys_.scale();
  for (int pass = 0; pass < 6; ++pass) {
    if (!all_finite(x)) return false;
    std::vector<double> r = residual_ld(sys_, x, rhs, transpose);
    const double rn = kernels::norm_inf(r.data(), r.size());
    const double xn = kernels::norm_inf(x.data(), x.size());
    const double bn = kernels::norm_inf(rhs.data(), rhs.size());
    if (rn <= 1e-12 * (sc * xn + bn) + kTiny) return true;
    raw_solve(r, transpose);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += r[i];
  }
  std::vector<double> r = residual_ld(sys_, x, rhs, transpose);
  const double rn = kernels::norm_inf(r.data(), r.size());
  const double xn = kernels::norm_inf(x.data(), x.size());
  const double bn = kernels::norm_inf(rhs.data(), rhs.size());
  return rn <= 1e-12 * (sc * xn + bn) + kTiny;
}

std::vector<double> BorderedFactor::solve(const std::vector<double>& rhs) const {
  if (rhs.size() != n_ + k_) throw ConfigError("BorderedFactor::solve: dimension mismatch");
  std::vector<double> x = rhs;
  if (!dense_) {
    raw_solve(x, false);
    if (refine(x, rhs, false)) return x;
    ensure_dense();
    x = rhs;
  }
  if (d_min_pivot_ < 1e-14 * sys_.scale())
    throw SingularError("solve_bordered: pivot below threshold", d_worst_);
  raw_solve(x, false);
  if (!refine(x, rhs, false))
    throw SingularError("solve_bordered: refinement failed to reach the residual bound", d_worst_);
  return x;
}

std::vector<double> BorderedFactor::solve_transpose(const std::vector<double>& rhs) const {
  if (rhs.size() != n_ + k_) throw ConfigError("BorderedFactor::solve_transpose: dimension mismatch");
  std::vector<double> x = rhs;
  if (!dense_) {
    raw_solve(x, true);
    if (refine(x, rhs, true)) return x;
    ensure_dense();
    x = rhs;
  }
  if (d_min_pivot_ < 1e-14 * sys_.scale())
    throw SingularError("solve_bordered: pivot below threshold", d_worst_);
  raw_solve(x, true);
  if (!refine(x, rhs, true))
    throw SingularError("solve_bordered: refinement failed to reach the residual bound", d_worst_);
  return x;
}

int BorderedFactor::det_sign() const {
  if (!dense_) {
    const int s1 = lu_.det_sign();
    if (s1 != 0 && (k_ == 0 || s_parity_ != 0)) return k_ == 0 ? s1 : s1 * s_parity_;
    ensure_dense();
  }
  int s = dparity_;
  const std::size_t N = n_ + k_;
  for (std::size_t c = 0; c < N; ++c) {
    const double v = dlu_[c * N + c];
    if (v == 0.0) return 0;
    if (v < 0.0) s = -s;
  }
  return s;
}

double BorderedFactor::min_singular_estimate() const {
  const std::size_t N = n_ + k_;
  if (dense_ && d_min_pivot_ == 0.0) return 0.0;
  std::vector<double> v(N);
  for (std::size_t i = 0; i < N; ++i) v[i] = std::sin(static_cast<double>(i + 1));
  double nv = kernels::norm2(v.data(), N);
  for (std::size_t i = 0; i < N; ++i) v[i] /= nv;
  double mu = 0.0;
  for (int it = 0; it < 8; ++it) {
    std::vector<double> w = v;
    raw_solve(w, true);
    raw_solve(w, false);
    if (!all_finite(w)) return 0.0;
    mu = kernels::norm2(w.data(), N);
    if (mu == 0.0 || !std::isfinite(mu)) return 0.0;
    for (std::size_t i = 0; i < N; ++i) v[i] = w[i] / mu;
  }
  return 1.0 / std::sqrt(mu);
}

std::vector<double> solve_bordered(const BorderedSystem& sys, const std::vector<double>& rhs) {
  return BorderedFactor(sys).solve(rhs);
}

int det_sign(const BorderedSystem& sys) { return BorderedFactor(sys).det_sign(); }

double min_singular_estimate(const BorderedSystem& sys) {
  return BorderedFactor(sys).min_singular_estimate();
}

}  // namespace gpe
