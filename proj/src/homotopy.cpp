#include "gpe/homotopy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gpe/errors.hpp"
#include "gpe/kernels.hpp"

namespace gpe {

RandomMatrixKind kind_from_string(const std::string& s) {
  if (s == "diag") return RandomMatrixKind::Diag1D;
  if (s == "blocktridiag") return RandomMatrixKind::BlockTridiag2D;
  if (s == "pentadiag") return RandomMatrixKind::Pentadiag2D;
  throw ConfigError("unknown random matrix kind '" + s + "' (expected diag, blocktridiag, or pentadiag)");
}

std::string kind_to_string(RandomMatrixKind k) {
  switch (k) {
    case RandomMatrixKind::Diag1D: return "diag";
    case RandomMatrixKind::BlockTridiag2D: return "blocktridiag";
    case RandomMatrixKind::Pentadiag2D: return "pentadiag";
  }
  return "?";
}

RandomMatrixKind default_kind(int dim) {
  return dim == 1 ? RandomMatrixKind::Diag1D : RandomMatrixKind::BlockTridiag2D;
}

double default_sigma(const Grid& grid, const SymBandMatrix& D) {
  const double vol = grid.dim == 1 ? grid.h * grid.h : grid.h1 * grid.h2;
  return 0.05 * gershgorin_radius(D) * vol;
}

namespace {

struct Uniform {
  std::mt19937_64 eng;
  explicit Uniform(std::uint64_t seed) : eng(seed) {}
  double unit() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
};

}  // namespace

SymBandMatrix sample_A(const ProblemSpec& spec, const Grid& grid, RandomMatrixKind kind,
                       std::uint64_t seed, double sigma) {
  if (kind == RandomMatrixKind::Diag1D && spec.dim != 1)
    throw ConfigError("kind 'diag' requires dim=1");
  if (kind != RandomMatrixKind::Diag1D && spec.dim != 2)
    throw ConfigError("2D random matrix kinds require dim=2");
  const std::size_t N = grid.size();
  Uniform rng(seed);
  if (kind == RandomMatrixKind::Diag1D) {
    SymBandMatrix A = SymBandMatrix::zeros(N, {0});
    for (std::size_t i = 0; i < N; ++i) A.bands[0][i] = rng.range(-sigma, sigma);
    return A;
  }
  const std::size_t n = static_cast<std::size_t>(spec.n);
  if (spec.m < 2 || spec.n < 2)
    throw ConfigError("2D random matrix kinds require m >= 2 and n >= 2");
  std::vector<std::size_t> offs = {0, 1};
  if (kind == RandomMatrixKind::Pentadiag2D) offs.push_back(n);
  SymBandMatrix A = SymBandMatrix::zeros(N, offs);
  for (std::size_t i = 0; i < N; ++i) A.bands[0][i] = rng.range(-sigma, sigma);
  for (std::size_t p = 0; p + 1 < N; ++p) {
    if (p % n == n - 1) continue;  // block boundary: no coupling, no draw
    A.bands[1][p] = rng.range(-sigma, -sigma / 10.0);
  }
  if (kind == RandomMatrixKind::Pentadiag2D)
    for (std::size_t p = 0; p + n < N; ++p) A.bands[2][p] = rng.range(-sigma, -sigma / 10.0);
  return A;
}

HomotopyProblem make_homotopy(const ProblemSpec& spec, RandomMatrixKind kind, std::uint64_t seed,
                              std::optional<double> sigma) {
  validate(spec);
  HomotopyProblem p;
  p.spec = spec;
  p.grid = build_grid(spec);
  p.D = build_operator(spec, p.grid);
  p.beta = spec.beta;
  p.c = p.grid.c;
  p.seed = seed;
  p.kind = kind;
  p.sigma = sigma ? *sigma : default_sigma(p.grid, p.D);
  if (p.sigma < 0) throw ConfigError("sigma must be >= 0");
  if (spec.dim == 2 && (spec.m < 6 || spec.n < 6))
    p.warnings.push_back("2D grid smaller than 6x6: path simplicity is not guaranteed at this size");

  const int max_attempts = 10;
  for (int a = 0;; ++a) {
    p.A = sample_A(spec, p.grid, kind, seed + static_cast<std::uint64_t>(a), p.sigma);
    p.start_eigen = sym_eigen_full(add_scaled(1.0, p.A, 1.0, p.D));
    if (p.sigma == 0.0) {
      p.resample_attempts = a;
      break;
    }
    const double gap_tol = 1e-8 * gershgorin_radius(add_scaled(1.0, p.A, 1.0, p.D));
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < p.start_eigen.values.size(); ++k)
      min_gap = std::min(min_gap, p.start_eigen.values[k + 1] - p.start_eigen.values[k]);
    if (min_gap > gap_tol) {
      p.resample_attempts = a;
      break;
    }
    if (a + 1 >= max_attempts)
      throw ConfigError("start matrix eigenvalue gaps stayed below tolerance after 10 draws; increase sigma");
  }
  return p;
}

std::vector<double> eval_H(const HomotopyProblem& p, const State& s) {
  const std::size_t N = p.size();
  if (s.phi.size() != N) throw ConfigError("eval_H: state dimension mismatch");
  std::vector<double> r(N + 1);
  kernels::combined_rows(p.A, 1.0 - s.t, p.D, s.t * p.beta, -s.lambda, s.phi.data(), r.data());
  const long double nrm = kernels::dot_ld(s.phi.data(), s.phi.data(), N);
  r[N] = static_cast<double>(0.5L * (static_cast<long double>(p.c) - nrm));
  return r;
}

SymBandMatrix jacobian_core(const HomotopyProblem& p, const State& s) {
  SymBandMatrix M = add_scaled(1.0 - s.t, p.A, 1.0, p.D);
  const double w = 3.0 * s.t * p.beta;
  for (std::size_t i = 0; i < M.n; ++i)
    M.bands[0][i] += w * s.phi[i] * s.phi[i] - s.lambda;
  return M;
}

BorderedSystem jacobian_x(const HomotopyProblem& p, const State& s) {
  BorderedSystem sys;
  sys.core = jacobian_core(p, s);
  std::vector<double> mphi(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) mphi[i] = -s.phi[i];
  sys.bcols = {mphi};
  sys.brows = {std::move(mphi)};
  sys.corner = {{0.0}};
  return sys;
}

std::vector<double> dH_dt(const HomotopyProblem& p, const State& s) {
  const std::size_t N = p.size();
  std::vector<double> r(N + 1);
  for (std::size_t i = 0; i < N; ++i) {
    long double v = static_cast<long double>(p.beta) * s.phi[i] * s.phi[i] * s.phi[i];
    v -= kernels::row_dot_ld(p.A, s.phi.data(), i);
    r[i] = static_cast<double>(v);
  }
  r[N] = 0.0;
  return r;
}

BorderedSystem augmented_system(const HomotopyProblem& p, const State& s, const ClosingRow& row) {
  const std::size_t N = p.size();
  BorderedSystem sys;
  sys.core = jacobian_core(p, s);
  std::vector<double> mphi(N);
  for (std::size_t i = 0; i < N; ++i) mphi[i] = -s.phi[i];
  sys.bcols = {mphi, dH_dt(p, s)};
  sys.bcols[1].resize(N);  // drop the trailing structural zero of dH_dt
  std::vector<double> vrow = row.v_phi;
  if (vrow.empty()) vrow.assign(N, 0.0);
  if (vrow.size() != N) throw ConfigError("augmented_system: closing row dimension mismatch");
  sys.brows = {std::move(mphi), std::move(vrow)};
  sys.corner = {{0.0, 0.0}, {row.v_lambda, row.v_t}};
  return sys;
}

double lambda_identity(const HomotopyProblem& p, const State& s) {
  const std::size_t N = p.size();
  std::vector<double> w(N);
  kernels::combined_rows(p.A, 1.0 - s.t, p.D, 0.0, 0.0, s.phi.data(), w.data());
  long double s1 = kernels::dot_ld(s.phi.data(), w.data(), N);
  long double s2 = 0.0L;
  for (std::size_t i = 0; i < N; ++i) {
    const long double q = static_cast<long double>(s.phi[i]) * s.phi[i];
    s2 += q * q;
  }
  return static_cast<double>((s1 + static_cast<long double>(s.t) * p.beta * s2) / p.c);
}

double lambda_bound(const HomotopyProblem& p) {
  return gershgorin_radius(p.A) + gershgorin_radius(p.D) + p.beta * p.c;
}

namespace {

void sign_normalize(std::vector<double>& phi) {
  std::size_t arg = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double a = std::abs(phi[i]);
    if (a > best) {
      best = a;
      arg = i;
    }
  }
  if (phi[arg] < 0.0)
    for (double& v : phi) v = -v;
}

// Newton at fixed t, closing the square system with the t-row e_t so dt = 0.
// A double-stored iterate cannot push ||H|| below ~||J||*eps*||phi|| (each
// update is rounded back to double), so the loop keeps the best state seen
// and stops once improvement stalls at that floor.
bool polish_at_fixed_t(const HomotopyProblem& p, State& s, double tol, int max_iter) {
  const std::size_t N = p.size();
  ClosingRow row;  // v_phi = 0, v_lambda = 0, v_t = 1
  row.v_t = 1.0;
  State best = s;
  std::vector<double> H = eval_H(p, s);
  double hn = kernels::norm2(H.data(), H.size());
  double best_hn = hn;
  for (int it = 0; it < max_iter; ++it) {
    if (best_hn <= tol) break;
    std::vector<double> rhs(N + 2);
    for (std::size_t i = 0; i < N + 1; ++i) rhs[i] = -H[i];
    rhs[N + 1] = 0.0;
    BorderedFactor F(augmented_system(p, s, row));
    std::vector<double> d = F.solve(rhs);
    for (std::size_t i = 0; i < N; ++i) s.phi[i] += d[i];
    s.lambda += d[N];
    H = eval_H(p, s);
    const double prev = hn;
    hn = kernels::norm2(H.data(), H.size());
    if (hn < best_hn) {
      best_hn = hn;
      best = s;
    }
    if (hn > 0.5 * prev && it > 0) break;  // at the rounding floor
  }
  s = std::move(best);
  return best_hn <= tol;
}

}  // namespace

std::vector<State> initial_states(const HomotopyProblem& p, const std::vector<int>& which) {
  const std::size_t N = p.size();
  const double tol = 1e-10;
  std::vector<State> out;
  out.reserve(which.size());
  for (int k : which) {
    if (k < 1 || static_cast<std::size_t>(k) > N)
      throw ConfigError("path index " + std::to_string(k) + " outside 1.." + std::to_string(N));
    State s;
    s.t = 0.0;
    s.lambda = p.start_eigen.values[static_cast<std::size_t>(k - 1)];
    const double* col = p.start_eigen.column(static_cast<std::size_t>(k - 1));
    s.phi.assign(col, col + N);
    const double nrm = kernels::norm2(s.phi.data(), N);
    const double scale = std::sqrt(p.c) / nrm;
    for (double& v : s.phi) v *= scale;
    // the dense eigensolver is usually a little short of the 1e-10 contract
    std::vector<double> H = eval_H(p, s);
    if (kernels::norm2(H.data(), H.size()) > tol)
      if (!polish_at_fixed_t(p, s, tol, 8))
        throw NumericalError("initial state " + std::to_string(k) + " could not be polished to the residual contract");
    sign_normalize(s.phi);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace gpe
