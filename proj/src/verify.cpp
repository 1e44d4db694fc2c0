#include "gpe/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gpe/errors.hpp"
#include "gpe/kernels.hpp"

namespace gpe {

double residual_t1(const HomotopyProblem& p, const std::vector<double>& phi, double lambda) {
  State s;
  s.phi = phi;
  s.lambda = lambda;
  s.t = 1.0;
  std::vector<double> H = eval_H(p, s);
  return kernels::norm2(H.data(), H.size());
}

bool one_signed(const std::vector<double>& phi) {
  if (phi.empty()) return false;
  if (phi[0] > 0.0) {
    for (double v : phi)
      if (!(v > 0.0)) return false;
    return true;
  }
  if (phi[0] < 0.0) {
    for (double v : phi)
      if (!(v < 0.0)) return false;
    return true;
  }
  return false;
}

namespace {

struct ScfOut {
  double lambda = 0.0;
  std::vector<double> phi;
  int iterations = 0;
  bool converged = false;
};

double rayleigh(const SymBandMatrix& D, double beta, double c, const std::vector<double>& phi) {
  const std::size_t n = D.n;
  long double s1 = 0.0L, s2 = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    s1 += static_cast<long double>(phi[i]) * kernels::row_dot_ld(D, phi.data(), i);
    const long double q = static_cast<long double>(phi[i]) * phi[i];
    s2 += q * q;
  }
  return static_cast<double>((s1 + static_cast<long double>(beta) * s2) / c);
}

// Damped self-consistent iteration: phi <- mix of phi and the normalized
// solution of (D + beta diag(phi^2)) psi = phi. The operator is an
// irreducible M-matrix, so positive iterates stay positive.
ScfOut scf_core(const SymBandMatrix& D, double beta, double c, double tol, int max_iter,
                double mix) {
  const std::size_t n = D.n;
  ScfOut out;
  std::vector<double> phi(n, std::sqrt(c / static_cast<double>(n)));
  std::vector<double> r(n);
  for (int it = 1; it <= max_iter; ++it) {
    SymBandMatrix M = D;
    for (std::size_t i = 0; i < n; ++i) M.bands[0][i] += beta * phi[i] * phi[i];
    BandLU lu = BandLU::factor(M);
    std::vector<double> psi = phi;
    lu.solve(psi.data());
    const double np = kernels::norm2(psi.data(), n);
    if (!(np > 0.0) || !std::isfinite(np)) throw NumericalError("scf: iterate collapsed");
    double sc = std::sqrt(c) / np;
    if (psi[0] < 0.0) sc = -sc;
    for (std::size_t i = 0; i < n; ++i) phi[i] = (1.0 - mix) * phi[i] + mix * sc * psi[i];
    const double nf = kernels::norm2(phi.data(), n);
    const double rs = std::sqrt(c) / nf;
    for (double& v : phi) v *= rs;
    const double lam = rayleigh(D, beta, c, phi);
    kernels::combined_rows(D, 0.0, D, beta, -lam, phi.data(), r.data());
    const double res = kernels::norm2(r.data(), n);
    out.iterations = it;
    if (res <= tol) {
      out.lambda = lam;
      out.phi = std::move(phi);
      out.converged = true;
      return out;
    }
    out.lambda = lam;
  }
  out.phi = std::move(phi);
  return out;
}

}  // namespace

Eigenpair scf_ground_state(const HomotopyProblem& p, double tol, int max_iter, double mix) {
  ScfOut o = scf_core(p.D, p.beta, p.c, tol, max_iter, mix);
  if (!o.converged)
    throw NumericalError("scf ground state did not converge within " + std::to_string(max_iter) +
                         " iterations");
  Eigenpair e;
  e.lambda = o.lambda;
  e.phi = std::move(o.phi);
  e.residual = residual_t1(p, e.phi, e.lambda);
  e.positive = one_signed(e.phi) && e.phi[0] > 0.0;
  e.iterations = o.iterations;
  return e;
}

AntisymReport check_antisymmetric(const std::vector<double>& phi, const ProblemSpec& spec,
                                  double tol) {
  AntisymReport rep;
  if (spec.dim != 1) return rep;
  if (std::abs(spec.dom.a + spec.dom.b) > 1e-12 * (spec.dom.b - spec.dom.a)) return rep;
  rep.applicable = true;
  const std::size_t n = phi.size();
  const double ninf = std::max(kernels::norm_inf(phi.data(), n), 1e-300);
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    worst = std::max(worst, std::abs(phi[j] + phi[n - 1 - j]));
  rep.max_asym = worst / ninf;
  if (n % 2 == 1) rep.middle = std::abs(phi[(n - 1) / 2]) / ninf;
  rep.antisymmetric = rep.max_asym <= tol;
  const std::size_t half = n / 2;
  if (half > 0) {
    std::vector<double> fh(phi.begin(), phi.begin() + static_cast<std::ptrdiff_t>(half));
    rep.first_half_one_signed = one_signed(fh);
  }
  return rep;
}

BoundReport check_bound(const std::vector<PathResult>& paths, const HomotopyProblem& p) {
  BoundReport rep;
  rep.bound = lambda_bound(p);
  rep.worst_excess = -std::numeric_limits<double>::infinity();
  for (const PathResult& pr : paths)
    for (const PathSample& s : pr.samples) {
      const double ex = std::abs(s.lambda) - rep.bound;
      if (ex > rep.worst_excess) {
        rep.worst_excess = ex;
        rep.worst_path = pr.index;
      }
    }
  rep.ok = rep.worst_excess <= 1e-9 * std::max(1.0, rep.bound);
  return rep;
}

namespace {

// lambda at parameter tau by walking the accepted samples; false if the path
// never brackets tau.
bool lambda_at(const PathResult& pr, double tau, double* out) {
  const auto& ss = pr.samples;
  for (std::size_t i = 0; i < ss.size(); ++i) {
    if (ss[i].t == tau) {
      *out = ss[i].lambda;
      return true;
    }
    if (i + 1 < ss.size() && ss[i].t < tau && tau < ss[i + 1].t) {
      const double w = (tau - ss[i].t) / (ss[i + 1].t - ss[i].t);
      *out = ss[i].lambda + w * (ss[i + 1].lambda - ss[i].lambda);
      return true;
    }
  }
  return false;
}

}  // namespace

OrderReport check_order_preservation(const std::vector<PathResult>& paths) {
  OrderReport rep;
  rep.min_separation = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 10; ++k) rep.checkpoints.push_back(0.1 * k);
  if (paths.empty()) {
    rep.preserved = true;
    rep.note = "no paths";
    return rep;
  }
  std::vector<std::size_t> base_rank;
  bool have_base = false;
  bool all_ok = true;
  for (int k = 0; k <= 10; ++k) {
    const double tau = rep.checkpoints[static_cast<std::size_t>(k)];
    std::vector<double> lam(paths.size());
    bool covered = true;
    for (std::size_t i = 0; i < paths.size(); ++i)
      if (!lambda_at(paths[i], tau, &lam[i])) {
        covered = false;
        break;
      }
    if (!covered) {
      rep.note += "checkpoint " + std::to_string(tau) + " not covered by all paths; ";
      continue;
    }
    if (tau <= 0.9)
      for (std::size_t i = 0; i < lam.size(); ++i)
        for (std::size_t j = i + 1; j < lam.size(); ++j)
          rep.min_separation = std::min(rep.min_separation, std::abs(lam[i] - lam[j]));
    std::vector<std::size_t> rank(paths.size());
    for (std::size_t i = 0; i < rank.size(); ++i) rank[i] = i;
    std::stable_sort(rank.begin(), rank.end(),
                     [&lam](std::size_t a, std::size_t b) { return lam[a] < lam[b]; });
    if (!have_base) {
      base_rank = rank;
      have_base = true;
    } else if (rank != base_rank) {
      rep.violated.push_back(k);
      all_ok = false;
    }
  }
  rep.preserved = have_base && all_ok;
  return rep;
}

double jacobian_fd_audit(const HomotopyProblem& p, int samples, std::uint64_t seed) {
  const std::size_t N = p.size();
  std::mt19937_64 eng(seed);
  auto unit = [&eng] { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
  const double B = lambda_bound(p);
  double worst = 0.0;
  for (int sidx = 0; sidx < samples; ++sidx) {
    State s;
    s.phi.resize(N);
    for (std::size_t i = 0; i < N; ++i) s.phi[i] = 2.0 * unit() - 1.0;
    const double nrm = kernels::norm2(s.phi.data(), N);
    const double sc = std::sqrt(p.c) / std::max(nrm, 1e-300);
    for (double& v : s.phi) v *= sc;
    s.lambda = B * (2.0 * unit() - 1.0);
    s.t = unit();

    // analytic [H_x | H_t] as a dense (N+1) x (N+2) block
    const std::size_t cols = N + 2;
    std::vector<double> J((N + 1) * cols, 0.0);
    {
      BorderedSystem jx = jacobian_x(p, s);
      std::vector<double> cd = jx.core.dense();
      for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) J[i * cols + j] = cd[i * N + j];
      for (std::size_t i = 0; i < N; ++i) J[i * cols + N] = jx.bcols[0][i];
      for (std::size_t j = 0; j < N; ++j) J[N * cols + j] = jx.brows[0][j];
      J[N * cols + N] = jx.corner[0][0];
      std::vector<double> ht = dH_dt(p, s);
      for (std::size_t i = 0; i < N + 1; ++i) J[i * cols + (N + 1)] = ht[i];
    }
    double amax = 0.0;
    for (double v : J) amax = std::max(amax, std::abs(v));

    auto fd_column = [&](std::size_t var) {
      State sp = s, sm = s;
      double step;
      if (var < N) {
        step = 1e-6 * (1.0 + std::abs(s.phi[var]));
        sp.phi[var] += step;
        sm.phi[var] -= step;
      } else if (var == N) {
        step = 1e-6 * (1.0 + std::abs(s.lambda));
        sp.lambda += step;
        sm.lambda -= step;
      } else {
        step = 1e-6 * (1.0 + std::abs(s.t));
        sp.t += step;
        sm.t -= step;
      }
      std::vector<double> Hp = eval_H(p, sp), Hm = eval_H(p, sm);
      std::vector<double> col(N + 1);
      for (std::size_t i = 0; i < N + 1; ++i) col[i] = (Hp[i] - Hm[i]) / (2.0 * step);
      return col;
    };

    for (std::size_t var = 0; var < cols; ++var) {
      std::vector<double> col = fd_column(var);
      for (std::size_t i = 0; i < N + 1; ++i)
        worst = std::max(worst, std::abs(col[i] - J[i * cols + var]) / amax);
    }
  }
  return worst;
}

Eigenpair antisymmetric_reference(const ProblemSpec& spec, double tol, int max_iter) {
  if (spec.dim != 1) throw ConfigError("antisymmetric reference: 1D only");
  if (std::abs(spec.dom.a + spec.dom.b) > 1e-12 * (spec.dom.b - spec.dom.a))
    throw ConfigError("antisymmetric reference: domain must be symmetric about 0");
  if (spec.n < 2) throw ConfigError("antisymmetric reference: n >= 2 required");
  validate(spec);
  const Grid g = build_grid(spec);
  const std::size_t n = g.size();
  const double h = g.h;
  const double ih2 = 1.0 / (h * h);
  const bool odd = (n % 2 == 1);
  const std::size_t q = odd ? (n - 1) / 2 : n / 2;
  if (q == 0) throw ConfigError("antisymmetric reference: grid too small");

  SymBandMatrix Dh = SymBandMatrix::zeros(q, q > 1 ? std::vector<std::size_t>{0, 1}
                                                   : std::vector<std::size_t>{0});
  for (std::size_t j = 0; j < q; ++j) Dh.bands[0][j] = ih2 + potential_at(spec, g, j);
  if (q > 1)
    for (std::size_t j = 0; j + 1 < q; ++j) Dh.bands[1][j] = -0.5 * ih2;
  // even n: the mirror pairing folds the coupling across the center back onto
  // the last retained node
  if (!odd) Dh.bands[0][q - 1] += 0.5 * ih2;

  ScfOut o = scf_core(Dh, spec.beta, g.c / 2.0, tol, max_iter, 0.5);
  if (!o.converged) throw NumericalError("antisymmetric reference: half-domain iteration stalled");

  Eigenpair e;
  e.lambda = o.lambda;
  e.phi.assign(n, 0.0);
  for (std::size_t j = 0; j < q; ++j) {
    e.phi[j] = o.phi[j];
    e.phi[n - 1 - j] = -o.phi[j];
  }
  e.antisymmetric = true;
  e.iterations = o.iterations;

  // residual of the full-size problem at t=1
  SymBandMatrix D = build_operator(spec, g);
  std::vector<double> r(n + 1);
  kernels::combined_rows(D, 0.0, D, spec.beta, -e.lambda, e.phi.data(), r.data());
  const long double nrm = kernels::dot_ld(e.phi.data(), e.phi.data(), n);
  r[n] = static_cast<double>(0.5L * (static_cast<long double>(g.c) - nrm));
  e.residual = kernels::norm2(r.data(), n + 1);
  return e;
}

}  // namespace gpe
