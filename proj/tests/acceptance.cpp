// Acceptance gate: nine expected behaviors, one PASS/FAIL line each.
// Exit code = number of failed criteria.
#include <Eigen/Dense>

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "gpe/discretize.hpp"
#include "gpe/homotopy.hpp"
#include "gpe/tracer.hpp"
#include "gpe/verify.hpp"

using namespace gpe;

namespace {

// pinned tolerances
constexpr double kLambdaTol1D = 0.05;       // vs published 1D values
constexpr double kLambdaTol2D = 0.05;       // vs published 2D values
constexpr double kLambdaTol2DCoarse = 0.5;  // the value printed to one decimal
constexpr double kOracleLambdaTol = 1e-6;   // SCF cross-check
constexpr double kOracleVecTol = 1e-6;
constexpr double kAntisymTol = 1e-8;        // relative to the sup norm
constexpr double kFixtureTol = 1e-8;        // half-domain fixture vs traced
constexpr double kResidualTol = 1e-10;
constexpr double kNormTol = 1e-8;           // relative
constexpr double kLambdaIdTol = 1e-8;       // relative
constexpr double kJacobianTol = 1e-6;
constexpr double kSeparationTol = 1e-8;
constexpr double kLinearTol = 1e-9;         // relative, beta = 0 limit

const double kRef1D[9] = {6.76, 8.39, 10.35, 12.73, 15.62, 19.08, 23.13, 27.79, 33.05};
const double kRef2D[12] = {43.36, 60.89,  65.31,  78.81,  86.28,  94.06,
                           104.4, 108.82, 120.47, 129.67, 133.81, 138.68};

struct Criterion {
  bool ok = false;
  std::string detail;
};

Criterion results[10];  // 1-based

void set(int k, bool ok, const std::string& detail) {
  results[k].ok = ok;
  results[k].detail = detail;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

ProblemSpec spec_1d(std::size_t n, double beta) {
  ProblemSpec s;
  s.dim = 1;
  s.dom = {-2.0, 2.0, 0.0, 0.0};
  s.n = n;
  s.beta = beta;
  return s;
}

ProblemSpec spec_2d(std::size_t m, std::size_t n, double beta) {
  ProblemSpec s;
  s.dim = 2;
  s.dom = {0.0, 1.0, 0.0, 1.0};
  s.m = m;
  s.n = n;
  s.beta = beta;
  return s;
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int k = lo; k <= hi; ++k) v.push_back(k);
  return v;
}

double min_sign_dist(const std::vector<double>& a, const std::vector<double>& b) {
  long double dp = 0.0L, dm = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dp += (a[i] - b[i]) * (long double)(a[i] - b[i]);
    dm += (a[i] + b[i]) * (long double)(a[i] + b[i]);
  }
  return std::sqrt(static_cast<double>(std::min(dp, dm)));
}

const PathResult* find_path(const std::vector<PathResult>& rs, int index) {
  for (const auto& r : rs)
    if (r.index == index) return &r;
  return nullptr;
}

}  // namespace

int main() {
  const TraceConfig tc;  // library defaults

  std::printf("building the 1D reference run (n = 999, beta = 20)...\n");
  const ProblemSpec s1 = spec_1d(999, 20.0);
  HomotopyProblem p1 = make_homotopy(s1, RandomMatrixKind::Diag1D, 1);
  std::vector<PathResult> run1 = trace_all(p1, tc, range(1, 9), 1);

  // 1. published 1D eigenvalues
  {
    bool ok = true;
    double worst = 0.0;
    std::string missing;
    for (int k = 1; k <= 9; ++k) {
      const PathResult* r = find_path(run1, k);
      if (!r || !r->success) {
        ok = false;
        missing += fmt(" path %d failed;", k);
        continue;
      }
      const double d = std::abs(r->lambda - kRef1D[k - 1]);
      worst = std::max(worst, d);
      if (d > kLambdaTol1D) {
        ok = false;
        missing += fmt(" path %d: lambda %.4f vs %.2f;", k, r->lambda, kRef1D[k - 1]);
      }
    }
    set(1, ok,
        ok ? fmt("nine eigenvalues within %.2f (worst |dlambda| = %.2e)", kLambdaTol1D, worst)
           : "mismatches:" + missing);
  }

  // 8. worker count must not change a single bit
  {
    std::vector<PathResult> run1w4 = trace_all(p1, tc, range(1, 9), 4);
    bool ok = run1w4.size() == run1.size();
    for (std::size_t i = 0; ok && i < run1.size(); ++i) {
      ok = run1[i].index == run1w4[i].index &&
           std::memcmp(&run1[i].lambda, &run1w4[i].lambda, sizeof(double)) == 0 &&
           run1[i].steps_accepted == run1w4[i].steps_accepted &&
           run1[i].phi.size() == run1w4[i].phi.size() &&
           std::memcmp(run1[i].phi.data(), run1w4[i].phi.data(),
                       run1[i].phi.size() * sizeof(double)) == 0;
    }
    set(8, ok,
        ok ? "1 vs 4 workers: eigenvalues, vectors, and step counts bit-identical"
           : "worker count changed the results");
  }

  // 7. separation and order preservation along the 1D run
  {
    const OrderReport ord = check_order_preservation(run1);
    const bool ok = ord.preserved && ord.min_separation > kSeparationTol;
    set(7, ok,
        fmt("order %s, min pairwise separation %.3e at %zu checkpoints",
            ord.preserved ? "preserved" : "VIOLATED", ord.min_separation,
            ord.checkpoints.size()));
  }

  std::printf("building the 2D reference run (29 x 29, beta = 20)...\n");
  const ProblemSpec s2 = spec_2d(29, 29, 20.0);
  HomotopyProblem p2 = make_homotopy(s2, RandomMatrixKind::BlockTridiag2D, 1, 0.5);
  std::vector<PathResult> run2 = trace_all(p2, tc, range(1, 15), 4);

  // 2. published 2D eigenvalues (set containment over the 15 traced paths)
  {
    bool ok = true;
    std::string missing;
    for (double ref : kRef2D) {
      const double tol = (ref == 104.4) ? kLambdaTol2DCoarse : kLambdaTol2D;
      bool found = false;
      for (const auto& r : run2)
        if (r.success && std::abs(r.lambda - ref) <= tol) found = true;
      if (!found) {
        ok = false;
        missing += fmt(" %.2f", ref);
      }
    }
    int converged = 0;
    for (const auto& r : run2)
      if (r.success) ++converged;
    set(2, ok,
        ok ? fmt("all 12 published values reached by %d converged paths", converged)
           : fmt("%d/15 paths converged; values not reached:%s", converged, missing.c_str()));
  }

  // 3. independent fixed-point oracle for the ground state, both dimensions
  {
    std::string detail;
    bool ok = true;
    struct Case {
      const char* name;
      HomotopyProblem* p;
      const std::vector<PathResult>* run;
    } cases[] = {{"1D", &p1, &run1}, {"2D", &p2, &run2}};
    for (const auto& cse : cases) {
      const PathResult* r = find_path(*cse.run, 1);
      if (!r || !r->success) {
        ok = false;
        detail += fmt(" %s: path 1 failed;", cse.name);
        continue;
      }
      const Eigenpair scf = scf_ground_state(*cse.p);
      const double dl = std::abs(scf.lambda - r->lambda);
      const double dv = min_sign_dist(scf.phi, r->phi);
      const bool pos = one_signed(r->phi);
      if (dl > kOracleLambdaTol || dv > kOracleVecTol || !pos) ok = false;
      detail += fmt(" %s: |dlambda| = %.2e, |dphi| = %.2e, one-signed = %d;", cse.name, dl, dv,
                    pos ? 1 : 0);
    }
    set(3, ok, detail.substr(1));
  }

  // 4. antisymmetry of the second 1D path + half-domain fixture
  {
    bool ok = true;
    std::string detail;
    const PathResult* r2 = find_path(run1, 2);
    if (!r2 || !r2->success) {
      ok = false;
      detail = "1D path 2 failed";
    } else {
      const AntisymReport ar = check_antisymmetric(r2->phi, s1, kAntisymTol);
      if (!ar.applicable || !ar.antisymmetric) ok = false;
      double ninf = 0.0;
      for (double v : r2->phi) ninf = std::max(ninf, std::abs(v));
      detail = fmt("path 2 max|phi_j + phi_(n+1-j)| = %.2e (%.2e rel)", ar.max_asym,
                   ar.max_asym / ninf);
    }
    // Fixture parity check at beta = 1: at beta = 20 the coarse-grid second
    // branch breaks mirror symmetry for even n (a solution with its node
    // pinned on a grid point sits below the antisymmetric one, and path 2
    // tracks it), so the weak-coupling regime is where the premise of the
    // comparison — traced path 2 is the antisymmetric state — holds for
    // both parities.
    for (std::size_t n : {std::size_t(7), std::size_t(8)}) {
      const ProblemSpec sf = spec_1d(n, 1.0);
      const Eigenpair ref = antisymmetric_reference(sf);
      HomotopyProblem pf = make_homotopy(sf, RandomMatrixKind::Diag1D, 1);
      const PathResult rf = trace_all(pf, tc, {2}, 1).at(0);
      const double dl = std::abs(ref.lambda - rf.lambda);
      const double dv = rf.success ? min_sign_dist(ref.phi, rf.phi) : 1.0;
      if (!rf.success || dl > kFixtureTol || dv > kFixtureTol) ok = false;
      detail += fmt("; fixture n=%zu (beta=1): |dlambda| = %.2e, |dphi| = %.2e", n, dl, dv);
    }
    set(4, ok, detail);
  }

  // 5. invariants at every accepted point of the smoke run and both reference runs
  {
    const ProblemSpec ss = spec_1d(50, 1.0);
    HomotopyProblem ps = make_homotopy(ss, RandomMatrixKind::Diag1D, 1);
    std::vector<PathResult> smoke = trace_all(ps, tc, range(1, 5), 1);

    bool ok = true;
    double wr = 0.0, wn = 0.0, wl = 0.0, wb = -1e300;
    auto fold = [&](const std::vector<PathResult>& rs) {
      for (const auto& r : rs) {
        wr = std::max(wr, r.inv.max_residual);
        wn = std::max(wn, r.inv.max_norm_err);
        wl = std::max(wl, r.inv.max_lambda_id_err);
        wb = std::max(wb, r.inv.max_bound_excess);
      }
    };
    fold(smoke);
    fold(run1);
    fold(run2);
    ok = wr <= kResidualTol && wn <= kNormTol && wl <= kLambdaIdTol && wb <= 0.0;
    set(5, ok,
        fmt("worst over 29 paths: residual %.2e, norm err %.2e, lambda-identity %.2e, "
            "bound excess %.2e",
            wr, wn, wl, wb));
  }

  // 6. analytic Jacobian vs central differences
  {
    HomotopyProblem pa = make_homotopy(spec_1d(20, 5.0), RandomMatrixKind::Diag1D, 11);
    HomotopyProblem pb = make_homotopy(spec_2d(8, 8, 5.0), RandomMatrixKind::BlockTridiag2D, 12);
    const double e1 = jacobian_fd_audit(pa, 100, 101);
    const double e2 = jacobian_fd_audit(pb, 100, 202);
    const bool ok = e1 <= kJacobianTol && e2 <= kJacobianTol;
    set(6, ok, fmt("max relative error %.2e (1D, 100 states), %.2e (2D, 100 states)", e1, e2));
  }

  // 9. linear limit equals a dense eigensolver
  {
    const ProblemSpec sl = spec_1d(300, 0.0);
    HomotopyProblem pl = make_homotopy(sl, RandomMatrixKind::Diag1D, 5, 0.0);
    std::vector<PathResult> rl = trace_all(pl, tc, range(1, 10), 1);

    Eigen::MatrixXd Dd(300, 300);
    for (int i = 0; i < 300; ++i)
      for (int j = 0; j < 300; ++j) Dd(i, j) = pl.D.get(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Dd);

    bool ok = true;
    double worst = 0.0;
    for (int k = 1; k <= 10; ++k) {
      const PathResult* r = find_path(rl, k);
      const double ref = es.eigenvalues()(k - 1);
      if (!r || !r->success) {
        ok = false;
        continue;
      }
      const double rel = std::abs(r->lambda - ref) / std::abs(ref);
      worst = std::max(worst, rel);
      if (rel > kLinearTol) ok = false;
    }
    set(9, ok, fmt("ten lowest eigenvalues match to %.2e relative (tol %.0e)", worst, kLinearTol));
  }

  int failures = 0;
  for (int k = 1; k <= 9; ++k) {
    const bool ok = results[k].ok;
    if (!ok) ++failures;
    std::printf("criterion %d: %s — %s\n", k, ok ? "PASS" : "FAIL", results[k].detail.c_str());
  }
  std::printf("%d/9 criteria passed\n", 9 - failures);
  return failures;
}
