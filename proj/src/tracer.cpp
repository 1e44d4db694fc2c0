#include "gpe/tracer.hpp"

#include <algorithm>
#include <cmath>

#include "gpe/errors.hpp"
#include "gpe/kernels.hpp"

namespace gpe {

void validate(const TraceConfig& cfg) {
  if (!(cfg.ds_min > 0.0 && cfg.ds_min < cfg.ds0 && cfg.ds0 <= cfg.ds_max))
    throw ConfigError("trace config: need 0 < ds_min < ds0 <= ds_max");
  if (!(cfg.angle_double_deg > 0.0 && cfg.angle_double_deg < cfg.angle_halve_deg &&
        cfg.angle_halve_deg < 90.0))
    throw ConfigError("trace config: need 0 < angle_double_deg < angle_halve_deg < 90");
  if (!(cfg.newton_tol > 0.0)) throw ConfigError("trace config: newton_tol must be positive");
  if (cfg.newton_max_iter < 1) throw ConfigError("trace config: newton_max_iter must be >= 1");
  if (cfg.max_steps < 1) throw ConfigError("trace config: max_steps must be >= 1");
}

namespace {

constexpr double kPi = 3.14159265358979323846;

ClosingRow row_from_tangent(const Tangent& tg) {
  ClosingRow r;
  r.v_phi = tg.dot_phi;
  r.v_lambda = tg.dot_lambda;
  r.v_t = tg.dot_t;
  return r;
}

double angle_deg(const Tangent& a, const Tangent& b) {
  long double d = kernels::dot_ld(a.dot_phi.data(), b.dot_phi.data(), a.dot_phi.size());
  d += static_cast<long double>(a.dot_lambda) * b.dot_lambda;
  d += static_cast<long double>(a.dot_t) * b.dot_t;
  const double c = std::clamp(static_cast<double>(d), -1.0, 1.0);
  return std::acos(c) * 180.0 / kPi;
}

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

struct TangentInfo {
  Tangent tg;
  double sigma_min = 0.0;
  double scale = 0.0;
};

// The square system closes [H_x | H_t] with the previous tangent (or e_t on
// the first call, which forces the t-component of the solution to be 1).
// For the solution z of K z = e_last, the cofactor identity
// det[J; u'] = ||z|| det(K) with u = z/||z|| gives the orientation of the
// normalized tangent directly from the factorization of K.
TangentInfo tangent_core(const HomotopyProblem& p, const State& s, std::optional<int> ori,
                         const Tangent* prev, bool want_sigma) {
  const std::size_t N = p.size();
  ClosingRow row;
  if (prev)
    row = row_from_tangent(*prev);
  else
    row.v_t = 1.0;
  BorderedSystem sys = augmented_system(p, s, row);
  BorderedFactor F(sys);
  std::vector<double> rhs(N + 2, 0.0);
  rhs[N + 1] = 1.0;
  std::vector<double> z = F.solve(rhs);
  const double nz = kernels::norm2(z.data(), z.size());
  if (!(nz > 0.0) || !std::isfinite(nz))
    throw NumericalError("tangent: non-finite null vector");
  TangentInfo out;
  out.tg.dot_phi.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(N));
  for (double& v : out.tg.dot_phi) v /= nz;
  out.tg.dot_lambda = z[N] / nz;
  out.tg.dot_t = z[N + 1] / nz;
  const int sgn = F.det_sign();
  if (sgn == 0) throw SingularError("tangent: orientation undefined (singular tracing system)", 0);
  if (!ori) {
    out.tg.ori = sgn;  // dot_t > 0 holds by the e_t closing row
  } else {
    if (sgn != *ori) {
      for (double& v : out.tg.dot_phi) v = -v;
      out.tg.dot_lambda = -out.tg.dot_lambda;
      out.tg.dot_t = -out.tg.dot_t;
    }
    out.tg.ori = *ori;
  }
  if (want_sigma) out.sigma_min = F.min_singular_estimate();
  out.scale = sys.scale();
  return out;
}

// Endgame fallback: damped Newton with t pinned at 1.
bool damped_newton_t1(const HomotopyProblem& p, State& x, const TraceConfig& cfg) {
  const std::size_t N = p.size();
  ClosingRow row;
  row.v_t = 1.0;
  std::vector<double> H = eval_H(p, x);
  double hn = kernels::norm2(H.data(), H.size());
  for (int it = 0; it < 60; ++it) {
    if (!std::isfinite(hn)) return false;
    if (hn <= cfg.newton_tol) return true;
    std::vector<double> rhs(N + 2, 0.0);
    for (std::size_t i = 0; i < N + 1; ++i) rhs[i] = -H[i];
    std::vector<double> d;
    try {
      d = BorderedFactor(augmented_system(p, x, row)).solve(rhs);
    } catch (const NumericalError&) {
      return false;
    }
    double alpha = 1.0;
    bool moved = false;
    while (alpha >= 1e-8) {
      State xn = x;
      for (std::size_t i = 0; i < N; ++i) xn.phi[i] += alpha * d[i];
      xn.lambda += alpha * d[N];
      std::vector<double> Hn = eval_H(p, xn);
      const double hnn = kernels::norm2(Hn.data(), Hn.size());
      if (std::isfinite(hnn) && (hnn < (1.0 - 1e-4 * alpha) * hn || hnn <= cfg.newton_tol)) {
        x = std::move(xn);
        H = std::move(Hn);
        hn = hnn;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) return false;
  }
  return hn <= cfg.newton_tol;
}

}  // namespace

Tangent tangent_at(const HomotopyProblem& p, const State& s, std::optional<int> ori,
                   const Tangent* prev) {
  return tangent_core(p, s, ori, prev, false).tg;
}

Predicted predict(const State& s, const Tangent& tg, double ds) {
  Predicted pr;
  pr.ds_eff = ds;
  if (tg.dot_t > 0.0 && s.t + ds * tg.dot_t > 1.0) {
    pr.ds_eff = (1.0 - s.t) / tg.dot_t;
    pr.clamped = true;
  }
  pr.x.phi.resize(s.phi.size());
  for (std::size_t i = 0; i < s.phi.size(); ++i) pr.x.phi[i] = s.phi[i] + pr.ds_eff * tg.dot_phi[i];
  pr.x.lambda = s.lambda + pr.ds_eff * tg.dot_lambda;
  pr.x.t = pr.clamped ? 1.0 : s.t + pr.ds_eff * tg.dot_t;
  return pr;
}

CorrectResult correct(const HomotopyProblem& p, const State& predicted, const ClosingRow& row,
                      const TraceConfig& cfg) {
  const std::size_t N = p.size();
  CorrectResult res;
  State x = predicted;
  for (int it = 0;; ++it) {
    std::vector<double> H = eval_H(p, x);
    const double hn = kernels::norm2(H.data(), H.size());
    res.residual_history.push_back(hn);
    if (!std::isfinite(hn)) {
      res.note = "non-finite residual";
      return res;
    }
    if (hn <= cfg.newton_tol) {
      res.ok = true;
      res.s = std::move(x);
      res.residual = hn;
      res.iterations = it;
      return res;
    }
    if (it >= cfg.newton_max_iter) {
      res.note = "newton iteration cap";
      return res;
    }
    long double hyp = 0.0L;
    if (!row.v_phi.empty())
      for (std::size_t i = 0; i < N; ++i)
        hyp += static_cast<long double>(row.v_phi[i]) * (x.phi[i] - predicted.phi[i]);
    hyp += static_cast<long double>(row.v_lambda) * (x.lambda - predicted.lambda);
    hyp += static_cast<long double>(row.v_t) * (x.t - predicted.t);
    std::vector<double> rhs(N + 2);
    for (std::size_t i = 0; i < N + 1; ++i) rhs[i] = -H[i];
    rhs[N + 1] = -static_cast<double>(hyp);
    try {
      std::vector<double> d = BorderedFactor(augmented_system(p, x, row)).solve(rhs);
      for (std::size_t i = 0; i < N; ++i) x.phi[i] += d[i];
      x.lambda += d[N];
      x.t += d[N + 1];
    } catch (const NumericalError& e) {
      res.note = std::string("corrector solve failed: ") + e.what();
      return res;
    }
  }
}

PathResult trace_path(const HomotopyProblem& p, const State& s0, int index,
                      const TraceConfig& cfg) {
  validate(cfg);
  PathResult R;
  R.index = index;
  R.inv.bound = lambda_bound(p);
  R.phi = s0.phi;
  R.lambda = s0.lambda;
  R.t_final = s0.t;

  {
    std::vector<double> H0 = eval_H(p, s0);
    R.residual = kernels::norm2(H0.data(), H0.size());
    if (R.residual > cfg.newton_tol) {
      R.failure = "start state violates the residual contract";
      return R;
    }
  }

  double scale_ref = 0.0;
  auto record = [&](long step, const State& st, double ds, double theta, double smin,
                    double resid) {
    R.samples.push_back({step, st.t, st.lambda, ds, theta, smin});
    R.inv.max_residual = std::max(R.inv.max_residual, resid);
    const long double nrm = kernels::dot_ld(st.phi.data(), st.phi.data(), st.phi.size());
    const double nerr = std::abs(static_cast<double>(nrm - p.c)) / p.c;
    R.inv.max_norm_err = std::max(R.inv.max_norm_err, nerr);
    const double lid = lambda_identity(p, st);
    const double lerr = std::abs(st.lambda - lid) / std::max(1.0, std::abs(st.lambda));
    R.inv.max_lambda_id_err = std::max(R.inv.max_lambda_id_err, lerr);
    R.inv.max_bound_excess = std::max(R.inv.max_bound_excess, std::abs(st.lambda) - R.inv.bound);
    if (smin > 0.0) R.inv.min_sigma_min = std::min(R.inv.min_sigma_min, smin);
  };

  State s = s0;
  TangentInfo ti;
  try {
    ti = tangent_core(p, s, std::nullopt, nullptr, true);
  } catch (const std::exception& e) {
    R.failure = std::string("tangent at the start state failed: ") + e.what();
    return R;
  }
  scale_ref = ti.scale;
  record(0, s, 0.0, 0.0, ti.sigma_min, R.residual);

  double ds = cfg.ds0;
  long attempts = 0;
  while (true) {
    if (++attempts > cfg.max_steps) {
      R.failure = "max steps exceeded";
      break;
    }
    Predicted pr = predict(s, ti.tg, ds);
    ClosingRow row;
    if (pr.clamped)
      row.v_t = 1.0;  // endgame hyperplane: t pinned at 1
    else
      row = row_from_tangent(ti.tg);
    CorrectResult cr = correct(p, pr.x, row, cfg);

    TangentInfo tnew;
    double theta = 0.0;
    bool angle_reject = false;
    if (cr.ok && !pr.clamped) {
      try {
        tnew = tangent_core(p, cr.s, ti.tg.ori, &ti.tg, true);
        scale_ref = std::max(scale_ref, tnew.scale);
        theta = angle_deg(ti.tg, tnew.tg);
        angle_reject = theta > cfg.angle_halve_deg;
      } catch (const std::exception&) {
        cr.ok = false;
      }
    }

    if (!cr.ok || angle_reject) {
      if (angle_reject)
        ++R.rejected_angle;
      else
        ++R.rejected_newton;
      ds *= 0.5;
      if (ds < cfg.ds_min) {
        if (pr.clamped) {
          State xg = pr.x;
          if (damped_newton_t1(p, xg, cfg)) {
            std::vector<double> Hf = eval_H(p, xg);
            const double rf = kernels::norm2(Hf.data(), Hf.size());
            sign_normalize(xg.phi);
            ++R.steps_accepted;
            record(R.steps_accepted, xg, pr.ds_eff, 0.0, 0.0, rf);
            R.success = true;
            R.phi = xg.phi;
            R.lambda = xg.lambda;
            R.t_final = 1.0;
            R.residual = rf;
            R.warnings.push_back("endgame needed damped iteration");
            break;
          }
          R.degenerate_endgame = true;
          R.failure = "degenerate endgame";
          if (ti.tg.dot_t != 0.0)
            R.lambda = s.lambda + ti.tg.dot_lambda / ti.tg.dot_t * (1.0 - s.t);
          break;
        }
        R.failure = "step size underflow";
        break;
      }
      continue;
    }

    if (pr.clamped) {
      State fs = cr.s;  // t == 1 exactly
      double smin_f = 0.0, theta_f = 0.0;
      try {
        TangentInfo tf = tangent_core(p, fs, ti.tg.ori, &ti.tg, true);
        scale_ref = std::max(scale_ref, tf.scale);
        smin_f = tf.sigma_min;
        theta_f = angle_deg(ti.tg, tf.tg);
      } catch (const std::exception&) {
        // the final tangent is diagnostic only
      }
      sign_normalize(fs.phi);
      ++R.steps_accepted;
      record(R.steps_accepted, fs, pr.ds_eff, theta_f, smin_f, cr.residual);
      R.success = true;
      R.phi = fs.phi;
      R.lambda = fs.lambda;
      R.t_final = 1.0;
      R.residual = cr.residual;
      break;
    }

    // regular acceptance
    s = cr.s;
    ti = tnew;
    ++R.steps_accepted;
    record(R.steps_accepted, s, pr.ds_eff, theta, tnew.sigma_min, cr.residual);
    R.phi = s.phi;
    R.lambda = s.lambda;
    R.t_final = s.t;
    R.residual = cr.residual;
    if (theta < cfg.angle_double_deg) ds = std::min(2.0 * ds, cfg.ds_max);
  }

  if (R.inv.min_sigma_min < 1e-10 * scale_ref)
    R.warnings.push_back("tracing system regularity estimate fell below 1e-10 of the system scale");
  return R;
}

std::vector<PathResult> trace_all(const HomotopyProblem& p, const TraceConfig& cfg,
                                  const std::vector<int>& which, int workers) {
  validate(cfg);
  std::vector<State> starts = initial_states(p, which);
  std::vector<PathResult> out(which.size());
  const long long count = static_cast<long long>(which.size());
#ifdef GPE_HAVE_OPENMP
#pragma omp parallel for num_threads(std::max(1, workers)) schedule(dynamic, 1)
#else
  (void)workers;
#endif
  for (long long i = 0; i < count; ++i) {
    try {
      out[i] = trace_path(p, starts[i], which[i], cfg);
    } catch (const std::exception& e) {
      out[i] = PathResult{};
      out[i].index = which[i];
      out[i].failure = std::string("unexpected: ") + e.what();
    }
  }
  return out;
}

}  // namespace gpe
