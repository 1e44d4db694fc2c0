#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gpe/config.hpp"
#include "gpe/errors.hpp"
#include "gpe/homotopy.hpp"
#include "gpe/kernels.hpp"
#include "gpe/report.hpp"
#include "gpe/tracer.hpp"
#include "gpe/verify.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> paths;
  std::optional<int> workers;
  std::optional<double> sigma;
  std::optional<std::string> kind;
  std::optional<std::string> out;
};

void apply(const Overrides& ov, gpe::RunConfig& cfg) {
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.paths) cfg.paths = gpe::parse_paths(*ov.paths);
  if (ov.workers) cfg.workers = *ov.workers;
  if (ov.sigma) cfg.sigma = *ov.sigma;
  if (ov.kind) cfg.kind = *ov.kind;
  if (ov.out) cfg.out = *ov.out;
  gpe::validate(cfg);
}

int cmd_solve(const std::string& config_path, const Overrides& ov) {
  const auto t0 = std::chrono::steady_clock::now();
  gpe::RunConfig cfg = gpe::load_config(config_path);
  apply(ov, cfg);

  const gpe::RandomMatrixKind kind =
      cfg.kind.empty() ? gpe::default_kind(cfg.spec.dim) : gpe::kind_from_string(cfg.kind);
  gpe::HomotopyProblem p = gpe::make_homotopy(cfg.spec, kind, cfg.seed, cfg.sigma);
  for (const std::string& w : p.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

  std::vector<gpe::PathResult> results = gpe::trace_all(p, cfg.trace, cfg.paths, cfg.workers);

  std::vector<gpe::PathFlags> flags(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    flags[i].positive = gpe::one_signed(results[i].phi);
    const gpe::AntisymReport ar = gpe::check_antisymmetric(results[i].phi, cfg.spec);
    flags[i].antisymmetric = ar.applicable && ar.antisymmetric;
  }
  const gpe::BoundReport bound = gpe::check_bound(results, p);
  const gpe::OrderReport order = gpe::check_order_preservation(results);

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::string rp = gpe::write_solve_outputs(cfg.out, cfg, p, results, flags, bound, order,
                                                  seconds, cfg.workers);

  std::size_t failed = 0;
  for (const auto& r : results) {
    if (r.success) {
      std::printf("path %d: lambda = %.10g  steps = %ld  residual = %.3e\n", r.index, r.lambda,
                  r.steps_accepted, r.residual);
    } else {
      ++failed;
      std::printf("path %d: FAILED (%s) at t = %.6f, lambda = %.10g\n", r.index,
                  r.failure.c_str(), r.t_final, r.lambda);
    }
    for (const std::string& w : r.warnings)
      std::fprintf(stderr, "warning: path %d: %s\n", r.index, w.c_str());
  }
  std::printf("bound check: %s   order preserved: %s\n", bound.ok ? "ok" : "VIOLATED",
              order.preserved ? "yes" : "NO");
  std::printf("report: %s\n", rp.c_str());
  return (failed == results.size() && !results.empty()) ? 1 : 0;
}

int cmd_verify(const std::string& report_path) {
  const gpe::LoadedReport rep = gpe::load_report(report_path);
  const gpe::RandomMatrixKind kind = gpe::kind_from_string(
      rep.cfg.kind.empty() ? gpe::kind_to_string(gpe::default_kind(rep.cfg.spec.dim))
                           : rep.cfg.kind);
  gpe::HomotopyProblem p = gpe::make_homotopy(rep.cfg.spec, kind, rep.cfg.seed, rep.cfg.sigma);
  if (p.sigma != rep.sigma_used)
    std::fprintf(stderr, "note: rebuilt sigma %.17g differs from recorded %.17g\n", p.sigma,
                 rep.sigma_used);

  namespace fs = std::filesystem;
  bool hard_fail = false;
  const double rtol = 10.0 * rep.cfg.trace.newton_tol;

  std::vector<double> phi1;  // path-1 vector for the SCF cross-check
  for (const auto& lp : rep.paths) {
    const std::string vpath = (fs::path(rep.dir) / lp.vector_csv).string();
    const std::vector<double> phi = gpe::read_vector_csv(vpath);
    if (phi.size() != p.size()) {
      std::printf("path %d: vector size mismatch\n", lp.index);
      hard_fail = true;
      continue;
    }
    if (!lp.success) {
      std::printf("path %d: recorded as failed (%s); residual recheck skipped\n", lp.index,
                  lp.failure.c_str());
      continue;
    }
    const double res = gpe::residual_t1(p, phi, lp.lambda);
    const bool res_ok = res <= rtol;
    const bool rec_ok = std::abs(res - lp.residual) <= 1e-9 + 1e-6 * lp.residual;
    std::printf("path %d: residual recomputed = %.3e recorded = %.3e  %s\n", lp.index, res,
                lp.residual, res_ok && rec_ok ? "ok" : "FAIL");
    if (!res_ok || !rec_ok) hard_fail = true;
    if (lp.index == 1) phi1 = phi;

    const gpe::AntisymReport ar = gpe::check_antisymmetric(phi, rep.cfg.spec);
    if (ar.applicable) {
      if (ar.antisymmetric != lp.antisymmetric) {
        std::printf("path %d: antisymmetry flag mismatch (recorded %d, recomputed %d)\n",
                    lp.index, lp.antisymmetric ? 1 : 0, ar.antisymmetric ? 1 : 0);
        hard_fail = true;
      }
    }

    // replay the bound over the recorded samples
    const auto log = gpe::read_log_csv((fs::path(rep.dir) / lp.log_csv).string());
    const double B = gpe::lambda_bound(p);
    for (const auto& row : log)
      if (std::abs(row.lambda) > B + 1e-9 * std::max(1.0, B)) {
        std::printf("path %d: sample lambda %.10g exceeds the bound %.10g\n", lp.index,
                    row.lambda, B);
        hard_fail = true;
        break;
      }
  }

  if (rep.cfg.spec.dim == 2) std::printf("antisymmetry check: not applicable (dim=2)\n");

  {  // replay order preservation from the recorded path logs (diagnostic)
    std::vector<gpe::PathResult> replay;
    for (const auto& lp : rep.paths) {
      gpe::PathResult r;
      r.index = lp.index;
      r.success = lp.success;
      for (const auto& row : gpe::read_log_csv((fs::path(rep.dir) / lp.log_csv).string()))
        r.samples.push_back({row.step, row.t, row.lambda, row.ds, row.theta_deg, row.sigma_min});
      replay.push_back(std::move(r));
    }
    const gpe::OrderReport ord = gpe::check_order_preservation(replay);
    std::string note = ord.note.empty() ? "" : "  (" + ord.note + ")";
    std::printf("order preservation: %s  min separation %.3e%s\n",
                ord.preserved ? "preserved" : "NOT preserved", ord.min_separation, note.c_str());
  }

  bool have_path1 = false;
  double lambda1 = 0.0;
  for (const auto& lp : rep.paths)
    if (lp.index == 1 && lp.success) {
      have_path1 = true;
      lambda1 = lp.lambda;
    }
  if (have_path1 && !phi1.empty() && p.beta > 0.0) {
    const gpe::Eigenpair scf = gpe::scf_ground_state(p);
    const double dl = std::abs(scf.lambda - lambda1);
    double dplus = 0.0, dminus = 0.0;
    for (std::size_t i = 0; i < phi1.size(); ++i) {
      dplus += (scf.phi[i] - phi1[i]) * (scf.phi[i] - phi1[i]);
      dminus += (scf.phi[i] + phi1[i]) * (scf.phi[i] + phi1[i]);
    }
    const double dv = std::sqrt(std::min(dplus, dminus));
    const double vn = gpe::kernels::norm2(phi1.data(), phi1.size());
    const bool ok = dl <= 1e-6 && dv <= 1e-6 * vn && gpe::one_signed(phi1);
    std::printf("scf cross-check: |dlambda| = %.3e  |dphi| = %.3e (rel %.3e)  one-signed = %d  %s\n",
                dl, dv, dv / vn, gpe::one_signed(phi1) ? 1 : 0, ok ? "ok" : "FAIL");
    if (!ok) hard_fail = true;
  } else {
    std::printf("scf cross-check: skipped (%s)\n",
                p.beta > 0.0 ? "path 1 not available" : "beta = 0");
  }

  std::printf("verify: %s\n", hard_fail ? "FAIL" : "ok");
  return hard_fail ? 1 : 0;
}

int cmd_export(const std::string& report_path, int path_index, const std::string& out) {
  const gpe::LoadedReport rep = gpe::load_report(report_path);
  const std::string target = gpe::export_plot(rep, path_index, out);
  std::printf("wrote %s\n", target.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eigenpairs of the discretized Gross-Pitaevskii problem via homotopy continuation"};
  app.require_subcommand(1);

  std::string config_path, report_path, out_override, paths_str, kind_str;
  Overrides ov;

  CLI::App* solve = app.add_subcommand("solve", "trace homotopy paths for a config");
  solve->add_option("config", config_path, "config file")->required();
  std::uint64_t seed_val = 0;
  auto* seed_opt = solve->add_option("--seed", seed_val, "override the seed");
  auto* paths_opt = solve->add_option("--paths", paths_str, "override the path set, e.g. 1..9");
  int workers_val = 0;
  auto* workers_opt = solve->add_option("--workers", workers_val, "override the worker count");
  double sigma_val = 0.0;
  auto* sigma_opt = solve->add_option("--sigma", sigma_val, "override the random scale");
  auto* kind_opt = solve->add_option("--kind", kind_str, "override the random matrix kind")
                       ->check(CLI::IsMember({"diag", "blocktridiag", "pentadiag"}));
  auto* out_opt = solve->add_option("--out", out_override, "override the output directory");

  CLI::App* verify = app.add_subcommand("verify", "re-verify a written report");
  verify->add_option("report", report_path, "report.json path")->required();

  CLI::App* exp = app.add_subcommand("export", "write plot-ready data with boundary rows");
  exp->add_option("report", report_path, "report.json path")->required();
  int path_index = 0;
  exp->add_option("--path", path_index, "path index to export")->required();
  std::string export_out;
  exp->add_option("--out", export_out, "output file (default: next to the report)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  try {
    if (solve->parsed()) {
      if (*seed_opt) ov.seed = seed_val;
      if (*paths_opt) ov.paths = paths_str;
      if (*workers_opt) ov.workers = workers_val;
      if (*sigma_opt) ov.sigma = sigma_val;
      if (*kind_opt) ov.kind = kind_str;
      if (*out_opt) ov.out = out_override;
      return cmd_solve(config_path, ov);
    }
    if (verify->parsed()) return cmd_verify(report_path);
    if (exp->parsed()) return cmd_export(report_path, path_index, export_out);
  } catch (const gpe::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
