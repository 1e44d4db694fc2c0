#include "gpe/report.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gpe/errors.hpp"

namespace gpe {

namespace {

using nlohmann::json;

double clamp_finite(double x) {
  if (std::isnan(x)) return 0.0;
  if (std::isinf(x)) return x > 0 ? 1e308 : -1e308;
  return x;
}

std::string path_tag(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "path_%03d", index);
  return buf;
}

std::string sci(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  out << content;
  if (!out) throw ConfigError("write failed for '" + p.string() + "'");
}

}  // namespace

std::string report_json(const RunConfig& cfg, const HomotopyProblem& p,
                        const std::vector<PathResult>& paths, const std::vector<PathFlags>& flags,
                        const BoundReport& bound, const OrderReport& order, double seconds,
                        int workers) {
  json j;
  j["artifact_version"] = "1.0.0";
  j["config_echo"] = serialize_config(cfg, /*include_workers=*/false);

  json prob;
  prob["dim"] = p.spec.dim;
  prob["N"] = p.size();
  prob["c"] = p.c;
  prob["beta"] = p.beta;
  prob["kind"] = kind_to_string(p.kind);
  prob["seed"] = p.seed;
  prob["sigma_used"] = p.sigma;
  prob["resample_attempts"] = p.resample_attempts;
  prob["lambda_bound"] = lambda_bound(p);
  if (p.spec.pot.id == "table") prob["potential_table"] = p.spec.pot.table;
  j["problem"] = std::move(prob);

  json jp = json::array();
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const PathResult& r = paths[i];
    json e;
    e["index"] = r.index;
    e["success"] = r.success;
    e["failure"] = r.failure;
    e["degenerate_endgame"] = r.degenerate_endgame;
    e["lambda"] = clamp_finite(r.lambda);
    e["t_final"] = clamp_finite(r.t_final);
    e["residual"] = clamp_finite(r.residual);
    e["steps_accepted"] = r.steps_accepted;
    e["rejected_newton"] = r.rejected_newton;
    e["rejected_angle"] = r.rejected_angle;
    e["flags"] = {{"positive", flags[i].positive},
                  {"antisymmetric", flags[i].antisymmetric},
                  {"degenerate_endgame", r.degenerate_endgame}};
    e["invariants"] = {{"max_residual", clamp_finite(r.inv.max_residual)},
                       {"max_norm_err", clamp_finite(r.inv.max_norm_err)},
                       {"max_lambda_id_err", clamp_finite(r.inv.max_lambda_id_err)},
                       {"max_bound_excess", clamp_finite(r.inv.max_bound_excess)},
                       {"min_sigma_min", clamp_finite(r.inv.min_sigma_min)}};
    e["vector_csv"] = path_tag(r.index) + "_phi.csv";
    e["log_csv"] = path_tag(r.index) + "_log.csv";
    e["warnings"] = r.warnings;
    jp.push_back(std::move(e));
  }
  j["paths"] = std::move(jp);

  json v;
  v["bound"] = {{"ok", bound.ok},
                {"bound", clamp_finite(bound.bound)},
                {"worst_excess", clamp_finite(bound.worst_excess)},
                {"worst_path", bound.worst_path}};
  v["order"] = {{"preserved", order.preserved},
                {"min_separation", clamp_finite(order.min_separation)},
                {"violated_checkpoints", order.violated},
                {"note", order.note}};
  j["verify"] = std::move(v);

  j["warnings"] = p.warnings;
  j["timing"] = {{"total_seconds", seconds}, {"workers", workers}};
  return j.dump(2) + "\n";
}

std::string write_solve_outputs(const std::string& dir, const RunConfig& cfg,
                                const HomotopyProblem& p, const std::vector<PathResult>& paths,
                                const std::vector<PathFlags>& flags, const BoundReport& bound,
                                const OrderReport& order, double seconds, int workers) {
  namespace fs = std::filesystem;
  const fs::path d(dir);
  fs::create_directories(d);

  for (const PathResult& r : paths) {
    std::string csv;
    const std::size_t N = r.phi.size();
    if (p.spec.dim == 1) {
      csv = "x,phi\n";
      for (std::size_t i = 0; i < N; ++i) csv += sci(p.grid.x[i]) + "," + sci(r.phi[i]) + "\n";
    } else {
      csv = "x,y,phi\n";
      const std::size_t n = p.spec.n;
      for (std::size_t q = 0; q < N; ++q)
        csv += sci(p.grid.x[q / n]) + "," + sci(p.grid.y[q % n]) + "," + sci(r.phi[q]) + "\n";
    }
    write_file(d / (path_tag(r.index) + "_phi.csv"), csv);

    std::string log = "step,t,lambda,ds,theta_deg,sigma_min\n";
    for (const PathSample& s : r.samples)
      log += std::to_string(s.step) + "," + sci(s.t) + "," + sci(s.lambda) + "," + sci(s.ds) +
             "," + sci(s.theta_deg) + "," + sci(s.sigma_min) + "\n";
    write_file(d / (path_tag(r.index) + "_log.csv"), log);
  }

  const std::string rep = report_json(cfg, p, paths, flags, bound, order, seconds, workers);
  const fs::path rp = d / "report.json";
  write_file(rp, rep);
  return rp.string();
}

LoadedReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open report '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("report parse error: " + std::string(e.what()));
  }
  LoadedReport rep;
  rep.dir = std::filesystem::path(path).parent_path().string();
  try {
    const std::string echo = j.at("config_echo").get<std::string>();
    std::vector<double> table;
    const std::vector<double>* tp = nullptr;
    if (j.at("problem").contains("potential_table")) {
      table = j["problem"]["potential_table"].get<std::vector<double>>();
      tp = &table;
    }
    rep.cfg = parse_config_text(echo, rep.dir, tp);
    rep.sigma_used = j.at("problem").at("sigma_used").get<double>();
    for (const auto& e : j.at("paths")) {
      LoadedPath lp;
      lp.index = e.at("index").get<int>();
      lp.success = e.at("success").get<bool>();
      lp.failure = e.at("failure").get<std::string>();
      lp.degenerate_endgame = e.at("degenerate_endgame").get<bool>();
      lp.lambda = e.at("lambda").get<double>();
      lp.t_final = e.at("t_final").get<double>();
      lp.residual = e.at("residual").get<double>();
      lp.steps_accepted = e.at("steps_accepted").get<long>();
      lp.rejected_newton = e.at("rejected_newton").get<long>();
      lp.rejected_angle = e.at("rejected_angle").get<long>();
      lp.positive = e.at("flags").at("positive").get<bool>();
      lp.antisymmetric = e.at("flags").at("antisymmetric").get<bool>();
      lp.vector_csv = e.at("vector_csv").get<std::string>();
      lp.log_csv = e.at("log_csv").get<std::string>();
      rep.paths.push_back(std::move(lp));
    }
  } catch (const json::exception& e) {
    throw ConfigError("report structure error: " + std::string(e.what()));
  }
  return rep;
}

namespace {

std::vector<std::vector<double>> read_csv_columns(const std::string& path, std::size_t skip_cols) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV '" + path + "'");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ls, cell, ',')) {
      errno = 0;
      char* end = nullptr;
      const double x = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw ConfigError("bad CSV cell '" + cell + "' in " + path);
      if (col++ >= skip_cols) row.push_back(x);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<double> read_vector_csv(const std::string& path) {
  std::vector<std::vector<double>> rows = read_csv_columns(path, 0);
  std::vector<double> phi;
  phi.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.empty()) throw ConfigError("row without values in " + path);
    phi.push_back(r.back());
  }
  return phi;
}

std::vector<LogRow> read_log_csv(const std::string& path) {
  std::vector<std::vector<double>> rows = read_csv_columns(path, 0);
  std::vector<LogRow> out;
  for (const auto& r : rows) {
    if (r.size() != 6) throw ConfigError("unexpected log row width in " + path);
    LogRow lr;
    lr.step = static_cast<long>(r[0]);
    lr.t = r[1];
    lr.lambda = r[2];
    lr.ds = r[3];
    lr.theta_deg = r[4];
    lr.sigma_min = r[5];
    out.push_back(lr);
  }
  return out;
}

std::string export_plot(const LoadedReport& rep, int path_index, const std::string& out_path) {
  const LoadedPath* lp = nullptr;
  for (const auto& e : rep.paths)
    if (e.index == path_index) lp = &e;
  if (!lp) throw ConfigError("path " + std::to_string(path_index) + " not in report");
  namespace fs = std::filesystem;
  const std::vector<double> phi = read_vector_csv((fs::path(rep.dir) / lp->vector_csv).string());
  const Grid g = build_grid(rep.cfg.spec);
  if (phi.size() != g.size()) throw ConfigError("vector CSV size does not match the grid");

  std::string out;
  if (rep.cfg.spec.dim == 1) {
    const std::size_t n = rep.cfg.spec.n;
    out = "x,phi\n";
    out += sci(rep.cfg.spec.dom.a) + "," + sci(0.0) + "\n";
    for (std::size_t i = 0; i < n; ++i) out += sci(g.x[i]) + "," + sci(phi[i]) + "\n";
    out += sci(rep.cfg.spec.dom.b) + "," + sci(0.0) + "\n";
  } else {
    const std::size_t m = rep.cfg.spec.m, n = rep.cfg.spec.n;
    out = "x,y,phi\n";
    for (std::size_t i = 0; i <= m + 1; ++i) {
      const double x = (i == 0) ? rep.cfg.spec.dom.a
                                : (i == m + 1 ? rep.cfg.spec.dom.b : g.x[i - 1]);
      for (std::size_t jj = 0; jj <= n + 1; ++jj) {
        const double y = (jj == 0) ? rep.cfg.spec.dom.c
                                   : (jj == n + 1 ? rep.cfg.spec.dom.d : g.y[jj - 1]);
        const bool boundary = (i == 0 || i == m + 1 || jj == 0 || jj == n + 1);
        const double v = boundary ? 0.0 : phi[(i - 1) * n + (jj - 1)];
        out += sci(x) + "," + sci(y) + "," + sci(v) + "\n";
      }
    }
  }
  std::string target = out_path;
  if (target.empty())
    target = (fs::path(rep.dir) / ("export_" + path_tag(path_index) + ".csv")).string();
  write_file(target, out);
  return target;
}

}  // namespace gpe
