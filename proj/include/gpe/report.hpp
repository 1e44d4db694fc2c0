#pragma once

#include <string>
#include <vector>

#include "gpe/config.hpp"
#include "gpe/homotopy.hpp"
#include "gpe/tracer.hpp"
#include "gpe/verify.hpp"

namespace gpe {

struct PathFlags {
  bool positive = false;
  bool antisymmetric = false;
};

// report.json content (deterministic: keys sorted, volatile execution data
// confined to the "timing" object).
std::string report_json(const RunConfig& cfg, const HomotopyProblem& p,
                        const std::vector<PathResult>& paths, const std::vector<PathFlags>& flags,
                        const BoundReport& bound, const OrderReport& order, double seconds,
                        int workers);

// Writes report.json plus per-path vector and log CSVs into `dir`; returns
// the report path.
std::string write_solve_outputs(const std::string& dir, const RunConfig& cfg,
                                const HomotopyProblem& p, const std::vector<PathResult>& paths,
                                const std::vector<PathFlags>& flags, const BoundReport& bound,
                                const OrderReport& order, double seconds, int workers);

struct LoadedPath {
  int index = 0;
  bool success = false;
  std::string failure;
  bool degenerate_endgame = false;
  double lambda = 0.0;
  double t_final = 0.0;
  double residual = 0.0;
  long steps_accepted = 0;
  long rejected_newton = 0;
  long rejected_angle = 0;
  bool positive = false;
  bool antisymmetric = false;
  std::string vector_csv;
  std::string log_csv;
};

struct LoadedReport {
  RunConfig cfg;   // from the config echo (workers defaulted)
  std::string dir; // directory containing the report
  double sigma_used = 0.0;
  std::vector<LoadedPath> paths;
};

LoadedReport load_report(const std::string& path);

// phi column of a path vector CSV
std::vector<double> read_vector_csv(const std::string& path);

struct LogRow {
  long step = 0;
  double t = 0.0, lambda = 0.0, ds = 0.0, theta_deg = 0.0, sigma_min = 0.0;
};

std::vector<LogRow> read_log_csv(const std::string& path);

// Plot-ready data with Dirichlet boundary rows added; returns the output path.
std::string export_plot(const LoadedReport& rep, int path_index, const std::string& out_path);

}  // namespace gpe
