#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gpe/homotopy.hpp"

namespace gpe {

struct TraceConfig {
  double ds0 = 0.01;
  double ds_min = 1e-8;
  double ds_max = 0.1;
  double angle_halve_deg = 18.0;
  double angle_double_deg = 6.0;
  double newton_tol = 1e-10;  // on ||H||_2
  int newton_max_iter = 10;
  long max_steps = 100000;
};

void validate(const TraceConfig& cfg);

// Unit tangent (dot_phi, dot_lambda, dot_t) of the path, with the recorded
// orientation of the closed square system.
struct Tangent {
  std::vector<double> dot_phi;
  double dot_lambda = 0.0;
  double dot_t = 0.0;
  int ori = 0;  // -1 or +1
};

struct Predicted {
  State x;
  double ds_eff = 0.0;  // actual step after any clamp
  bool clamped = false; // t was clamped to exactly 1
};

struct CorrectResult {
  bool ok = false;
  State s;
  double residual = 0.0;  // ||H||_2 at s
  int iterations = 0;
  std::vector<double> residual_history;  // ||H|| before each update, then final
  std::string note;
};

// One accepted point of a path.
struct PathSample {
  long step = 0;
  double t = 0.0;
  double lambda = 0.0;
  double ds = 0.0;         // step that produced this point (0 for the start)
  double theta_deg = 0.0;  // angle to the previous tangent
  double sigma_min = 0.0;  // smallest-singular-value estimate of the tracing system
};

// Worst-case invariant slack seen over the accepted points of a path.
struct InvariantAggregate {
  double max_residual = 0.0;
  double max_norm_err = 0.0;        // |phi'phi - c| / c
  double max_lambda_id_err = 0.0;   // relative mismatch of the Rayleigh identity
  double max_bound_excess = -1e308; // max over points of |lambda| - bound
  double min_sigma_min = 1e308;
  double bound = 0.0;
};

struct PathResult {
  int index = 0;  // 1-based start eigenvalue index
  bool success = false;
  std::string failure;  // empty on success
  bool degenerate_endgame = false;

  std::vector<double> phi;  // final vector (sign-normalized); last good state on failure
  double lambda = 0.0;
  double t_final = 0.0;
  double residual = 0.0;  // ||H|| at (phi, lambda, t_final)

  long steps_accepted = 0;
  long rejected_newton = 0;
  long rejected_angle = 0;
  std::vector<PathSample> samples;
  InvariantAggregate inv;
  std::vector<std::string> warnings;
};

// Null vector of [H_x | H_t] with orientation bookkeeping. First call (ori
// empty): sign fixed so dot_t > 0, orientation recorded from the determinant
// of the closed system. Later calls: sign fixed so the determinant sign
// equals ori; prev supplies the closing row.
Tangent tangent_at(const HomotopyProblem& p, const State& s, std::optional<int> ori,
                   const Tangent* prev = nullptr);

Predicted predict(const State& s, const Tangent& tg, double ds);

// Newton on [H; closing-row hyperplane through the predicted point].
CorrectResult correct(const HomotopyProblem& p, const State& predicted, const ClosingRow& row,
                      const TraceConfig& cfg);

PathResult trace_path(const HomotopyProblem& p, const State& s0, int index, const TraceConfig& cfg);

// All paths, input order, deterministic regardless of worker count.
std::vector<PathResult> trace_all(const HomotopyProblem& p, const TraceConfig& cfg,
                                  const std::vector<int>& which, int workers);

}  // namespace gpe
