#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpe/homotopy.hpp"
#include "gpe/tracer.hpp"

namespace gpe {

struct Eigenpair {
  double lambda = 0.0;
  std::vector<double> phi;
  double residual = 0.0;  // ||H|| at t=1, recomputed
  bool positive = false;
  bool antisymmetric = false;
  bool degenerate_endgame = false;
  int iterations = 0;  // solver iterations when produced by an iterative oracle
};

// ||H(phi, lambda, t=1)||_2
double residual_t1(const HomotopyProblem& p, const std::vector<double>& phi, double lambda);

bool one_signed(const std::vector<double>& phi);

// Damped self-consistent iteration for the positive ground state of
// D phi + beta phi^3 = lambda phi, phi'phi = c. Independent of the tracer.
Eigenpair scf_ground_state(const HomotopyProblem& p, double tol = 1e-10, int max_iter = 5000,
                           double mix = 0.5);

struct AntisymReport {
  bool applicable = false;     // 1D on a symmetric domain
  bool antisymmetric = false;  // mirror antisymmetry within tol
  double max_asym = 0.0;       // max_j |phi_j + phi_{n-1-j}| / ||phi||_inf
  double middle = 0.0;         // |middle entry| / ||phi||_inf (odd n)
  bool first_half_one_signed = false;
};

AntisymReport check_antisymmetric(const std::vector<double>& phi, const ProblemSpec& spec,
                                  double tol = 1e-8);

struct BoundReport {
  bool ok = false;
  double bound = 0.0;
  double worst_excess = 0.0;  // max over samples of |lambda| - bound
  int worst_path = 0;
};

BoundReport check_bound(const std::vector<PathResult>& paths, const HomotopyProblem& p);

struct OrderReport {
  bool preserved = false;
  double min_separation = 0.0;  // min pairwise |lambda_i - lambda_j| at checkpoints t <= 0.9
  std::vector<double> checkpoints;
  std::vector<int> violated;  // checkpoint indices where the ranking changed
  std::string note;
};

// Compares the lambda-ranking of the paths at t = 0, 0.1, ..., 1.0 (linear
// interpolation between accepted samples) against the ranking at t=0.
OrderReport check_order_preservation(const std::vector<PathResult>& paths);

// Central finite differences of eval_H against the analytic Jacobian blocks
// at `samples` random states; returns the worst relative entry error.
double jacobian_fd_audit(const HomotopyProblem& p, int samples, std::uint64_t seed);

// Exact antisymmetric excited state of the 1D problem on a symmetric domain,
// built from the positive ground state of the half-domain problem. Reference
// fixture for small n.
Eigenpair antisymmetric_reference(const ProblemSpec& spec, double tol = 1e-12,
                                  int max_iter = 20000);

}  // namespace gpe
