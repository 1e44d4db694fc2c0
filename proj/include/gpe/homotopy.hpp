#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpe/band_matrix.hpp"
#include "gpe/discretize.hpp"
#include "gpe/linalg.hpp"

namespace gpe {

// Sparsity pattern of the random start matrix A.
enum class RandomMatrixKind { Diag1D, BlockTridiag2D, Pentadiag2D };

RandomMatrixKind kind_from_string(const std::string& s);
std::string kind_to_string(RandomMatrixKind k);
RandomMatrixKind default_kind(int dim);

// A point on (or near) a homotopy path.
struct State {
  std::vector<double> phi;
  double lambda = 0.0;
  double t = 0.0;
};

// Last row of the square tracing system: v_phi.x + v_lambda*dl + v_t*dt.
// An empty v_phi stands for the zero vector.
struct ClosingRow {
  std::vector<double> v_phi;
  double v_lambda = 0.0;
  double v_t = 0.0;
};

struct HomotopyProblem {
  ProblemSpec spec;
  Grid grid;
  SymBandMatrix D;  // discretized operator (kinetic + potential)
  SymBandMatrix A;  // random start matrix
  double beta = 0.0;
  double c = 0.0;  // normalization: phi'phi = c
  std::uint64_t seed = 0;
  double sigma = 0.0;  // scale actually used for A
  RandomMatrixKind kind = RandomMatrixKind::Diag1D;
  int resample_attempts = 0;  // extra seeds consumed by the eigen-gap check
  DenseSymEig start_eigen;    // eigendecomposition of A + D
  std::vector<std::string> warnings;

  std::size_t size() const { return D.n; }
};

// Default random scale: a small fraction of the operator magnitude, scaled by
// the mesh volume so the perturbation stays O(1) as the grid is refined.
double default_sigma(const Grid& grid, const SymBandMatrix& D);

// Draw A for the given kind/seed/scale. Deterministic per seed. Off-diagonal
// entries are strictly negative (in [-sigma, -sigma/10]); block-boundary slots
// of the offset-1 band are exactly zero.
SymBandMatrix sample_A(const ProblemSpec& spec, const Grid& grid, RandomMatrixKind kind,
                       std::uint64_t seed, double sigma);

// Build the full problem: grid, D, A (resampling until the eigenvalues of A+D
// are simple), and the t=0 eigendecomposition.
HomotopyProblem make_homotopy(const ProblemSpec& spec, RandomMatrixKind kind, std::uint64_t seed,
                              std::optional<double> sigma = std::nullopt);

// H(phi,lambda,t): first N rows (1-t)A phi + D phi + t beta phi^3 - lambda phi,
// last row (c - phi'phi)/2.
std::vector<double> eval_H(const HomotopyProblem& p, const State& s);

// Core block of the Jacobian in (phi, lambda): (1-t)A + D + 3 t beta diag(phi^2) - lambda I.
SymBandMatrix jacobian_core(const HomotopyProblem& p, const State& s);

// Bordered Jacobian w.r.t. (phi, lambda): core above, border column -phi,
// border row -phi', corner 0.
BorderedSystem jacobian_x(const HomotopyProblem& p, const State& s);

// dH/dt: first N rows beta phi^3 - A phi, last row 0.
std::vector<double> dH_dt(const HomotopyProblem& p, const State& s);

// Square (N+2) tracing system: rows of jacobian_x, the dH_dt column, and the
// closing row appended last.
BorderedSystem augmented_system(const HomotopyProblem& p, const State& s, const ClosingRow& row);

// t=0 start states for 1-based eigenvalue indices `which` (ascending order of
// A+D). Each is scaled to phi'phi = c, sign-normalized, and polished so that
// ||eval_H|| <= 1e-10.
std::vector<State> initial_states(const HomotopyProblem& p, const std::vector<int>& which);

// Rayleigh-type identity satisfied at exact path points:
// lambda = (phi'((1-t)A + D)phi + t beta phi'phi^3) / c.
double lambda_identity(const HomotopyProblem& p, const State& s);

// A-priori bound on |lambda| along any path.
double lambda_bound(const HomotopyProblem& p);

}  // namespace gpe
