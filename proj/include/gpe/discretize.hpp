#pragma once
#include <cstddef>
#include <string>
#include <vector>

#include "gpe/band_matrix.hpp"

namespace gpe {

struct Domain {
  double a = -2, b = 2;  // x range
  double c = 0, d = 0;   // y range (2D)
};

struct Potential {
  std::string id = "harmonic";  // "harmonic" or "table"
  std::vector<double> table;    // interior-node values, row-major, when id=="table"
  std::string source = "harmonic";  // config spelling, kept for round-trips
};

struct ProblemSpec {
  int dim = 1;
  Domain dom;
  std::size_t m = 0;  // interior points along x (2D only)
  std::size_t n = 0;  // interior points (1D) / along y (2D)
  double beta = 0;
  Potential pot;
};

struct Grid {
  int dim = 1;
  double h = 0;            // 1D mesh
  double h1 = 0, h2 = 0;   // 2D mesh (x, y)
  std::vector<double> x, y;  // interior coordinates
  double c = 0;            // normalization constant: phi^T phi = c
  std::size_t size() const { return dim == 1 ? x.size() : x.size() * y.size(); }
};

void validate(const ProblemSpec& spec);  // throws ConfigError

Grid build_grid(const ProblemSpec& spec);

// potential value at row-major interior node p; index (i,j) -> p = (i-1)*n + (j-1)
double potential_at(const ProblemSpec& spec, const Grid& grid, std::size_t p);

// 1D: tridiagonal, diag 1/h^2 + V, off-diag -1/(2h^2).
// 2D: offsets {0,1,n}; diag 1/h1^2 + 1/h2^2 + V; offset-1 equals -1/(2h2^2) except
//     zero where the node is the last of its x-row; offset-n equals -1/(2h1^2).
SymBandMatrix build_operator(const ProblemSpec& spec, const Grid& grid);

}  // namespace gpe
