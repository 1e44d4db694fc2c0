#pragma once
#include <cstddef>
#include <vector>

namespace gpe {

// Symmetric banded matrix; only the upper diagonals are stored.
// offsets are ascending and unique, offset-k array has length n-k.
struct SymBandMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> offsets;
  std::vector<std::vector<double>> bands;

  static SymBandMatrix zeros(std::size_t n, std::vector<std::size_t> offsets);

  std::size_t bandwidth() const { return offsets.empty() ? 0 : offsets.back(); }
  double get(std::size_t i, std::size_t j) const;
  std::vector<double> dense() const;  // row-major n*n; small-n diagnostics only
  double max_abs() const;
};

// a*X + b*Y with merged offsets
SymBandMatrix add_scaled(double a, const SymBandMatrix& X, double b, const SymBandMatrix& Y);

}  // namespace gpe
