#include "gpe/band_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "gpe/errors.hpp"

namespace gpe {

SymBandMatrix SymBandMatrix::zeros(std::size_t n, std::vector<std::size_t> offsets) {
  SymBandMatrix m;
  m.n = n;
  std::sort(offsets.begin(), offsets.end());
  offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
  for (std::size_t d : offsets) {
    if (d >= n) throw ConfigError("band offset exceeds matrix size");
    m.offsets.push_back(d);
    m.bands.emplace_back(n - d, 0.0);
  }
  return m;
}

double SymBandMatrix::get(std::size_t i, std::size_t j) const {
  std::size_t lo = std::min(i, j), hi = std::max(i, j);
  std::size_t d = hi - lo;
  for (std::size_t k = 0; k < offsets.size(); ++k)
    if (offsets[k] == d) return bands[k][lo];
  return 0.0;
}

std::vector<double> SymBandMatrix::dense() const {
  std::vector<double> a(n * n, 0.0);
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    std::size_t d = offsets[k];
    for (std::size_t i = 0; i + d < n; ++i) {
      a[i * n + (i + d)] = bands[k][i];
      a[(i + d) * n + i] = bands[k][i];
    }
  }
  return a;
}

double SymBandMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& b : bands)
    for (double v : b) m = std::max(m, std::abs(v));
  return m;
}

SymBandMatrix add_scaled(double a, const SymBandMatrix& X, double b, const SymBandMatrix& Y) {
  if (X.n != Y.n) throw ConfigError("add_scaled: size mismatch");
  std::vector<std::size_t> offs = X.offsets;
  offs.insert(offs.end(), Y.offsets.begin(), Y.offsets.end());
  SymBandMatrix r = SymBandMatrix::zeros(X.n, offs);
  for (std::size_t k = 0; k < r.offsets.size(); ++k) {
    std::size_t d = r.offsets[k];
    for (std::size_t kx = 0; kx < X.offsets.size(); ++kx)
      if (X.offsets[kx] == d)
        for (std::size_t i = 0; i < X.bands[kx].size(); ++i) r.bands[k][i] += a * X.bands[kx][i];
    for (std::size_t ky = 0; ky < Y.offsets.size(); ++ky)
      if (Y.offsets[ky] == d)
        for (std::size_t i = 0; i < Y.bands[ky].size(); ++i) r.bands[k][i] += b * Y.bands[ky][i];
  }
  return r;
}

}  // namespace gpe
