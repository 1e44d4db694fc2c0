#include "gpe/discretize.hpp"

#include <cmath>

#include "gpe/errors.hpp"

namespace gpe {

void validate(const ProblemSpec& spec) {
  if (spec.dim != 1 && spec.dim != 2) throw ConfigError("dim must be 1 or 2");
  if (spec.n < 1) throw ConfigError("grid.n must be >= 1");
  if (spec.dim == 2 && spec.m < 1) throw ConfigError("grid.m must be >= 1");
  if (!(spec.dom.b > spec.dom.a)) throw ConfigError("domain requires b > a");
  if (spec.dim == 2 && !(spec.dom.d > spec.dom.c)) throw ConfigError("domain requires d > c");
  if (spec.beta < 0) throw ConfigError("beta must be >= 0");
  if (spec.pot.id != "harmonic" && spec.pot.id != "table")
    throw ConfigError("unknown potential '" + spec.pot.id + "'");
  if (spec.pot.id == "table") {
    std::size_t need = spec.dim == 1 ? spec.n : spec.m * spec.n;
    if (spec.pot.table.size() != need)
      throw ConfigError("potential table size does not match the grid");
  }
}

Grid build_grid(const ProblemSpec& spec) {
  validate(spec);
  Grid g;
  g.dim = spec.dim;
  if (spec.dim == 1) {
    g.h = (spec.dom.b - spec.dom.a) / static_cast<double>(spec.n + 1);
    g.x.resize(spec.n);
    for (std::size_t j = 0; j < spec.n; ++j)
      g.x[j] = spec.dom.a + static_cast<double>(j + 1) * g.h;
    g.c = 1.0 / g.h;
  } else {
    g.h1 = (spec.dom.b - spec.dom.a) / static_cast<double>(spec.m + 1);
    g.h2 = (spec.dom.d - spec.dom.c) / static_cast<double>(spec.n + 1);
    g.x.resize(spec.m);
    g.y.resize(spec.n);
    for (std::size_t i = 0; i < spec.m; ++i)
      g.x[i] = spec.dom.a + static_cast<double>(i + 1) * g.h1;
    for (std::size_t j = 0; j < spec.n; ++j)
      g.y[j] = spec.dom.c + static_cast<double>(j + 1) * g.h2;
    g.c = 1.0 / (g.h1 * g.h2);
  }
  return g;
}

double potential_at(const ProblemSpec& spec, const Grid& grid, std::size_t p) {
  if (spec.pot.id == "table") return spec.pot.table[p];
  if (spec.dim == 1) {
    double x = grid.x[p];
    return 0.5 * x * x;
  }
  std::size_t i = p / spec.n, j = p % spec.n;
  double x = grid.x[i], y = grid.y[j];
  return 0.5 * (x * x + y * y);
}

SymBandMatrix build_operator(const ProblemSpec& spec, const Grid& grid) {
  if (spec.dim == 1) {
    const double ih2 = 1.0 / (grid.h * grid.h);
    SymBandMatrix D = SymBandMatrix::zeros(spec.n, {0, 1});
    for (std::size_t j = 0; j < spec.n; ++j) D.bands[0][j] = ih2 + potential_at(spec, grid, j);
    for (std::size_t j = 0; j + 1 < spec.n; ++j) D.bands[1][j] = -0.5 * ih2;
    return D;
  }
  const std::size_t m = spec.m, n = spec.n, N = m * n;
  const double ih1 = 1.0 / (grid.h1 * grid.h1), ih2 = 1.0 / (grid.h2 * grid.h2);
  std::vector<std::size_t> offs = {0};
  if (1 < N) offs.push_back(1);
  if (n < N) offs.push_back(n);
  SymBandMatrix D = SymBandMatrix::zeros(N, offs);
  auto band_of = [&D](std::size_t d) -> std::vector<double>& {
    for (std::size_t k = 0; k < D.offsets.size(); ++k)
      if (D.offsets[k] == d) return D.bands[k];
    throw ConfigError("missing band");
  };
  for (std::size_t p = 0; p < N; ++p) band_of(0)[p] = ih1 + ih2 + potential_at(spec, grid, p);
  if (1 < N) {
    auto& b1 = band_of(1);
    for (std::size_t p = 0; p + 1 < N; ++p)
      if (p % n != n - 1) b1[p] += -0.5 * ih2;  // zero across x-row boundaries
  }
  if (n < N) {
    auto& bn = band_of(n);
    for (std::size_t p = 0; p + n < N; ++p) bn[p] += -0.5 * ih1;
  }
  return D;
}

}  // namespace gpe
