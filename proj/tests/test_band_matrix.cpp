#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cstring>
#include <random>
#include <vector>

#include "gpe/band_matrix.hpp"
#include "gpe/kernels.hpp"

using namespace gpe;

namespace {

SymBandMatrix random_band(std::size_t n, std::vector<std::size_t> offsets, unsigned seed) {
  SymBandMatrix M = SymBandMatrix::zeros(n, std::move(offsets));
  std::mt19937 eng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& band : M.bands)
    for (double& v : band) v = u(eng);
  return M;
}

Eigen::MatrixXd densify(const SymBandMatrix& M) {
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(M.n, M.n);
  for (std::size_t i = 0; i < M.n; ++i)
    for (std::size_t j = 0; j < M.n; ++j) E(i, j) = M.get(i, j);
  return E;
}

}  // namespace

TEST_CASE("zeros/get/symmetry") {
  SymBandMatrix M = SymBandMatrix::zeros(4, {0, 1});
  CHECK(M.n == 4);
  CHECK(M.bands[0].size() == 4);
  CHECK(M.bands[1].size() == 3);
  M.bands[1][2] = -7.0;
  CHECK(M.get(2, 3) == -7.0);
  CHECK(M.get(3, 2) == -7.0);  // stored once, read symmetrically
  CHECK(M.get(0, 3) == 0.0);
  CHECK(M.bandwidth() == 1);
  CHECK(M.max_abs() == 7.0);
}

TEST_CASE("dense export matches get") {
  SymBandMatrix M = random_band(6, {0, 2}, 11);
  std::vector<double> d = M.dense();
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(d[i * 6 + j] == M.get(i, j));
}

TEST_CASE("add_scaled merges offsets") {
  SymBandMatrix X = random_band(7, {0, 1}, 1);
  SymBandMatrix Y = random_band(7, {0, 3}, 2);
  SymBandMatrix Z = add_scaled(2.5, X, -1.5, Y);
  Eigen::MatrixXd E = 2.5 * densify(X) - 1.5 * densify(Y);
  Eigen::MatrixXd D = densify(Z);
  CHECK((D - E).cwiseAbs().maxCoeff() <= 1e-15 * E.cwiseAbs().maxCoeff());
  CHECK(Z.offsets == std::vector<std::size_t>{0, 1, 3});
}

TEST_CASE("matvec on the identity returns the input") {
  SymBandMatrix I = SymBandMatrix::zeros(5, {0});
  for (double& v : I.bands[0]) v = 1.0;
  std::vector<double> v = {1, -2, 3, -4, 5}, y(5);
  kernels::matvec(I, v.data(), y.data());
  CHECK(y == v);
}

TEST_CASE("matvec row sums of the n=3 operator") {
  // diag (1.5, 1.0, 1.5), off-diagonals -0.5: row sums (1, 0, 1)
  SymBandMatrix D = SymBandMatrix::zeros(3, {0, 1});
  D.bands[0] = {1.5, 1.0, 1.5};
  D.bands[1] = {-0.5, -0.5};
  std::vector<double> v = {1, 1, 1}, y(3);
  kernels::matvec(D, v.data(), y.data());
  CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(y[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(y[2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("matvec agrees with a dense product") {
  SymBandMatrix M = random_band(40, {0, 1, 6}, 3);
  Eigen::MatrixXd E = densify(M);
  std::mt19937 eng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(40);
  for (int i = 0; i < 40; ++i) v[i] = u(eng);
  std::vector<double> y(40);
  kernels::matvec(M, v.data(), y.data());
  Eigen::VectorXd ref = E * v;
  for (int i = 0; i < 40; ++i) CHECK(y[i] == doctest::Approx(ref[i]).epsilon(1e-14));
}

TEST_CASE("serial and parallel matvec are bit-identical") {
  SymBandMatrix M = random_band(513, {0, 1, 16}, 5);
  std::vector<double> v(513), ys(513), yp(513);
  std::mt19937 eng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& x : v) x = u(eng);
  kernels::matvec_serial(M, v.data(), ys.data());
  kernels::matvec_parallel(M, v.data(), yp.data());
  CHECK(std::memcmp(ys.data(), yp.data(), ys.size() * sizeof(double)) == 0);
}

TEST_CASE("combined_rows equals the assembled formula") {
  SymBandMatrix A = random_band(25, {0, 1}, 7);
  SymBandMatrix D = random_band(25, {0, 1, 5}, 8);
  std::vector<double> x(25), r(25);
  std::mt19937 eng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : x) v = u(eng);
  const double wa = 0.37, cube = 2.25, shift = -1.75;
  kernels::combined_rows(A, wa, D, cube, shift, x.data(), r.data());
  Eigen::Map<Eigen::VectorXd> xv(x.data(), 25);
  Eigen::VectorXd ref = wa * densify(A) * xv + densify(D) * xv +
                        cube * xv.array().cube().matrix() + shift * xv;
  for (int i = 0; i < 25; ++i) CHECK(r[i] == doctest::Approx(ref[i]).epsilon(1e-14));

  // w_a = 0 must skip A entirely (A may even be dimension-incompatible garbage)
  kernels::combined_rows(A, 0.0, D, cube, shift, x.data(), r.data());
  ref = densify(D) * xv + cube * xv.array().cube().matrix() + shift * xv;
  for (int i = 0; i < 25; ++i) CHECK(r[i] == doctest::Approx(ref[i]).epsilon(1e-14));
}

TEST_CASE("extended-precision row sums survive large cancellation") {
  // diag 1/h^2 with off-diagonal -1/(2h^2) against a linear vector: rows cancel
  // to zero exactly; the accumulated error must stay near the 80-bit level.
  const std::size_t n = 1001;
  const double h2 = 1.0e-6;
  SymBandMatrix D = SymBandMatrix::zeros(n, {0, 1});
  for (double& v : D.bands[0]) v = 1.0 / h2;
  for (double& v : D.bands[1]) v = -0.5 / h2;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = double(i + 1);
  kernels::matvec(D, x.data(), y.data());
  // interior rows: (-0.5*(i) + (i+1) - 0.5*(i+2))/h2 = 0
  for (std::size_t i = 1; i + 1 < n; ++i) CHECK(std::abs(y[i]) <= 1e-9);
}

TEST_CASE("norms and dot") {
  std::vector<double> a = {3, 4, 0}, b = {1, 1, 10};
  CHECK(kernels::norm2(a.data(), 3) == doctest::Approx(5.0));
  CHECK(kernels::norm_inf(b.data(), 3) == 10.0);
  CHECK(double(kernels::dot_ld(a.data(), b.data(), 3)) == doctest::Approx(7.0));
}
