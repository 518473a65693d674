#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "memxbar/crossbar.hpp"
#include "oracles.hpp"

#include <random>

using namespace memxbar;

namespace {

constexpr double uS = 1e-6;

Crossbar<> random_crossbar(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols) {
  std::uniform_real_distribution<double> d(10, 100);
  Crossbar<> x(rows, cols, SwitchingModel<>{});
  GridXd g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = d(gen) * uS;
  x.set_conductances(g);
  return x;
}

VectorXd random_inputs(std::mt19937_64& gen, Eigen::Index rows) {
  std::uniform_int_distribution<int> bit(0, 1);
  VectorXd v(rows);
  for (Eigen::Index i = 0; i < rows; ++i) v(i) = bit(gen) ? 0.1 : -0.1;
  return v;
}

double max_rel_error(const VectorXd& got, const VectorXd& want) {
  const double scale = want.cwiseAbs().maxCoeff();
  return (got - want).cwiseAbs().maxCoeff() / scale;
}

const ReadScheme<> kNodal{ReadMode::kNodal, 0.1};

}  // namespace

TEST_CASE("4x4 nodal read matches the dense MNA oracle") {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_crossbar(gen, 4, 4);
    const VectorXd v = random_inputs(gen, 4);
    const VectorXd want =
        oracle::mna_column_currents(x.conductances(), v, x.r_row_segment(), x.r_col_segment());
    CHECK(max_rel_error(read_column_currents(x, v, kNodal), want) <= 1e-9);
  }
}

TEST_CASE("property: nodal read matches the oracle up to 12x12") {
  std::mt19937_64 gen(12);
  std::uniform_int_distribution<int> dim(1, 12);
  for (int trial = 0; trial < 150; ++trial) {
    const auto x = random_crossbar(gen, dim(gen), dim(gen));
    const VectorXd v = random_inputs(gen, x.rows());
    if (x.rows() == 1 || x.cols() == 1) {
      // Oracle needs segments on both wires; degenerate shapes are covered below.
      continue;
    }
    const VectorXd want =
        oracle::mna_column_currents(x.conductances(), v, x.r_row_segment(), x.r_col_segment());
    REQUIRE(max_rel_error(read_column_currents(x, v, kNodal), want) <= 1e-9);
  }
}

TEST_CASE("zero wire resistance reduces to the ideal read") {
  std::mt19937_64 gen(0);
  for (int trial = 0; trial < 50; ++trial) {
    auto x = random_crossbar(gen, 10, 6);
    x.set_segment_resistances(0.0, 0.0);
    const VectorXd v = random_inputs(gen, 10);
    const VectorXd ideal = read_column_currents(x, v);
    const VectorXd nodal = read_column_currents(x, v, kNodal);
    REQUIRE(max_rel_error(nodal, ideal) <= 1e-12);
  }
}

TEST_CASE("one-wire resistance only") {
  // With only row-wire resistance, a single-column array is a ladder that
  // can be checked by hand: two rows, one column.
  Crossbar<> x(2, 1, SwitchingModel<>{}, 0.0, 0.0);
  x.set_conductances((GridXd(2, 1) << 50 * uS, 20 * uS).finished());
  const VectorXd v = (VectorXd(2) << 0.1, -0.1).finished();
  // Column wire of 1 kohm between row 0 and the ground at row 1.
  x.set_segment_resistances(0.0, 1000.0);
  const double g0 = 50e-6, gw = 1e-3;
  const double node = g0 * 0.1 / (g0 + gw);  // column node at row 0
  const double expected = 20e-6 * -0.1 + gw * node;
  CHECK(read_column_currents(x, v, kNodal)(0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("property: wire drops never increase same-sign column currents") {
  std::mt19937_64 gen(21);
  std::uniform_int_distribution<int> dim(2, 12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_crossbar(gen, dim(gen), dim(gen));
    for (double sign : {1.0, -1.0}) {
      const VectorXd v = VectorXd::Constant(x.rows(), sign * 0.1);
      const VectorXd ideal = read_column_currents(x, v);
      const VectorXd nodal = read_column_currents(x, v, kNodal);
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        REQUIRE(std::abs(nodal(j)) <= std::abs(ideal(j)));
        REQUIRE(nodal(j) * sign > 0);
      }
    }
  }
}
