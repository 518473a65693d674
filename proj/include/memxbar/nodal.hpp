#pragma once

#include "memxbar/types.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <stdexcept>
#include <vector>

namespace memxbar {

/// Column currents of a resistive crossbar with finite wire resistance.
///
/// Row wire i is driven by an ideal source `row_voltages(i)` at its column-0
/// end; column wire j is held at virtual ground at its last-row end. Adjacent
/// crosspoints on a row (column) wire are joined by `r_row_segment`
/// (`r_col_segment`) ohms; a zero segment resistance collapses the wire into a
/// single equipotential node. Returns the current sunk by each virtual ground.
template <typename Scalar>
Vector<Scalar> nodal_column_currents(const Grid<Scalar>& g, const Vector<Scalar>& row_voltages,
                                     Scalar r_row_segment, Scalar r_col_segment) {
  const Eigen::Index rows = g.rows();
  const Eigen::Index cols = g.cols();
  if (row_voltages.size() != rows) {
    throw std::invalid_argument("nodal_column_currents: voltage vector length != rows");
  }
  if (r_row_segment < 0 || r_col_segment < 0) {
    throw std::invalid_argument("nodal_column_currents: negative wire resistance");
  }
  const bool row_wires = r_row_segment > 0 && cols > 1;
  const bool col_wires = r_col_segment > 0 && rows > 1;

  // Unknown index of each row-wire and column-wire node, -1 when fixed.
  Eigen::MatrixXi row_id = Eigen::MatrixXi::Constant(rows, cols, -1);
  Eigen::MatrixXi col_id = Eigen::MatrixXi::Constant(rows, cols, -1);
  int n = 0;
  if (row_wires) {
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 1; j < cols; ++j) row_id(i, j) = n++;
  }
  if (col_wires) {
    for (Eigen::Index i = 0; i + 1 < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) col_id(i, j) = n++;
  }

  Grid<Scalar> v_row(rows, cols);
  Grid<Scalar> v_col = Grid<Scalar>::Zero(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) v_row.row(i).setConstant(row_voltages(i));

  if (n > 0) {
    std::vector<Eigen::Triplet<Scalar>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * 5);
    Vector<Scalar> rhs = Vector<Scalar>::Zero(n);

    // Stamps conductance `c` between two nodes; a = -1 / b = -1 mark fixed
    // nodes whose potentials are va / vb.
    auto stamp = [&](int a, Scalar va, int b, Scalar vb, Scalar c) {
      if (a >= 0) {
        triplets.emplace_back(a, a, c);
        if (b >= 0) triplets.emplace_back(a, b, -c);
        else rhs(a) += c * vb;
      }
      if (b >= 0) {
        triplets.emplace_back(b, b, c);
        if (a >= 0) triplets.emplace_back(b, a, -c);
        else rhs(b) += c * va;
      }
    };

    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        stamp(row_id(i, j), v_row(i, j), col_id(i, j), Scalar(0), g(i, j));
      }
    }
    if (row_wires) {
      const Scalar gw = Scalar(1) / r_row_segment;
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j + 1 < cols; ++j)
          stamp(row_id(i, j), v_row(i, j), row_id(i, j + 1), v_row(i, j + 1), gw);
    }
    if (col_wires) {
      const Scalar gw = Scalar(1) / r_col_segment;
      for (Eigen::Index i = 0; i + 1 < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
          stamp(col_id(i, j), Scalar(0), col_id(i + 1, j), Scalar(0), gw);
    }

    Eigen::SparseMatrix<Scalar> a(n, n);
    a.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SparseLU<Eigen::SparseMatrix<Scalar>> solver;
    solver.compute(a);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("nodal_column_currents: singular network");
    }
    const Vector<Scalar> x = solver.solve(rhs);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("nodal_column_currents: solve failed");
    }
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        if (row_id(i, j) >= 0) v_row(i, j) = x(row_id(i, j));
        if (col_id(i, j) >= 0) v_col(i, j) = x(col_id(i, j));
      }
    }
  }

  Vector<Scalar> currents(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (col_wires) {
      const Eigen::Index last = rows - 1;
      currents(j) = g(last, j) * v_row(last, j) + v_col(last - 1, j) / r_col_segment;
    } else {
      currents(j) = g.col(j).dot(v_row.col(j));
    }
  }
  return currents;
}

}  // namespace memxbar
