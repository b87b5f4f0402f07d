#pragma once

#include "patchide/errors.hpp"
#include "patchide/landscape.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <memory>
#include <vector>

namespace patchide {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Panel {
  double lower;
  double upper;
  std::size_t patch;
};

/// Composite Gauss-Legendre grid whose panel boundaries include every
/// interface, so no panel straddles a kernel discontinuity and no node sits
/// on a panel endpoint.
struct Grid {
  PatchPartition partition;
  Vector nodes;
  Vector weights;
  std::vector<Panel> panels;
  std::vector<std::size_t> panel_of_node;
  std::vector<std::size_t> patch_of_node;
  int panels_per_patch = 0;
  int gauss_order = 0;

  Eigen::Index size() const { return nodes.size(); }
};

/// Throws InvalidResolution unless panels_per_patch >= 1 and 1 <= gauss_order <= 16.
Grid build_grid(const PatchPartition& partition, int panels_per_patch, int gauss_order);

/// y = K u with every row reduced left to right in index order, so results do
/// not depend on vectorization or threading.
template <typename Derived>
Vector fixed_order_matvec(const RowMatrix& matrix, const Eigen::MatrixBase<Derived>& u) {
  if (u.size() != matrix.cols()) {
    throw DimensionMismatch("operand length does not match operator size");
  }
  const Vector v = u;
  Vector y(matrix.rows());
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    const double* row = matrix.data() + i * matrix.cols();
    double s = 0;
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) s += row[j] * v(j);
    y(i) = s;
  }
  return y;
}

/// Nystrom matrix K(i, j) = k(x_i, y_j) w_j on a Grid. Immutable once built.
class DiscreteOperator {
 public:
  DiscreteOperator(std::shared_ptr<const KernelSpec> kernel, Grid grid, RowMatrix matrix)
      : kernel_(std::move(kernel)), grid_(std::move(grid)), matrix_(std::move(matrix)) {}

  const KernelSpec& kernel() const { return *kernel_; }
  const Grid& grid() const { return grid_; }
  const RowMatrix& matrix() const { return matrix_; }
  Eigen::Index size() const { return matrix_.rows(); }

 private:
  std::shared_ptr<const KernelSpec> kernel_;
  Grid grid_;
  RowMatrix matrix_;
};

DiscreteOperator assemble_operator(const KernelSpec& spec, const Grid& grid);

/// Quadrature value of the integral of k(x, .) over the domain, summed in
/// node order (bitwise equal to the matching row sum of the assembled matrix).
double kernel_mass(const KernelSpec& spec, double x, const Grid& grid);

/// T(u) = K F(u). Negative entries are not clamped; F is zero there.
template <typename Derived>
Vector apply_T(const DiscreteOperator& op, const GrowthFunction& g,
               const Eigen::MatrixBase<Derived>& u) {
  if (u.size() != op.size()) throw DimensionMismatch("apply_T: operand length mismatch");
  Vector fu(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) fu(i) = g(u(i));
  return fixed_order_matvec(op.matrix(), fu);
}

/// T0(u) = r0 K u.
template <typename Derived>
Vector apply_T0(const DiscreteOperator& op, double r0, const Eigen::MatrixBase<Derived>& u) {
  if (u.size() != op.size()) throw DimensionMismatch("apply_T0: operand length mismatch");
  return r0 * fixed_order_matvec(op.matrix(), u);
}

/// Quadrature integral of a node-value vector.
template <typename Derived>
double integrate(const Grid& grid, const Eigen::MatrixBase<Derived>& u) {
  double s = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i) s += grid.weights(i) * u(i);
  return s;
}

/// Quadrature-weighted 2-norm.
template <typename Derived>
double weighted_l2_norm(const Grid& grid, const Eigen::MatrixBase<Derived>& u) {
  double s = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i) s += grid.weights(i) * u(i) * u(i);
  return std::sqrt(s);
}

}  // namespace patchide
