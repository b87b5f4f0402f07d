#include "patchide/discretize.hpp"

#include "patchide/quadrature.hpp"

#include <fmt/format.h>

namespace patchide {

Grid build_grid(const PatchPartition& partition, int panels_per_patch, int gauss_order) {
  if (panels_per_patch < 1) {
    throw InvalidResolution(fmt::format("panels_per_patch must be >= 1, got {}", panels_per_patch));
  }
  if (gauss_order < 1 || gauss_order > 16) {
    throw InvalidResolution(fmt::format("gauss_order must be in 1..16, got {}", gauss_order));
  }
  const auto rule = gauss_legendre<double>(gauss_order);
  const std::size_t patches = partition.patch_count();
  const auto n_panels = patches * static_cast<std::size_t>(panels_per_patch);
  const auto n_nodes = static_cast<Eigen::Index>(n_panels) * gauss_order;

  Grid grid{partition, Vector(n_nodes), Vector(n_nodes), {}, {}, {}, panels_per_patch, gauss_order};
  grid.panels.reserve(n_panels);
  grid.panel_of_node.reserve(static_cast<std::size_t>(n_nodes));
  grid.patch_of_node.reserve(static_cast<std::size_t>(n_nodes));

  Eigen::Index node = 0;
  for (std::size_t p = 0; p < patches; ++p) {
    const double lo = partition.patch_lower(p);
    const double hi = partition.patch_upper(p);
    const double h = (hi - lo) / panels_per_patch;
    for (int q = 0; q < panels_per_patch; ++q) {
      const double a = q == 0 ? lo : lo + q * h;
      const double b = q + 1 == panels_per_patch ? hi : lo + (q + 1) * h;
      const double mid = 0.5 * (a + b);
      const double half = 0.5 * (b - a);
      const std::size_t panel = grid.panels.size();
      grid.panels.push_back({a, b, p});
      for (int k = 0; k < gauss_order; ++k, ++node) {
        grid.nodes(node) = mid + half * rule.nodes(k);
        grid.weights(node) = half * rule.weights(k);
        grid.panel_of_node.push_back(panel);
        grid.patch_of_node.push_back(p);
      }
    }
  }
  return grid;
}

DiscreteOperator assemble_operator(const KernelSpec& spec, const Grid& grid) {
  if (!(spec.partition() == grid.partition)) {
    throw InvalidResolution("grid was built for a different partition than the kernel");
  }
  const Eigen::Index n = grid.size();
  RowMatrix matrix(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = grid.nodes(i);
    const std::size_t pi = grid.patch_of_node[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& piece = spec.piece(pi, grid.patch_of_node[static_cast<std::size_t>(j)]);
      matrix(i, j) = piece(x, grid.nodes(j)) * grid.weights(j);
    }
  }
  return DiscreteOperator(std::make_shared<const KernelSpec>(spec), grid, std::move(matrix));
}

double kernel_mass(const KernelSpec& spec, double x, const Grid& grid) {
  double s = 0;
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    s += eval_kernel(spec, x, grid.nodes(j)) * grid.weights(j);
  }
  return s;
}

}  // namespace patchide
