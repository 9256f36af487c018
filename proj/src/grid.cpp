#include "parec/grid.hpp"

#include <stdexcept>
#include <string>

namespace parec {

SpatialGrid make_grid(double half_width, int nodes_per_axis) {
  if (nodes_per_axis < 3) {
    throw std::invalid_argument("make_grid: need at least 3 nodes per axis, got " +
                                std::to_string(nodes_per_axis));
  }
  if (!(half_width > 0.0)) {
    throw std::invalid_argument("make_grid: half width must be positive");
  }
  SpatialGrid grid;
  grid.half_width = half_width;
  grid.nodes_per_axis = nodes_per_axis;
  grid.step = 2.0 * half_width / (nodes_per_axis - 1);
  grid.coords = Eigen::VectorXd::LinSpaced(nodes_per_axis, -half_width, half_width);
  // LinSpaced pins both endpoints, so x_1 = -R and x_{N_x} = R exactly.
  return grid;
}

namespace {

void check_triple(int i, int j, int m, int nodes_per_axis, int n_modes) {
  if (i < 1 || i > nodes_per_axis || j < 1 || j > nodes_per_axis || m < 1 || m > n_modes) {
    throw std::out_of_range("lineup: index triple (" + std::to_string(i) + ", " +
                            std::to_string(j) + ", " + std::to_string(m) +
                            ") outside {1.." + std::to_string(nodes_per_axis) + "}^2 x {1.." +
                            std::to_string(n_modes) + "}");
  }
}

}  // namespace

int lineup(int i, int j, int m, int nodes_per_axis, int n_modes) {
  check_triple(i, j, m, nodes_per_axis, n_modes);
  return (i - 1) * nodes_per_axis * n_modes + (j - 1) * n_modes + m;
}

NodeMode inverse_lineup(int flat, int nodes_per_axis, int n_modes) {
  const int total = nodes_per_axis * nodes_per_axis * n_modes;
  if (flat < 1 || flat > total) {
    throw std::out_of_range("inverse_lineup: flat index " + std::to_string(flat) +
                            " outside {1.." + std::to_string(total) + "}");
  }
  const int zero_based = flat - 1;
  NodeMode t;
  t.i = zero_based / (nodes_per_axis * n_modes) + 1;
  t.j = (zero_based / n_modes) % nodes_per_axis + 1;
  t.m = zero_based % n_modes + 1;
  return t;
}

const char* edge_name(Edge e) {
  switch (e) {
    case Edge::West: return "west";
    case Edge::East: return "east";
    case Edge::South: return "south";
    case Edge::North: return "north";
  }
  return "?";
}

Edge classify_edge(const SpatialGrid& grid, int i, int j) {
  if (grid.interior(i, j)) {
    throw std::invalid_argument("classify_edge: (" + std::to_string(i) + ", " +
                                std::to_string(j) + ") is an interior node");
  }
  if (i == 1) return Edge::West;
  if (i == grid.nodes_per_axis) return Edge::East;
  if (j == 1) return Edge::South;
  return Edge::North;
}

std::vector<BoundaryNode> boundary_nodes(const SpatialGrid& grid) {
  std::vector<BoundaryNode> nodes;
  nodes.reserve(grid.boundary_count());
  for (int i = 1; i <= grid.nodes_per_axis; ++i) {
    for (int j = 1; j <= grid.nodes_per_axis; ++j) {
      if (grid.boundary(i, j)) {
        nodes.push_back({i, j, classify_edge(grid, i, j)});
      }
    }
  }
  return nodes;
}

}  // namespace parec
