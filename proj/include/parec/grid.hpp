#pragma once

#include <vector>

#include <Eigen/Core>

namespace parec {

/// Uniform node set on the closed square [-R, R]^2.
///
/// Node indices are 1-based in the public interface: x_i = -R + (i-1)*h with
/// h = 2R/(N_x - 1), so x_1 = -R and x_{N_x} = R exactly.
struct SpatialGrid {
  double half_width = 0.0;  // R
  int nodes_per_axis = 0;   // N_x
  double step = 0.0;        // h
  Eigen::VectorXd coords;   // coords[i-1] = -R + (i-1)*h, shared by both axes

  double x(int i) const { return coords[i - 1]; }
  double y(int j) const { return coords[j - 1]; }

  bool interior(int i, int j) const {
    return i >= 2 && i <= nodes_per_axis - 1 && j >= 2 && j <= nodes_per_axis - 1;
  }
  bool boundary(int i, int j) const { return !interior(i, j); }

  int node_count() const { return nodes_per_axis * nodes_per_axis; }
  int interior_count() const {
    const int n = nodes_per_axis - 2;
    return n * n;
  }
  int boundary_count() const { return 4 * (nodes_per_axis - 1); }
};

/// Requires N_x >= 3 (at least one interior node) and R > 0.
SpatialGrid make_grid(double half_width, int nodes_per_axis);

/// 1-based flat index over (i, j, m) triples: (i-1)*N_x*N + (j-1)*N + m.
/// Bijection between {1..N_x}^2 x {1..N} and {1..N_x^2*N}.
int lineup(int i, int j, int m, int nodes_per_axis, int n_modes);

struct NodeMode {
  int i = 0;
  int j = 0;
  int m = 0;
};

/// Inverse of lineup; rejects flat indices outside {1..N_x^2*N}.
NodeMode inverse_lineup(int flat, int nodes_per_axis, int n_modes);

/// Outward-normal direction of a boundary node. The x-direction takes
/// precedence at the four corners, so every boundary node has exactly one edge.
enum class Edge { West, East, South, North };

const char* edge_name(Edge e);

struct BoundaryNode {
  int i = 0;
  int j = 0;
  Edge edge = Edge::West;
};

/// Classify a boundary node; rejects interior nodes.
Edge classify_edge(const SpatialGrid& grid, int i, int j);

/// All 4(N_x - 1) boundary nodes in row-major (i, then j) order. This
/// enumeration fixes the column order of Cauchy records and the row order of
/// the boundary blocks in the assembled system.
std::vector<BoundaryNode> boundary_nodes(const SpatialGrid& grid);

}  // namespace parec
