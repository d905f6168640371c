#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "ultrajet/jets.hpp"

namespace ultrajet {

struct Cube {
  Point center{0, 0};
  double side = 0.0;
  unsigned depth = 0;
  std::size_t nearest = 0;   ///< index of x-hat_i in the compact set
  double d_center = 0.0;     ///< d(x_i, E)
  double d_cube = 0.0;       ///< d(Q_i, E)
  double diam(unsigned n) const;
  /// Closed cube scaled about its center.
  bool contains(const Point& x, unsigned n, double scale = 1.0) const;
};

struct DecomposeOptions {
  unsigned depth_cap = 12;
  double max_collar = std::numeric_limits<double>::infinity();  ///< DepthExhausted above this
};

struct Location {
  enum Kind { Cube, Collar, Outside } kind = Outside;
  std::size_t index = 0;
};

struct CubeDecomposition {
  unsigned dim = 1;
  Box box;
  CompactSet set;
  unsigned depth_cap = 0;
  std::vector<Cube> cubes;   ///< accepted, breadth-first creation order
  std::vector<Cube> collar;  ///< unresolved cells at the depth cap
  std::vector<std::vector<std::size_t>> neighbors;         ///< j != i with Q_i* meeting Q_j*
  std::vector<std::vector<std::size_t>> collar_neighbors;  ///< accepted j whose Q_j* meets the cell's expansion
  double collar_radius = 0.0;  ///< sup of d(y, E) over collar cells, bounded by d(Q, E) + diam Q
  double b1 = 1.0, B1 = 1.0;   ///< realized neighbor diameter ratios
  std::size_t max_overlap = 0;

  static constexpr double kExpansion = 9.0 / 8.0;

  Location locate(const Point& x) const;
  /// Accepted cubes i with x in Q_i*, ascending; also valid outside the box.
  std::vector<std::size_t> covering(const Point& x) const;
  double diam(std::size_t i) const { return cubes[i].diam(dim); }

  struct TreeNode {
    std::int32_t child[4] = {-1, -1, -1, -1};
    Location leaf;
  };
  std::vector<TreeNode> tree;
  Point root_lo{0, 0};
  double root_side = 0.0;
};

/// d(Q, E) for the closed cube.
double cube_distance(const Cube& q, const CompactSet& set);

CubeDecomposition decompose(const CompactSet& set, const DecomposeOptions& opt = {});

/// Nearest point of E, ties to the lexicographically smallest coordinates.
Point nearest(const Point& x, const CompactSet& set);

struct CubeDiagnostics {
  std::size_t samples = 0;
  /// Worst lhs/rhs for: d(x)/2 <= d(x_i), d(x_i) <= 3 d(x), diam/3 <= d(x),
  /// d(x) <= 9 diam, |xhat_i - x| <= 2 d(x_i), |xhat_i - xhat| <= 4 d(x_i).
  double worst[6] = {0, 0, 0, 0, 0, 0};
  double worst_cube_ratio_lo = 0.0;  ///< min d(Q,E)/diam
  double worst_cube_ratio_hi = 0.0;  ///< max d(Q,E)/diam
};

/// Throws InvariantViolation naming the cube and point on the first violation.
CubeDiagnostics cube_diagnostics(const CubeDecomposition& dec, std::size_t samples_per_cube,
                                 std::uint64_t seed = 1);

}  // namespace ultrajet
