#include "ultrajet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>

#include "ultrajet/error.hpp"

namespace ultrajet {

double Cube::diam(unsigned n) const { return side * std::sqrt(static_cast<double>(n)); }

bool Cube::contains(const Point& x, unsigned n, double scale) const {
  const double h = 0.5 * side * scale;
  for (unsigned i = 0; i < n; ++i)
    if (x[i] < center[i] - h || x[i] > center[i] + h) return false;
  return true;
}

namespace {

double cube_distance_sq(const Point& c, double side, const CompactSet& set) {
  const double h = 0.5 * side;
  double best = INFINITY;
  for (const auto& p : set.points) {
    double s = 0.0;
    for (unsigned i = 0; i < set.dim; ++i) {
      const double g = std::max(0.0, std::abs(p[i] - c[i]) - h);
      s += g * g;
    }
    best = std::min(best, s);
  }
  return best;
}

// Closed expanded cubes meet iff every coordinate gap is within the half-side sum.
bool expanded_meet(const Cube& a, const Cube& b, unsigned n, double sa, double sb) {
  const double r = 0.5 * (a.side * sa + b.side * sb);
  for (unsigned i = 0; i < n; ++i)
    if (std::abs(a.center[i] - b.center[i]) > r) return false;
  return true;
}

Cube make_cube(const Point& c, double side, unsigned depth, const CompactSet& set) {
  Cube q;
  q.center = c;
  q.side = side;
  q.depth = depth;
  q.nearest = set.nearest(c);
  q.d_center = distance(c, set.points[q.nearest], set.dim);
  q.d_cube = std::sqrt(cube_distance_sq(c, side, set));
  return q;
}

// Sweep on the first coordinate; pairs (i, j) of `a` x `b` whose expansions meet.
template <class F>
void sweep_pairs(const std::vector<Cube>& a, const std::vector<Cube>& b, unsigned n, double sa, double sb,
                 F&& emit) {
  std::vector<std::size_t> ob(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) ob[j] = j;
  auto lo_b = [&](std::size_t j) { return b[j].center[0] - 0.5 * b[j].side * sb; };
  std::sort(ob.begin(), ob.end(), [&](std::size_t x, std::size_t y) { return lo_b(x) < lo_b(y); });
  std::vector<double> los(ob.size());
  for (std::size_t k = 0; k < ob.size(); ++k) los[k] = lo_b(ob[k]);
  double max_half_b = 0.0;
  for (const auto& q : b) max_half_b = std::max(max_half_b, 0.5 * q.side * sb);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double hi = a[i].center[0] + 0.5 * a[i].side * sa;
    const double lo = a[i].center[0] - 0.5 * a[i].side * sa - 2.0 * max_half_b;
    auto k = static_cast<std::size_t>(std::lower_bound(los.begin(), los.end(), lo) - los.begin());
    for (; k < ob.size() && los[k] <= hi; ++k)
      if (expanded_meet(a[i], b[ob[k]], n, sa, sb)) emit(i, ob[k]);
  }
}

}  // namespace

double cube_distance(const Cube& q, const CompactSet& set) {
  return std::sqrt(cube_distance_sq(q.center, q.side, set));
}

Point nearest(const Point& x, const CompactSet& set) { return set.points[set.nearest(x)]; }

CubeDecomposition decompose(const CompactSet& set, const DecomposeOptions& opt) {
  if (opt.depth_cap < 1) throw Error(ErrorKind::InvariantViolation, "depth cap must be at least 1");
  const unsigned n = set.dim;
  const double side = set.box.hi[0] - set.box.lo[0];
  if (!(side > 0)) throw Error(ErrorKind::IncompatibleGeometry, "empty bounding box");
  if (n == 2 && set.box.hi[1] - set.box.lo[1] != side)
    throw Error(ErrorKind::IncompatibleGeometry, "bounding box must be a cube");

  CubeDecomposition dec;
  dec.dim = n;
  dec.box = set.box;
  dec.set = set;
  dec.depth_cap = opt.depth_cap;
  dec.root_lo = set.box.lo;
  dec.root_side = side;

  struct Pending {
    Point center;
    double side;
    unsigned depth;
    std::size_t node;
  };
  std::deque<Pending> queue;
  Point c0 = set.box.lo;
  for (unsigned i = 0; i < n; ++i) c0[i] += 0.5 * side;
  dec.tree.emplace_back();
  queue.push_back({c0, side, 0, 0});
  const unsigned nchild = n == 1 ? 2u : 4u;

  while (!queue.empty()) {
    const Pending p = queue.front();
    queue.pop_front();
    const double d2 = cube_distance_sq(p.center, p.side, set);
    const double diam2 = p.side * p.side * n;
    if (d2 >= diam2) {
      dec.tree[p.node].leaf = {Location::Cube, dec.cubes.size()};
      dec.cubes.push_back(make_cube(p.center, p.side, p.depth, set));
      continue;
    }
    if (p.depth >= opt.depth_cap) {
      dec.tree[p.node].leaf = {Location::Collar, dec.collar.size()};
      dec.collar.push_back(make_cube(p.center, p.side, p.depth, set));
      continue;
    }
    const double h = 0.5 * p.side;
    for (unsigned c = 0; c < nchild; ++c) {
      Point cc = p.center;
      cc[0] += (c & 1u) ? 0.5 * h : -0.5 * h;
      if (n == 2) cc[1] += (c & 2u) ? 0.5 * h : -0.5 * h;
      const auto idx = static_cast<std::int32_t>(dec.tree.size());
      dec.tree[p.node].child[c] = idx;
      dec.tree.emplace_back();
      queue.push_back({cc, h, p.depth + 1, static_cast<std::size_t>(idx)});
    }
  }

  for (const auto& q : dec.cubes)
    if (q.d_cube > 4.0 * q.diam(n) * (1 + 1e-12))
      throw Error(ErrorKind::InvariantViolation, "accepted cube too far from the set");

  const double s = CubeDecomposition::kExpansion;
  dec.neighbors.assign(dec.cubes.size(), {});
  sweep_pairs(dec.cubes, dec.cubes, n, s, s, [&](std::size_t i, std::size_t j) {
    if (i != j) dec.neighbors[i].push_back(j);
  });
  double b1 = 1.0, B1 = 1.0;
  for (std::size_t i = 0; i < dec.cubes.size(); ++i) {
    auto& nb = dec.neighbors[i];
    std::sort(nb.begin(), nb.end());
    dec.max_overlap = std::max(dec.max_overlap, nb.size());
    for (auto j : nb) {
      const double r = dec.cubes[j].side / dec.cubes[i].side;
      b1 = std::min(b1, r);
      B1 = std::max(B1, r);
    }
  }
  dec.b1 = b1;
  dec.B1 = B1;

  dec.collar_neighbors.assign(dec.collar.size(), {});
  sweep_pairs(dec.collar, dec.cubes, n, s, s,
              [&](std::size_t i, std::size_t j) { dec.collar_neighbors[i].push_back(j); });
  for (auto& v : dec.collar_neighbors) std::sort(v.begin(), v.end());
  for (const auto& q : dec.collar) dec.collar_radius = std::max(dec.collar_radius, q.d_cube + q.diam(n));
  if (dec.collar_radius > opt.max_collar) {
    std::ostringstream os;
    os << "collar radius " << dec.collar_radius << " exceeds " << opt.max_collar << " at depth cap "
       << opt.depth_cap;
    throw Error(ErrorKind::DepthExhausted, os.str());
  }
  return dec;
}

Location CubeDecomposition::locate(const Point& x) const {
  for (unsigned i = 0; i < dim; ++i)
    if (x[i] < root_lo[i] || x[i] > root_lo[i] + root_side) return {};
  std::size_t node = 0;
  Point c = root_lo;
  double side = root_side;
  for (unsigned i = 0; i < dim; ++i) c[i] += 0.5 * side;
  while (tree[node].child[0] >= 0) {
    unsigned k = x[0] >= c[0] ? 1u : 0u;
    if (dim == 2 && x[1] >= c[1]) k |= 2u;
    side *= 0.5;
    c[0] += (k & 1u) ? 0.5 * side : -0.5 * side;
    if (dim == 2) c[1] += (k & 2u) ? 0.5 * side : -0.5 * side;
    node = static_cast<std::size_t>(tree[node].child[k]);
  }
  return tree[node].leaf;
}

std::vector<std::size_t> CubeDecomposition::covering(const Point& x) const {
  const Location loc = locate(x);
  std::vector<std::size_t> out;
  if (loc.kind == Location::Outside) {
    // only boundary cubes reach past the box; a scan is cheap enough
    for (std::size_t i = 0; i < cubes.size(); ++i)
      if (cubes[i].contains(x, dim, kExpansion)) out.push_back(i);
    return out;
  }
  const auto& cand = loc.kind == Location::Cube ? neighbors[loc.index] : collar_neighbors[loc.index];
  if (loc.kind == Location::Cube) out.push_back(loc.index);
  for (auto j : cand)
    if (cubes[j].contains(x, dim, kExpansion)) out.push_back(j);
  std::sort(out.begin(), out.end());
  return out;
}

CubeDiagnostics cube_diagnostics(const CubeDecomposition& dec, std::size_t samples_per_cube,
                                 std::uint64_t seed) {
  CubeDiagnostics out;
  const unsigned n = dec.dim;
  out.worst_cube_ratio_lo = INFINITY;
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (std::size_t i = 0; i < dec.cubes.size(); ++i) {
    const Cube& q = dec.cubes[i];
    const double diam = q.diam(n);
    out.worst_cube_ratio_lo = std::min(out.worst_cube_ratio_lo, q.d_cube / diam);
    out.worst_cube_ratio_hi = std::max(out.worst_cube_ratio_hi, q.d_cube / diam);
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
    const Point& xhat_i = dec.set.points[q.nearest];
    for (std::size_t s = 0; s <= samples_per_cube; ++s) {
      Point x = q.center;
      if (s > 0)
        for (unsigned k = 0; k < n; ++k) x[k] += u(rng) * q.side * CubeDecomposition::kExpansion;
      const std::size_t jh = dec.set.nearest(x);
      const double dx = distance(x, dec.set.points[jh], n);
      const double di = q.d_center;
      const double r[6] = {0.5 * dx / di,
                           di / (3.0 * dx),
                           diam / (3.0 * dx),
                           dx / (9.0 * diam),
                           distance(xhat_i, x, n) / (2.0 * di),
                           distance(xhat_i, dec.set.points[jh], n) / (4.0 * di)};
      for (int k = 0; k < 6; ++k) {
        if (!(r[k] <= 1.0 + 1e-12)) {
          std::ostringstream os;
          os << "cube " << i << " violates distance inequality " << k << " at (" << x[0] << ", " << x[1]
             << "), ratio " << r[k];
          throw Error(ErrorKind::InvariantViolation, os.str());
        }
        out.worst[k] = std::max(out.worst[k], r[k]);
      }
      ++out.samples;
    }
  }
  if (dec.cubes.empty()) out.worst_cube_ratio_lo = 0.0;
  return out;
}

}  // namespace ultrajet
