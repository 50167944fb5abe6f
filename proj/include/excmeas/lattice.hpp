#ifndef EXCMEAS_LATTICE_HPP
#define EXCMEAS_LATTICE_HPP

#include <memory>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "excmeas/common.hpp"

namespace excmeas::lattice {

struct EmptyDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotSimplyConnected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Three boundary notions for a lattice set A:
//   outer:  points of the complement at distance 1 from A
//   inner:  points of A with a neighbor in the complement
//   edges:  ordered pairs (x in A, y outside, |x-y| = 1)
struct Boundaries {
  std::vector<PointI> outer;
  std::vector<PointI> inner;
  std::vector<std::pair<PointI, PointI>> edges;
};

// Finite simply connected subset of Z^2, stored in integer coordinates with
// an exact rational spacing h; the continuum embedding is x -> h*x.
// Immutable after construction.
class LatticeDomain {
 public:
  static LatticeDomain from_points(std::vector<PointI> pts,
                                   Rational spacing = Rational(1, 1));

  std::size_t size() const { return points_.size(); }
  bool contains(PointI p) const { return set_.count(point_key(p)) != 0; }
  // Index of p in points() order; -1 if absent.
  int index_of(PointI p) const;
  const std::vector<PointI>& points() const { return points_; }
  Rational spacing() const { return spacing_; }
  bool contains_origin() const { return contains_origin_; }

  const Boundaries& boundaries() const { return boundaries_; }
  int boundary_index_of(PointI p) const;  // index into boundaries().outer

  // min |z| over lattice points z outside A (lattice units).
  double inradius() const;
  // max |z| over z in A.
  double radius() const;

  // Same point set with a different spacing (exact relabeling).
  LatticeDomain with_spacing(Rational h) const;

 private:
  LatticeDomain() = default;
  std::vector<PointI> points_;
  std::unordered_set<std::uint64_t> set_;
  std::unordered_map<std::uint64_t, int> index_;
  std::unordered_map<std::uint64_t, int> boundary_index_;
  Boundaries boundaries_;
  Rational spacing_{1, 1};
  bool contains_origin_ = false;
};

// The union-of-squares continuum domain of a lattice set: interior of the
// union of closed axis-aligned squares of side h centered at the points.
// Boundary corners are stored in doubled-integer coordinates (h/2 units) so
// the polygon is exact.
class UnionOfSquaresRegion {
 public:
  struct Segment {
    PointI a, b;      // corner coordinates, doubled (units of h/2)
    PointI in_cell;   // lattice cell on the inside
    PointI out_cell;  // lattice cell on the outside
  };

  static UnionOfSquaresRegion build(const LatticeDomain& A);

  Rational spacing() const { return h_; }
  // Ordered closed boundary polygon (continuum coordinates).
  const std::vector<Cpx>& boundary_vertices() const { return vertices_; }
  // Boundary segments in polygon order; segment i joins vertex i to i+1.
  const std::vector<Segment>& boundary_segments() const { return segments_; }
  std::size_t cell_count() const { return cells_; }
  double area() const;

  // Open-region membership (points on the boundary polygon excluded).
  bool contains(Cpx z) const;
  const LatticeDomain& cells() const { return *domain_; }

  Cpx corner_to_continuum(PointI doubled) const {
    double s = 0.5 * h_.value();
    return {doubled.x * s, doubled.y * s};
  }

 private:
  std::shared_ptr<const LatticeDomain> domain_;
  Rational h_{1, 1};
  std::size_t cells_ = 0;
  std::vector<Cpx> vertices_;
  std::vector<Segment> segments_;
};

// Continuum Jordan domains used as discretization targets. All shapes keep
// the origin interior; normalize() rescales to inradius 1.
class JordanDomainSpec {
 public:
  enum class Shape { Disk, Square, Rectangle, Polygon, RadialGraph };

  static JordanDomainSpec unit_disk();
  static JordanDomainSpec square();  // (-1,1)^2
  static JordanDomainSpec rectangle(double half_x, double half_y);
  // Vertices as exact rationals, counterclockwise, origin strictly inside.
  static JordanDomainSpec polygon(std::vector<std::pair<Rational, Rational>> verts);
  // r(theta) = base * (1 + amp*cos(k theta)); requires |amp| < 1.
  static JordanDomainSpec radial_graph(double amp, int k);

  Shape shape() const { return shape_; }
  bool contains(Cpx z) const;
  double inradius() const;
  JordanDomainSpec normalized() const;  // scaled so inradius == 1

  // Is the closed square with center c and half-side s strictly inside?
  // Exact for disk/rectangle/polygon; sampled edges for radial graphs.
  bool contains_square(Cpx center, double half_side) const;
  // Exact rational version for polygon shapes: square center (cx/cd, cy/cd),
  // half side sn/sd.
  bool contains_square_exact(long long cx, long long cy, long long cd,
                             long long sn, long long sd) const;

  double dist_to_boundary(Cpx z) const;  // for interior z
  double scale() const { return scale_; }
  double rect_half_x() const { return half_x_; }
  double rect_half_y() const { return half_y_; }
  double radial_amp() const { return amp_; }
  int radial_k() const { return k_; }
  const std::vector<std::pair<Rational, Rational>>& polygon_vertices() const {
    return verts_;
  }

 private:
  Shape shape_ = Shape::Disk;
  double scale_ = 1.0;  // multiplies the base shape
  double half_x_ = 1.0, half_y_ = 1.0;
  std::vector<std::pair<Rational, Rational>> verts_;
  double amp_ = 0.0;
  int k_ = 0;
};

// 1/N-scale discrete approximation: keep lattice cells whose square lies in
// D, take the origin's connected component, peel its inner boundary. The
// result is stored as an integer point set with spacing 1/N.
LatticeDomain discretize(const JordanDomainSpec& D, int N);

UnionOfSquaresRegion union_of_squares(const LatticeDomain& A);

// Closed lattice disk {x : |x| <= n} (integer spacing).
LatticeDomain lattice_disk(int n);

// Connectivity helpers (flood fill based).
bool is_connected(const std::vector<PointI>& pts);
bool is_simply_connected(const std::vector<PointI>& pts);

// Export formats.
std::string to_text_grid(const LatticeDomain& A);
std::string to_json_points(const LatticeDomain& A);

}  // namespace excmeas::lattice

#endif
