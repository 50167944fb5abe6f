#ifndef EXCMEAS_HARMONIC_HPP
#define EXCMEAS_HARMONIC_HPP

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "excmeas/common.hpp"
#include "excmeas/lattice.hpp"

namespace excmeas::harmonic {

struct CoincidentPoints : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ArcsOverlap : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MeshTooCoarse : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RangeEscapesDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Open arc (lo, hi) on the unit circle, lo < hi < lo + 2*pi.
struct AngleInterval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool contains(double theta, bool closed = false) const;
};

// ---------------------------------------------------------------------------
// Closed-form kernels on the disk.
// ---------------------------------------------------------------------------

// Green's function of the unit disk.
double green_disk(Cpx x, Cpx y);

// Poisson kernel H_D(z, e^{i theta}) for the unit disk (density in d theta).
double poisson_disk(Cpx z, double theta);
// Poisson kernel for the disk of radius r (density in arclength).
double poisson_disk_radius(double r, Cpx z, Cpx w);

// Excursion Poisson kernel H_{bd D}(theta, theta') for the unit disk.
double excursion_poisson_disk(double theta, double theta_p);
// Excursion Poisson kernel for the disk of radius r at boundary points w1,w2.
double excursion_poisson_disk_radius(double r, Cpx w1, Cpx w2);

// H_{bd D}(Gamma, Upsilon): double integral of the kernel over two disjoint
// arcs, by nested adaptive quadrature (absolute error <= tol).
double excursion_poisson_arcs(AngleInterval gamma, AngleInterval upsilon,
                              double tol = 1e-8);
// Same mass from the -cot antiderivative; used as an independent check.
double excursion_poisson_arcs_closed(AngleInterval gamma, AngleInterval upsilon);

// Harmonic measure of an arc from 0 is its angular length / 2 pi.
inline double harmonic_measure_disk(AngleInterval arc) {
  return arc.length() / kTwoPi;
}

// ---------------------------------------------------------------------------
// Arc geometry: separation and spread in circle distance.
// ---------------------------------------------------------------------------

struct ArcGeometry {
  double sep = 0.0;
  double spr = 0.0;
  double len_gamma = 0.0;
  double len_upsilon = 0.0;
};

ArcGeometry sep_spr(AngleInterval gamma, AngleInterval upsilon);

// Finite partitions of both arcs such that every sub-pair has
// (1 - cos spr) / (1 - cos sep) <= 1 + eta.
struct ArcPartition {
  std::vector<AngleInterval> gamma_parts;
  std::vector<AngleInterval> upsilon_parts;
};
ArcPartition partition_for_ratio(AngleInterval gamma, AngleInterval upsilon,
                                 double eta);

// ---------------------------------------------------------------------------
// Conformal maps.
// ---------------------------------------------------------------------------

class ConformalMap {
 public:
  virtual ~ConformalMap() = default;
  virtual Cpx map(Cpx z) const = 0;
  virtual Cpx deriv(Cpx z) const = 0;
  virtual Cpx inverse(Cpx w) const;
  virtual std::string kind() const = 0;
};

class IdentityMap final : public ConformalMap {
 public:
  Cpx map(Cpx z) const override { return z; }
  Cpx deriv(Cpx) const override { return {1.0, 0.0}; }
  Cpx inverse(Cpx w) const override { return w; }
  std::string kind() const override { return "identity"; }
};

// General Moebius transformation (a z + b) / (c z + d).
class MobiusMap final : public ConformalMap {
 public:
  MobiusMap(Cpx a, Cpx b, Cpx c, Cpx d) : a_(a), b_(b), c_(c), d_(d) {}
  static MobiusMap rotation(double phi);
  static MobiusMap scaling(Cpx a);
  // f_alpha(z) = (z - alpha) / (1 - alpha z), real alpha in (-1, 1);
  // fixes +-1 and maps the disk onto itself.
  static MobiusMap alpha_map(double alpha);
  // Disk automorphism fixing the boundary point w and sending a to b.
  static MobiusMap fixing_boundary_point(Cpx w, Cpx a, Cpx b);
  MobiusMap compose(const MobiusMap& inner) const;  // this o inner

  Cpx map(Cpx z) const override { return (a_ * z + b_) / (c_ * z + d_); }
  Cpx deriv(Cpx z) const override {
    Cpx den = c_ * z + d_;
    return (a_ * d_ - b_ * c_) / (den * den);
  }
  Cpx inverse(Cpx w) const override { return (d_ * w - b_) / (-c_ * w + a_); }
  std::string kind() const override { return "mobius"; }

 private:
  Cpx a_, b_, c_, d_;
};

// Conformal map of the unit disk onto the square (-1,1)^2 with f(0)=0,
// f'(0)>0, via the quartic Schwarz-Christoffel integral.
class DiskToSquareMap final : public ConformalMap {
 public:
  DiskToSquareMap();
  Cpx map(Cpx z) const override;
  Cpx deriv(Cpx z) const override;
  Cpx inverse(Cpx w) const override;  // Newton
  std::string kind() const override { return "disk-to-square"; }
  double corner_scale() const { return scale_; }

 private:
  Cpx raw_integral(Cpx z) const;
  double scale_ = 1.0;  // S(1)
  std::shared_ptr<const GaussLegendre> gl_;
};

// ---------------------------------------------------------------------------
// Grid Dirichlet solver and the numerical Riemann map.
// ---------------------------------------------------------------------------

// Harmonic grid function on a masked uniform grid over a union-of-squares
// region. Spacing is h / refine with grid-aligned boundary. Immutable after
// construction.
class HarmonicField {
 public:
  // boundary_value: continuum position -> Dirichlet value.
  static HarmonicField solve(const lattice::UnionOfSquaresRegion& R,
                             const std::function<double(Cpx)>& boundary_value,
                             int refine = 8, double tol = 1e-10);

  double value(Cpx z) const;           // bilinear interpolation
  Cpx gradient(Cpx z) const;           // patch-constant derivative
  double residual() const { return residual_; }
  double spacing() const { return delta_; }
  bool has_conjugate() const { return !v_.empty(); }
  // Harmonic conjugate (dual-grid line integration of the CR increments),
  // anchored to 0 at the origin. Returns max loop-closure defect.
  double build_conjugate();
  double conjugate(Cpx z) const;
  double max_boundary_value() const { return bmax_; }

 private:
  friend class GridMap;
  int nx_ = 0, ny_ = 0;
  int bx_ = 0, by_ = 0;       // node (bx,by) sits at the origin
  double delta_ = 0.0;        // continuum grid spacing
  double hscale_ = 1.0;       // continuum units per lattice unit
  std::vector<double> u_;
  std::vector<double> v_;     // dual-grid conjugate
  std::vector<std::uint8_t> node_mask_;  // 0 exterior, 1 interior, 2 boundary
  std::vector<std::uint8_t> cell_mask_;
  double residual_ = 0.0;
  double bmax_ = 1.0;
  double node_u(int i, int j) const { return u_[static_cast<std::size_t>(j) * nx_ + i]; }
};

// Numerical Riemann map f: R -> unit disk with f(0) = 0, f'(0) > 0, built
// from g = g_R(0, .) and its harmonic conjugate on a grid.
class GridMap final : public ConformalMap {
 public:
  explicit GridMap(const lattice::UnionOfSquaresRegion& R, int refine = 8,
                   double tol = 1e-10);

  Cpx map(Cpx z) const override;      // R -> disk
  Cpx deriv(Cpx z) const override;
  Cpx inverse(Cpx w) const override;  // disk -> R, Newton
  std::string kind() const override { return "grid"; }

  double green(Cpx z) const;          // g_R(0, z)
  double theta(Cpx z) const;          // conjugate coordinate, in [0, 2pi)
  double deriv_at_origin() const { return fp0_; }
  double conjugate_defect() const { return defect_; }

  // theta at the midpoint of boundary segment i, evaluated just inside.
  double boundary_theta(std::size_t segment_index) const;
  // theta just inside each polygon corner, aligned with boundary_segments().
  const std::vector<double>& corner_thetas() const { return corner_theta_; }
  const lattice::UnionOfSquaresRegion& region() const { return *region_; }

 private:
  Cpx eval_log(Cpx z) const;  // u + iv at z
  std::shared_ptr<const lattice::UnionOfSquaresRegion> region_;
  std::shared_ptr<HarmonicField> field_;
  double fp0_ = 1.0;
  double defect_ = 0.0;
  std::vector<double> seg_theta_;
  std::vector<double> corner_theta_;
};

// Green's function of the axis-aligned rectangle (-hx,hx) x (-hy,hy)
// (Brownian normalization), by the mode expansion.
double green_rectangle(double hx, double hy, Cpx p, Cpx q);

// Carathedory-style deviation table: sup_{|z| <= r} |F_N(z) - F(z)| where
// F = exact map (disk -> D) and F_N = inverse of the numeric map of the
// N-th union-of-squares approximation.
struct CaraRow {
  int N = 0;
  double r = 0.0;
  double sup_dev = 0.0;
};
std::vector<CaraRow> cara_deviation(const ConformalMap& F_disk_to_D,
                                    const std::vector<std::pair<int, const GridMap*>>& maps,
                                    const std::vector<double>& radii);

}  // namespace excmeas::harmonic

#endif
