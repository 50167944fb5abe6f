#ifndef EXCMEAS_CURVES_HPP
#define EXCMEAS_CURVES_HPP

#include <vector>

#include "excmeas/common.hpp"
#include "excmeas/harmonic.hpp"

namespace excmeas::curves {

struct EndpointMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadWindow : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotNearestNeighbor : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct QuadratureFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Piecewise-linear time-parameterized planar curve with positive duration.
class Curve {
 public:
  Curve(std::vector<double> times, std::vector<Cpx> points);

  double duration() const { return times_.back(); }
  std::size_t breakpoints() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Cpx>& points() const { return points_; }
  Cpx start() const { return points_.front(); }
  Cpx end() const { return points_.back(); }

  Cpx at(double t) const;                 // t in [0, duration]
  Cpx at_fraction(double s) const { return at(s * duration()); }
  double diameter() const;
  // Modulus of continuity osc(gamma, delta), exact on the breakpoint grid.
  double oscillation(double delta) const;

 private:
  std::vector<double> times_;
  std::vector<Cpx> points_;
};

// sup_{0<=s<=1} |gamma(t s) - gamma'(t' s)| + |t - t'|; exact for
// piecewise-linear curves (evaluated on the merged breakpoint fractions).
double metric_dd(const Curve& a, const Curve& b);

// Certified upper bound for the time-sensitive Frechet-style metric: minimum
// over monotone breakpoint alignments (midpoint-refined), never above
// metric_dd because the linear alignment is always a candidate.
double metric_dk_upper(const Curve& a, const Curve& b, int refine_rounds = 2);

Curve concat(const Curve& a, const Curve& b, double tol = 1e-12);
Curve truncate(const Curve& c, double r, double s);

// Brownian scaling: position times a, duration times |a|^2.
Curve brownian_scale(Cpx a, const Curve& c);

// Lattice path embedding: vertex j sits at position omega_j * h at time
// 2 j h^2 with linear traversal in between.
Curve embed_discrete(const std::vector<PointI>& walk, double h);

// Image under a conformal map with its Brownian time change
// A_s = int |f'(gamma)|^2; per-piece composite Simpson, refined grid output.
Curve conformal_image(const Curve& c, const harmonic::ConformalMap& f,
                      int per_piece = 8);

}  // namespace excmeas::curves

#endif
