#include "excmeas/harmonic.hpp"

#include <algorithm>
#include <cmath>

namespace excmeas::harmonic {

bool AngleInterval::contains(double theta, bool closed) const {
  double t = lo + wrap_angle(theta - lo);  // representative in [lo, lo+2pi)
  return closed ? t <= hi : (t > lo && t < hi);
}

double green_disk(Cpx x, Cpx y) {
  if (std::abs(x) >= 1.0 || std::abs(y) >= 1.0)
    throw std::domain_error("green_disk: points must lie in the open disk");
  if (std::abs(x - y) == 0.0) throw CoincidentPoints("green_disk: x == y");
  return std::log(std::abs((std::conj(y) * x - 1.0) / (y - x)));
}

double poisson_disk(Cpx z, double theta) {
  double r2 = std::norm(z);
  if (r2 >= 1.0) throw std::domain_error("poisson_disk: |z| < 1 required");
  Cpx w = std::polar(1.0, theta);
  return (1.0 - r2) / (kTwoPi * std::norm(w - z));
}

double poisson_disk_radius(double r, Cpx z, Cpx w) {
  return (r * r - std::norm(z)) / (kTwoPi * r * std::norm(w - z));
}

double excursion_poisson_disk(double theta, double theta_p) {
  double c = std::cos(theta - theta_p);
  if (c >= 1.0 - 1e-15)
    throw CoincidentPoints("excursion_poisson_disk: coincident angles");
  return 1.0 / (kTwoPi * (1.0 - c));
}

double excursion_poisson_disk_radius(double r, Cpx w1, Cpx w2) {
  double t1 = std::arg(w1), t2 = std::arg(w2);
  return excursion_poisson_disk(t1, t2) / (r * r);
}

double excursion_poisson_arcs(AngleInterval g, AngleInterval u, double tol) {
  ArcGeometry geo = sep_spr(g, u);
  if (!(geo.sep > 0.0)) throw ArcsOverlap("excursion_poisson_arcs: arcs touch");
  auto inner = [&](double theta) {
    return adaptive_simpson(
        [&](double tp) { return excursion_poisson_disk(theta, tp); }, u.lo,
        u.hi, 0.1 * tol / std::max(1.0, g.length()));
  };
  return adaptive_simpson(inner, g.lo, g.hi, 0.5 * tol);
}

double excursion_poisson_arcs_closed(AngleInterval g, AngleInterval u) {
  // Second antiderivative of 1/(2 pi (1 - cos)) is -(1/pi) log sin(u/2).
  auto K2 = [](double x) {
    // valid for 0 < x < 2 pi
    return -std::log(std::sin(0.5 * x)) / kPi;
  };
  double t1 = g.lo, t2 = g.hi;
  double t3 = u.lo, t4 = u.hi;
  while (t3 < t2) { t3 += kTwoPi; t4 += kTwoPi; }
  return K2(t4 - t1) - K2(t4 - t2) - K2(t3 - t1) + K2(t3 - t2);
}

ArcGeometry sep_spr(AngleInterval g, AngleInterval u) {
  ArcGeometry out;
  out.len_gamma = g.length();
  out.len_upsilon = u.length();
  // Gaps between the arcs along the circle (closures disjoint iff both > 0).
  double gap1 = wrap_angle(u.lo - g.hi);
  double gap2 = wrap_angle(g.lo - u.hi);
  if (g.length() + u.length() + gap1 + gap2 > kTwoPi + 1e-12 ||
      gap1 <= 0.0 || gap2 <= 0.0) {
    // Either overlapping or touching arcs.
    out.sep = 0.0;
  } else {
    out.sep = std::min(std::min(gap1, gap2), kPi);
  }
  // Spread: the difference theta - theta' ranges over an interval of length
  // len(g) + len(u); circle distance peaks at pi if the interval covers it.
  double d0 = g.lo - u.hi, d1 = g.hi - u.lo;
  bool covers_pi = false;
  double k0 = std::ceil((d0 - kPi) / kTwoPi);
  if (kPi + k0 * kTwoPi <= d1 + 1e-15) covers_pi = true;
  double km0 = std::ceil((d0 + kPi) / kTwoPi);
  if (-kPi + km0 * kTwoPi <= d1 + 1e-15) covers_pi = true;
  if (covers_pi)
    out.spr = kPi;
  else
    out.spr = std::max(circle_distance(d0, 0.0), circle_distance(d1, 0.0));
  return out;
}

ArcPartition partition_for_ratio(AngleInterval g, AngleInterval u, double eta) {
  if (eta <= 0.0) throw std::invalid_argument("partition_for_ratio: eta > 0");
  ArcGeometry geo = sep_spr(g, u);
  if (!(geo.sep > 0.0)) throw ArcsOverlap("partition_for_ratio: arcs touch");
  auto split = [](AngleInterval a, int m) {
    std::vector<AngleInterval> out;
    for (int i = 0; i < m; ++i)
      out.push_back({a.lo + a.length() * i / m, a.lo + a.length() * (i + 1) / m});
    return out;
  };
  for (int m = 1; m <= 4096; m *= 2) {
    auto gp = split(g, m);
    auto up = split(u, m);
    double worst = 1.0;
    for (auto& gi : gp)
      for (auto& uj : up) {
        ArcGeometry sub = sep_spr(gi, uj);
        worst = std::max(worst, (1.0 - std::cos(sub.spr)) / (1.0 - std::cos(sub.sep)));
      }
    if (worst <= 1.0 + eta) return {gp, up};
  }
  throw std::runtime_error("partition_for_ratio: no admissible partition found");
}

// ---------------------------------------------------------------------------
// Moebius constructors.
// ---------------------------------------------------------------------------

Cpx ConformalMap::inverse(Cpx) const {
  throw std::logic_error("inverse not available for map kind " + kind());
}

MobiusMap MobiusMap::rotation(double phi) {
  return {std::polar(1.0, phi), {0, 0}, {0, 0}, {1, 0}};
}

MobiusMap MobiusMap::scaling(Cpx a) { return {a, {0, 0}, {0, 0}, {1, 0}}; }

MobiusMap MobiusMap::alpha_map(double alpha) {
  if (std::fabs(alpha) >= 1.0)
    throw std::invalid_argument("alpha_map: |alpha| < 1 required");
  return {{1, 0}, {-alpha, 0}, {-alpha, 0}, {1, 0}};
}

MobiusMap MobiusMap::compose(const MobiusMap& o) const {
  return {a_ * o.a_ + b_ * o.c_, a_ * o.b_ + b_ * o.d_,
          c_ * o.a_ + d_ * o.c_, c_ * o.b_ + d_ * o.d_};
}

MobiusMap MobiusMap::fixing_boundary_point(Cpx w, Cpx a, Cpx b) {
  if (std::fabs(std::abs(w) - 1.0) > 1e-12)
    throw std::invalid_argument("fixing_boundary_point: w must be on the circle");
  // Rotate w to 1, pass to the half plane (1 -> infinity), apply the affine
  // map with positive slope carrying T(a') to T(b'), come back.
  MobiusMap rot_in = rotation(-std::arg(w));
  MobiusMap rot_out = rotation(std::arg(w));
  MobiusMap cayley({0, 1}, {0, 1}, {-1, 0}, {1, 0});        // i(1+z)/(1-z)
  MobiusMap cayley_inv({1, 0}, {0, -1}, {1, 0}, {0, 1});    // (z - i)/(z + i)
  Cpx za = cayley.map(rot_in.map(a));
  Cpx zb = cayley.map(rot_in.map(b));
  if (!(za.imag() > 0.0 && zb.imag() > 0.0))
    throw std::invalid_argument("fixing_boundary_point: interior points required");
  double lambda = zb.imag() / za.imag();
  double mu = zb.real() - lambda * za.real();
  MobiusMap affine({lambda, 0}, {mu, 0}, {0, 0}, {1, 0});
  return rot_out.compose(cayley_inv.compose(affine.compose(cayley.compose(rot_in))));
}

// ---------------------------------------------------------------------------
// Disk -> square map.
// ---------------------------------------------------------------------------

DiskToSquareMap::DiskToSquareMap() : gl_(std::make_shared<GaussLegendre>(48)) {
  scale_ = raw_integral(Cpx(1.0, 0.0)).real();
}

Cpx DiskToSquareMap::raw_integral(Cpx z) const {
  // Integral of (1 + t^4)^{-1/2} along [0, z]; prevertices sit at the
  // diagonal directions so the integrand is analytic on the path except at
  // those four boundary points.
  auto integrand = [](Cpx t) { return 1.0 / std::sqrt(Cpx(1.0, 0.0) + t * t * t * t); };
  auto gauss_segment = [&](Cpx p, Cpx q) {
    Cpx acc{0.0, 0.0};
    for (std::size_t i = 0; i < gl_->nodes.size(); ++i) {
      Cpx t = p + (q - p) * Cpx(0.5 * (gl_->nodes[i] + 1.0), 0.0);
      acc += gl_->weights[i] * integrand(t);
    }
    return acc * (q - p) * Cpx(0.5, 0.0);
  };
  double r = std::abs(z);
  if (r <= 0.9) return gauss_segment(Cpx(0, 0), z);
  Cpx zmid = z * (0.9 / r);
  Cpx head = gauss_segment(Cpx(0, 0), zmid);
  // Remaining stretch may approach a corner prevertex; integrate the real
  // and imaginary parts adaptively.
  Cpx dir = z - zmid;
  auto re_part = [&](double s) { return (integrand(zmid + s * dir) * dir).real(); };
  auto im_part = [&](double s) { return (integrand(zmid + s * dir) * dir).imag(); };
  double re = adaptive_simpson(re_part, 0.0, 1.0, 1e-12);
  double im = adaptive_simpson(im_part, 0.0, 1.0, 1e-12);
  return head + Cpx(re, im);
}

Cpx DiskToSquareMap::map(Cpx z) const { return raw_integral(z) / scale_; }

Cpx DiskToSquareMap::deriv(Cpx z) const {
  return 1.0 / (std::sqrt(Cpx(1.0, 0.0) + z * z * z * z) * scale_);
}

Cpx DiskToSquareMap::inverse(Cpx w) const {
  Cpx z = w * Cpx(0.9, 0.0);
  if (std::abs(z) > 0.95) z *= 0.95 / std::abs(z);
  for (int it = 0; it < 60; ++it) {
    Cpx f = map(z) - w;
    if (std::abs(f) < 1e-13) break;
    Cpx step = f / deriv(z);
    Cpx nz = z - step;
    if (std::abs(nz) >= 0.999999) nz *= 0.999999 / std::abs(nz);
    z = nz;
  }
  return z;
}

// ---------------------------------------------------------------------------
// Rectangle Green's function.
// ---------------------------------------------------------------------------

double green_rectangle(double hx, double hy, Cpx p, Cpx q) {
  // Shift to (0, a) x (0, b); sum sine modes along the coordinate with the
  // larger separation for geometric decay.
  double a = 2.0 * hx, b = 2.0 * hy;
  double x = p.real() + hx, y = p.imag() + hy;
  double x0 = q.real() + hx, y0 = q.imag() + hy;
  if (std::fabs(y - y0) < std::fabs(x - x0)) {
    std::swap(a, b);
    std::swap(x, y);
    std::swap(x0, y0);
  }
  double ylo = std::min(y, y0), yhi = std::max(y, y0);
  double acc = 0.0;
  for (int m = 1; m <= 200000; ++m) {
    double k = m * kPi / a;
    // sinh(k ylo) sinh(k (b - yhi)) / sinh(k b), exponential form.
    double e1 = -std::expm1(-2.0 * k * ylo);
    double e2 = -std::expm1(-2.0 * k * (b - yhi));
    double e3 = -std::expm1(-2.0 * k * b);
    double ratio = 0.5 * std::exp(-k * (yhi - ylo)) * e1 * e2 / e3;
    double term = (2.0 / (a * k)) * std::sin(k * x) * std::sin(k * x0) * ratio;
    acc += term;
    if (m > 8 && std::fabs(ratio) * (2.0 / (a * k)) < 1e-14 * std::max(1.0, std::fabs(acc)))
      break;
  }
  return kTwoPi * acc;  // Brownian normalization: g = 2 pi G_pde
}

}  // namespace excmeas::harmonic
