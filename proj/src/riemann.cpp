#include <algorithm>
#include <cmath>

#include "excmeas/harmonic.hpp"

namespace excmeas::harmonic {

GridMap::GridMap(const lattice::UnionOfSquaresRegion& R, int refine, double tol)
    : region_(std::make_shared<lattice::UnionOfSquaresRegion>(R)) {
  // Solve u harmonic with u = log|z| on the boundary; then g = u - log|z| is
  // the Green's function pole at the origin handled analytically, and
  // f = z exp(-u - iv) maps R onto the unit disk.
  auto field = HarmonicField::solve(
      *region_, [](Cpx z) { return std::log(std::abs(z)); }, refine, tol);
  defect_ = field.build_conjugate();
  field_ = std::make_shared<HarmonicField>(std::move(field));
  if (defect_ > 1e-6)
    throw MeshTooCoarse("conjugate path dependence " + std::to_string(defect_));
  fp0_ = std::exp(-field_->value(Cpx(0.0, 0.0)));

  const auto& segs = region_->boundary_segments();
  seg_theta_.resize(segs.size());
  corner_theta_.resize(segs.size());
  double delta = field_->spacing();
  double h = region_->spacing().value();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    Cpx a = region_->corner_to_continuum(segs[i].a);
    Cpx b = region_->corner_to_continuum(segs[i].b);
    Cpx mid = 0.5 * (a + b);
    Cpx in_center{segs[i].in_cell.x * h, segs[i].in_cell.y * h};
    Cpx dir = in_center - mid;
    dir /= std::abs(dir);
    seg_theta_[i] = theta(mid + dir * (0.5 * delta));
  }
  for (std::size_t i = 0; i < segs.size(); ++i) {
    std::size_t prev = (i + segs.size() - 1) % segs.size();
    Cpx corner = region_->corner_to_continuum(segs[i].a);
    Cpx c1{segs[prev].in_cell.x * h, segs[prev].in_cell.y * h};
    Cpx c2{segs[i].in_cell.x * h, segs[i].in_cell.y * h};
    Cpx dir = c1 + c2 - 2.0 * corner;
    dir /= std::abs(dir);
    corner_theta_[i] = theta(corner + dir * (0.75 * delta));
  }
}

Cpx GridMap::eval_log(Cpx z) const {
  return {field_->value(z), field_->conjugate(z)};
}

Cpx GridMap::map(Cpx z) const {
  if (std::abs(z) == 0.0) return {0.0, 0.0};
  Cpx uv = eval_log(z);
  return z * std::exp(-uv);
}

Cpx GridMap::deriv(Cpx z) const {
  double delta = field_->spacing();
  if (std::abs(z) < delta) return {fp0_, 0.0};
  Cpx grad = field_->gradient(z);  // (u_x, u_y)
  Cpx dlog = 1.0 / z - Cpx(grad.real(), -grad.imag());
  return map(z) * dlog;
}

Cpx GridMap::inverse(Cpx w) const {
  if (std::abs(w) >= 1.0)
    throw std::domain_error("GridMap::inverse: |w| < 1 required");
  Cpx z = w / fp0_;
  if (!region_->contains(z)) z = w * (0.5 / fp0_);
  if (!region_->contains(z)) z = Cpx(0.0, 0.0);
  for (int it = 0; it < 80; ++it) {
    Cpx f = map(z) - w;
    if (std::abs(f) < 1e-12) break;
    Cpx step = f / deriv(z);
    double damp = 1.0;
    Cpx nz = z - step;
    while (!region_->contains(nz) && damp > 1e-4) {
      damp *= 0.5;
      nz = z - damp * step;
    }
    z = nz;
  }
  return z;
}

double GridMap::green(Cpx z) const {
  return field_->value(z) - std::log(std::abs(z));
}

double GridMap::theta(Cpx z) const {
  return wrap_angle(std::arg(z) - field_->conjugate(z));
}

double GridMap::boundary_theta(std::size_t i) const { return seg_theta_.at(i); }

std::vector<CaraRow> cara_deviation(
    const ConformalMap& F,
    const std::vector<std::pair<int, const GridMap*>>& maps,
    const std::vector<double>& radii) {
  std::vector<CaraRow> rows;
  for (auto& [N, gm] : maps) {
    for (double r : radii) {
      double worst = 0.0;
      // Deviation of holomorphic maps on |z| <= r peaks on the circle; scan
      // it densely plus an interior ring.
      for (double rr : {r, 0.6 * r}) {
        int m = rr == r ? 256 : 64;
        for (int k = 0; k < m; ++k) {
          Cpx z = std::polar(rr, kTwoPi * k / m);
          Cpx a = F.map(z);
          Cpx b = gm->inverse(z);
          worst = std::max(worst, std::abs(a - b));
        }
      }
      rows.push_back({N, r, worst});
    }
  }
  return rows;
}

}  // namespace excmeas::harmonic
