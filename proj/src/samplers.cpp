#include <algorithm>
#include <cmath>

#include "excmeas/measures.hpp"

namespace excmeas::measures {

using curves::Curve;
using lattice::JordanDomainSpec;

WienerPath sample_wiener_to_boundary(const JordanDomainSpec& D, Cpx z,
                                     CounterRng& rng, double exit_tol,
                                     double record_res) {
  if (!D.contains(z))
    throw std::invalid_argument("wiener sampler: start point outside domain");
  const double dt_floor = 1e-8;
  std::vector<double> times{0.0};
  std::vector<Cpx> pts{z};
  Cpx cur = z;
  Cpx last_rec = z;
  double t = 0.0;
  bool floor_hit = false;
  double dist = D.dist_to_boundary(cur);
  while (dist > exit_tol) {
    // Step sd proportional to dist^2 keeps the per-step sigma at dist/4, so
    // undetected bridge crossings are 4-sigma events and the exit law is
    // unbiased at chi-square resolution.
    double dt = std::max(dist * dist / 16.0, dt_floor);
    if (dist * dist / 16.0 < dt_floor) floor_hit = true;
    Cpx inc = std::sqrt(dt) * rng.normal2();
    Cpx next = cur + inc;
    t += dt;
    if (!D.contains(next)) {
      // Crossed the boundary inside one step: bisect the segment to the
      // crossing point.
      double a = 0.0, b = 1.0;
      for (int it = 0; it < 40; ++it) {
        double m = 0.5 * (a + b);
        if (D.contains(cur + m * inc)) a = m;
        else b = m;
      }
      cur = cur + a * inc;
      times.push_back(t);
      pts.push_back(cur);
      dist = D.dist_to_boundary(cur);
      break;
    }
    cur = next;
    dist = D.dist_to_boundary(cur);
    if (std::abs(cur - last_rec) >= record_res || dist <= exit_tol) {
      times.push_back(t);
      pts.push_back(cur);
      last_rec = cur;
    }
  }
  // Project the final point onto the boundary along the outward ray (exact
  // for the disk; a short search otherwise).
  Cpx exitp = cur;
  switch (D.shape()) {
    case JordanDomainSpec::Shape::Disk:
      exitp = cur * (D.scale() / std::max(1e-300, std::abs(cur)));
      break;
    default: {
      Cpx dir = cur;
      double r = std::abs(dir);
      if (r < 1e-12) dir = Cpx(1.0, 0.0);
      else dir /= r;
      double lo = 0.0, hi = 4.0 * D.scale();
      for (int it = 0; it < 60; ++it) {
        double m = 0.5 * (lo + hi);
        if (D.contains(cur + m * dir)) lo = m;
        else hi = m;
      }
      exitp = cur + hi * dir;
      break;
    }
  }
  if (times.back() < t || pts.back() != exitp) {
    double t_end = t + D.dist_to_boundary(cur) * D.dist_to_boundary(cur) / 4.0;
    if (t_end <= times.back()) t_end = times.back() + dt_floor;
    times.push_back(t_end);
    pts.push_back(exitp);
  } else {
    pts.back() = exitp;
  }
  WienerPath out{Curve(std::move(times), std::move(pts)), exitp, floor_hit};
  return out;
}

Cpx disk_exit_point(Cpx z, CounterRng& rng) {
  // Harmonic measure from z is the Moebius image of the uniform law.
  double u = rng.uniform(0.0, kTwoPi);
  Cpx w = std::polar(1.0, u);
  return (w + z) / (1.0 + std::conj(z) * w);
}

ExcursionSample sample_brownian_excursion(harmonic::AngleInterval gamma,
                                          harmonic::AngleInterval upsilon,
                                          double eps, CounterRng& rng,
                                          std::uint64_t max_attempts) {
  if (!(eps > 0.0 && eps <= 0.1))
    throw std::invalid_argument("excursion sampler: eps in (0, 0.1]");
  auto geo = harmonic::sep_spr(gamma, upsilon);
  if (!(geo.sep > 0.0))
    throw harmonic::ArcsOverlap("excursion sampler: arcs touch");
  JordanDomainSpec disk = JordanDomainSpec::unit_disk();
  std::uint64_t attempts = 0;
  const std::uint64_t rate_check = 50000;
  while (attempts < max_attempts) {
    ++attempts;
    // Each attempt draws from its own substream, so two samplers sharing the
    // seed stay aligned attempt-by-attempt (shared-seed couplings).
    CounterRng attempt_rng = rng.fork(attempts);
    double th = attempt_rng.uniform(gamma.lo, gamma.hi);
    Cpx z0 = std::polar(1.0 - eps, th);
    WienerPath wp = sample_wiener_to_boundary(disk, z0, attempt_rng);
    double exit_th = std::arg(wp.exit_point);
    if (upsilon.contains(exit_th)) {
      ExcursionSample out{std::move(wp.curve), th, wrap_angle(exit_th), attempts};
      return out;
    }
    if (attempts == rate_check)
      throw AcceptanceTooLow("excursion sampler: acceptance below 1/" +
                             std::to_string(rate_check));
  }
  throw AcceptanceTooLow("excursion sampler: attempt budget exhausted");
}

StepPair coupled_walk_bm_step(CounterRng& rng) {
  StepPair out;
  out.bm_increment = rng.normal2();
  double ang = std::arg(out.bm_increment);  // (-pi, pi]
  if (ang > -kPi / 4 && ang <= kPi / 4) out.move = {1, 0};
  else if (ang > kPi / 4 && ang <= 3 * kPi / 4) out.move = {0, 1};
  else if (ang > -3 * kPi / 4 && ang <= -kPi / 4) out.move = {0, -1};
  else out.move = {-1, 0};
  return out;
}

}  // namespace excmeas::measures
