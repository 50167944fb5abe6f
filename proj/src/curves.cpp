#include "excmeas/curves.hpp"

#include <algorithm>
#include <cmath>

namespace excmeas::curves {

Curve::Curve(std::vector<double> times, std::vector<Cpx> points)
    : times_(std::move(times)), points_(std::move(points)) {
  if (times_.size() != points_.size() || times_.size() < 2)
    throw std::invalid_argument("Curve: need matching times/points, >= 2");
  if (times_.front() != 0.0)
    throw std::invalid_argument("Curve: time must start at 0");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (!(times_[i] > times_[i - 1]))
      throw std::invalid_argument("Curve: times must be strictly increasing");
}

Cpx Curve::at(double t) const {
  if (t <= 0.0) return points_.front();
  if (t >= times_.back()) return points_.back();
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - times_.begin());
  double f = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
  return points_[i - 1] + f * (points_[i] - points_[i - 1]);
}

double Curve::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = i + 1; j < points_.size(); ++j)
      d = std::max(d, std::abs(points_[i] - points_[j]));
  return d;
}

double Curve::oscillation(double delta) const {
  if (delta <= 0.0) return 0.0;
  double best = 0.0;
  std::size_t n = times_.size();
  // |gamma(t) - gamma(s)| over each segment pair, restricted to |t-s|<=delta,
  // is a convex function of (t,s); its maximum sits at a vertex of the
  // clipped box.
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i; j + 1 < n; ++j) {
      if (times_[j] - times_[i + 1] > delta && j > i) break;
      double a0 = times_[i], a1 = times_[i + 1];
      double b0 = times_[j], b1 = times_[j + 1];
      double cand[8][2] = {
          {a0, std::min(b1, a0 + delta)}, {a0, std::max(b0, a0 - delta)},
          {a1, std::min(b1, a1 + delta)}, {a1, std::max(b0, a1 - delta)},
          {std::max(a0, b0 - delta), b0}, {std::min(a1, b0 + delta), b0},
          {std::max(a0, b1 - delta), b1}, {std::min(a1, b1 + delta), b1}};
      for (auto& c : cand) {
        double t = std::clamp(c[0], a0, a1);
        double s = std::clamp(c[1], b0, b1);
        if (std::fabs(t - s) <= delta + 1e-15)
          best = std::max(best, std::abs(at(t) - at(s)));
      }
    }
  return best;
}

double metric_dd(const Curve& a, const Curve& b) {
  double ta = a.duration(), tb = b.duration();
  std::vector<double> fracs;
  fracs.reserve(a.breakpoints() + b.breakpoints());
  for (double t : a.times()) fracs.push_back(t / ta);
  for (double t : b.times()) fracs.push_back(t / tb);
  std::sort(fracs.begin(), fracs.end());
  double sup = 0.0;
  for (double s : fracs)
    sup = std::max(sup, std::abs(a.at(ta * s) - b.at(tb * s)));
  return sup + std::fabs(ta - tb);
}

namespace {

// Exact sup over s of |a(s) - b(phi(s))| + |s - phi(s)| for the linear
// alignment phi(s) = (tb/ta) s: both terms are convex on merged pieces.
double linear_alignment_cost(const Curve& a, const Curve& b) {
  double ta = a.duration(), tb = b.duration();
  std::vector<double> fracs;
  for (double t : a.times()) fracs.push_back(t / ta);
  for (double t : b.times()) fracs.push_back(t / tb);
  std::sort(fracs.begin(), fracs.end());
  double sup = 0.0;
  for (double s : fracs) {
    double cost = std::abs(a.at(ta * s) - b.at(tb * s)) + s * std::fabs(ta - tb);
    sup = std::max(sup, cost);
  }
  return sup;
}

std::vector<double> refined_times(const Curve& c, int rounds) {
  std::vector<double> t = c.times();
  for (int r = 0; r < rounds; ++r) {
    std::vector<double> t2;
    t2.reserve(t.size() * 2);
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      t2.push_back(t[i]);
      t2.push_back(0.5 * (t[i] + t[i + 1]));
    }
    t2.push_back(t.back());
    t = std::move(t2);
  }
  return t;
}

}  // namespace

double metric_dk_upper(const Curve& a, const Curve& b, int refine_rounds) {
  std::vector<double> u = refined_times(a, refine_rounds);
  std::vector<double> v = refined_times(b, refine_rounds);
  std::size_t n = u.size(), m = v.size();
  std::vector<Cpx> pa(n), pb(m);
  for (std::size_t i = 0; i < n; ++i) pa[i] = a.at(u[i]);
  for (std::size_t j = 0; j < m; ++j) pb[j] = b.at(v[j]);
  auto cost = [&](std::size_t i, std::size_t j) {
    return std::abs(pa[i] - pb[j]) + std::fabs(u[i] - v[j]);
  };
  // Monotone staircase DP: value = min over paths of the max vertex cost.
  std::vector<double> dp(m, 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  dp[0] = cost(0, 0);
  for (std::size_t j = 1; j < m; ++j) dp[j] = std::max(dp[j - 1], cost(0, j));
  for (std::size_t i = 1; i < n; ++i) {
    std::vector<double> nd(m, inf);
    nd[0] = std::max(dp[0], cost(i, 0));
    for (std::size_t j = 1; j < m; ++j) {
      double best = std::min({dp[j], dp[j - 1], nd[j - 1]});
      nd[j] = std::max(best, cost(i, j));
    }
    dp = std::move(nd);
  }
  return std::min(dp[m - 1], linear_alignment_cost(a, b));
}

Curve concat(const Curve& a, const Curve& b, double tol) {
  if (std::abs(a.end() - b.start()) > tol)
    throw EndpointMismatch("concat: curves do not meet");
  std::vector<double> t = a.times();
  std::vector<Cpx> p = a.points();
  double offset = a.duration();
  for (std::size_t i = 1; i < b.breakpoints(); ++i) {
    t.push_back(offset + b.times()[i]);
    p.push_back(b.points()[i]);
  }
  return Curve(std::move(t), std::move(p));
}

Curve truncate(const Curve& c, double r, double s) {
  if (!(0.0 <= r && r < s && s <= c.duration()))
    throw BadWindow("truncate: need 0 <= r < s <= duration");
  std::vector<double> t{0.0};
  std::vector<Cpx> p{c.at(r)};
  for (std::size_t i = 0; i < c.breakpoints(); ++i) {
    double ti = c.times()[i];
    if (ti > r && ti < s) {
      t.push_back(ti - r);
      p.push_back(c.points()[i]);
    }
  }
  t.push_back(s - r);
  p.push_back(c.at(s));
  return Curve(std::move(t), std::move(p));
}

Curve brownian_scale(Cpx a, const Curve& c) {
  if (std::abs(a) == 0.0) throw std::invalid_argument("brownian_scale: a != 0");
  double a2 = std::norm(a);
  std::vector<double> t(c.breakpoints());
  std::vector<Cpx> p(c.breakpoints());
  for (std::size_t i = 0; i < c.breakpoints(); ++i) {
    t[i] = a2 * c.times()[i];
    p[i] = a * c.points()[i];
  }
  return Curve(std::move(t), std::move(p));
}

Curve embed_discrete(const std::vector<PointI>& walk, double h) {
  if (walk.size() < 2)
    throw std::invalid_argument("embed_discrete: need at least one step");
  for (std::size_t i = 1; i < walk.size(); ++i) {
    PointI d = walk[i] - walk[i - 1];
    if (std::abs(d.x) + std::abs(d.y) != 1)
      throw NotNearestNeighbor("embed_discrete: step is not a lattice move");
  }
  std::vector<double> t(walk.size());
  std::vector<Cpx> p(walk.size());
  double h2 = 2.0 * h * h;
  for (std::size_t j = 0; j < walk.size(); ++j) {
    t[j] = h2 * static_cast<double>(j);
    p[j] = Cpx(walk[j].x * h, walk[j].y * h);
  }
  return Curve(std::move(t), std::move(p));
}

Curve conformal_image(const Curve& c, const harmonic::ConformalMap& f,
                      int per_piece) {
  if (per_piece < 2 || per_piece % 2 != 0)
    throw std::invalid_argument("conformal_image: per_piece even, >= 2");
  std::vector<double> t{0.0};
  std::vector<Cpx> p{f.map(c.start())};
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < c.breakpoints(); ++i) {
    double t0 = c.times()[i], t1 = c.times()[i + 1];
    // Composite Simpson for A on this linear piece, accumulated on the
    // half-step grid so the output curve is sampled twice per subinterval.
    double dt = (t1 - t0) / per_piece;
    double prev_val = std::norm(f.deriv(c.at(t0)));
    for (int k = 0; k < per_piece; ++k) {
      double ta = t0 + k * dt, tc = ta + dt;
      double tm = 0.5 * (ta + tc);
      double fm = std::norm(f.deriv(c.at(tm)));
      double fc = std::norm(f.deriv(c.at(tc)));
      if (!std::isfinite(fm) || !std::isfinite(fc))
        throw harmonic::RangeEscapesDomain("conformal_image: derivative blew up");
      double inc = dt / 6.0 * (prev_val + 4.0 * fm + fc);
      if (!(inc > 0.0) || !std::isfinite(inc))
        throw QuadratureFailure("conformal_image: nonpositive time increment");
      acc += inc;
      t.push_back(acc);
      p.push_back(f.map(c.at(tc)));
      prev_val = fc;
    }
  }
  return Curve(std::move(t), std::move(p));
}

}  // namespace excmeas::curves
