#include "excmeas/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace excmeas::measures {

void FiniteCurveMeasure::add(curves::Curve c, double w) {
  if (!(w > 0.0)) throw std::invalid_argument("measure weights must be positive");
  atoms_.push_back(std::move(c));
  weights_.push_back(w);
  mass_ += w;
}

FiniteCurveMeasure FiniteCurveMeasure::normalized() const {
  if (!(mass_ > 0.0)) throw std::logic_error("normalize: zero mass");
  return scaled(1.0 / mass_);
}

FiniteCurveMeasure FiniteCurveMeasure::scaled(double c) const {
  FiniteCurveMeasure out;
  for (std::size_t i = 0; i < atoms_.size(); ++i) out.add(atoms_[i], c * weights_[i]);
  return out;
}

FiniteCurveMeasure FiniteCurveMeasure::pushforward(
    const harmonic::ConformalMap& f) const {
  FiniteCurveMeasure out;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    out.add(curves::conformal_image(atoms_[i], f), weights_[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Prohorov, exact on small finite supports.
// ---------------------------------------------------------------------------

namespace {

struct ProhorovSetup {
  int n = 0;
  std::vector<double> w1, w2;
  std::vector<std::vector<double>> d;
};

ProhorovSetup setup(const FinitePointMeasure& m1, const FinitePointMeasure& m2,
                    const std::function<double(int, int)>& dist) {
  if (m1.weights.size() != m2.weights.size())
    throw std::invalid_argument("prohorov: measures must share the atom index set");
  ProhorovSetup s;
  s.n = static_cast<int>(m1.weights.size());
  if (s.n > 14) throw TooLarge("prohorov_exact: more than 14 support atoms");
  s.w1 = m1.weights;
  s.w2 = m2.weights;
  s.d.assign(s.n, std::vector<double>(s.n, 0.0));
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j < s.n; ++j) s.d[i][j] = i == j ? 0.0 : dist(i, j);
  return s;
}

// Largest deficit max_F [m1(F) - m2(F^eps)] for the blow-up sets F^eps
// determined by a strict radius: F^eps = {j : d(j, F) < eps}.
double worst_deficit(const ProhorovSetup& s, double eps) {
  double worst = 0.0;
  int full = 1 << s.n;
  for (int F = 1; F < full; ++F) {
    double a1 = 0.0, a2 = 0.0, b1 = 0.0, b2 = 0.0;
    // F^eps memberships
    for (int j = 0; j < s.n; ++j) {
      bool in_blow = false;
      for (int i = 0; i < s.n && !in_blow; ++i)
        if ((F >> i) & 1)
          if (s.d[i][j] < eps) in_blow = true;
      if ((F >> j) & 1) {
        a1 += s.w1[j];
        b2 += s.w2[j];
      }
      if (in_blow) {
        a2 += s.w2[j];
        b1 += s.w1[j];
      }
    }
    worst = std::max(worst, std::max(a1 - a2, b2 - b1));
  }
  return worst;
}

}  // namespace

double prohorov_exact(const FinitePointMeasure& m1, const FinitePointMeasure& m2,
                      const std::function<double(int, int)>& dist) {
  ProhorovSetup s = setup(m1, m2, dist);
  // Collect the candidate radii: 0+ and each pairwise distance. On the open
  // interval between consecutive radii the blow-up sets are constant, so the
  // optimum on that interval is max(left endpoint, worst deficit there).
  std::vector<double> radii{0.0};
  for (int i = 0; i < s.n; ++i)
    for (int j = i + 1; j < s.n; ++j) radii.push_back(s.d[i][j]);
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < radii.size(); ++k) {
    double lo = radii[k];
    double hi = (k + 1 < radii.size()) ? radii[k + 1]
                                       : std::numeric_limits<double>::infinity();
    // Representative eps just above lo: blow-up uses strict < eps, so the
    // sets on (lo, hi] include exactly the pairs with distance <= lo.
    double deficit = worst_deficit(s, std::nextafter(lo, lo + 1.0) + 0.0);
    // Need eps >= deficit and eps in (lo, hi] (eps = lo works as infimum).
    double cand = std::max(lo, deficit);
    if (cand <= hi) best = std::min(best, cand);
  }
  return best;
}

double prohorov_bisection_oracle(const FinitePointMeasure& m1,
                                 const FinitePointMeasure& m2,
                                 const std::function<double(int, int)>& dist,
                                 double tol) {
  ProhorovSetup s = setup(m1, m2, dist);
  auto feasible = [&](double eps) { return worst_deficit(s, eps) <= eps; };
  double hi = 1.0, t1 = 0.0, t2 = 0.0;
  for (int i = 0; i < s.n; ++i) { t1 += s.w1[i]; t2 += s.w2[i]; }
  hi = std::max(hi, t1 + t2);
  for (auto& row : s.d)
    for (double v : row) hi = std::max(hi, v);
  double lo = 0.0;
  if (feasible(0.0)) return 0.0;
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    if (feasible(mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

CouplingBound prohorov_coupling_bound(const std::vector<double>& dists,
                                      double dkw_level) {
  if (dists.empty()) throw NoSamples("coupling bound needs samples");
  std::vector<double> d = dists;
  std::sort(d.begin(), d.end());
  std::size_t n = d.size();
  auto fixed_point = [&](double band) {
    // tail(eps) = #{d_i >= eps}/n + band is constant on each interval
    // (d_(j-1), d_(j)]; take the smallest admissible eps over the scan.
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j <= n; ++j) {
      double lo = (j == 0) ? 0.0 : d[j - 1];
      double hi = (j == n) ? std::numeric_limits<double>::infinity() : d[j];
      double tail = static_cast<double>(n - j) / static_cast<double>(n) + band;
      double cand = std::max(lo, tail);
      if (cand <= hi) best = std::min(best, cand);
    }
    return best;
  };
  CouplingBound out;
  out.eps = fixed_point(0.0);
  double band = std::sqrt(std::log(1.0 / dkw_level) / (2.0 * static_cast<double>(n)));
  out.eps_dkw = fixed_point(band);
  return out;
}

}  // namespace excmeas::measures
