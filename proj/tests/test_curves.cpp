#include <doctest.h>

#include <cmath>

#include "excmeas/curves.hpp"

using namespace excmeas;
using namespace excmeas::curves;

namespace {

// Random piecewise-linear curve with dyadic times (exact float arithmetic in
// the concat/truncate round trips).
Curve random_curve(CounterRng& rng, int max_pts = 12, double time_span = 4.0) {
  int k = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_pts)));
  std::vector<double> t{0.0};
  std::vector<Cpx> p{{rng.uniform(-1, 1), rng.uniform(-1, 1)}};
  for (int i = 1; i < k; ++i) {
    double step = (1.0 + static_cast<double>(rng.below(63))) / 64.0;
    t.push_back(t.back() + step * time_span / max_pts);
    p.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
  }
  return Curve(std::move(t), std::move(p));
}

}  // namespace

TEST_CASE("metric dd basics") {
  Curve a({0.0, 1.0}, {Cpx(0, 0), Cpx(1, 0)});
  CHECK(metric_dd(a, a) == 0.0);
  Curve b({0.0, 2.0}, {Cpx(0, 0), Cpx(2, 0)});
  CHECK(metric_dd(a, b) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("metric dd on the duration-collapse family") {
  Curve limit({0.0, 1.0}, {Cpx(0, 0), Cpx(1, 1)});
  for (int n : {2, 5, 10, 100}) {
    Curve cn({0.0, 1.0 / n}, {Cpx(0, 0), Cpx(1, 1)});
    CHECK(metric_dd(cn, limit) == doctest::Approx(1.0 - 1.0 / n).epsilon(1e-12));
  }
}

TEST_CASE("dk upper bound never exceeds dd and vanishes on equal curves") {
  CounterRng rng(41);
  for (int i = 0; i < 200; ++i) {
    Curve a = random_curve(rng);
    Curve b = random_curve(rng);
    double dd = metric_dd(a, b);
    double dk = metric_dk_upper(a, b);
    CHECK(dk <= dd + 1e-12);
    CHECK(dk >= 0.0);
    CHECK(metric_dk_upper(a, a) == 0.0);
  }
}

TEST_CASE("dk upper bound sees through mild reparameterizations") {
  CounterRng rng(43);
  for (int i = 0; i < 40; ++i) {
    Curve a = random_curve(rng, 8, 2.0);
    // Warp each interior time by at most 2% of the duration.
    std::vector<double> t = a.times();
    double span = a.duration();
    for (std::size_t j = 1; j + 1 < t.size(); ++j) {
      double lo = t[j - 1], hi = t[j + 1];
      double w = t[j] + rng.uniform(-0.02, 0.02) * span;
      t[j] = std::clamp(w, lo + 1e-6, hi - 1e-6);
    }
    Curve b(t, a.points());
    double dk = metric_dk_upper(a, b, 3);
    CHECK(dk <= 0.05 * std::max(1e-3, a.diameter()) + 0.03 * span);
  }
}

TEST_CASE("metric equivalence chain with the oscillation bound") {
  // Arbitrary pairs satisfy the two-sided chain with the provable constant
  // (the additive term needs 2 d_K in general; pairs with strongly
  // mismatched durations exceed the single-d_K form).
  CounterRng rng(47);
  for (int i = 0; i < 200; ++i) {
    Curve a = random_curve(rng);
    Curve b = random_curve(rng);
    double dd = metric_dd(a, b);
    double dk = metric_dk_upper(a, b);
    CHECK(dk <= dd + 1e-12);
    CHECK(dd <= 2.0 * dk + b.oscillation(2.0 * dk) + 1e-9);
  }
  // In the convergence regime (one curve a small warp of the other) the
  // tighter single-d_K chain holds as well.
  for (int i = 0; i < 200; ++i) {
    Curve a = random_curve(rng, 10, 2.0);
    std::vector<double> t = a.times();
    std::vector<Cpx> p = a.points();
    double span = a.duration();
    for (std::size_t j = 1; j < t.size(); ++j) {
      if (j + 1 < t.size()) {
        double w = t[j] + rng.uniform(-0.01, 0.01) * span;
        t[j] = std::clamp(w, t[j - 1] + 1e-9, t[j + 1] - 1e-9);
      }
      p[j] += Cpx(rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01));
    }
    Curve b(t, p);
    double dd = metric_dd(a, b);
    double dk = metric_dk_upper(a, b, 3);
    CHECK(dk <= dd + 1e-12);
    CHECK(dd <= dk + b.oscillation(2.0 * dk) + 1e-9);
  }
}

TEST_CASE("dd satisfies the triangle inequality") {
  CounterRng rng(53);
  for (int i = 0; i < 100; ++i) {
    Curve a = random_curve(rng), b = random_curve(rng), c = random_curve(rng);
    CHECK(metric_dd(a, c) <= metric_dd(a, b) + metric_dd(b, c) + 1e-12);
  }
}

TEST_CASE("concat and truncate round trip") {
  Curve a({0.0, 1.0}, {Cpx(0, 0), Cpx(1, 0)});
  Curve b({0.0, 1.0}, {Cpx(1, 0), Cpx(1, 1)});
  Curve ab = concat(a, b);
  CHECK(ab.duration() == 2.0);
  CHECK(ab.at(1.5) == Cpx(1, 0.5));

  Curve first = truncate(ab, 0.0, 1.0);
  CHECK(metric_dd(first, a) == 0.0);
  Curve second = truncate(ab, 1.0, 2.0);
  CHECK(metric_dd(second, b) == 0.0);

  CHECK_THROWS_AS(concat(a, a), EndpointMismatch);
  CHECK_THROWS_AS(truncate(ab, 1.0, 0.5), BadWindow);

  CounterRng rng(59);
  for (int i = 0; i < 50; ++i) {
    Curve c = random_curve(rng);
    Curve d = random_curve(rng);
    // shift d to meet c (exact arithmetic irrelevant for positions)
    std::vector<Cpx> pd = d.points();
    Cpx off = c.end() - pd.front();
    for (auto& p : pd) p += off;
    Curve d2(d.times(), pd);
    Curve cd = concat(c, d2);
    CHECK(metric_dd(truncate(cd, 0.0, c.duration()), c) == 0.0);
    CHECK(metric_dd(truncate(cd, c.duration(), cd.duration()), d2) <= 1e-12);
  }
}

TEST_CASE("truncation distance bound") {
  CounterRng rng(61);
  for (int i = 0; i < 100; ++i) {
    Curve c = random_curve(rng, 10, 3.0);
    double t = c.duration();
    double r = rng.uniform(0.0, 0.3 * t);
    double s = rng.uniform(0.7 * t, t);
    Curve w = truncate(c, r, s);
    double bound = r + (t - s) + truncate(c, 0.0, std::max(r, 1e-9)).diameter() +
                   truncate(c, std::min(s, t - 1e-9), t).diameter();
    CHECK(metric_dk_upper(w, c, 3) <= bound + 1e-9);
  }
}

TEST_CASE("brownian scaling algebra") {
  CounterRng rng(67);
  Curve c = random_curve(rng);
  CHECK(metric_dd(brownian_scale({1, 0}, c), c) == 0.0);
  // composition, exact for powers of two
  Curve s1 = brownian_scale({0.5, 0}, brownian_scale({4.0, 0}, c));
  Curve s2 = brownian_scale({2.0, 0}, c);
  CHECK(metric_dd(s1, s2) == 0.0);
  // complex factors compose to high accuracy
  Cpx u = std::polar(1.3, 0.7), v = std::polar(0.6, -1.1);
  double d = metric_dd(brownian_scale(u, brownian_scale(v, c)),
                       brownian_scale(u * v, c));
  CHECK(d <= 1e-14);
}

TEST_CASE("scaling sandwich for the lattice maps") {
  CounterRng rng(71);
  for (int N : {2, 8, 32}) {
    Cpx a{1.0 / (2.0 * N), 0.0};
    for (int i = 0; i < 100; ++i) {
      Curve c = random_curve(rng), d = random_curve(rng);
      double dd = metric_dd(c, d);
      double scaled = metric_dd(brownian_scale(a, c), brownian_scale(a, d));
      CHECK(scaled >= dd / (4.0 * N * N) - 1e-15);
      CHECK(scaled <= dd / (2.0 * N) + 1e-15);
    }
  }
}

TEST_CASE("lattice path embedding") {
  std::vector<PointI> walk{{0, 0}, {1, 0}, {1, 1}};
  Curve c = embed_discrete(walk, 1.0);
  CHECK(c.duration() == 4.0);
  CHECK(c.at(0.0) == Cpx(0, 0));
  CHECK(c.at(1.0) == Cpx(0.5, 0.0));
  CHECK(c.at(3.0) == Cpx(1.0, 0.5));
  CHECK(c.at(4.0) == Cpx(1, 1));

  CHECK_THROWS_AS(embed_discrete({{0, 0}, {1, 1}}, 1.0), NotNearestNeighbor);
  CHECK_THROWS_AS(embed_discrete({{0, 0}}, 1.0), std::invalid_argument);

  // h = 1/(2N) reproduces the lattice scaling map applied to the unit
  // embedding, exactly.
  int N = 4;
  Curve direct = embed_discrete(walk, 1.0 / (2.0 * N));
  Curve scaled = brownian_scale({1.0 / (2.0 * N), 0.0}, embed_discrete(walk, 1.0));
  CHECK(metric_dd(direct, scaled) == 0.0);
}

TEST_CASE("embedded walks have the diffusive modulus of continuity") {
  CounterRng rng(73);
  std::vector<PointI> walk{{0, 0}};
  for (int i = 0; i < 60; ++i)
    walk.push_back(walk.back() + kNeighbors4[rng.below(4)]);
  Curve c = embed_discrete(walk, 1.0);
  for (double delta : {0.5, 1.0, 2.0, 5.0}) {
    CHECK(c.oscillation(delta) <= delta / 2.0 + 1.0 + 1e-12);
  }
}

TEST_CASE("conformal image: identity and pure scaling") {
  CounterRng rng(79);
  Curve c = random_curve(rng);
  harmonic::IdentityMap id;
  CHECK(metric_dd(conformal_image(c, id), c) <= 1e-12);

  auto two = harmonic::MobiusMap::scaling({2.0, 0.0});
  double d = metric_dd(conformal_image(c, two), brownian_scale({2.0, 0.0}, c));
  CHECK(d <= 1e-9);
}

TEST_CASE("conformal image duration equals the derivative quadrature") {
  auto f = harmonic::MobiusMap::alpha_map(0.5);
  Curve seg({0.0, 1.8}, {Cpx(-0.9, 0.0), Cpx(0.9, 0.0)});
  Curve img = conformal_image(seg, f, 64);
  GaussLegendre gl(64);
  double expect = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    double s = 0.9 * gl.nodes[i];  // position along the segment
    double w = 0.9 * gl.weights[i];
    expect += w * std::norm(f.deriv({s, 0.0}));
  }
  CHECK(img.duration() == doctest::Approx(expect).epsilon(1e-6));
  CHECK(std::abs(img.start() - f.map({-0.9, 0.0})) < 1e-12);
  CHECK(std::abs(img.end() - f.map({0.9, 0.0})) < 1e-12);
}

TEST_CASE("concatenation is continuous with slack") {
  CounterRng rng(83);
  for (int i = 0; i < 50; ++i) {
    Curve a = random_curve(rng), b0 = random_curve(rng);
    // small perturbations sharing the junction
    auto perturb = [&](const Curve& c, Cpx eps) {
      std::vector<Cpx> p = c.points();
      for (auto& q : p) q += eps;
      return Curve(c.times(), p);
    };
    std::vector<Cpx> pb = b0.points();
    Cpx off = a.end() - pb.front();
    for (auto& q : pb) q += off;
    Curve b(b0.times(), pb);
    Cpx eps{rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01)};
    Curve a2 = perturb(a, eps), b2 = perturb(b, eps);
    double lhs = metric_dd(concat(a, b), concat(a2, b2));
    double rhs = metric_dd(a, a2) + metric_dd(b, b2);
    CHECK(lhs <= 3.0 * rhs + 1e-12);
  }
}
