#include <doctest.h>

#include <cmath>

#include "excmeas/harmonic.hpp"
#include "excmeas/lattice.hpp"

using namespace excmeas;
using namespace excmeas::harmonic;

TEST_CASE("disk green function closed forms") {
  CHECK(green_disk({0, 0}, {0.5, 0}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(green_disk({0, 0}, {0.0, 0.25}) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CounterRng rng(5);
  for (int i = 0; i < 100; ++i) {
    Cpx x = std::polar(rng.uniform(0, 0.95), rng.uniform(0, kTwoPi));
    Cpx y = std::polar(rng.uniform(0, 0.95), rng.uniform(0, kTwoPi));
    if (std::abs(x - y) < 1e-3) continue;
    CHECK(green_disk(x, y) == doctest::Approx(green_disk(y, x)).epsilon(1e-12));
    CHECK(green_disk(x, y) > 0.0);
  }
  CHECK_THROWS_AS(green_disk({0.3, 0.3}, {0.3, 0.3}), CoincidentPoints);
}

TEST_CASE("poisson kernel on the disk") {
  CHECK(poisson_disk({0, 0}, 1.234) == doctest::Approx(1.0 / kTwoPi).epsilon(1e-12));
  CHECK(poisson_disk({0.5, 0}, 0.0) / poisson_disk({0.5, 0}, kPi) ==
        doctest::Approx(9.0).epsilon(1e-12));
  CounterRng rng(7);
  for (int i = 0; i < 10; ++i) {
    Cpx z = std::polar(rng.uniform(0, 0.9), rng.uniform(0, kTwoPi));
    double total = adaptive_simpson([&](double th) { return poisson_disk(z, th); },
                                    0.0, kTwoPi, 1e-11);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("excursion poisson kernel on the disk") {
  CHECK(excursion_poisson_disk(0.0, kPi) == doctest::Approx(1.0 / (4 * kPi)).epsilon(1e-12));
  CHECK(excursion_poisson_disk(0.3, 2.1) ==
        doctest::Approx(excursion_poisson_disk(2.1, 0.3)).epsilon(1e-12));
  CHECK_THROWS_AS(excursion_poisson_disk(1.0, 1.0), CoincidentPoints);
}

TEST_CASE("arc mass: quadrature equals the closed form and the frozen value") {
  AngleInterval g{0.0, kPi / 2}, u{kPi, 3 * kPi / 2};
  double closed = excursion_poisson_arcs_closed(g, u);
  double quad = excursion_poisson_arcs(g, u);
  CHECK(closed == doctest::Approx(std::log(2.0) / kPi).epsilon(1e-12));
  CHECK(quad == doctest::Approx(closed).epsilon(1e-8));

  // rotation invariance
  AngleInterval g2{1.0, 1.0 + kPi / 2}, u2{1.0 + kPi, 1.0 + 3 * kPi / 2};
  CHECK(excursion_poisson_arcs(g2, u2) == doctest::Approx(quad).epsilon(1e-8));
  CHECK_THROWS_AS(excursion_poisson_arcs({0, 1}, {0.5, 2}), ArcsOverlap);
}

TEST_CASE("kernel sandwich over random arc pairs") {
  CounterRng rng(11);
  for (int i = 0; i < 50; ++i) {
    double l1 = rng.uniform(0.05, 1.2), l2 = rng.uniform(0.05, 1.2);
    double gap1 = rng.uniform(0.05, 1.0);
    double start = rng.uniform(0, kTwoPi);
    AngleInterval g{start, start + l1};
    AngleInterval u{start + l1 + gap1, start + l1 + gap1 + l2};
    if (l1 + l2 + gap1 >= kTwoPi - 0.05) continue;
    auto geo = sep_spr(g, u);
    double H = excursion_poisson_arcs(g, u, 1e-9);
    double lower = l1 * l2 / (kTwoPi * (1.0 - std::cos(geo.spr)));
    double upper = l1 * l2 / (kTwoPi * (1.0 - std::cos(geo.sep)));
    CHECK(H >= lower - 1e-9);
    CHECK(H <= upper + 1e-9);
  }
}

TEST_CASE("separation and spread") {
  auto geo = sep_spr({0.0, kPi / 2}, {kPi, 3 * kPi / 2});
  CHECK(geo.sep == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(geo.spr == doctest::Approx(kPi).epsilon(1e-12));

  // antipodal point-like arcs
  auto tiny = sep_spr({-1e-6, 1e-6}, {kPi - 1e-6, kPi + 1e-6});
  CHECK(tiny.sep == doctest::Approx(kPi).epsilon(1e-4));
  CHECK(tiny.spr == doctest::Approx(kPi).epsilon(1e-4));
  CHECK(tiny.spr / tiny.sep == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(geo.sep <= geo.spr);
  CHECK(geo.spr <= kPi + 1e-15);
}

TEST_CASE("partition drives the spread/separation ratio to 1") {
  AngleInterval g{0.0, kPi / 2}, u{kPi, 3 * kPi / 2};
  auto part = partition_for_ratio(g, u, 0.1);
  for (auto& gi : part.gamma_parts)
    for (auto& uj : part.upsilon_parts) {
      auto geo = sep_spr(gi, uj);
      CHECK((1.0 - std::cos(geo.spr)) / (1.0 - std::cos(geo.sep)) <= 1.1 + 1e-12);
    }
  double total_g = 0.0;
  for (auto& gi : part.gamma_parts) total_g += gi.length();
  CHECK(total_g == doctest::Approx(g.length()).epsilon(1e-12));
}

TEST_CASE("spread-separation ratio is linear in shrinking arc lengths") {
  double gap = 1.0;
  auto ratio_minus_1 = [&](double L) {
    auto geo = sep_spr({0.0, L}, {L + gap, 2 * L + gap});
    return (1.0 - std::cos(geo.spr)) / (1.0 - std::cos(geo.sep)) - 1.0;
  };
  double Lmax = 0.4;
  double C = ratio_minus_1(Lmax) / (2 * Lmax);
  for (double L : {0.2, 0.1, 0.05, 0.02}) {
    CHECK(ratio_minus_1(L) <= C * 2 * L + 1e-12);
  }
}

TEST_CASE("moebius maps: construction and covariance") {
  auto f = MobiusMap::alpha_map(0.3);
  CHECK(std::abs(f.map({1, 0}) - Cpx(1, 0)) < 1e-14);
  CHECK(std::abs(f.map({-1, 0}) - Cpx(-1, 0)) < 1e-14);
  // oneprop: |f'(1)| |f'(-1)| = 1
  for (double alpha : {0.1, 0.3, 0.5, 0.85}) {
    auto fa = MobiusMap::alpha_map(alpha);
    CHECK(std::abs(fa.deriv({1, 0})) * std::abs(fa.deriv({-1, 0})) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  // inverse round trip
  CounterRng rng(3);
  for (int i = 0; i < 50; ++i) {
    Cpx z = std::polar(rng.uniform(0, 0.95), rng.uniform(0, kTwoPi));
    CHECK(std::abs(f.inverse(f.map(z)) - z) < 1e-12);
  }
}

TEST_CASE("poisson kernel conformal covariance") {
  auto f = MobiusMap::alpha_map(0.3);
  CounterRng rng(13);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Cpx z = std::polar(rng.uniform(0, 0.85), rng.uniform(0, kTwoPi));
    double th = rng.uniform(0, kTwoPi);
    Cpx y = std::polar(1.0, th);
    Cpx fy = f.map(y);
    double lhs = poisson_disk(z, th);
    double rhs = std::abs(f.deriv(y)) * poisson_disk(f.map(z), std::arg(fy));
    worst = std::max(worst, std::fabs(lhs - rhs) / rhs);
  }
  CHECK(worst <= 1e-9);

  // rotation leaves the kernel unchanged
  auto r = MobiusMap::rotation(0.7);
  Cpx z{0.3, 0.2};
  CHECK(std::fabs(poisson_disk(z, 1.1) -
                  poisson_disk(r.map(z), 1.1 + 0.7)) < 1e-12);

  // scaling: r H_{rD}(rx, ry) = H_D(x, y), r^2 for the excursion kernel
  double scale = 2.0;
  Cpx x{0.4, -0.1};
  Cpx w = std::polar(1.0, 2.0);
  CHECK(scale * poisson_disk_radius(scale, scale * x, scale * w) ==
        doctest::Approx(poisson_disk(x, 2.0)).epsilon(1e-12));
  Cpx w2 = std::polar(1.0, 4.0);
  CHECK(scale * scale * excursion_poisson_disk_radius(scale, scale * w, scale * w2) ==
        doctest::Approx(excursion_poisson_disk(2.0, 4.0)).epsilon(1e-12));
}

TEST_CASE("excursion kernel conformal covariance under a moebius map") {
  auto f = MobiusMap::alpha_map(0.4);
  CounterRng rng(17);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    double t1 = rng.uniform(0, kTwoPi);
    double t2 = rng.uniform(0, kTwoPi);
    if (circle_distance(t1, t2) < 0.2) continue;
    Cpx x = std::polar(1.0, t1), y = std::polar(1.0, t2);
    double lhs = excursion_poisson_disk(t1, t2);
    double rhs = std::abs(f.deriv(x)) * std::abs(f.deriv(y)) *
                 excursion_poisson_disk(std::arg(f.map(x)), std::arg(f.map(y)));
    worst = std::max(worst, std::fabs(lhs - rhs) / rhs);
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("moebius fixing a boundary point moves interior points as asked") {
  Cpx w = std::polar(1.0, 0.8);
  Cpx a{0.2, 0.1}, b{0.5, -0.3};
  auto f = MobiusMap::fixing_boundary_point(w, a, b);
  CHECK(std::abs(f.map(w) - w) < 1e-10);
  CHECK(std::abs(f.map(a) - b) < 1e-10);
  // stays an automorphism of the disk
  CounterRng rng(19);
  for (int i = 0; i < 40; ++i) {
    Cpx z = std::polar(1.0, rng.uniform(0, kTwoPi));
    CHECK(std::abs(std::abs(f.map(z)) - 1.0) < 1e-10);
  }
}

TEST_CASE("log series estimate") {
  CounterRng rng(23);
  for (int i = 0; i < 1000; ++i) {
    Cpx z = std::polar(rng.uniform(0, 0.5), rng.uniform(0, kTwoPi));
    CHECK(std::abs(std::log(Cpx(1, 0) + z) - z) <= 0.5 * std::abs(z) + 1e-15);
  }
}

TEST_CASE("disk-to-square map") {
  DiskToSquareMap F;
  // Known corner-scale: integral of (1+t^4)^{-1/2} over [0,1].
  double S1 = adaptive_simpson(
      [](double t) { return 1.0 / std::sqrt(1.0 + t * t * t * t); }, 0.0, 1.0,
      1e-13);
  CHECK(F.corner_scale() == doctest::Approx(S1).epsilon(1e-10));
  CHECK(std::abs(F.map({0, 0})) < 1e-14);
  // Boundary midpoints map to edge midpoints; prevertex directions to corners.
  Cpx mid = F.map({1.0, 0.0});
  CHECK(mid.real() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::fabs(mid.imag()) < 1e-10);
  // the image is inside the closed square
  CounterRng rng(29);
  for (int i = 0; i < 200; ++i) {
    Cpx z = std::polar(rng.uniform(0, 0.98), rng.uniform(0, kTwoPi));
    Cpx wv = F.map(z);
    CHECK(std::fabs(wv.real()) <= 1.0 + 1e-9);
    CHECK(std::fabs(wv.imag()) <= 1.0 + 1e-9);
    CHECK(std::abs(F.inverse(wv) - z) < 1e-8);
  }
}

TEST_CASE("rectangle green function series vs grid solve") {
  // Rectangle (-1,1) x (-11/17, 11/17) realized exactly as a block of
  // squares with spacing 2/17.
  std::vector<PointI> cells;
  for (int x = -8; x <= 8; ++x)
    for (int y = -5; y <= 5; ++y) cells.push_back({x, y});
  auto A = lattice::LatticeDomain::from_points(cells, Rational(2, 17));
  auto R = lattice::union_of_squares(A);
  double hx = 1.0, hy = 11.0 / 17.0;
  Cpx q{0.31, -0.12};
  auto field = HarmonicField::solve(
      R, [&](Cpx z) { return std::log(std::abs(z - q)); }, 16, 1e-11);
  for (Cpx p : {Cpx(-0.4, 0.3), Cpx(0.1, 0.35), Cpx(-0.7, -0.25)}) {
    double g_grid = field.value(p) - std::log(std::abs(p - q));
    double g_series = green_rectangle(hx, hy, p, q);
    CHECK(g_grid == doctest::Approx(g_series).epsilon(2e-4));
  }
  // symmetry of the series
  CHECK(green_rectangle(hx, hy, {0.2, 0.1}, {-0.3, 0.2}) ==
        doctest::Approx(green_rectangle(hx, hy, {-0.3, 0.2}, {0.2, 0.1}))
            .epsilon(1e-9));
}

TEST_CASE("numeric riemann map of the unit cell square") {
  auto A = lattice::LatticeDomain::from_points({{0, 0}});
  auto R = lattice::union_of_squares(A);
  GridMap gm8(R, 8);
  GridMap gm16(R, 16);
  // mesh consistency of f'(0)
  CHECK(std::fabs(gm8.deriv_at_origin() - gm16.deriv_at_origin()) /
            gm16.deriv_at_origin() <=
        0.01);
  // cross-route: the square (-1/2,1/2)^2 is the disk-to-square image scaled
  // by 1/2, so f'(0) should equal 2 * corner_scale.
  DiskToSquareMap F;
  CHECK(gm16.deriv_at_origin() ==
        doctest::Approx(2.0 * F.corner_scale()).epsilon(0.01));
  // |f| = 1 on the boundary itself (Dirichlet data), and approaches 1 from
  // inside along the edge normals.
  for (double t : {-0.4375, -0.25, 0.0, 0.125, 0.4375}) {
    CHECK(std::abs(gm16.map({0.5, t})) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(std::abs(gm16.map({t, -0.5})) == doctest::Approx(1.0).epsilon(1e-3));
  }
  double g_seq[3];
  int gi = 0;
  for (double d : {0.125, 0.0625, 0.03125})
    g_seq[gi++] = gm16.green({0.5 - d, 0.0});
  CHECK(g_seq[0] > g_seq[1]);
  CHECK(g_seq[1] > g_seq[2]);
  CHECK(g_seq[2] <= 0.1);
  // g positive inside, theta winds once around the boundary
  CHECK(gm16.green({0.2, 0.1}) > 0.0);
  CHECK(gm16.conjugate_defect() <= 1e-6);
  const auto& ct = gm16.corner_thetas();
  double wind = 0.0;
  for (std::size_t i = 0; i < ct.size(); ++i) {
    double d = ct[(i + 1) % ct.size()] - ct[i];
    while (d < -kPi) d += kTwoPi;
    while (d > kPi) d -= kTwoPi;
    wind += d;
  }
  CHECK(std::fabs(std::fabs(wind) - kTwoPi) < 1e-6);
}

TEST_CASE("numeric riemann map of a disk approximation is near the identity") {
  auto D = lattice::JordanDomainSpec::unit_disk();
  auto A = lattice::discretize(D, 32);
  auto R = lattice::union_of_squares(A);
  GridMap gm(R);
  double worst = 0.0;
  for (int k = 0; k < 64; ++k) {
    Cpx z = std::polar(0.5, kTwoPi * k / 64);
    worst = std::max(worst, std::abs(gm.inverse(z) - z));
  }
  CHECK(worst <= 0.05);
}
