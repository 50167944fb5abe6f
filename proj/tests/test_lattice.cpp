#include <doctest.h>

#include <algorithm>
#include <set>

#include "excmeas/lattice.hpp"

using namespace excmeas;
using namespace excmeas::lattice;

TEST_CASE("boundaries of the single-cell domain") {
  auto A = LatticeDomain::from_points({{0, 0}});
  auto& b = A.boundaries();
  CHECK(b.outer.size() == 4);
  CHECK(b.inner.size() == 1);
  CHECK(b.edges.size() == 4);
  std::set<std::pair<int, int>> outer;
  for (auto p : b.outer) outer.insert({p.x, p.y});
  CHECK(outer == std::set<std::pair<int, int>>{{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
}

TEST_CASE("boundaries of the domino and the 3x3 block") {
  auto D = LatticeDomain::from_points({{0, 0}, {1, 0}});
  CHECK(D.boundaries().outer.size() == 6);
  CHECK(D.boundaries().inner.size() == 2);
  CHECK(D.boundaries().edges.size() == 6);

  std::vector<PointI> blk;
  for (int x = -1; x <= 1; ++x)
    for (int y = -1; y <= 1; ++y) blk.push_back({x, y});
  auto B = LatticeDomain::from_points(blk);
  CHECK(B.boundaries().outer.size() == 12);
  CHECK(B.boundaries().inner.size() == 8);  // everything but the center
  for (auto p : B.boundaries().inner) CHECK(!(p.x == 0 && p.y == 0));
}

TEST_CASE("connectivity validation") {
  CHECK_THROWS_AS(LatticeDomain::from_points({{0, 0}, {2, 0}}), NotSimplyConnected);
  // Ring with a hole.
  std::vector<PointI> ring;
  for (int x = -1; x <= 1; ++x)
    for (int y = -1; y <= 1; ++y)
      if (!(x == 0 && y == 0)) ring.push_back({x, y});
  CHECK_THROWS_AS(LatticeDomain::from_points(ring), NotSimplyConnected);
}

TEST_CASE("union of squares for small sets") {
  auto A = LatticeDomain::from_points({{0, 0}});
  auto R = union_of_squares(A);
  CHECK(R.boundary_vertices().size() == 4);
  CHECK(R.area() == doctest::Approx(1.0));
  CHECK(R.contains({0.49, 0.49}));
  CHECK(!R.contains({0.51, 0.0}));

  auto D = union_of_squares(LatticeDomain::from_points({{0, 0}, {1, 0}}));
  CHECK(D.contains({1.49, 0.3}));
  CHECK(D.contains({0.5, 0.0}));  // interior shared edge
  CHECK(!D.contains({-0.51, 0.0}));
  CHECK(D.area() == doctest::Approx(2.0));

  std::vector<PointI> blk;
  for (int x = -1; x <= 1; ++x)
    for (int y = -1; y <= 1; ++y) blk.push_back({x, y});
  auto B = union_of_squares(LatticeDomain::from_points(blk));
  CHECK(B.area() == doctest::Approx(9.0));
  CHECK(B.boundary_vertices().size() == 12);  // 3x3 square outline: 4 corners + 8 edge joints
}

TEST_CASE("discretize the unit disk at small N") {
  auto D = JordanDomainSpec::unit_disk();
  CHECK_THROWS_AS(discretize(D, 1), EmptyDomain);
  auto D2 = discretize(D, 2);
  CHECK(D2.size() == 1);
  CHECK(D2.contains({0, 0}));
  CHECK(D2.spacing() == Rational(1, 2));
}

TEST_CASE("discretize the square at N = 4") {
  auto D = JordanDomainSpec::square();
  auto D4 = discretize(D, 4);
  // 5x5 grid of cells with |coordinate| <= 2 (scaled: {-1/2..1/2} step 1/4).
  CHECK(D4.size() == 25);
  for (int x = -2; x <= 2; ++x)
    for (int y = -2; y <= 2; ++y) CHECK(D4.contains({x, y}));
}

TEST_CASE("polygon discretization matches the square via exact predicates") {
  auto P = JordanDomainSpec::polygon(
      {{Rational(-1, 1), Rational(-1, 1)},
       {Rational(1, 1), Rational(-1, 1)},
       {Rational(1, 1), Rational(1, 1)},
       {Rational(-1, 1), Rational(1, 1)}});
  auto A = discretize(P, 4);
  CHECK(A.size() == 25);
  auto B = discretize(JordanDomainSpec::square(), 4);
  CHECK(A.size() == B.size());
  for (auto p : B.points()) CHECK(A.contains(p));
}

TEST_CASE("boundary distance constants for sample domains") {
  const double c1 = 2.0 * std::sqrt(2.0) + 1.0 / std::sqrt(2.0);
  const double c2 = std::sqrt(2.0) + 1.0 / std::sqrt(2.0);
  const double c3 = 2.0 * std::sqrt(2.0);
  for (auto shape : {JordanDomainSpec::unit_disk(), JordanDomainSpec::square(),
                     JordanDomainSpec::radial_graph(0.15, 3)}) {
    for (int N : {2, 4, 8, 16, 32}) {
      LatticeDomain A = [&] {
        try {
          return discretize(shape, N);
        } catch (const EmptyDomain&) {
          return LatticeDomain::from_points({{0, 0}}, Rational(1, N));
        }
      }();
      if (A.size() < 2 && N > 2) continue;
      double h = 1.0 / N;
      auto dist_bd = [&](Cpx z) { return shape.dist_to_boundary(z); };
      for (auto p : A.boundaries().inner) {
        Cpx z{p.x * h, p.y * h};
        CHECK(dist_bd(z) <= c1 * h + 1e-12);
      }
      for (auto p : A.boundaries().outer) {
        Cpx z{p.x * h, p.y * h};
        CHECK(dist_bd(z) <= c2 * h + 1e-12);
      }
      auto R = union_of_squares(A);
      for (auto v : R.boundary_vertices()) {
        CHECK(dist_bd(v) <= c3 * h + 1e-12);
        CHECK(shape.contains(v));  // cl(D~_N) inside D
      }
    }
  }
}

TEST_CASE("discretized domains are simply connected with interior origin") {
  for (auto shape : {JordanDomainSpec::unit_disk(), JordanDomainSpec::square()}) {
    for (int N : {4, 8, 16}) {
      auto A = discretize(shape, N);
      CHECK(A.contains_origin());
      CHECK(is_simply_connected(A.points()));
      double inr = A.inradius();
      CHECK(inr <= N);
      CHECK(inr >= 0.2 * N);  // domain-dependent lower bound, loose
    }
  }
}

TEST_CASE("text and json exports") {
  auto A = LatticeDomain::from_points({{0, 0}, {1, 0}});
  auto grid = to_text_grid(A);
  CHECK(grid == "##\n");
  auto js = to_json_points(A);
  CHECK(js.find("\"points\":[[0,0],[1,0]]") != std::string::npos);
}
