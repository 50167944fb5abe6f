#include <doctest.h>

#include <cmath>
#include <map>

#include "excmeas/walk.hpp"

using namespace excmeas;
using namespace excmeas::lattice;
using namespace excmeas::walk;

namespace {

LatticeDomain block3() {
  std::vector<PointI> pts;
  for (int x = -1; x <= 1; ++x)
    for (int y = -1; y <= 1; ++y) pts.push_back({x, y});
  return LatticeDomain::from_points(pts);
}

LatticeDomain block5() {
  std::vector<PointI> pts;
  for (int x = -2; x <= 2; ++x)
    for (int y = -2; y <= 2; ++y) pts.push_back({x, y});
  return LatticeDomain::from_points(pts);
}

}  // namespace

TEST_CASE("potential kernel values and symmetry") {
  PotentialKernelTable pk(12);
  CHECK(pk.a({0, 0}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::fabs(pk.a({1, 0}) - 1.0) < 1e-6);
  CHECK(std::fabs(pk.a({1, 1}) - 4.0 / kPi) < 1e-6);
  CHECK(std::fabs(pk.k0() - 1.0293737056545707) < 1e-14);
  // dihedral symmetry
  for (PointI p : {PointI{3, 1}, PointI{5, 2}, PointI{7, 0}}) {
    double v = pk.a(p);
    CHECK(pk.a({p.y, p.x}) == doctest::Approx(v).epsilon(1e-12));
    CHECK(pk.a({-p.x, p.y}) == doctest::Approx(v).epsilon(1e-12));
    CHECK(pk.a({p.x, -p.y}) == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("potential kernel discrete harmonicity") {
  PotentialKernelTable pk(32);
  double worst = 0.0;
  for (int x = -31; x <= 31; ++x)
    for (int y = -31; y <= 31; ++y) {
      if (x * x + y * y > 31 * 31) continue;
      double avg = 0.25 * (pk.a({x + 1, y}) + pk.a({x - 1, y}) +
                           pk.a({x, y + 1}) + pk.a({x, y - 1}));
      double target = (x == 0 && y == 0) ? 1.0 : pk.a({x, y});
      worst = std::max(worst, std::fabs(avg - target));
    }
  CHECK(worst <= 1e-8);
}

TEST_CASE("green function on tiny domains") {
  auto A = LatticeDomain::from_points({{0, 0}});
  auto G = green_matrix(A);
  CHECK(G[0] == doctest::Approx(1.0).epsilon(1e-12));

  auto B = block3();
  auto GB = green_matrix(B);
  int c = B.index_of({0, 0});
  CHECK(GB[static_cast<std::size_t>(c) * B.size() + c] ==
        doctest::Approx(1.5).epsilon(1e-10));
  // symmetry and positivity
  for (std::size_t i = 0; i < B.size(); ++i)
    for (std::size_t j = 0; j < B.size(); ++j) {
      CHECK(GB[i * B.size() + j] == doctest::Approx(GB[j * B.size() + i]).epsilon(1e-10));
      CHECK(GB[i * B.size() + j] >= 0.0);
    }
}

TEST_CASE("potential kernel identity E[a(S_tau)] - a(x) = G(x)") {
  PotentialKernelTable pk(8);
  for (auto& A : {LatticeDomain::from_points({{0, 0}}), block3()}) {
    auto ks = compute_kernels(A);
    const auto& bd = A.boundaries().outer;
    int i0 = A.index_of({0, 0});
    double expect = 0.0;
    for (std::size_t j = 0; j < bd.size(); ++j)
      expect += ks.h_at(i0, static_cast<int>(j)) * pk.a(bd[j]);
    CHECK(expect == doctest::Approx(ks.green0[static_cast<std::size_t>(i0)])
                        .epsilon(5e-6));
  }
}

TEST_CASE("harmonic measure rows") {
  auto A = LatticeDomain::from_points({{0, 0}});
  auto ks = compute_kernels(A);
  for (std::size_t j = 0; j < 4; ++j)
    CHECK(ks.h_at(0, static_cast<int>(j)) == doctest::Approx(0.25).epsilon(1e-12));

  auto B = block5();
  auto kb = compute_kernels(B);
  for (std::size_t i = 0; i < B.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < kb.nbd; ++j) row += kb.h_at(static_cast<int>(i), static_cast<int>(j));
    CHECK(row == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("harmonic measure respects the dihedral symmetry on the 3x3 block") {
  auto B = block3();
  auto ks = compute_kernels(B);
  int i0 = B.index_of({0, 0});
  const auto& bd = B.boundaries().outer;
  std::map<int, double> by_orbit;  // orbit key: (max(|x|,|y|), min(|x|,|y|))
  for (std::size_t j = 0; j < bd.size(); ++j) {
    int ax = std::abs(bd[j].x), ay = std::abs(bd[j].y);
    int key = std::max(ax, ay) * 10 + std::min(ax, ay);
    double v = ks.h_at(i0, static_cast<int>(j));
    if (by_orbit.count(key))
      CHECK(v == doctest::Approx(by_orbit[key]).epsilon(1e-10));
    else
      by_orbit[key] = v;
  }
  CHECK(by_orbit.size() == 2);  // axis orbit and diagonal-adjacent orbit
}

TEST_CASE("excursion kernel on the single cell") {
  auto A = LatticeDomain::from_points({{0, 0}});
  auto ks = compute_kernels(A);
  int e = A.boundary_index_of({1, 0});
  int n = A.boundary_index_of({0, 1});
  CHECK(ks.hbd_at(e, n) == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
  CHECK(ks.hbd_at(e, e) == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
  double row = 0.0;
  for (std::size_t j = 0; j < 4; ++j) row += ks.hbd_at(e, static_cast<int>(j));
  CHECK(row == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("excursion kernel symmetry and first-step identity") {
  auto B = block5();
  auto ks = compute_kernels(B);
  for (std::size_t i = 0; i < ks.nbd; ++i)
    for (std::size_t j = 0; j < ks.nbd; ++j)
      CHECK(ks.hbd_at(static_cast<int>(i), static_cast<int>(j)) ==
            doctest::Approx(ks.hbd_at(static_cast<int>(j), static_cast<int>(i)))
                .epsilon(1e-9));
  const auto& bd = B.boundaries().outer;
  double total = 0.0, expect = 0.0;
  for (std::size_t i = 0; i < ks.nbd; ++i) {
    for (std::size_t j = 0; j < ks.nbd; ++j)
      total += ks.hbd_at(static_cast<int>(i), static_cast<int>(j));
    int nbrs = 0;
    for (auto d : kNeighbors4)
      if (B.contains(bd[i] + d)) ++nbrs;
    expect += nbrs / 4.0;
  }
  CHECK(total == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("excursion mass per spec examples") {
  auto A = LatticeDomain::from_points({{0, 0}});
  auto ks = compute_kernels(A);
  std::vector<int> g{A.boundary_index_of({1, 0})};
  std::vector<int> rest;
  for (int j = 0; j < 4; ++j)
    if (j != g[0]) rest.push_back(j);
  CHECK(ks.mass(g, {A.boundary_index_of({0, 1})}) ==
        doctest::Approx(1.0 / 16.0).epsilon(1e-12));
  CHECK(ks.mass(g, rest) == doctest::Approx(3.0 / 16.0).epsilon(1e-12));
}

TEST_CASE("enumeration on the single cell") {
  auto A = LatticeDomain::from_points({{0, 0}});
  auto& bd = A.boundaries().outer;
  auto res = enumerate_excursions(A, {bd.begin(), bd.end()},
                                  {bd.begin(), bd.end()}, 12);
  CHECK(res.listing_complete);
  CHECK(res.paths.size() == 16);
  for (auto& p : res.paths) CHECK(p.size() == 3);
  CHECK(res.mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.tail_bound == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("enumeration mass brackets the linear solve") {
  auto B = LatticeDomain::from_points({{0, 0}, {1, 0}});
  auto ks = compute_kernels(B);
  std::vector<PointI> west{{-1, 0}}, east{{2, 0}};
  auto res = enumerate_excursions(B, west, east, 40);
  double exact = ks.mass({B.boundary_index_of(west[0])},
                         {B.boundary_index_of(east[0])});
  CHECK(res.mass <= exact + 1e-14);
  CHECK(exact <= res.mass + res.tail_bound + 1e-14);
  CHECK(res.tail_bound <= 1e-6);

  auto none = enumerate_excursions(B, {}, east, 20);
  CHECK(none.paths.empty());
  CHECK(none.mass == 0.0);
}

TEST_CASE("enumeration guards") {
  auto B = block5();
  CHECK_THROWS_AS(enumerate_excursions(B, {}, {}, 10), TooLarge);
  auto A = LatticeDomain::from_points({{0, 0}});
  CHECK_THROWS_AS(enumerate_excursions(A, {}, {}, 60), TooLarge);
}

TEST_CASE("conditioned excursion: forced path") {
  auto A = LatticeDomain::from_points({{0, 0}});
  KilledWalkSolver solver(A);
  ConditionedExcursionSampler sampler(solver, {{0, 1}});
  CounterRng rng(11);
  for (int i = 0; i < 32; ++i) {
    auto path = sampler.sample({1, 0}, rng);
    REQUIRE(path.size() == 3);
    CHECK(path[0] == PointI{1, 0});
    CHECK(path[1] == PointI{0, 0});
    CHECK(path[2] == PointI{0, 1});
  }
}

TEST_CASE("conditioned excursion endpoints always land in the target set") {
  auto B = block5();
  KilledWalkSolver solver(B);
  std::vector<PointI> ups{{3, 0}, {3, 1}, {3, -1}};
  ConditionedExcursionSampler sampler(solver, ups);
  CounterRng rng(17);
  for (int i = 0; i < 10000; ++i) {
    auto path = sampler.sample({-3, 0}, rng);
    bool ok = false;
    for (auto u : ups) ok = ok || path.back() == u;
    CHECK(ok);
    for (std::size_t j = 1; j + 1 < path.size(); ++j)
      CHECK(B.contains(path[j]));
  }
}

TEST_CASE("conditioned excursion endpoint frequencies match the kernel") {
  auto B = block5();
  KilledWalkSolver solver(B);
  auto ks = compute_kernels(B);
  const auto& bd = B.boundaries().outer;
  std::vector<PointI> ups;
  for (auto p : bd)
    if (p.x == 3) ups.push_back(p);
  ConditionedExcursionSampler sampler(solver, ups);
  PointI x{-3, 0};
  std::map<std::uint64_t, int> counts;
  CounterRng rng(23);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    auto path = sampler.sample(x, rng);
    counts[point_key(path.back())]++;
  }
  int bx = B.boundary_index_of(x);
  double mass = 0.0;
  std::vector<double> probs;
  for (auto u : ups) {
    probs.push_back(ks.hbd_at(bx, B.boundary_index_of(u)));
    mass += probs.back();
  }
  double chi2 = 0.0;
  for (std::size_t j = 0; j < ups.size(); ++j) {
    double expect = n * probs[j] / mass;
    double obs = counts[point_key(ups[j])];
    chi2 += (obs - expect) * (obs - expect) / expect;
  }
  double p = chi_square_tail(chi2, static_cast<double>(ups.size() - 1));
  CHECK(p > 1e-3);
}

TEST_CASE("monte carlo harmonic measure agrees with the solver") {
  auto B = block5();
  auto ks = compute_kernels(B);
  const auto& bd = B.boundaries().outer;
  const int n = 1000000;
  std::vector<int> counts(bd.size(), 0);
  CounterRng rng(31);
  for (int i = 0; i < n; ++i) {
    PointI p{0, 0};
    while (B.contains(p)) {
      auto d = kNeighbors4[rng.below(4)];
      p = p + d;
    }
    counts[static_cast<std::size_t>(B.boundary_index_of(p))]++;
  }
  int i0 = B.index_of({0, 0});
  for (std::size_t j = 0; j < bd.size(); ++j) {
    double expect = ks.h_at(i0, static_cast<int>(j));
    double se = std::sqrt(expect * (1 - expect) / n);
    CHECK(std::fabs(counts[j] / static_cast<double>(n) - expect) <= 4.0 * se);
  }
}

TEST_CASE("interior core mask uses the stated threshold") {
  std::vector<double> g{0.9, 0.85, 0.2, 0.05};
  auto mask = DiscreteKernelSet::core_mask(g, 16.0);  // threshold 16^{-1/16} = 0.841
  CHECK(mask == std::vector<char>{1, 1, 0, 0});
}
