#include "excmeas/walk.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>

namespace excmeas::walk {

using lattice::LatticeDomain;

// ---------------------------------------------------------------------------
// Potential kernel.
// ---------------------------------------------------------------------------

PotentialKernelTable::PotentialKernelTable(int radius) {
  if (radius < 1) throw std::invalid_argument("potential_kernel: radius >= 1");
  radius_ = radius;
  // Box half-width 3r: the boundary-data error (~|x|^-2, oscillating) decays
  // like (rho/box)^4 toward the center, comfortably below 1e-6 at |x| <= r.
  box_ = 3 * radius;
  int n = 2 * box_ + 1;
  vals_.assign(static_cast<std::size_t>(n) * n, 0.0);

  // Interior unknowns: everything strictly inside the box. Equation
  // a(x) - (1/4) sum a(nbr) = -delta_0, boundary Dirichlet from the
  // logarithmic expansion.
  int inner = 2 * box_ - 1;
  auto id = [&](int x, int y) { return (y + box_ - 1) * inner + (x + box_ - 1); };
  using SpMat = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(inner) * inner * 5);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(inner) * inner);
  rhs.setZero();
  auto bdata = [&](int x, int y) {
    double r = std::hypot(static_cast<double>(x), static_cast<double>(y));
    return (2.0 / kPi) * std::log(r) + kPotentialK0;
  };
  for (int y = -box_ + 1; y <= box_ - 1; ++y)
    for (int x = -box_ + 1; x <= box_ - 1; ++x) {
      int row = id(x, y);
      trip.emplace_back(row, row, 1.0);
      for (auto d : kNeighbors4) {
        int nx = x + d.x, ny = y + d.y;
        if (std::abs(nx) == box_ || std::abs(ny) == box_)
          rhs(row) += 0.25 * bdata(nx, ny);
        else
          trip.emplace_back(row, id(nx, ny), -0.25);
      }
      if (x == 0 && y == 0) rhs(row) += -1.0;
    }
  SpMat M(static_cast<Eigen::Index>(inner) * inner,
          static_cast<Eigen::Index>(inner) * inner);
  M.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<SpMat> fact(M);
  if (fact.info() != Eigen::Success)
    throw SolverFailure("potential_kernel: factorization failed");
  Eigen::VectorXd sol = fact.solve(rhs);
  double shift = sol(id(0, 0));
  for (int y = -box_; y <= box_; ++y)
    for (int x = -box_; x <= box_; ++x) {
      double v = (std::abs(x) == box_ || std::abs(y) == box_)
                     ? bdata(x, y)
                     : sol(id(x, y));
      at(x, y) = v - shift;
    }
}

double PotentialKernelTable::a(PointI p) const {
  double r2 = static_cast<double>(p.x) * p.x + static_cast<double>(p.y) * p.y;
  if (r2 > static_cast<double>(radius_) * radius_ + 0.5)
    throw std::out_of_range("potential_kernel: point outside tabulated radius");
  return get(p.x, p.y);
}

double PotentialKernelTable::k(PointI p) const {
  if (p.x == 0 && p.y == 0) throw std::domain_error("k_x undefined at origin");
  double r = std::hypot(static_cast<double>(p.x), static_cast<double>(p.y));
  return kPotentialK0 + (2.0 / kPi) * std::log(r) - a(p);
}

// ---------------------------------------------------------------------------
// Killed-walk solver.
// ---------------------------------------------------------------------------

struct KilledWalkSolver::Impl {
  bool dense = false;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Eigen::SparseMatrix<double> M;  // kept for residual checks
  Eigen::MatrixXd Md;
};

KilledWalkSolver::~KilledWalkSolver() = default;
KilledWalkSolver::KilledWalkSolver(KilledWalkSolver&&) noexcept = default;

KilledWalkSolver::KilledWalkSolver(const LatticeDomain& A)
    : A_(std::make_shared<LatticeDomain>(A)), impl_(std::make_unique<Impl>()) {
  const auto& pts = A_->points();
  Eigen::Index n = static_cast<Eigen::Index>(pts.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(pts.size() * 5);
  for (Eigen::Index i = 0; i < n; ++i) {
    trip.emplace_back(i, i, 1.0);
    for (auto d : kNeighbors4) {
      int j = A_->index_of(pts[i] + d);
      if (j >= 0) trip.emplace_back(i, j, -0.25);
    }
  }
  impl_->M.resize(n, n);
  impl_->M.setFromTriplets(trip.begin(), trip.end());
  impl_->dense = pts.size() <= 4000;
  if (impl_->dense) {
    impl_->Md = Eigen::MatrixXd(impl_->M);
    impl_->lu.compute(impl_->Md);
  } else {
    impl_->ldlt.compute(impl_->M);
    if (impl_->ldlt.info() != Eigen::Success)
      throw SolverFailure("killed-walk factorization failed");
  }
}

std::vector<double> KilledWalkSolver::solve(const std::vector<double>& rhs) const {
  Eigen::Index n = static_cast<Eigen::Index>(A_->size());
  if (static_cast<Eigen::Index>(rhs.size()) != n)
    throw std::invalid_argument("solve: rhs size mismatch");
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n);
  Eigen::VectorXd x;
  if (impl_->dense) x = impl_->lu.solve(b);
  else x = impl_->ldlt.solve(b);
  double res = (impl_->M * x - b).lpNorm<Eigen::Infinity>();
  double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
  if (!(res <= 1e-10 * scale))
    throw SolverFailure("killed-walk solve residual " + std::to_string(res));
  return std::vector<double>(x.data(), x.data() + n);
}

std::vector<double> KilledWalkSolver::green_row(PointI x) const {
  int i = A_->index_of(x);
  if (i < 0) throw std::invalid_argument("green_row: point not in domain");
  std::vector<double> e(A_->size(), 0.0);
  e[static_cast<std::size_t>(i)] = 1.0;
  return solve(e);  // (I-Q) symmetric, so row == column
}

std::vector<double> KilledWalkSolver::harmonic_to(PointI y) const {
  return harmonic_to_set({y});
}

std::vector<double> KilledWalkSolver::harmonic_to_set(const std::vector<PointI>& Y) const {
  std::vector<double> rhs(A_->size(), 0.0);
  for (auto y : Y) {
    if (A_->boundary_index_of(y) < 0)
      throw std::invalid_argument("harmonic_to: target not on outer boundary");
    for (auto d : kNeighbors4) {
      int i = A_->index_of(y + d);
      if (i >= 0) rhs[static_cast<std::size_t>(i)] += 0.25;
    }
  }
  return solve(rhs);
}

// ---------------------------------------------------------------------------
// Kernel sets.
// ---------------------------------------------------------------------------

double DiscreteKernelSet::h_row_mass(int interior, const std::vector<int>& ids) const {
  double s = 0.0;
  for (int b : ids) s += h_at(interior, b);
  return s;
}

double DiscreteKernelSet::mass(const std::vector<int>& gamma,
                               const std::vector<int>& upsilon) const {
  double s = 0.0;
  for (int x : gamma)
    for (int y : upsilon) s += hbd_at(x, y);
  return s;
}

std::vector<char> DiscreteKernelSet::core_mask(const std::vector<double>& g,
                                               double n_scale) {
  double thresh = std::pow(n_scale, -1.0 / 16.0);
  std::vector<char> m(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) m[i] = g[i] >= thresh ? 1 : 0;
  return m;
}

DiscreteKernelSet compute_kernels(const LatticeDomain& A,
                                  const std::vector<double>* g_for_mask,
                                  double n_scale) {
  KilledWalkSolver solver(A);
  const auto& bd = A.boundaries().outer;
  std::size_t n = A.size(), m = bd.size();
  DiscreteKernelSet ks;
  ks.A = std::make_shared<LatticeDomain>(A);
  ks.nbd = m;
  ks.h.assign(n * m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    auto col = solver.harmonic_to(bd[j]);
    for (std::size_t i = 0; i < n; ++i) ks.h[i * m + j] = col[i];
  }
  // h_bd(x, y) = (1/4) sum over interior neighbors z of x of h(z, y).
  ks.h_bd.assign(m * m, 0.0);
  for (std::size_t bx = 0; bx < m; ++bx) {
    for (auto d : kNeighbors4) {
      int zi = A.index_of(bd[bx] + d);
      if (zi < 0) continue;
      for (std::size_t by = 0; by < m; ++by)
        ks.h_bd[bx * m + by] += 0.25 * ks.h[static_cast<std::size_t>(zi) * m + by];
    }
  }
  if (A.contains_origin()) ks.green0 = solver.green_row({0, 0});

  if (n_scale > 0.0) {
    std::vector<double> g;
    if (g_for_mask) {
      g = *g_for_mask;
    } else {
      // Disk approximation: g ~ log(inradius/|x|) in lattice units.
      double R = A.inradius() + 0.5;
      g.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        auto p = A.points()[i];
        double r = std::max(1.0, std::hypot(static_cast<double>(p.x),
                                            static_cast<double>(p.y)));
        g[i] = std::log(R / r);
      }
    }
    ks.astar = DiscreteKernelSet::core_mask(g, n_scale);
  }
  return ks;
}

std::vector<double> green_matrix(const LatticeDomain& A, std::size_t cap) {
  if (A.size() > cap) throw TooLarge("green_matrix: domain exceeds dense capacity");
  KilledWalkSolver solver(A);
  std::size_t n = A.size();
  std::vector<double> G(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = solver.green_row(A.points()[i]);
    std::copy(row.begin(), row.end(), G.begin() + static_cast<std::ptrdiff_t>(i * n));
  }
  return G;
}

// ---------------------------------------------------------------------------
// Enumeration.
// ---------------------------------------------------------------------------

ExcursionEnumeration enumerate_excursions(const LatticeDomain& A,
                                          const std::vector<PointI>& gamma,
                                          const std::vector<PointI>& upsilon,
                                          int max_length, std::size_t list_cap) {
  if (A.size() > 12)
    throw TooLarge("enumerate_excursions: more than 12 interior points");
  if (max_length > 40)
    throw TooLarge("enumerate_excursions: max_length beyond 40");
  for (auto x : gamma)
    if (A.boundary_index_of(x) < 0)
      throw std::invalid_argument("enumerate: gamma not on boundary");
  for (auto y : upsilon)
    if (A.boundary_index_of(y) < 0)
      throw std::invalid_argument("enumerate: upsilon not on boundary");

  ExcursionEnumeration out;
  out.mass_by_length.assign(static_cast<std::size_t>(std::max(0, max_length)) + 1, 0.0);
  if (gamma.empty() || upsilon.empty()) {
    out.listing_complete = true;
    return out;
  }

  std::size_t n = A.size();
  // w[z] = 4^{-j} mass of partial paths x -> ... -> z with j steps taken,
  // all intermediate points interior. r[z] = quarter-count of Upsilon exits.
  std::vector<double> w(n, 0.0), r(n, 0.0), tmp(n, 0.0), surv(n, 0.0);
  std::unordered_set<std::uint64_t> upsset;
  for (auto y : upsilon) upsset.insert(point_key(y));
  for (std::size_t i = 0; i < n; ++i) {
    auto z = A.points()[i];
    for (auto d : kNeighbors4)
      if (upsset.count(point_key(z + d))) r[i] += 0.25;
  }
  for (auto x : gamma)
    for (auto d : kNeighbors4) {
      int zi = A.index_of(x + d);
      if (zi >= 0) {
        w[static_cast<std::size_t>(zi)] += 0.25;
        surv[static_cast<std::size_t>(zi)] += 0.25;
      }
    }
  auto q_apply = [&](const std::vector<double>& v, std::vector<double>& dst) {
    std::fill(dst.begin(), dst.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] == 0.0) continue;
      auto z = A.points()[i];
      for (auto d : kNeighbors4) {
        int j = A.index_of(z + d);
        if (j >= 0) dst[static_cast<std::size_t>(j)] += 0.25 * v[i];
      }
    }
  };
  for (int len = 2; len <= max_length; ++len) {
    double mass_len = 0.0;
    for (std::size_t i = 0; i < n; ++i) mass_len += w[i] * r[i];
    out.mass_by_length[static_cast<std::size_t>(len)] = mass_len;
    out.mass += mass_len;
    if (len < max_length) {
      q_apply(w, tmp);
      std::swap(w, tmp);
    }
  }
  // Survival bound on omitted mass: total weight of paths still interior
  // after max_length steps (every longer excursion contributes its full
  // 4^{-k} weight to this).
  for (int j = 1; j <= max_length - 1; ++j) {
    q_apply(surv, tmp);
    std::swap(surv, tmp);
  }
  for (std::size_t i = 0; i < n; ++i) out.tail_bound += surv[i];

  // Explicit path listing by DFS, truncated both by recorded paths and by
  // explored nodes (the path count grows exponentially in max_length).
  out.listing_complete = true;
  std::size_t node_budget = std::max<std::size_t>(list_cap * 8, 1u << 21);
  std::vector<PointI> path;
  std::function<void(PointI, int)> dfs = [&](PointI z, int len) {
    if (!out.listing_complete) return;
    if (node_budget-- == 0) {
      out.listing_complete = false;
      return;
    }
    if (len >= 1 && upsset.count(point_key(z)) && A.boundary_index_of(z) >= 0) {
      if (out.paths.size() >= list_cap) {
        out.listing_complete = false;
        return;
      }
      out.paths.push_back(path);
      out.paths.back().push_back(z);
      out.path_weights.push_back(std::pow(0.25, len));
    }
    if (len >= max_length) return;
    if (A.index_of(z) < 0 && len >= 1) return;  // stepped to non-upsilon boundary
    path.push_back(z);
    for (auto d : kNeighbors4) {
      PointI nz = z + d;
      if (A.index_of(nz) >= 0 || (A.boundary_index_of(nz) >= 0 && len + 1 >= 2))
        dfs(nz, len + 1);
    }
    path.pop_back();
  };
  for (auto x : gamma) {
    path.clear();
    // First step must enter A.
    path.push_back(x);
    for (auto d : kNeighbors4) {
      PointI z = x + d;
      if (A.index_of(z) >= 0) dfs(z, 1);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conditioned sampler.
// ---------------------------------------------------------------------------

ConditionedExcursionSampler::ConditionedExcursionSampler(
    const KilledWalkSolver& solver, std::vector<PointI> upsilon)
    : A_(solver.domain()) {
  for (auto y : upsilon) upsilon_.insert(point_key(y));
  u_ = solver.harmonic_to_set(upsilon);
}

double ConditionedExcursionSampler::start_weight(PointI x) const {
  double s = 0.0;
  for (auto d : kNeighbors4) {
    int i = A_.index_of(x + d);
    if (i >= 0) s += u_[static_cast<std::size_t>(i)];
  }
  return s;
}

std::vector<PointI> ConditionedExcursionSampler::sample(PointI x,
                                                        CounterRng& rng) const {
  if (A_.boundary_index_of(x) < 0)
    throw std::invalid_argument("sample: start not on outer boundary");
  double total = start_weight(x);
  if (!(total > 0.0)) throw ZeroMeasure("sample: target set unreachable");

  std::vector<PointI> path{x};
  // First step into A weighted by h_A(z, Upsilon).
  PointI cur{};
  {
    double t = rng.uniform() * total, acc = 0.0;
    bool picked = false;
    for (auto d : kNeighbors4) {
      int i = A_.index_of(x + d);
      if (i < 0) continue;
      acc += u_[static_cast<std::size_t>(i)];
      if (t <= acc) { cur = x + d; picked = true; break; }
    }
    if (!picked) {
      for (auto d : kNeighbors4)
        if (A_.index_of(x + d) >= 0) cur = x + d;
    }
  }
  path.push_back(cur);

  // h-transform chain: from w, step to v with prob (1/4) u_hat(v) / u(w);
  // u_hat is u on interior points, the Upsilon indicator on the boundary.
  while (true) {
    int wi = A_.index_of(cur);
    double uw = u_[static_cast<std::size_t>(wi)];
    double t = rng.uniform() * uw * 4.0, acc = 0.0;
    PointI next = cur;
    bool stepped = false;
    for (auto d : kNeighbors4) {
      PointI v = cur + d;
      int vi = A_.index_of(v);
      double uv;
      if (vi >= 0)
        uv = u_[static_cast<std::size_t>(vi)];
      else
        uv = upsilon_.count(point_key(v)) ? 1.0 : 0.0;
      acc += uv;
      if (!stepped && t <= acc) { next = v; stepped = true; }
    }
    if (!stepped) {
      // numerical slack at the top of the CDF: take the last admissible move
      for (auto d : kNeighbors4) {
        PointI v = cur + d;
        int vi = A_.index_of(v);
        if (vi >= 0 ? u_[static_cast<std::size_t>(vi)] > 0.0
                    : upsilon_.count(point_key(v)))
          next = v;
      }
    }
    path.push_back(next);
    if (A_.index_of(next) < 0) break;
    cur = next;
  }
  return path;
}

}  // namespace excmeas::walk
