#ifndef EXCMEAS_WALK_HPP
#define EXCMEAS_WALK_HPP

#include <memory>
#include <vector>

#include "excmeas/common.hpp"
#include "excmeas/lattice.hpp"

namespace excmeas::walk {

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroMeasure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Potential kernel a(x) of planar simple random walk, tabulated for
// |x| <= radius. Computed from a Dirichlet solve on a surrounding box with
// boundary data (2/pi) log|x| + k0, then shifted so a(0) = 0; the equation
// at the origin pins the neighbor average there to 1.
class PotentialKernelTable {
 public:
  explicit PotentialKernelTable(int radius);

  int radius() const { return radius_; }
  double k0() const { return kPotentialK0; }
  double a(PointI p) const;
  // k_x = k0 + (2/pi) log|x| - a(x); k_0 is not defined (x != 0).
  double k(PointI p) const;

 private:
  int radius_ = 0;
  int box_ = 0;  // values stored for |x|_inf <= box_
  std::vector<double> vals_;
  double& at(int x, int y) {
    return vals_[static_cast<std::size_t>(y + box_) * (2 * box_ + 1) + (x + box_)];
  }
  double get(int x, int y) const {
    return vals_[static_cast<std::size_t>(y + box_) * (2 * box_ + 1) + (x + box_)];
  }
};

// Factorized (I - Q) for the walk killed on exiting A, where Q is the
// interior-to-interior quarter-step operator. Dense LU up to 4000 points,
// sparse Cholesky beyond; solutions are residual-checked to 1e-10.
class KilledWalkSolver {
 public:
  explicit KilledWalkSolver(const lattice::LatticeDomain& A);
  ~KilledWalkSolver();
  KilledWalkSolver(KilledWalkSolver&&) noexcept;

  const lattice::LatticeDomain& domain() const { return *A_; }
  // Solve (I - Q) u = rhs.
  std::vector<double> solve(const std::vector<double>& rhs) const;
  // Expected visit counts started at x: row x of (I-Q)^{-1}.
  std::vector<double> green_row(PointI x) const;
  // Harmonic measure h_A(. , y) for outer boundary point y.
  std::vector<double> harmonic_to(PointI y) const;
  // h_A(. , Y) for a set of boundary points.
  std::vector<double> harmonic_to_set(const std::vector<PointI>& Y) const;

 private:
  struct Impl;
  std::shared_ptr<const lattice::LatticeDomain> A_;
  std::unique_ptr<Impl> impl_;
};

// Exact kernel tables for one lattice domain.
//   h      : |A| x |bd A| harmonic measure matrix, rows sum to 1
//   h_bd   : |bd A| x |bd A| excursion Poisson kernel, symmetric
//   green0 : G_A(0, .) column when the origin is interior
struct DiscreteKernelSet {
  std::shared_ptr<const lattice::LatticeDomain> A;
  std::vector<double> h;       // row-major, row = interior index
  std::vector<double> h_bd;    // row-major over boundary indices
  std::vector<double> green0;  // indexed by interior index; empty if no origin
  std::vector<char> astar;     // interior-core mask (indexed by interior index)

  double h_at(int interior, int bd) const {
    return h[static_cast<std::size_t>(interior) * nbd + bd];
  }
  double hbd_at(int bx, int by) const {
    return h_bd[static_cast<std::size_t>(bx) * nbd + by];
  }
  std::size_t nbd = 0;

  // h_A(x, Gamma) for interior x.
  double h_row_mass(int interior, const std::vector<int>& bd_ids) const;
  // Excursion mass h_bd(Gamma, Upsilon).
  double mass(const std::vector<int>& gamma, const std::vector<int>& upsilon) const;

  // g-estimate threshold N^{-1/16} with g supplied per interior point.
  static std::vector<char> core_mask(const std::vector<double>& g, double n_scale);
};

// Computes h for all boundary targets, h_bd, and the Green column at 0.
// g_for_mask: optional continuum Green's-function estimate per interior
// point (defaults to a disk approximation from the inradius).
DiscreteKernelSet compute_kernels(const lattice::LatticeDomain& A,
                                  const std::vector<double>* g_for_mask = nullptr,
                                  double n_scale = 0.0);

// Full Green matrix (guarded; dense |A| x |A|).
std::vector<double> green_matrix(const lattice::LatticeDomain& A,
                                 std::size_t cap = 4096);

// Discrete excursion enumeration by exact truncated series: mass_by_length[k]
// is the total 4^{-k} weight of (Gamma, Upsilon)-excursions of length k; tail
// is a rigorous upper bound on the omitted mass beyond max_length (survival
// of the killed walk). Paths are materialized up to list_cap entries.
struct ExcursionEnumeration {
  std::vector<std::vector<PointI>> paths;  // possibly truncated listing
  std::vector<double> path_weights;
  bool listing_complete = false;
  std::vector<double> mass_by_length;  // index = length
  double mass = 0.0;                   // sum of mass_by_length
  double tail_bound = 0.0;
};

ExcursionEnumeration enumerate_excursions(const lattice::LatticeDomain& A,
                                          const std::vector<PointI>& gamma,
                                          const std::vector<PointI>& upsilon,
                                          int max_length,
                                          std::size_t list_cap = 200000);

// Walk conditioned to first step into A and exit through Upsilon; exact
// h-transform sampling. Built once per (A, Upsilon), then sampled many times.
class ConditionedExcursionSampler {
 public:
  ConditionedExcursionSampler(const KilledWalkSolver& solver,
                              std::vector<PointI> upsilon);

  // Excursion from boundary point x; endpoints lie on bd A, interior in A.
  std::vector<PointI> sample(PointI x, CounterRng& rng) const;
  // Reachability weight sum_{z ~ x, z in A} h_A(z, Upsilon).
  double start_weight(PointI x) const;

 private:
  const lattice::LatticeDomain& A_;
  std::vector<double> u_;  // h_A(., Upsilon) on interior indices
  std::unordered_set<std::uint64_t> upsilon_;
};

}  // namespace excmeas::walk

#endif
