#ifndef EXCMEAS_MEASURES_HPP
#define EXCMEAS_MEASURES_HPP

#include <functional>
#include <optional>
#include <vector>

#include "excmeas/common.hpp"
#include "excmeas/curves.hpp"
#include "excmeas/harmonic.hpp"
#include "excmeas/lattice.hpp"

namespace excmeas::measures {

struct TooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoSamples : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AcceptanceTooLow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Weighted finite collection of curves.
class FiniteCurveMeasure {
 public:
  FiniteCurveMeasure() = default;
  void add(curves::Curve c, double w);
  const std::vector<curves::Curve>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  double total_mass() const { return mass_; }
  FiniteCurveMeasure normalized() const;
  FiniteCurveMeasure scaled(double c) const;
  FiniteCurveMeasure pushforward(const harmonic::ConformalMap& f) const;

 private:
  std::vector<curves::Curve> atoms_;
  std::vector<double> weights_;
  double mass_ = 0.0;
};

// Finite measure on an abstract metric space given by a distance oracle over
// atom indices; the brute-force Prohorov computations live here.
struct FinitePointMeasure {
  std::vector<double> weights;  // atom ids are indices
};

// Exact Prohorov distance between two finite measures whose combined support
// is indexed 0..n-1 with distances dist(i, j). Support capped at 14 atoms
// (subset enumeration).
double prohorov_exact(const FinitePointMeasure& m1, const FinitePointMeasure& m2,
                      const std::function<double(int, int)>& dist);

// Reference oracle: feasibility bisection over the same subset enumeration.
double prohorov_bisection_oracle(const FinitePointMeasure& m1,
                                 const FinitePointMeasure& m2,
                                 const std::function<double(int, int)>& dist,
                                 double tol = 1e-14);

// Smallest eps with empirical fraction{d_i >= eps} <= eps, plus a one-sided
// DKW adjustment at the given level.
struct CouplingBound {
  double eps = 0.0;       // raw empirical fixed point
  double eps_dkw = 0.0;   // with the one-sided confidence band
};
CouplingBound prohorov_coupling_bound(const std::vector<double>& dists,
                                      double dkw_level = 1e-3);

// ---------------------------------------------------------------------------
// Samplers.
// ---------------------------------------------------------------------------

struct WienerPath {
  curves::Curve curve;
  Cpx exit_point;
  bool step_floor_hit = false;
};

// Brownian path from z to the boundary of D by Euler-Maruyama with
// quadratically adaptive near-boundary steps.
WienerPath sample_wiener_to_boundary(const lattice::JordanDomainSpec& D, Cpx z,
                                     CounterRng& rng, double exit_tol = 1e-3,
                                     double record_res = 5e-3);

// Exact exit point of Brownian motion from the unit disk started at z
// (Moebius image of a uniform angle).
Cpx disk_exit_point(Cpx z, CounterRng& rng);

// Brownian excursion sample between two disjoint boundary arcs of the unit
// disk: start harmonic-measure-uniform on the eps-pushed-in image of gamma,
// accept iff the exit lies in upsilon.
struct ExcursionSample {
  curves::Curve curve;
  double start_angle = 0.0;
  double exit_angle = 0.0;
  std::uint64_t attempts = 0;
};
ExcursionSample sample_brownian_excursion(harmonic::AngleInterval gamma,
                                          harmonic::AngleInterval upsilon,
                                          double eps, CounterRng& rng,
                                          std::uint64_t max_attempts = 2000000);

// Per-step coupling of one SRW move with a standard planar Gaussian: the move
// is the axis direction nearest in angle to the Gaussian increment, so both
// marginals are exact and the pair is maximally aligned by construction.
struct StepPair {
  PointI move;
  Cpx bm_increment;  // time-2 Brownian increment scaled by 1/sqrt(2)
};
StepPair coupled_walk_bm_step(CounterRng& rng);

}  // namespace excmeas::measures

#endif
