#ifndef EXCMEAS_ARCS_HPP
#define EXCMEAS_ARCS_HPP

#include <vector>

#include "excmeas/harmonic.hpp"
#include "excmeas/lattice.hpp"

namespace excmeas::arcs {

struct ArcsTooClose : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Admissibility threshold for arc separation at scale N. The printed form
// N^{-1/48} log^{2/3} N is a tail hypothesis that grows through pi at small
// N, so the enforced threshold is capped at a quarter circle.
double admissibility_threshold(int N);

// One pair of disjoint boundary arcs represented at four levels: disk
// angles, the continuum domain, the union-of-squares domain, and the
// discrete outer boundary.
struct ArcPair {
  harmonic::AngleInterval gamma_disk, upsilon_disk;
  // Discrete outer-boundary arcs (points of bd D_N, integer coordinates).
  std::vector<PointI> gamma_discrete, upsilon_discrete;
  // Boundary segment indices of the union-of-squares arcs.
  std::vector<std::size_t> gamma_uos_segments, upsilon_uos_segments;
  double sep = 0.0, spr = 0.0;
};

// Derive the union-of-squares arcs from the numeric map's boundary angles
// and the discrete arcs by the inner-square / dual-segment rule. The grid
// map must belong to union_of_squares(A).
ArcPair associate_arcs(const lattice::LatticeDomain& A,
                       const harmonic::GridMap& map_of_uos, int N,
                       harmonic::AngleInterval gamma,
                       harmonic::AngleInterval upsilon);

}  // namespace excmeas::arcs

#endif
