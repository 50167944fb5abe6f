#include "excmeas/arcs.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace excmeas::arcs {

using harmonic::AngleInterval;
using lattice::LatticeDomain;
using lattice::UnionOfSquaresRegion;

double admissibility_threshold(int N) {
  double raw = std::pow(static_cast<double>(N), -1.0 / 48.0) *
               std::pow(std::log(static_cast<double>(N)), 2.0 / 3.0);
  return std::min(raw, kPi / 2.0);
}

namespace {

// theta is monotone along the boundary polygon and a segment spans a short
// arc, so the segment lies in the angular interval iff both endpoint values
// do (closed containment: an endpoint on the interval edge counts as inside).
bool segment_in_interval(double th_a, double th_b, const AngleInterval& I) {
  return I.contains(th_a, true) && I.contains(th_b, true);
}

}  // namespace

ArcPair associate_arcs(const LatticeDomain& A, const harmonic::GridMap& map,
                       int N, AngleInterval gamma, AngleInterval upsilon) {
  auto geo = harmonic::sep_spr(gamma, upsilon);
  if (!(geo.sep > 0.0))
    throw harmonic::ArcsOverlap("associate_arcs: arc closures intersect");
  if (geo.sep < admissibility_threshold(N))
    throw ArcsTooClose("associate_arcs: separation " + std::to_string(geo.sep) +
                       " below threshold " +
                       std::to_string(admissibility_threshold(N)));

  ArcPair out;
  out.gamma_disk = gamma;
  out.upsilon_disk = upsilon;
  out.sep = geo.sep;
  out.spr = geo.spr;

  const UnionOfSquaresRegion& R = map.region();
  const auto& segs = R.boundary_segments();
  const auto& cthetas = map.corner_thetas();
  std::size_t ns = segs.size();

  for (int which = 0; which < 2; ++which) {
    const AngleInterval& I = which == 0 ? gamma : upsilon;
    auto& seg_out = which == 0 ? out.gamma_uos_segments : out.upsilon_uos_segments;
    auto& pts_out = which == 0 ? out.gamma_discrete : out.upsilon_discrete;

    // Discrete arc rule: outer endpoints y of boundary edges (x, y) whose
    // dual segment lies inside the continuum arc. The companion condition
    // (the inner square S_x meets the arc) is implied: the dual segment is
    // part of S_x.
    std::unordered_map<std::uint64_t, char> taken;
    for (std::size_t i = 0; i < ns; ++i) {
      double ta = cthetas[i];
      double tb = cthetas[(i + 1) % ns];
      if (!segment_in_interval(ta, tb, I)) continue;
      seg_out.push_back(i);
      PointI y = segs[i].out_cell;
      if (A.boundary_index_of(y) < 0) continue;
      if (taken.emplace(point_key(y), 1).second) pts_out.push_back(y);
    }
    std::sort(pts_out.begin(), pts_out.end());
  }
  return out;
}

}  // namespace excmeas::arcs
