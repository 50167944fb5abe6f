#include "excmeas/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

namespace excmeas::lattice {

namespace {

std::unordered_set<std::uint64_t> key_set(const std::vector<PointI>& pts) {
  std::unordered_set<std::uint64_t> s;
  s.reserve(pts.size() * 2);
  for (auto p : pts) s.insert(point_key(p));
  return s;
}

}  // namespace

bool is_connected(const std::vector<PointI>& pts) {
  if (pts.empty()) return false;
  auto s = key_set(pts);
  std::unordered_set<std::uint64_t> seen;
  std::deque<PointI> q{pts[0]};
  seen.insert(point_key(pts[0]));
  while (!q.empty()) {
    PointI p = q.front();
    q.pop_front();
    for (auto d : kNeighbors4) {
      PointI n = p + d;
      auto k = point_key(n);
      if (s.count(k) && !seen.count(k)) {
        seen.insert(k);
        q.push_back(n);
      }
    }
  }
  return seen.size() == pts.size();
}

bool is_simply_connected(const std::vector<PointI>& pts) {
  if (pts.empty()) return false;
  if (!is_connected(pts)) return false;
  // Complement connectivity via flood fill on a padded bounding box: every
  // complement cell in the box must reach the box rim.
  int xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
  for (auto p : pts) {
    xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
  }
  xmin -= 2; ymin -= 2; xmax += 2; ymax += 2;
  int w = xmax - xmin + 1, h = ymax - ymin + 1;
  auto s = key_set(pts);
  std::vector<char> seen(static_cast<std::size_t>(w) * h, 0);
  auto idx = [&](int x, int y) { return static_cast<std::size_t>(y - ymin) * w + (x - xmin); };
  std::deque<PointI> q{{xmin, ymin}};
  seen[idx(xmin, ymin)] = 1;
  std::size_t reached = 1;
  while (!q.empty()) {
    PointI p = q.front();
    q.pop_front();
    for (auto d : kNeighbors4) {
      PointI n = p + d;
      if (n.x < xmin || n.x > xmax || n.y < ymin || n.y > ymax) continue;
      if (s.count(point_key(n))) continue;
      if (seen[idx(n.x, n.y)]) continue;
      seen[idx(n.x, n.y)] = 1;
      ++reached;
      q.push_back(n);
    }
  }
  std::size_t complement = static_cast<std::size_t>(w) * h - pts.size();
  return reached == complement;
}

LatticeDomain LatticeDomain::from_points(std::vector<PointI> pts, Rational spacing) {
  if (pts.empty()) throw EmptyDomain("lattice domain is empty");
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (!is_simply_connected(pts))
    throw NotSimplyConnected("lattice set or its complement is disconnected");

  LatticeDomain A;
  A.points_ = std::move(pts);
  A.spacing_ = spacing;
  A.set_ = key_set(A.points_);
  A.index_.reserve(A.points_.size() * 2);
  for (std::size_t i = 0; i < A.points_.size(); ++i)
    A.index_[point_key(A.points_[i])] = static_cast<int>(i);
  A.contains_origin_ = A.set_.count(point_key({0, 0})) != 0;

  std::unordered_set<std::uint64_t> outer_seen;
  for (auto p : A.points_) {
    bool inner = false;
    for (auto d : kNeighbors4) {
      PointI n = p + d;
      if (!A.set_.count(point_key(n))) {
        inner = true;
        A.boundaries_.edges.emplace_back(p, n);
        if (outer_seen.insert(point_key(n)).second) A.boundaries_.outer.push_back(n);
      }
    }
    if (inner) A.boundaries_.inner.push_back(p);
  }
  std::sort(A.boundaries_.outer.begin(), A.boundaries_.outer.end());
  for (std::size_t i = 0; i < A.boundaries_.outer.size(); ++i)
    A.boundary_index_[point_key(A.boundaries_.outer[i])] = static_cast<int>(i);
  return A;
}

int LatticeDomain::index_of(PointI p) const {
  auto it = index_.find(point_key(p));
  return it == index_.end() ? -1 : it->second;
}

int LatticeDomain::boundary_index_of(PointI p) const {
  auto it = boundary_index_.find(point_key(p));
  return it == boundary_index_.end() ? -1 : it->second;
}

double LatticeDomain::inradius() const {
  double best = std::numeric_limits<double>::infinity();
  for (auto p : boundaries_.outer)
    best = std::min(best, std::hypot(static_cast<double>(p.x), static_cast<double>(p.y)));
  return best;
}

double LatticeDomain::radius() const {
  double best = 0.0;
  for (auto p : points_)
    best = std::max(best, std::hypot(static_cast<double>(p.x), static_cast<double>(p.y)));
  return best;
}

LatticeDomain LatticeDomain::with_spacing(Rational h) const {
  LatticeDomain A = *this;
  A.spacing_ = h;
  return A;
}

// ---------------------------------------------------------------------------
// Union of squares.
// ---------------------------------------------------------------------------

UnionOfSquaresRegion UnionOfSquaresRegion::build(const LatticeDomain& A) {
  UnionOfSquaresRegion R;
  R.domain_ = std::make_shared<LatticeDomain>(A);
  R.h_ = A.spacing();
  R.cells_ = A.size();

  // One dual segment per edge-boundary pair, endpoints on the corner grid
  // (doubled coordinates). Walk them into a closed polygon: for a simply
  // connected set each boundary corner meets exactly two segments.
  struct Seg { PointI a, b; PointI in_c, out_c; };
  std::vector<Seg> segs;
  segs.reserve(A.boundaries().edges.size());
  for (auto& [x, y] : A.boundaries().edges) {
    PointI mid{x.x + y.x, x.y + y.y};  // doubled midpoint of (x,y)
    PointI da, db;
    if (x.y == y.y) {  // horizontal edge, vertical segment
      da = {mid.x, mid.y - 1};
      db = {mid.x, mid.y + 1};
    } else {  // vertical edge, horizontal segment
      da = {mid.x - 1, mid.y};
      db = {mid.x + 1, mid.y};
    }
    segs.push_back({da, db, x, y});
  }

  std::unordered_map<std::uint64_t, std::vector<int>> at_corner;
  for (int i = 0; i < static_cast<int>(segs.size()); ++i) {
    at_corner[point_key(segs[i].a)].push_back(i);
    at_corner[point_key(segs[i].b)].push_back(i);
  }
  for (auto& [k, v] : at_corner) {
    (void)k;
    if (v.size() != 2)
      throw NotSimplyConnected("union-of-squares boundary is not a simple polygon");
  }

  std::vector<char> used(segs.size(), 0);
  std::vector<int> order;
  order.reserve(segs.size());
  std::vector<PointI> corners;
  corners.reserve(segs.size());
  int cur = 0;
  PointI at = segs[0].a;
  PointI start = at;
  do {
    used[cur] = 1;
    order.push_back(cur);
    corners.push_back(at);
    PointI nxt = (segs[cur].a == at) ? segs[cur].b : segs[cur].a;
    auto& cand = at_corner[point_key(nxt)];
    int next_seg = (cand[0] == cur) ? cand[1] : cand[0];
    at = nxt;
    cur = next_seg;
  } while (!(at == start));
  if (order.size() != segs.size())
    throw NotSimplyConnected("union-of-squares boundary has several components");

  for (std::size_t i = 0; i < order.size(); ++i) {
    const Seg& s = segs[order[i]];
    R.segments_.push_back({corners[i],
                           corners[(i + 1) % corners.size()],
                           s.in_c, s.out_c});
    R.vertices_.push_back(R.corner_to_continuum(corners[i]));
  }
  return R;
}

double UnionOfSquaresRegion::area() const {
  double h = h_.value();
  return static_cast<double>(cells_) * h * h;
}

bool UnionOfSquaresRegion::contains(Cpx z) const {
  // Work in lattice units; a point is interior iff every closed cell within
  // eps of it belongs to the set (handles points on shared edges/corners).
  double h = h_.value();
  double ux = z.real() / h, uy = z.imag() / h;
  const double eps = 1e-12;
  double fx = ux + 0.5, fy = uy + 0.5;
  int cx = static_cast<int>(std::floor(fx)), cy = static_cast<int>(std::floor(fy));
  bool on_vx = std::fabs(fx - std::round(fx)) < eps;
  bool on_vy = std::fabs(fy - std::round(fy)) < eps;
  int rx = static_cast<int>(std::round(fx)), ry = static_cast<int>(std::round(fy));
  for (int dx = (on_vx ? -1 : 0); dx <= 0; ++dx)
    for (int dy = (on_vy ? -1 : 0); dy <= 0; ++dy) {
      PointI cell{on_vx ? rx + dx : cx, on_vy ? ry + dy : cy};
      if (!domain_->contains(cell)) return false;
    }
  return true;
}

UnionOfSquaresRegion union_of_squares(const LatticeDomain& A) {
  return UnionOfSquaresRegion::build(A);
}

// ---------------------------------------------------------------------------
// Jordan domains.
// ---------------------------------------------------------------------------

JordanDomainSpec JordanDomainSpec::unit_disk() {
  JordanDomainSpec d;
  d.shape_ = Shape::Disk;
  return d;
}

JordanDomainSpec JordanDomainSpec::square() { return rectangle(1.0, 1.0); }

JordanDomainSpec JordanDomainSpec::rectangle(double hx, double hy) {
  if (hx <= 0 || hy <= 0) throw std::invalid_argument("rectangle: bad half sides");
  JordanDomainSpec d;
  d.shape_ = (hx == hy) ? Shape::Square : Shape::Rectangle;
  d.half_x_ = hx;
  d.half_y_ = hy;
  return d;
}

JordanDomainSpec JordanDomainSpec::polygon(
    std::vector<std::pair<Rational, Rational>> verts) {
  if (verts.size() < 3) throw std::invalid_argument("polygon: need >= 3 vertices");
  JordanDomainSpec d;
  d.shape_ = Shape::Polygon;
  d.verts_ = std::move(verts);
  if (!d.contains(Cpx(0, 0)))
    throw std::invalid_argument("polygon: origin not interior");
  return d;
}

JordanDomainSpec JordanDomainSpec::radial_graph(double amp, int k) {
  if (std::fabs(amp) >= 1.0) throw std::invalid_argument("radial_graph: |amp| must be < 1");
  JordanDomainSpec d;
  d.shape_ = Shape::RadialGraph;
  d.amp_ = amp;
  d.k_ = k;
  // base chosen so min_theta r = 1.
  d.scale_ = 1.0 / (1.0 - std::fabs(amp));
  return d;
}

namespace {

// Exact point-in-polygon (even-odd rule) with rational vertices; the query
// point is rational too. Returns +1 inside, 0 on boundary, -1 outside.
// All arithmetic is on cross-multiplied integers via long double-free
// __int128 products.
using I128 = __int128;

struct RatPt {
  long long xn, xd, yn, yd;
};

int sign128(I128 v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

// Compare a/b vs c/d with b,d > 0.
int cmp_frac(long long a, long long b, long long c, long long d) {
  I128 lhs = static_cast<I128>(a) * d;
  I128 rhs = static_cast<I128>(c) * b;
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

// Orientation of point p relative to segment (u -> v), exact.
int orient(const RatPt& u, const RatPt& v, const RatPt& p) {
  // (v-u) x (p-u): expand with common denominators.
  // x-coords have denominators u.xd, v.xd, p.xd etc. Use pairwise products.
  // (vx-ux)*(py-uy) - (vy-uy)*(px-ux), each difference as exact fraction.
  I128 vxn = static_cast<I128>(v.xn) * u.xd - static_cast<I128>(u.xn) * v.xd;
  I128 vxd = static_cast<I128>(v.xd) * u.xd;
  I128 pyn = static_cast<I128>(p.yn) * u.yd - static_cast<I128>(u.yn) * p.yd;
  I128 pyd = static_cast<I128>(p.yd) * u.yd;
  I128 vyn = static_cast<I128>(v.yn) * u.yd - static_cast<I128>(u.yn) * v.yd;
  I128 vyd = static_cast<I128>(v.yd) * u.yd;
  I128 pxn = static_cast<I128>(p.xn) * u.xd - static_cast<I128>(u.xn) * p.xd;
  I128 pxd = static_cast<I128>(p.xd) * u.xd;
  // Compare vxn/vxd * pyn/pyd vs vyn/vyd * pxn/pxd; denominators are
  // positive, and magnitudes stay well within __int128 for the vertex and
  // grid sizes used here.
  I128 lhs = vxn * pyn;
  I128 rhs = vyn * pxn;
  I128 lden = vxd * pyd;
  I128 rden = vyd * pxd;
  return sign128(lhs * rden - rhs * lden);
}

int point_in_polygon_exact(const std::vector<std::pair<Rational, Rational>>& poly,
                           const RatPt& p) {
  int crossings = 0;
  std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    RatPt u{a.first.num, a.first.den, a.second.num, a.second.den};
    RatPt v{b.first.num, b.first.den, b.second.num, b.second.den};
    int ya = cmp_frac(u.yn, u.yd, p.yn, p.yd);   // sign(uy - py)
    int yb = cmp_frac(v.yn, v.yd, p.yn, p.yd);   // sign(vy - py)
    int o = orient(u, v, p);
    if (o == 0) {
      // On the supporting line: on-segment iff p between u and v (bbox test).
      int xa = cmp_frac(u.xn, u.xd, p.xn, p.xd);
      int xb = cmp_frac(v.xn, v.xd, p.xn, p.xd);
      if (xa * xb <= 0 && ya * yb <= 0) return 0;
    }
    // Upward/downward crossing rule (half-open in y).
    if (ya <= 0 && yb > 0) {
      if (o > 0) ++crossings;
    } else if (yb <= 0 && ya > 0) {
      if (o < 0) ++crossings;
    }
  }
  return (crossings % 2) ? 1 : -1;
}

// Does segment (a,b) intersect the closed axis-aligned square
// [cx-s, cx+s] x [cy-s, cy+s]? Doubles; used only with an interior margin.
bool segment_hits_box(Cpx a, Cpx b, double cx, double cy, double s) {
  double lo_x = cx - s, hi_x = cx + s, lo_y = cy - s, hi_y = cy + s;
  double t0 = 0.0, t1 = 1.0;
  double dx = b.real() - a.real(), dy = b.imag() - a.imag();
  auto clip = [&](double p, double q) {
    if (p == 0.0) return q >= 0.0;
    double r = q / p;
    if (p < 0) {
      if (r > t1) return false;
      if (r > t0) t0 = r;
    } else {
      if (r < t0) return false;
      if (r < t1) t1 = r;
    }
    return true;
  };
  return clip(-dx, a.real() - lo_x) && clip(dx, hi_x - a.real()) &&
         clip(-dy, a.imag() - lo_y) && clip(dy, hi_y - a.imag()) && t0 <= t1;
}

}  // namespace

bool JordanDomainSpec::contains(Cpx z) const {
  switch (shape_) {
    case Shape::Disk:
      return std::abs(z) < scale_;
    case Shape::Square:
    case Shape::Rectangle:
      return std::fabs(z.real()) < scale_ * half_x_ &&
             std::fabs(z.imag()) < scale_ * half_y_;
    case Shape::Polygon: {
      // Doubles suffice for membership of generic points; the exact path is
      // used for the square-containment predicate.
      double x = z.real() / scale_, y = z.imag() / scale_;
      int cross = 0;
      std::size_t n = verts_.size();
      for (std::size_t i = 0; i < n; ++i) {
        double ax = verts_[i].first.value(), ay = verts_[i].second.value();
        double bx = verts_[(i + 1) % n].first.value(), by = verts_[(i + 1) % n].second.value();
        if ((ay <= y) != (by <= y)) {
          double t = (y - ay) / (by - ay);
          if (x < ax + t * (bx - ax)) ++cross;
        }
      }
      return cross % 2 == 1;
    }
    case Shape::RadialGraph: {
      double r = std::abs(z);
      if (r == 0.0) return true;
      double th = std::arg(z);
      return r < scale_ * (1.0 + amp_ * std::cos(k_ * th));
    }
  }
  return false;
}

double JordanDomainSpec::inradius() const {
  switch (shape_) {
    case Shape::Disk:
      return scale_;
    case Shape::Square:
    case Shape::Rectangle:
      return scale_ * std::min(half_x_, half_y_);
    case Shape::Polygon: {
      double best = std::numeric_limits<double>::infinity();
      std::size_t n = verts_.size();
      for (std::size_t i = 0; i < n; ++i) {
        Cpx a{verts_[i].first.value(), verts_[i].second.value()};
        Cpx b{verts_[(i + 1) % n].first.value(), verts_[(i + 1) % n].second.value()};
        Cpx d = b - a;
        double t = std::clamp(-(a.real() * d.real() + a.imag() * d.imag()) / std::norm(d), 0.0, 1.0);
        best = std::min(best, std::abs(a + t * d));
      }
      return scale_ * best;
    }
    case Shape::RadialGraph:
      // min over theta of the radial graph; attained where cos = -sign(amp).
      return scale_ * (1.0 - std::fabs(amp_));
  }
  return 0.0;
}

JordanDomainSpec JordanDomainSpec::normalized() const {
  JordanDomainSpec d = *this;
  double r = inradius();
  if (r <= 0) throw std::invalid_argument("normalize: origin not interior");
  d.scale_ = scale_ / r;
  return d;
}

bool JordanDomainSpec::contains_square(Cpx c, double s) const {
  switch (shape_) {
    case Shape::Disk: {
      double fx = std::fabs(c.real()) + s, fy = std::fabs(c.imag()) + s;
      return fx * fx + fy * fy < scale_ * scale_;
    }
    case Shape::Square:
    case Shape::Rectangle:
      return std::fabs(c.real()) + s < scale_ * half_x_ &&
             std::fabs(c.imag()) + s < scale_ * half_y_;
    case Shape::Polygon: {
      // Corners inside plus no polygon edge crossing the square. Exactness
      // comes from the rational overload; this double version keeps an
      // interior margin and is only used by tests.
      for (int sx = -1; sx <= 1; sx += 2)
        for (int sy = -1; sy <= 1; sy += 2)
          if (!contains(c + Cpx(sx * s, sy * s))) return false;
      std::size_t n = verts_.size();
      for (std::size_t i = 0; i < n; ++i) {
        Cpx a{scale_ * verts_[i].first.value(), scale_ * verts_[i].second.value()};
        Cpx b{scale_ * verts_[(i + 1) % n].first.value(),
              scale_ * verts_[(i + 1) % n].second.value()};
        if (segment_hits_box(a, b, c.real(), c.imag(), s)) return false;
      }
      return true;
    }
    case Shape::RadialGraph: {
      for (int sx = -1; sx <= 1; sx += 2)
        for (int sy = -1; sy <= 1; sy += 2)
          if (!contains(c + Cpx(sx * s, sy * s))) return false;
      // Sample each edge at resolution s/2 (h/4 in lattice units).
      int m = 4;
      for (int e = 0; e < 4; ++e) {
        Cpx p0, p1;
        switch (e) {
          case 0: p0 = c + Cpx(-s, -s); p1 = c + Cpx(s, -s); break;
          case 1: p0 = c + Cpx(s, -s);  p1 = c + Cpx(s, s);  break;
          case 2: p0 = c + Cpx(s, s);   p1 = c + Cpx(-s, s); break;
          default: p0 = c + Cpx(-s, s); p1 = c + Cpx(-s, -s); break;
        }
        for (int j = 1; j < m; ++j) {
          double t = static_cast<double>(j) / m;
          if (!contains(p0 + t * (p1 - p0))) return false;
        }
      }
      return true;
    }
  }
  return false;
}

bool JordanDomainSpec::contains_square_exact(long long cx, long long cy,
                                             long long cd, long long sn,
                                             long long sd) const {
  if (shape_ != Shape::Polygon)
    throw std::logic_error("contains_square_exact: polygon shapes only");
  if (scale_ != 1.0)
    throw std::logic_error("contains_square_exact: unscaled polygons only");
  // Corner coordinates cx/cd +- sn/sd as exact fractions.
  auto corner = [&](int sx, int sy) {
    Rational x(cx * sd + sx * sn * cd, cd * sd);
    Rational y(cy * sd + sy * sn * cd, cd * sd);
    return RatPt{x.num, x.den, y.num, y.den};
  };
  for (int sx = -1; sx <= 1; sx += 2)
    for (int sy = -1; sy <= 1; sy += 2)
      if (point_in_polygon_exact(verts_, corner(sx, sy)) <= 0) return false;
  // Reject if any polygon vertex lies inside or on the closed square, or any
  // edge crosses it: with all four square corners strictly inside, an edge
  // can only enter the square by crossing one of its sides or by having an
  // endpoint in it.
  auto inside_closed_square = [&](const Rational& px, const Rational& py) {
    // |p - c0/cd| <= sn/sd, cross-multiplied exactly (all dens positive).
    auto absle = [&](const Rational& p, long long c0) {
      I128 lhs = static_cast<I128>(p.num) * cd - static_cast<I128>(c0) * p.den;
      if (lhs < 0) lhs = -lhs;
      return lhs * sd <= static_cast<I128>(sn) * p.den * cd;
    };
    return absle(px, cx) && absle(py, cy);
  };
  for (auto& v : verts_)
    if (inside_closed_square(v.first, v.second)) return false;
  // Edge-side crossing test in doubles with conservative margin: corners are
  // strictly inside, so a genuine crossing has finite clearance; fall back on
  // the clipping test.
  double c_x = static_cast<double>(cx) / cd, c_y = static_cast<double>(cy) / cd;
  double s = static_cast<double>(sn) / sd;
  std::size_t n = verts_.size();
  for (std::size_t i = 0; i < n; ++i) {
    Cpx a{verts_[i].first.value(), verts_[i].second.value()};
    Cpx b{verts_[(i + 1) % n].first.value(), verts_[(i + 1) % n].second.value()};
    if (segment_hits_box(a, b, c_x, c_y, s)) return false;
  }
  return true;
}

double JordanDomainSpec::dist_to_boundary(Cpx z) const {
  switch (shape_) {
    case Shape::Disk:
      return scale_ - std::abs(z);
    case Shape::Square:
    case Shape::Rectangle:
      return std::min(scale_ * half_x_ - std::fabs(z.real()),
                      scale_ * half_y_ - std::fabs(z.imag()));
    case Shape::Polygon: {
      double best = std::numeric_limits<double>::infinity();
      std::size_t n = verts_.size();
      for (std::size_t i = 0; i < n; ++i) {
        Cpx a{scale_ * verts_[i].first.value(), scale_ * verts_[i].second.value()};
        Cpx b{scale_ * verts_[(i + 1) % n].first.value(),
              scale_ * verts_[(i + 1) % n].second.value()};
        Cpx d = b - a;
        double t = std::clamp(((z - a).real() * d.real() + (z - a).imag() * d.imag()) / std::norm(d), 0.0, 1.0);
        best = std::min(best, std::abs(z - (a + t * d)));
      }
      return best;
    }
    case Shape::RadialGraph: {
      // Coarse scan plus local refinement; adequate for samplers.
      double best = std::numeric_limits<double>::infinity();
      int m = 256;
      for (int i = 0; i < m; ++i) {
        double th = kTwoPi * i / m;
        double r = scale_ * (1.0 + amp_ * std::cos(k_ * th));
        best = std::min(best, std::abs(z - Cpx(r * std::cos(th), r * std::sin(th))));
      }
      return best;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Discretization.
// ---------------------------------------------------------------------------

LatticeDomain discretize(const JordanDomainSpec& D, int N) {
  if (N < 1) throw std::invalid_argument("discretize: N >= 1 required");
  if (!D.contains(Cpx(0, 0)))
    throw std::invalid_argument("discretize: origin not interior");

  // Candidate cells: integer p with the closed square of side 1/N centered
  // at p/N inside D. Scan a bounding box of radius rad(D)*N.
  double rad = 0.0;
  {
    // Conservative outer radius per shape.
    switch (D.shape()) {
      case JordanDomainSpec::Shape::Disk: rad = D.scale(); break;
      case JordanDomainSpec::Shape::Square:
      case JordanDomainSpec::Shape::Rectangle:
        rad = D.scale() * std::hypot(D.rect_half_x(), D.rect_half_y());
        break;
      case JordanDomainSpec::Shape::Polygon: {
        for (auto& v : D.polygon_vertices())
          rad = std::max(rad, D.scale() * std::hypot(v.first.value(), v.second.value()));
        break;
      }
      case JordanDomainSpec::Shape::RadialGraph:
        rad = D.scale() * (1.0 + std::fabs(D.radial_amp()));
        break;
    }
  }
  int M = static_cast<int>(std::ceil(rad * N)) + 2;
  const bool exact_poly =
      D.shape() == JordanDomainSpec::Shape::Polygon && D.scale() == 1.0;
  std::vector<PointI> cand;
  for (int y = -M; y <= M; ++y)
    for (int x = -M; x <= M; ++x) {
      bool inside;
      if (exact_poly)
        inside = D.contains_square_exact(x, y, N, 1, 2LL * N);
      else
        inside = D.contains_square(Cpx(static_cast<double>(x) / N,
                                       static_cast<double>(y) / N),
                                   0.5 / N);
      if (inside) cand.push_back({x, y});
    }
  if (cand.empty()) throw EmptyDomain("discretize: no cell squares fit inside D");

  // Connected component of the origin.
  auto cset = key_set(cand);
  if (!cset.count(point_key({0, 0})))
    throw EmptyDomain("discretize: origin cell does not fit inside D");
  std::unordered_set<std::uint64_t> comp;
  std::deque<PointI> q{{0, 0}};
  comp.insert(point_key({0, 0}));
  std::vector<PointI> comp_pts{{0, 0}};
  while (!q.empty()) {
    PointI p = q.front();
    q.pop_front();
    for (auto d : kNeighbors4) {
      PointI n = p + d;
      auto k = point_key(n);
      if (cset.count(k) && !comp.count(k)) {
        comp.insert(k);
        comp_pts.push_back(n);
        q.push_back(n);
      }
    }
  }

  // Peel the inner boundary of the component.
  std::vector<PointI> result;
  for (auto p : comp_pts) {
    bool interior = true;
    for (auto d : kNeighbors4)
      if (!comp.count(point_key(p + d))) { interior = false; break; }
    if (interior) result.push_back(p);
  }
  if (result.empty()) throw EmptyDomain("discretize: peeled domain is empty");

  // Keep the origin's component of the peeled set (peeling can disconnect).
  auto rset = key_set(result);
  if (!rset.count(point_key({0, 0})))
    throw EmptyDomain("discretize: origin removed by boundary peeling");
  std::unordered_set<std::uint64_t> comp2;
  std::vector<PointI> final_pts{{0, 0}};
  comp2.insert(point_key({0, 0}));
  std::deque<PointI> q2{{0, 0}};
  while (!q2.empty()) {
    PointI p = q2.front();
    q2.pop_front();
    for (auto d : kNeighbors4) {
      PointI n = p + d;
      auto k = point_key(n);
      if (rset.count(k) && !comp2.count(k)) {
        comp2.insert(k);
        final_pts.push_back(n);
        q2.push_back(n);
      }
    }
  }
  return LatticeDomain::from_points(std::move(final_pts), Rational(1, N));
}

LatticeDomain lattice_disk(int n) {
  if (n < 1) throw std::invalid_argument("lattice_disk: n >= 1");
  std::vector<PointI> pts;
  for (int y = -n; y <= n; ++y)
    for (int x = -n; x <= n; ++x)
      if (static_cast<long long>(x) * x + static_cast<long long>(y) * y <=
          static_cast<long long>(n) * n)
        pts.push_back({x, y});
  return LatticeDomain::from_points(std::move(pts), Rational(1, 1));
}

std::string to_text_grid(const LatticeDomain& A) {
  int xmin = A.points()[0].x, xmax = xmin, ymin = A.points()[0].y, ymax = ymin;
  for (auto p : A.points()) {
    xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
  }
  std::ostringstream os;
  for (int y = ymax; y >= ymin; --y) {
    for (int x = xmin; x <= xmax; ++x)
      os << (A.contains({x, y}) ? '#' : '.');
    os << '\n';
  }
  return os.str();
}

std::string to_json_points(const LatticeDomain& A) {
  std::ostringstream os;
  os << "{\"spacing\":[" << A.spacing().num << "," << A.spacing().den
     << "],\"points\":[";
  for (std::size_t i = 0; i < A.points().size(); ++i) {
    if (i) os << ",";
    os << "[" << A.points()[i].x << "," << A.points()[i].y << "]";
  }
  os << "]}";
  return os.str();
}

}  // namespace excmeas::lattice
