#include <algorithm>
#include <cmath>
#include <deque>

#include "excmeas/harmonic.hpp"

namespace excmeas::harmonic {

namespace {

// One multigrid level: unscaled 5-point operator L u = 4u - sum(nbrs),
// Dirichlet nodes frozen in u.
struct Level {
  int nx = 0, ny = 0;
  std::vector<std::uint8_t> mask;  // 0 exterior, 1 interior, 2 boundary
  std::vector<double> u, rhs, res;

  std::size_t id(int i, int j) const {
    return static_cast<std::size_t>(j) * nx + i;
  }

  void smooth(int sweeps) {
    for (int s = 0; s < sweeps; ++s)
      for (int color = 0; color < 2; ++color)
        for (int j = 1; j < ny - 1; ++j) {
          int i0 = 1 + ((j + color) & 1);
          for (int i = i0; i < nx - 1; i += 2) {
            std::size_t k = id(i, j);
            if (mask[k] != 1) continue;
            u[k] = 0.25 * (u[k - 1] + u[k + 1] + u[k - nx] + u[k + nx] + rhs[k]);
          }
        }
  }

  double residual_norm() {
    double worst = 0.0;
    for (int j = 1; j < ny - 1; ++j)
      for (int i = 1; i < nx - 1; ++i) {
        std::size_t k = id(i, j);
        if (mask[k] != 1) { res[k] = 0.0; continue; }
        res[k] = rhs[k] + u[k - 1] + u[k + 1] + u[k - nx] + u[k + nx] - 4.0 * u[k];
        worst = std::max(worst, std::fabs(res[k]));
      }
    return worst;
  }
};

struct Multigrid {
  std::vector<Level> levels;

  void build_coarse_levels() {
    while (true) {
      const Level& f = levels.back();
      if (std::min(f.nx, f.ny) <= 17 || levels.size() >= 12) break;
      Level c;
      c.nx = (f.nx + 1) / 2;
      c.ny = (f.ny + 1) / 2;
      c.mask.assign(static_cast<std::size_t>(c.nx) * c.ny, 0);
      c.u.assign(c.mask.size(), 0.0);
      c.rhs.assign(c.mask.size(), 0.0);
      c.res.assign(c.mask.size(), 0.0);
      for (int J = 1; J < c.ny - 1; ++J)
        for (int I = 1; I < c.nx - 1; ++I) {
          int i = 2 * I, j = 2 * J;
          if (i >= f.nx - 1 || j >= f.ny - 1) continue;
          bool ok = f.mask[f.id(i, j)] == 1 && f.mask[f.id(i - 1, j)] == 1 &&
                    f.mask[f.id(i + 1, j)] == 1 && f.mask[f.id(i, j - 1)] == 1 &&
                    f.mask[f.id(i, j + 1)] == 1;
          if (ok) c.mask[c.id(I, J)] = 1;
        }
      levels.push_back(std::move(c));
    }
  }

  void vcycle(std::size_t ell) {
    Level& f = levels[ell];
    if (ell + 1 == levels.size()) {
      f.smooth(200);
      return;
    }
    f.smooth(2);
    f.residual_norm();
    Level& c = levels[ell + 1];
    std::fill(c.u.begin(), c.u.end(), 0.0);
    // Full-weighting restriction; factor 4 rescales the unscaled stencil.
    for (int J = 1; J < c.ny - 1; ++J)
      for (int I = 1; I < c.nx - 1; ++I) {
        if (c.mask[c.id(I, J)] != 1) { c.rhs[c.id(I, J)] = 0.0; continue; }
        int i = 2 * I, j = 2 * J;
        auto r = [&](int di, int dj) { return f.res[f.id(i + di, j + dj)]; };
        double v = 0.25 * r(0, 0) +
                   0.125 * (r(1, 0) + r(-1, 0) + r(0, 1) + r(0, -1)) +
                   0.0625 * (r(1, 1) + r(1, -1) + r(-1, 1) + r(-1, -1));
        c.rhs[c.id(I, J)] = 4.0 * v;
      }
    vcycle(ell + 1);
    // Bilinear prolongation into fine interior nodes.
    for (int j = 1; j < f.ny - 1; ++j)
      for (int i = 1; i < f.nx - 1; ++i) {
        if (f.mask[f.id(i, j)] != 1) continue;
        int I = i / 2, J = j / 2;
        auto cu = [&](int a, int b) {
          a = std::min(a, c.nx - 1);
          b = std::min(b, c.ny - 1);
          return c.u[c.id(a, b)];
        };
        double e;
        if (i % 2 == 0 && j % 2 == 0) e = cu(I, J);
        else if (j % 2 == 0) e = 0.5 * (cu(I, J) + cu(I + 1, J));
        else if (i % 2 == 0) e = 0.5 * (cu(I, J) + cu(I, J + 1));
        else e = 0.25 * (cu(I, J) + cu(I + 1, J) + cu(I, J + 1) + cu(I + 1, J + 1));
        f.u[f.id(i, j)] += e;
      }
    f.smooth(2);
  }
};

}  // namespace

HarmonicField HarmonicField::solve(const lattice::UnionOfSquaresRegion& R,
                                   const std::function<double(Cpx)>& bval,
                                   int refine, double tol) {
  if (refine < 2 || refine % 2 != 0)
    throw std::invalid_argument("HarmonicField: refine must be even and >= 2");
  const auto& A = R.cells();
  int xmin = A.points()[0].x, xmax = xmin, ymin = A.points()[0].y, ymax = ymin;
  for (auto p : A.points()) {
    xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
  }

  HarmonicField F;
  F.hscale_ = R.spacing().value();
  F.delta_ = F.hscale_ / refine;
  F.nx_ = (xmax - xmin + 1) * refine + 1;
  F.ny_ = (ymax - ymin + 1) * refine + 1;
  // Node (i, j) sits at lattice coords (xmin - 1/2 + i/refine, ...).
  F.bx_ = static_cast<int>(std::lround((0.5 - xmin) * refine));
  F.by_ = static_cast<int>(std::lround((0.5 - ymin) * refine));

  std::size_t nn = static_cast<std::size_t>(F.nx_) * F.ny_;
  F.cell_mask_.assign(static_cast<std::size_t>(F.nx_ - 1) * (F.ny_ - 1), 0);
  auto cell_id = [&](int i, int j) {
    return static_cast<std::size_t>(j) * (F.nx_ - 1) + i;
  };
  for (int j = 0; j < F.ny_ - 1; ++j)
    for (int i = 0; i < F.nx_ - 1; ++i) {
      double cx = xmin - 0.5 + (i + 0.5) / refine;
      double cy = ymin - 0.5 + (j + 0.5) / refine;
      PointI cell{static_cast<int>(std::floor(cx + 0.5)),
                  static_cast<int>(std::floor(cy + 0.5))};
      if (A.contains(cell)) F.cell_mask_[cell_id(i, j)] = 1;
    }

  F.node_mask_.assign(nn, 0);
  auto node_id = [&](int i, int j) { return static_cast<std::size_t>(j) * F.nx_ + i; };
  for (int j = 0; j < F.ny_; ++j)
    for (int i = 0; i < F.nx_; ++i) {
      int in = 0, total = 0;
      for (int dj = -1; dj <= 0; ++dj)
        for (int di = -1; di <= 0; ++di) {
          int ci = i + di, cj = j + dj;
          if (ci < 0 || cj < 0 || ci >= F.nx_ - 1 || cj >= F.ny_ - 1) { ++total; continue; }
          ++total;
          if (F.cell_mask_[cell_id(ci, cj)]) ++in;
        }
      if (in == 4) F.node_mask_[node_id(i, j)] = 1;
      else if (in > 0) F.node_mask_[node_id(i, j)] = 2;
    }

  F.u_.assign(nn, 0.0);
  F.bmax_ = 1.0;
  for (int j = 0; j < F.ny_; ++j)
    for (int i = 0; i < F.nx_; ++i)
      if (F.node_mask_[node_id(i, j)] == 2) {
        Cpx z{(xmin - 0.5 + static_cast<double>(i) / refine) * F.hscale_,
              (ymin - 0.5 + static_cast<double>(j) / refine) * F.hscale_};
        double v = bval(z);
        F.u_[node_id(i, j)] = v;
        F.bmax_ = std::max(F.bmax_, std::fabs(v));
      }

  Multigrid mg;
  mg.levels.emplace_back();
  Level& fine = mg.levels.back();
  fine.nx = F.nx_;
  fine.ny = F.ny_;
  fine.mask = F.node_mask_;
  fine.u = F.u_;
  fine.rhs.assign(nn, 0.0);
  fine.res.assign(nn, 0.0);
  mg.build_coarse_levels();

  double target = tol * F.bmax_;
  double r = mg.levels[0].residual_norm();
  int cycles = 0;
  while (r > target && cycles < 100) {
    mg.vcycle(0);
    r = mg.levels[0].residual_norm();
    ++cycles;
  }
  if (r > 1e-8 * F.bmax_)
    throw MeshTooCoarse("grid solve stalled at residual " + std::to_string(r));
  F.residual_ = r;
  F.u_ = std::move(mg.levels[0].u);
  return F;
}

double HarmonicField::value(Cpx z) const {
  double gx = z.real() / delta_ + bx_;
  double gy = z.imag() / delta_ + by_;
  int i = static_cast<int>(std::floor(gx));
  int j = static_cast<int>(std::floor(gy));
  i = std::clamp(i, 0, nx_ - 2);
  j = std::clamp(j, 0, ny_ - 2);
  double fx = gx - i, fy = gy - j;
  auto u = [&](int a, int b) { return u_[static_cast<std::size_t>(b) * nx_ + a]; };
  return (1 - fx) * (1 - fy) * u(i, j) + fx * (1 - fy) * u(i + 1, j) +
         (1 - fx) * fy * u(i, j + 1) + fx * fy * u(i + 1, j + 1);
}

Cpx HarmonicField::gradient(Cpx z) const {
  double gx = z.real() / delta_ + bx_;
  double gy = z.imag() / delta_ + by_;
  int i = std::clamp(static_cast<int>(std::floor(gx)), 0, nx_ - 2);
  int j = std::clamp(static_cast<int>(std::floor(gy)), 0, ny_ - 2);
  double fx = gx - i, fy = gy - j;
  auto u = [&](int a, int b) { return u_[static_cast<std::size_t>(b) * nx_ + a]; };
  double ux = ((1 - fy) * (u(i + 1, j) - u(i, j)) +
               fy * (u(i + 1, j + 1) - u(i, j + 1))) / delta_;
  double uy = ((1 - fx) * (u(i, j + 1) - u(i, j)) +
               fx * (u(i + 1, j + 1) - u(i + 1, j))) / delta_;
  return {ux, uy};
}

double HarmonicField::build_conjugate() {
  // Integrate the Cauchy-Riemann increments over the dual (cell-center)
  // graph: crossing east uses v_x = -u_y, crossing north uses v_y = u_x.
  std::size_t nc = cell_mask_.size();
  v_.assign(nc, 0.0);
  std::vector<char> seen(nc, 0);
  int cw = nx_ - 1;
  auto cid = [&](int i, int j) { return static_cast<std::size_t>(j) * cw + i; };
  auto uat = [&](int i, int j) { return u_[static_cast<std::size_t>(j) * nx_ + i]; };
  // start from any in-region cell
  int si = -1, sj = -1;
  for (int j = 0; j < ny_ - 1 && si < 0; ++j)
    for (int i = 0; i < cw && si < 0; ++i)
      if (cell_mask_[cid(i, j)]) { si = i; sj = j; }
  if (si < 0) throw MeshTooCoarse("conjugate: empty region");
  std::deque<std::pair<int, int>> q{{si, sj}};
  seen[cid(si, sj)] = 1;
  while (!q.empty()) {
    auto [i, j] = q.front();
    q.pop_front();
    double vc = v_[cid(i, j)];
    struct Move { int di, dj; };
    for (Move mv : {Move{1, 0}, Move{-1, 0}, Move{0, 1}, Move{0, -1}}) {
      int ni = i + mv.di, nj = j + mv.dj;
      if (ni < 0 || nj < 0 || ni >= cw || nj >= ny_ - 1) continue;
      if (!cell_mask_[cid(ni, nj)] || seen[cid(ni, nj)]) continue;
      double dv = 0.0;
      if (mv.di == 1) dv = -(uat(i + 1, j + 1) - uat(i + 1, j));
      else if (mv.di == -1) dv = (uat(i, j + 1) - uat(i, j));
      else if (mv.dj == 1) dv = (uat(i + 1, j + 1) - uat(i, j + 1));
      else dv = -(uat(i + 1, j) - uat(i, j));
      v_[cid(ni, nj)] = vc + dv;
      seen[cid(ni, nj)] = 1;
      q.push_back({ni, nj});
    }
  }
  // Loop-closure defect around interior nodes (path independence).
  double defect = 0.0;
  for (int j = 1; j < ny_ - 1; ++j)
    for (int i = 1; i < nx_ - 1; ++i) {
      if (node_mask_[static_cast<std::size_t>(j) * nx_ + i] != 1) continue;
      if (!cell_mask_[cid(i - 1, j - 1)] || !cell_mask_[cid(i, j - 1)] ||
          !cell_mask_[cid(i - 1, j)] || !cell_mask_[cid(i, j)])
        continue;
      // The circulation of the CR increments around a node telescopes to the
      // 5-point residual of u there.
      double res5 = uat(i + 1, j) + uat(i - 1, j) + uat(i, j + 1) + uat(i, j - 1) -
                    4.0 * uat(i, j);
      defect = std::max(defect, std::fabs(res5));
    }
  // Anchor v(0) = 0 via the four cells around the origin node.
  double v0 = conjugate(Cpx(0.0, 0.0));
  for (auto& x : v_) x -= v0;
  return defect;
}

double HarmonicField::conjugate(Cpx z) const {
  // Dual grid: cell (i, j) center sits at node (i, j) + (delta/2, delta/2).
  double gx = z.real() / delta_ + bx_ - 0.5;
  double gy = z.imag() / delta_ + by_ - 0.5;
  int cw = nx_ - 1;
  int i = std::clamp(static_cast<int>(std::floor(gx)), 0, cw - 2);
  int j = std::clamp(static_cast<int>(std::floor(gy)), 0, ny_ - 3);
  double fx = gx - i, fy = gy - j;
  auto v = [&](int a, int b) { return v_[static_cast<std::size_t>(b) * cw + a]; };
  return (1 - fx) * (1 - fy) * v(i, j) + fx * (1 - fy) * v(i + 1, j) +
         (1 - fx) * fy * v(i, j + 1) + fx * fy * v(i + 1, j + 1);
}

}  // namespace excmeas::harmonic
