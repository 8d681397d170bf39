#include "shellkorn/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace shellkorn {

namespace {

// Gauss-Legendre nodes/weights on [-1,1]
void gauss_rule(int order, std::vector<double>& x, std::vector<double>& w) {
  switch (order) {
    case 1: x = {0.0}; w = {2.0}; return;
    case 2: x = {-0.5773502691896257, 0.5773502691896257}; w = {1.0, 1.0}; return;
    case 3:
      x = {-0.7745966692414834, 0.0, 0.7745966692414834};
      w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      return;
    case 4:
      x = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
      w = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
      return;
    default:
      // Newton iteration on Legendre polynomials for higher orders
      x.resize(order);
      w.resize(order);
      for (int i = 0; i < order; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        for (int it = 0; it < 100; ++it) {
          double p0 = 1.0, p1 = t;
          for (int k = 2; k <= order; ++k) {
            double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
          }
          double dp = order * (t * p1 - p0) / (t * t - 1.0);
          double dt = p1 / dp;
          t -= dt;
          if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= order; ++k) {
          double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        double dp = order * (t * p1 - p0) / (t * t - 1.0);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
      }
      return;
  }
}

// graded z knots: cell density multiplied by `factor` inside |z - c| <= r,
// placed at equal increments of the cumulative density so refinements nest
std::vector<double> graded_knots(double z1, double z2, int n, const GradingSpec& g) {
  std::vector<double> knots(n + 1);
  if (!g.enabled || g.factor <= 1.0 || g.radius <= 0.0) {
    for (int i = 0; i <= n; ++i) knots[i] = z1 + (z2 - z1) * i / double(n);
    return knots;
  }
  const double a = std::clamp(g.center_z - g.radius, z1, z2);
  const double b = std::clamp(g.center_z + g.radius, z1, z2);
  auto density_integral = [&](double z) {
    double v = (std::min(z, a) - z1);
    if (z > a) v += g.factor * (std::min(z, b) - a);
    if (z > b) v += z - b;
    return v;
  };
  const double total = density_integral(z2);
  for (int i = 0; i <= n; ++i) {
    const double target = total * i / double(n);
    // invert the piecewise-linear cumulative density
    double lo = z1, hi = z2;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (density_integral(mid) < target ? lo : hi) = mid;
    }
    knots[i] = 0.5 * (lo + hi);
  }
  knots.front() = z1;
  knots.back() = z2;
  return knots;
}

}  // namespace

int ShellMesh::n_th_nodes() const { return periodic_ ? res_.n_theta : res_.n_theta + 1; }

int ShellMesh::grid_index(int i, int j, int k) const {
  const int nth = n_th_nodes();
  return i + nth * (j + (res_.n_z + 1) * k);
}

ShellMesh ShellMesh::build(const SurfacePatch& surface, double h, MeshResolution res,
                           GradingSpec grading) {
  if (res.n_theta < 8 || res.n_z < 8 || res.n_t < 2)
    throw std::invalid_argument("build_shell_mesh: resolution below (8, 8, 2)");
  if (!(h > 0.0) || h >= surface.max_thickness())
    throw std::invalid_argument("build_shell_mesh: thickness exceeds curvature bound 2/max(kappa)");

  ShellMesh m(surface);
  m.h_ = h;
  m.res_ = res;
  m.periodic_ = surface.periodic_theta();
  m.apex_ = surface.polar_apex();

  const int nth = m.n_th_nodes();
  m.th_grid_.resize(res.n_theta + 1);
  for (int i = 0; i <= res.n_theta; ++i) m.th_grid_[i] = i / double(res.n_theta);
  m.z_grid_ = graded_knots(surface.z1(), surface.z2(), res.n_z, grading);
  m.t_grid_.resize(res.n_t + 1);
  for (int k = 0; k <= res.n_t; ++k) m.t_grid_[k] = -h / 2 + h * k / double(res.n_t);

  // node numbering with apex collapse
  m.node_id_.assign(nth * (res.n_z + 1) * (res.n_t + 1), -1);
  int next = 0;
  for (int k = 0; k <= res.n_t; ++k) {
    for (int j = 0; j <= res.n_z; ++j) {
      if (m.apex_ && j == 0) {
        for (int i = 0; i < nth; ++i) m.node_id_[m.grid_index(i, j, k)] = next;
        ++next;
      } else {
        for (int i = 0; i < nth; ++i) m.node_id_[m.grid_index(i, j, k)] = next++;
      }
    }
  }
  m.node_param_.resize(next);
  m.node_pos_.resize(next);
  for (int k = 0; k <= res.n_t; ++k) {
    for (int j = 0; j <= res.n_z; ++j) {
      for (int i = 0; i < nth; ++i) {
        const int id = m.node_id_[m.grid_index(i, j, k)];
        const double th = (m.apex_ && j == 0) ? 0.0 : m.th_grid_[i];
        const double z = m.z_grid_[j];
        const double t = m.t_grid_[k];
        m.node_param_[id] = Vec3(th, z, t);
        // apex position and normal are chart-independent; the catalog frame
        // formulas stay regular at z = 0 (only A_theta degenerates there)
        FrameSample f = detail::frame_unchecked(surface, th, z);
        m.node_pos_[id] = surface.position(th, z) + t * f.normal;
      }
    }
  }

  // cells
  m.cell_nodes_.reserve(size_t(res.n_theta) * res.n_z * res.n_t);
  m.cell_ijk_.reserve(m.cell_nodes_.capacity());
  for (int k = 0; k < res.n_t; ++k) {
    for (int j = 0; j < res.n_z; ++j) {
      for (int i = 0; i < res.n_theta; ++i) {
        const int ip = m.periodic_ ? (i + 1) % res.n_theta : i + 1;
        std::array<int, 8> c = {
            m.node_id_[m.grid_index(i, j, k)],      m.node_id_[m.grid_index(ip, j, k)],
            m.node_id_[m.grid_index(ip, j + 1, k)], m.node_id_[m.grid_index(i, j + 1, k)],
            m.node_id_[m.grid_index(i, j, k + 1)],  m.node_id_[m.grid_index(ip, j, k + 1)],
            m.node_id_[m.grid_index(ip, j + 1, k + 1)],
            m.node_id_[m.grid_index(i, j + 1, k + 1)]};
        m.cell_nodes_.push_back(c);
        m.cell_ijk_.push_back({i, j, k});
      }
    }
  }

  // total volume and embedded aspect ratios
  double vol = 0.0, max_aspect = 0.0;
  for (int c = 0; c < m.n_cells(); ++c) {
    for (const QuadPoint& q : m.cell_quadrature(c)) vol += q.weight;
    const auto& ijk = m.cell_ijk_[c];
    const double thmid = 0.5 * (m.th_grid_[ijk[0]] + m.th_grid_[ijk[0] + 1]);
    const double zmid = 0.5 * (m.z_grid_[ijk[1]] + m.z_grid_[ijk[1] + 1]);
    if (m.apex_ && ijk[1] == 0) continue;
    FrameSample f = detail::frame_unchecked(surface, thmid, zmid);
    const double ext_th = f.A_theta * (m.th_grid_[ijk[0] + 1] - m.th_grid_[ijk[0]]);
    const double ext_z = f.A_z * (m.z_grid_[ijk[1] + 1] - m.z_grid_[ijk[1]]);
    const double ext_t = m.t_grid_[ijk[2] + 1] - m.t_grid_[ijk[2]];
    const double mx = std::max({ext_th, ext_z, ext_t});
    const double mn = std::min({ext_th, ext_z, ext_t});
    if (mn > 0) max_aspect = std::max(max_aspect, mx / mn);
  }
  m.volume_ = vol;
  m.max_aspect_ = max_aspect;
  return m;
}

std::array<QuadPoint, 8> ShellMesh::cell_quadrature(int cell) const {
  std::array<QuadPoint, 8> out;
  const auto& ijk = cell_ijk_[cell];
  const double th0 = th_grid_[ijk[0]], th1 = th_grid_[ijk[0] + 1];
  const double z0 = z_grid_[ijk[1]], z1 = z_grid_[ijk[1] + 1];
  const double t0 = t_grid_[ijk[2]], t1 = t_grid_[ijk[2] + 1];
  static const double g = 0.5773502691896257;
  int idx = 0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        QuadPoint q;
        q.xi[0] = a ? g : -g;
        q.xi[1] = b ? g : -g;
        q.xi[2] = c ? g : -g;
        q.theta = th0 + (q.xi[0] + 1) / 2 * (th1 - th0);
        q.z = z0 + (q.xi[1] + 1) / 2 * (z1 - z0);
        q.t = t0 + (q.xi[2] + 1) / 2 * (t1 - t0);
        FrameSample f = detail::frame_unchecked(surface_, q.theta, q.z);
        q.weight = (th1 - th0) * (z1 - z0) * (t1 - t0) / 8.0 * f.A_theta * f.A_z *
                   (1 + q.t * f.kappa_theta) * (1 + q.t * f.kappa_z);
        out[idx++] = q;
      }
    }
  }
  return out;
}

std::vector<QuadPoint> ShellMesh::cell_quadrature(int cell, int order) const {
  std::vector<double> x, w;
  gauss_rule(order, x, w);
  const auto& ijk = cell_ijk_[cell];
  const double th0 = th_grid_[ijk[0]], th1 = th_grid_[ijk[0] + 1];
  const double z0 = z_grid_[ijk[1]], z1 = z_grid_[ijk[1] + 1];
  const double t0 = t_grid_[ijk[2]], t1 = t_grid_[ijk[2] + 1];
  std::vector<QuadPoint> out;
  out.reserve(order * order * order);
  for (int a = 0; a < order; ++a) {
    for (int b = 0; b < order; ++b) {
      for (int c = 0; c < order; ++c) {
        QuadPoint q;
        q.xi[0] = x[a];
        q.xi[1] = x[b];
        q.xi[2] = x[c];
        q.theta = th0 + (x[a] + 1) / 2 * (th1 - th0);
        q.z = z0 + (x[b] + 1) / 2 * (z1 - z0);
        q.t = t0 + (x[c] + 1) / 2 * (t1 - t0);
        FrameSample f = detail::frame_unchecked(surface_, q.theta, q.z);
        q.weight = (th1 - th0) * (z1 - z0) * (t1 - t0) / 8.0 * w[a] * w[b] * w[c] * f.A_theta *
                   f.A_z * (1 + q.t * f.kappa_theta) * (1 + q.t * f.kappa_z);
        out.push_back(q);
      }
    }
  }
  return out;
}

DofMap ShellMesh::tag_dirichlet() const {
  DofMap d;
  d.masked.assign(n_nodes(), false);
  const int nth = n_th_nodes();
  for (int k = 0; k <= res_.n_t; ++k) {
    for (int i = 0; i < nth; ++i) {
      d.masked[node_id_[grid_index(i, res_.n_z, k)]] = true;       // outer ring
      if (!apex_) d.masked[node_id_[grid_index(i, 0, k)]] = true;  // inner ring (band)
    }
    if (!periodic_) {
      for (int j = 0; j <= res_.n_z; ++j) {
        d.masked[node_id_[grid_index(0, j, k)]] = true;
        d.masked[node_id_[grid_index(nth - 1, j, k)]] = true;
      }
    }
  }
  d.free_index.assign(n_nodes(), -1);
  int next = 0;
  for (int n = 0; n < n_nodes(); ++n) {
    if (!d.masked[n]) {
      d.free_index[n] = next;
      next += 3;
    }
  }
  d.n_free = next;
  return d;
}

CellSet ShellMesh::subdomain(const Vec2& center, double radius) const {
  if (!(radius > 0.0)) throw std::invalid_argument("subdomain: radius must be positive");
  CellSet s;
  s.center = center;
  s.radius = radius;
  for (int c = 0; c < n_cells(); ++c) {
    const auto& ijk = cell_ijk_[c];
    const double thmid = 0.5 * (th_grid_[ijk[0]] + th_grid_[ijk[0] + 1]);
    const double zmid = 0.5 * (z_grid_[ijk[1]] + z_grid_[ijk[1] + 1]);
    if (surface_.param_distance(Vec2(thmid, zmid), center) <= radius) s.cells.push_back(c);
  }
  return s;
}

void ShellMesh::write_text(std::ostream& os) const {
  os << "# shell mesh: nodes " << n_nodes() << " cells " << n_cells() << "\n";
  os << "# node table: id theta z t x y z\n";
  os.precision(17);
  for (int n = 0; n < n_nodes(); ++n) {
    const Vec3& p = node_param_[n];
    const Vec3& x = node_pos_[n];
    os << n << " " << p[0] << " " << p[1] << " " << p[2] << " " << x[0] << " " << x[1] << " "
       << x[2] << "\n";
  }
  os << "# cell table: n0 n1 n2 n3 n4 n5 n6 n7\n";
  for (int c = 0; c < n_cells(); ++c) {
    const auto& cn = cell_nodes_[c];
    for (int q = 0; q < 8; ++q) os << cn[q] << (q == 7 ? '\n' : ' ');
  }
}

}  // namespace shellkorn
