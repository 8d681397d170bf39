#include "shellkorn/fields.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace shellkorn {

Mat3 curvilinear_gradient(const Vec3& u, const Mat3& P, const FrameSample& f, double t) {
  const double sh_th = 1.0 + t * f.kappa_theta;
  const double sh_z = 1.0 + t * f.kappa_z;
  if (sh_th <= 0.0 || sh_z <= 0.0)
    throw std::domain_error("curvilinear_gradient: 1 + t*kappa <= 0");
  const double At = f.A_theta, Az = f.A_z;
  Mat3 G;
  G(0, 0) = P(0, 0);
  G(0, 1) = (P(0, 1) - At * f.kappa_theta * u[1]) / (At * sh_th);
  G(0, 2) = (P(0, 2) - Az * f.kappa_z * u[2]) / (Az * sh_z);
  G(1, 0) = P(1, 0);
  G(1, 1) = (Az * P(1, 1) + Az * At * f.kappa_theta * u[0] + f.A_theta_dz * u[2]) / (Az * At * sh_th);
  G(1, 2) = (At * P(1, 2) - f.A_z_dtheta * u[2]) / (Az * At * sh_z);
  G(2, 0) = P(2, 0);
  G(2, 1) = (Az * P(2, 1) - f.A_theta_dz * u[1]) / (Az * At * sh_th);
  G(2, 2) = (At * P(2, 2) + Az * At * f.kappa_z * u[0] + f.A_z_dtheta * u[1]) / (Az * At * sh_z);
  return G;
}

Mat3 simplified_gradient(const Vec3& u, const Mat3& P, const FrameSample& f, double t,
                         GradientVariant variant) {
  if (variant == GradientVariant::Full) return curvilinear_gradient(u, P, f, t);
  if (variant == GradientVariant::F) return curvilinear_gradient(u, P, f, 0.0);
  const double At = f.A_theta, Az = f.A_z;
  Mat3 G;
  G(0, 0) = P(0, 0);
  G(0, 1) = P(0, 1) / At;
  G(0, 2) = P(0, 2) / Az;
  G(1, 0) = P(1, 0);
  G(1, 1) = P(1, 1) / At + f.kappa_theta * u[0];
  G(1, 2) = P(1, 2) / Az;
  G(2, 0) = P(2, 0);
  G(2, 1) = P(2, 1) / At;
  G(2, 2) = P(2, 2) / Az + f.kappa_z * u[0];
  return G;
}

Mat3 F_from_full(const Mat3& grad_curv, const FrameSample& f, double t) {
  Mat3 F = grad_curv;
  F.col(1) *= (1.0 + t * f.kappa_theta);
  F.col(2) *= (1.0 + t * f.kappa_z);
  return F;
}

Mat3 F1_from_full(const Mat3& grad_curv, const Vec3& u_curv, const FrameSample& f, double t) {
  Mat3 F = F_from_full(grad_curv, f, t);
  const double At = f.A_theta, Az = f.A_z;
  F(0, 1) += f.kappa_theta * u_curv[1];
  F(0, 2) += f.kappa_z * u_curv[2];
  F(1, 1) -= f.A_theta_dz * u_curv[2] / (At * Az);
  F(1, 2) += f.A_z_dtheta * u_curv[2] / (At * Az);
  F(2, 1) += f.A_theta_dz * u_curv[1] / (At * Az);
  F(2, 2) -= f.A_z_dtheta * u_curv[1] / (At * Az);
  return F;
}

DisplacementField DisplacementField::sample(const ShellMesh& mesh,
                                            const std::function<Vec3(const Vec3&)>& fn) {
  DisplacementField u(mesh);
  for (int n = 0; n < mesh.n_nodes(); ++n) u.set_node(n, fn(mesh.node_param(n)));
  return u;
}

Vec3 DisplacementField::curvilinear_at_node(int n) const {
  const Vec3& p = mesh_->node_param(n);
  // apex nodes carry the theta = 0 directional frame limit
  double z = p[1];
  if (mesh_->surface().polar_apex())
    z = std::max(z, mesh_->surface().z1() + 4 * mesh_->surface().guard_radius());
  FrameSample f = detail::frame_unchecked(mesh_->surface(), p[0], z);
  const Vec3 u = at_node(n);
  return Vec3(u.dot(f.normal), u.dot(f.e_theta), u.dot(f.e_z));
}

bool DisplacementField::vanishes_on(const DofMap& dofs) const {
  for (int n = 0; n < mesh_->n_nodes(); ++n)
    if (dofs.masked[n] && at_node(n) != Vec3::Zero()) return false;
  return true;
}

Eigen::VectorXd DisplacementField::restrict_free(const DofMap& dofs) const {
  Eigen::VectorXd out(dofs.n_free);
  for (int n = 0; n < mesh_->n_nodes(); ++n)
    if (dofs.free_index[n] >= 0) out.segment<3>(dofs.free_index[n]) = at_node(n);
  return out;
}

DisplacementField DisplacementField::extend_free(const ShellMesh& mesh, const DofMap& dofs,
                                                 const Eigen::VectorXd& free_values) {
  DisplacementField u(mesh);
  for (int n = 0; n < mesh.n_nodes(); ++n)
    if (dofs.free_index[n] >= 0) u.set_node(n, free_values.segment<3>(dofs.free_index[n]));
  return u;
}

namespace {
// trilinear shape functions / reference derivatives at xi in [-1,1]^3
void shape(const double xi[3], double N[8], double dN[8][3]) {
  static const double sgn[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                                   {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};
  for (int q = 0; q < 8; ++q) {
    const double sx = sgn[q][0], sy = sgn[q][1], sz = sgn[q][2];
    N[q] = (1 + sx * xi[0]) * (1 + sy * xi[1]) * (1 + sz * xi[2]) / 8.0;
    dN[q][0] = sx * (1 + sy * xi[1]) * (1 + sz * xi[2]) / 8.0;
    dN[q][1] = sy * (1 + sx * xi[0]) * (1 + sz * xi[2]) / 8.0;
    dN[q][2] = sz * (1 + sx * xi[0]) * (1 + sy * xi[1]) / 8.0;
  }
}
}  // namespace

PointEval eval_interpolant(const DisplacementField& field, int cell, const QuadPoint& q) {
  const ShellMesh& mesh = field.mesh();
  const auto& nodes = mesh.cell_nodes(cell);
  double N[8], dN[8][3];
  shape(q.xi, N, dN);
  // isoparametric geometry
  Mat3 J = Mat3::Zero();
  Vec3 u = Vec3::Zero();
  Eigen::Matrix<double, 3, 8> U;
  for (int a = 0; a < 8; ++a) {
    const Vec3 X = mesh.node_position(nodes[a]);
    const Vec3 Ua = field.at_node(nodes[a]);
    U.col(a) = Ua;
    u += N[a] * Ua;
    for (int p = 0; p < 3; ++p) J.col(p) += dN[a][p] * X;
  }
  const Mat3 Jinv = J.inverse();
  Mat3 grad = Mat3::Zero();  // du_i/dx_j
  for (int a = 0; a < 8; ++a) {
    Vec3 g = Vec3::Zero();
    for (int p = 0; p < 3; ++p) g += dN[a][p] * Jinv.row(p).transpose();
    grad += U.col(a) * g.transpose();
  }
  PointEval out;
  out.u_cart = u;
  out.grad_cart = grad;
  out.frame = detail::frame_unchecked(mesh.surface(), q.theta, q.z);
  out.t = q.t;
  Mat3 Q;
  Q.col(0) = out.frame.normal;
  Q.col(1) = out.frame.e_theta;
  Q.col(2) = out.frame.e_z;
  out.u_curv = Q.transpose() * u;
  out.grad_curv = Q.transpose() * grad * Q;
  return out;
}

std::pair<double, double> gradient_consistency_gap(const DisplacementField& field,
                                                   const ShellMesh& mesh) {
  double gap2 = 0.0, grad2 = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    for (const QuadPoint& q : mesh.cell_quadrature(c)) {
      PointEval pe = eval_interpolant(field, c, q);
      const Mat3 F = F_from_full(pe.grad_curv, pe.frame, pe.t);
      gap2 += q.weight * (F - pe.grad_curv).squaredNorm();
      grad2 += q.weight * pe.grad_curv.squaredNorm();
    }
  }
  return {std::sqrt(gap2), mesh.thickness() * std::sqrt(grad2)};
}

double mesh_integral(const ShellMesh& mesh,
                     const std::function<double(int, const QuadPoint&)>& fn, bool parallel) {
  const int nc = mesh.n_cells();
  std::vector<double> partial(nc);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int c = 0; c < nc; ++c) {
      double s = 0.0;
      for (const QuadPoint& q : mesh.cell_quadrature(c)) s += fn(c, q);
      partial[c] = s;
    }
  } else {
    for (int c = 0; c < nc; ++c) {
      double s = 0.0;
      for (const QuadPoint& q : mesh.cell_quadrature(c)) s += fn(c, q);
      partial[c] = s;
    }
  }
  double total = 0.0;
  for (int c = 0; c < nc; ++c) total += partial[c];
  return total;
}

FieldNorms field_norms(const DisplacementField& field) {
  const ShellMesh& mesh = field.mesh();
  FieldNorms n;
  const int nc = mesh.n_cells();
  std::vector<FieldNorms> partial(nc);
#pragma omp parallel for schedule(static)
  for (int c = 0; c < nc; ++c) {
    FieldNorms s;
    for (const QuadPoint& q : mesh.cell_quadrature(c)) {
      PointEval pe = eval_interpolant(field, c, q);
      const Mat3 e = 0.5 * (pe.grad_cart + pe.grad_cart.transpose());
      s.u2 += q.weight * pe.u_cart.squaredNorm();
      s.e2 += q.weight * e.squaredNorm();
      s.grad2 += q.weight * pe.grad_cart.squaredNorm();
      s.ut2 += q.weight * pe.u_curv[0] * pe.u_curv[0];
      s.utheta2 += q.weight * pe.u_curv[1] * pe.u_curv[1];
      s.uz2 += q.weight * pe.u_curv[2] * pe.u_curv[2];
    }
    partial[c] = s;
  }
  for (int c = 0; c < nc; ++c) {
    n.u2 += partial[c].u2;
    n.e2 += partial[c].e2;
    n.grad2 += partial[c].grad2;
    n.ut2 += partial[c].ut2;
    n.utheta2 += partial[c].utheta2;
    n.uz2 += partial[c].uz2;
  }
  return n;
}

}  // namespace shellkorn
