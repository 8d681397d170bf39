#pragma once

#include "shellkorn/mesh.hpp"

#include <functional>

namespace shellkorn {

/// Component/derivative order used by all curvilinear gradient matrices:
/// index 0 = t (normal), 1 = theta, 2 = z.
enum class GradientVariant { Full, F, F1 };

/// The curvilinear gradient matrix: Full is the (1 + t*kappa) form, F freezes
/// t = 0 in the second/third-column denominators, F1 additionally drops the
/// undifferentiated tangential components. u = (u_t, u_theta, u_z) and
/// P(i,j) = d u_i / d(t, theta, z)_j.
Mat3 curvilinear_gradient(const Vec3& u, const Mat3& P, const FrameSample& f, double t);
Mat3 simplified_gradient(const Vec3& u, const Mat3& P, const FrameSample& f, double t,
                         GradientVariant variant);

/// Analytic field given in curvilinear components with analytic partials.
struct CurvilinearField {
  std::function<Vec3(double theta, double z, double t)> value;
  std::function<Mat3(double theta, double z, double t)> partials;
};

/// Nodal displacement field in Cartesian components over a ShellMesh.
class DisplacementField {
 public:
  explicit DisplacementField(const ShellMesh& mesh)
      : mesh_(&mesh), values(Eigen::VectorXd::Zero(3 * mesh.n_nodes())) {}

  /// interpolate a Cartesian-valued function of (theta, z, t)
  static DisplacementField sample(const ShellMesh& mesh,
                                  const std::function<Vec3(const Vec3& param)>& fn);

  const ShellMesh& mesh() const { return *mesh_; }

  Vec3 at_node(int n) const { return values.segment<3>(3 * n); }
  void set_node(int n, const Vec3& v) { values.segment<3>(3 * n) = v; }

  /// (u_t, u_theta, u_z) at a node; apex nodes use the theta = 0 frame limit.
  Vec3 curvilinear_at_node(int n) const;

  /// exact zeros at every masked node
  bool vanishes_on(const DofMap& dofs) const;

  /// restriction to free dofs / extension by zero
  Eigen::VectorXd restrict_free(const DofMap& dofs) const;
  static DisplacementField extend_free(const ShellMesh& mesh, const DofMap& dofs,
                                       const Eigen::VectorXd& free_values);

  Eigen::VectorXd values;

 private:
  const ShellMesh* mesh_;
};

/// Evaluation of the nodal interpolant at one quadrature point of a cell:
/// isoparametric Cartesian gradient and its curvilinear-frame view.
struct PointEval {
  Vec3 u_cart;
  Mat3 grad_cart;      // d u_i / d x_j
  Vec3 u_curv;         // frame components (t, theta, z)
  Mat3 grad_curv;      // curvilinear gradient matrix (equals Eq-form Full)
  FrameSample frame;
  double t;
};
PointEval eval_interpolant(const DisplacementField& field, int cell, const QuadPoint& q);

/// F and F1 obtained exactly from the full curvilinear matrix of an
/// interpolant (column rescaling / removal of undifferentiated terms).
Mat3 F_from_full(const Mat3& grad_curv, const FrameSample& f, double t);
Mat3 F1_from_full(const Mat3& grad_curv, const Vec3& u_curv, const FrameSample& f, double t);

/// (|F - grad u|_w, h * |grad u|_w) in the weighted L2 of the mesh.
std::pair<double, double> gradient_consistency_gap(const DisplacementField& field,
                                                   const ShellMesh& mesh);

/// Weighted-L2 style integrals over the mesh: sums f(cell, q) * q.weight with
/// a deterministic per-cell reduction order. Parallelized over cells when
/// parallel = true; both orderings produce bit-identical sums.
double mesh_integral(const ShellMesh& mesh,
                     const std::function<double(int cell, const QuadPoint& q)>& fn,
                     bool parallel = true);

/// Squared weighted-L2 norms of a nodal field: (|u|^2, |e(u)|^2, |grad u|^2,
/// |u_t|^2, |u_theta|^2, |u_z|^2).
struct FieldNorms {
  double u2 = 0, e2 = 0, grad2 = 0, ut2 = 0, utheta2 = 0, uz2 = 0;
};
FieldNorms field_norms(const DisplacementField& field);

}  // namespace shellkorn
