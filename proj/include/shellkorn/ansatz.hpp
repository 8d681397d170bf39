#pragma once

#include "shellkorn/fields.hpp"

#include <array>

namespace shellkorn {

/// C^2 bump on [-1,1]^2 with closed-form derivatives, exactly zero outside;
/// the default tensor profile (1-x^2)^2 (1-y^2)^2 vanishes with its first
/// derivatives on the boundary and has order-one reference norms.
struct BumpProfile {
  double amplitude = 1.0;

  double f(double x, double y) const;
  double fx(double x, double y) const;
  double fy(double x, double y) const;
  double fxx(double x, double y) const;
  double fxy(double x, double y) const;
  double fyy(double x, double y) const;

  /// reference L2 norms over [-1,1]^2: (|f|, |grad f|, |D^2 f|)
  std::array<double, 3> reference_norms() const;
};

struct AnsatzSpec {
  Vec2 center = Vec2::Zero();        // flat point (theta0, z0)
  double h = 0.1;
  double alpha = 0.25;               // localization exponent
  double support_multiplier = 1.0;   // support half-width = c * h^alpha
  BumpProfile profile;
};

/// Localized Kirchhoff field u = f n - t grad_S f at scale h^alpha.
/// On regular charts f is composed with the chart offsets
/// ((theta-theta0)/s, (z-z0)/s); at a polar apex f is composed with the plane
/// chart (z cos 2 pi theta, z sin 2 pi theta)/s, which de-singularizes the
/// construction. Components and partials are closed-form.
class AnsatzField {
 public:
  AnsatzField(const SurfacePatch& surface, const AnsatzSpec& spec);

  const AnsatzSpec& spec() const { return spec_; }
  double support_halfwidth() const { return s_; }

  /// curvilinear components (u_t, u_theta, u_z)
  Vec3 components(double theta, double z, double t) const;
  /// partials P(i,j) = d u_i / d(t,theta,z)_j
  Mat3 partials(double theta, double z, double t) const;
  /// Cartesian vector u = f n - t grad_S f (valid at the apex node too)
  Vec3 cartesian(double theta, double z, double t) const;

  CurvilinearField curvilinear() const;

 private:
  struct State;
  State eval_state(double theta, double z) const;

  SurfacePatch surface_;
  AnsatzSpec spec_;
  double s_ = 0.0;
  bool apex_chart_ = false;
};

/// Nodal interpolation of the Ansatz onto a mesh; exactly zero on the
/// Dirichlet boundary. Throws when the support exits E or the mesh does not
/// resolve the support.
DisplacementField build_ansatz(const SurfacePatch& surface, const AnsatzSpec& spec,
                               const ShellMesh& mesh);

/// One row of the Eq-4.35 table: the thirteen nonzero quantities plus
/// |grad u|_11^2, in the paper's listing order.
struct AnsatzRow {
  double h = 0;
  // g11; g22, g23, g32, g33; g12, g13, g21, g31; grad2, e2; ut2, uth2, uz2
  std::array<double, 14> q{};
};

struct ScalingTable {
  std::vector<AnsatzRow> normalized;  // raw / h^(2 alpha): the table's convention
  std::vector<AnsatzRow> raw;         // plain weighted-L2 values
  std::array<double, 14> slopes{};    // log-log fits of the normalized columns
  static const std::array<const char*, 14>& names();
};

/// Exact-derivative norms of the Ansatz over its support (quadrature on the
/// support box, no mesh interpolation), for each h in the list.
ScalingTable ansatz_scaling_table(const SurfacePatch& surface, AnsatzSpec spec_template,
                                  const std::vector<double>& h_list, int quad_cells = 48,
                                  int quad_order = 6, int t_order = 6);

}  // namespace shellkorn
