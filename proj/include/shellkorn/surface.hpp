#pragma once

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace shellkorn {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Metric/curvature data of the mid-surface at one parameter point (theta, z).
///
/// Curvature sign convention: dn/dtheta = +kappa_theta * A_theta * e_theta and
/// dn/dz = +kappa_z * A_z * e_z, so the thickness shift factors of the shell are
/// (1 + t*kappa) and both principal curvatures are >= 0 on the elliptic catalog.
struct FrameSample {
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::Zero();
  Vec3 e_theta = Vec3::Zero();
  Vec3 e_z = Vec3::Zero();
  double A_theta = 0.0;
  double A_z = 0.0;
  double kappa_theta = 0.0;
  double kappa_z = 0.0;
  // first partials of the metric factors
  double A_theta_dtheta = 0.0;
  double A_theta_dz = 0.0;
  double A_z_dtheta = 0.0;
  double A_z_dz = 0.0;
  // parameter partials (d/dtheta, d/dz) of the curvatures
  Vec2 kappa_theta_grad = Vec2::Zero();
  Vec2 kappa_z_grad = Vec2::Zero();

  // surface gradient magnitude of a scalar with parameter partials (ft, fz)
  double surface_grad_norm(double ft, double fz) const {
    const double gt = ft / A_theta;
    const double gz = fz / A_z;
    return std::sqrt(gt * gt + gz * gz);
  }
};

/// Shell mid-surface parameters: metric bounds a, A, gradient bound B, curvature
/// bound K, z-extent bounds l, L, quadratic growth constant c1, ratio gradient
/// bound c2. Sampled sup/inf estimates.
struct ShellParams {
  double a = 0.0, A = 0.0, B = 0.0, K = 0.0;
  double l = 0.0, L = 0.0;
  double c1 = 1.0, c2 = 0.0;

  bool valid() const { return a > 0.0 && A < 1e300 && l > 0.0 && c1 >= 1.0 && c2 >= 0.0; }
};

/// Outcome of a geometric hypothesis check.
struct ConditionReport {
  std::string id;
  bool pass = false;
  bool applicable = true;
  Vec2 worst_point = Vec2::Zero();
  double measured = 0.0;
  double tolerance = 0.0;
  std::string note;
};

enum class SurfaceKind { SphereCap, QuarticCap, CylinderStrip, CustomAnalytic };

std::string to_string(SurfaceKind k);
SurfaceKind surface_kind_from_string(const std::string& name);

/// Analytic mid-surface given by one principal-coordinate patch
/// r(theta, z): [0,1] x [z1,z2] -> R^3. Immutable; evaluation is pure and
/// safe for concurrent shared use.
class SurfacePatch {
 public:
  /// Catalog factory. Recognized params per kind:
  ///   sphere-cap:     radius (1), z1 (0.2), z2 (0.8)
  ///   quartic-cap:    scale (1), z1 (0), z2 (0.95)
  ///   cylinder-strip: radius (1), height (1), z1 (0), z2 (1)
  static SurfacePatch make(SurfaceKind kind, const std::map<std::string, double>& params = {});
  static SurfacePatch make(const std::string& kind, const std::map<std::string, double>& params = {});

  /// Custom-analytic patch from an embedding map; frame data by 4th-order
  /// central differences at the given step. The map must be evaluable slightly
  /// beyond the parameter domain (stencil overhang 2*fd_step).
  static SurfacePatch custom(std::function<Vec3(double, double)> embedding, double z1, double z2,
                             bool periodic_theta, std::vector<Vec2> flat_points = {},
                             bool flip_normal = false, double fd_step = 1e-4);

  /// Custom patch from an explicit frame evaluator (tests use this to fabricate
  /// inconsistent geometry on purpose).
  static SurfacePatch custom_frame(std::function<FrameSample(double, double)> frame, double z1,
                                   double z2, bool periodic_theta,
                                   std::vector<Vec2> flat_points = {});

  /// Frame at (theta, z). Throws std::domain_error outside E or inside the
  /// guard radius of a coordinate singularity. theta wraps when periodic.
  FrameSample frame(double theta, double z) const;

  double z1() const;
  double z2() const;
  bool periodic_theta() const;
  /// true when z1 == 0 is a polar coordinate singularity (apex of a cap of
  /// revolution); the apex itself is covered by Cartesian-embedding paths.
  bool polar_apex() const;
  double guard_radius() const;
  SurfaceKind kind() const;
  const std::vector<Vec2>& flat_points() const;

  /// Position of a parameter point, valid at the apex too.
  Vec3 position(double theta, double z) const;

  /// Sampled upper bound for max(kappa_theta, kappa_z) over E.
  double max_principal_curvature() const;
  /// Largest admissible thickness (1 + t*kappa > 0 throughout): 2/max_kappa.
  double max_thickness() const;

  /// Plane chart used for distances around a polar apex: (z cos 2 pi theta,
  /// z sin 2 pi theta); for regular charts the identity map (theta, z).
  Vec2 plane_coords(double theta, double z) const;
  /// Distance between parameter points: plane-chart distance on apex patches,
  /// otherwise Euclidean in (theta, z) with periodic wrap in theta.
  double param_distance(const Vec2& p, const Vec2& q) const;

  bool operator==(const SurfacePatch&) const = default;

 private:
  struct Impl;
  explicit SurfacePatch(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
  friend struct SurfacePatchAccess;
};

/// Sup/inf of Def. 2.1's quantities over a nested sample grid
/// (density rounded up to 2^k+1 so refinements nest and the estimates are
/// monotone in the density).
ShellParams compute_shell_params(const SurfacePatch& surface, int sample_density);

/// Quadratic growth check around each flat point:
/// (1/c1) d^2 <= kappa_theta, kappa_z <= c1 d^2, d = embedded chord distance.
/// Throws std::invalid_argument when the surface declares no flat points.
ConditionReport check_flat_point_growth(const SurfacePatch& surface, double c1,
                                        double neighborhood_radius = 0.3, int sample_density = 64);

/// Comparability check |grad(kappa_theta / kappa_z)| <= c2 over E, the ratio
/// extended by its directional limit at flat points. Throws std::runtime_error
/// when the limit does not exist numerically.
ConditionReport check_curvature_ratio(const SurfacePatch& surface, double c2,
                                      int sample_density = 64);

/// d/dz(A_theta,z / A_z) + d/dtheta(A_z,theta / A_theta) + A_z A_theta kappa_z kappa_theta.
/// Vanishes for any legitimate surface; the outer derivatives use a 4th-order
/// stencil on the frame's analytic first partials.
double codazzi_gauss_residual(const SurfacePatch& surface, double theta, double z);

namespace detail {
/// frame evaluation without the strict domain check (FD stencils poke slightly
/// outside E); periodic wrap still applies.
FrameSample frame_unchecked(const SurfacePatch& surface, double theta, double z);
}  // namespace detail

}  // namespace shellkorn
