#include "shellkorn/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace shellkorn {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;

double get_or(const std::map<std::string, double>& m, const std::string& key, double dflt) {
  auto it = m.find(key);
  return it == m.end() ? dflt : it->second;
}

double wrap_unit(double theta) {
  double t = std::fmod(theta, 1.0);
  if (t < 0.0) t += 1.0;
  return t;
}

// 4th-order central first derivative
template <typename F>
auto fd1(const F& f, double x, double d) {
  return (-f(x + 2 * d) + 8.0 * f(x + d) - 8.0 * f(x - d) + f(x - 2 * d)) / (12.0 * d);
}
// 4th-order central second derivative
template <typename F>
auto fd2(const F& f, double x, double d) {
  return (-f(x + 2 * d) + 16.0 * f(x + d) - 30.0 * f(x) + 16.0 * f(x - d) - f(x - 2 * d)) /
         (12.0 * d * d);
}
}  // namespace

std::string to_string(SurfaceKind k) {
  switch (k) {
    case SurfaceKind::SphereCap: return "sphere-cap";
    case SurfaceKind::QuarticCap: return "quartic-cap";
    case SurfaceKind::CylinderStrip: return "cylinder-strip";
    case SurfaceKind::CustomAnalytic: return "custom-analytic";
  }
  return "unknown";
}

SurfaceKind surface_kind_from_string(const std::string& name) {
  if (name == "sphere-cap") return SurfaceKind::SphereCap;
  if (name == "quartic-cap") return SurfaceKind::QuarticCap;
  if (name == "cylinder-strip") return SurfaceKind::CylinderStrip;
  if (name == "custom-analytic") return SurfaceKind::CustomAnalytic;
  throw std::invalid_argument("unknown surface kind: " + name);
}

struct SurfacePatch::Impl {
  SurfaceKind kind = SurfaceKind::CustomAnalytic;
  double z1 = 0.0, z2 = 1.0;
  bool periodic = true;
  bool apex = false;  // z1 == 0 is a polar coordinate singularity
  double guard = 1e-6;
  std::vector<Vec2> flats;

  // exactly one of these evaluation routes is set
  std::function<FrameSample(double, double)> frame_fn;  // analytic (catalog or custom_frame)
  std::function<Vec3(double, double)> embed_fn;         // custom: frame via FD
  bool flip_normal = false;
  double fd_step = 1e-4;
  bool fd_frame = false;

  mutable double max_kappa_cache = -1.0;

  FrameSample eval(double theta, double z) const {
    if (fd_frame) return eval_fd(theta, z);
    return frame_fn(theta, z);
  }

  FrameSample eval_fd(double theta, double z) const {
    const double d = fd_step;
    auto r = embed_fn;
    auto rt = [&](double t_) { return r(t_, z); };
    auto rz = [&](double z_) { return r(theta, z_); };
    const Vec3 r_th = fd1(rt, theta, d);
    const Vec3 r_z = fd1(rz, z, d);
    const Vec3 r_thth = fd2(rt, theta, d);
    const Vec3 r_zz = fd2(rz, z, d);
    auto rmix = [&](double t_) {
      auto rz2 = [&](double z_) { return r(t_, z_); };
      return fd1(rz2, z, d);
    };
    const Vec3 r_thz = fd1(rmix, theta, d);

    FrameSample f;
    f.position = r(theta, z);
    f.A_theta = r_th.norm();
    f.A_z = r_z.norm();
    if (f.A_theta <= 0.0 || f.A_z <= 0.0)
      throw std::domain_error("degenerate parametrization at sample point");
    f.e_theta = r_th / f.A_theta;
    f.e_z = r_z / f.A_z;
    Vec3 n = f.e_theta.cross(f.e_z);
    n.normalize();
    if (flip_normal) n = -n;
    f.normal = n;
    // +Weingarten convention: kappa = -<n, r_..> / A^2
    f.kappa_theta = -n.dot(r_thth) / (f.A_theta * f.A_theta);
    f.kappa_z = -n.dot(r_zz) / (f.A_z * f.A_z);
    f.A_theta_dtheta = r_th.dot(r_thth) / f.A_theta;
    f.A_theta_dz = r_th.dot(r_thz) / f.A_theta;
    f.A_z_dtheta = r_z.dot(r_thz) / f.A_z;
    f.A_z_dz = r_z.dot(r_zz) / f.A_z;
    // curvature gradients by one more FD level at a coarser, noise-balanced step
    const double dk = 3e-3;
    auto kth = [&](double t_, double z_) {
      FrameSample g = eval_fd_first(t_, z_);
      return g.kappa_theta;
    };
    auto kz = [&](double t_, double z_) {
      FrameSample g = eval_fd_first(t_, z_);
      return g.kappa_z;
    };
    f.kappa_theta_grad[0] = (kth(theta + dk, z) - kth(theta - dk, z)) / (2 * dk);
    f.kappa_theta_grad[1] = (kth(theta, z + dk) - kth(theta, z - dk)) / (2 * dk);
    f.kappa_z_grad[0] = (kz(theta + dk, z) - kz(theta - dk, z)) / (2 * dk);
    f.kappa_z_grad[1] = (kz(theta, z + dk) - kz(theta, z - dk)) / (2 * dk);
    return f;
  }

  // curvatures/metric only, no recursive gradient evaluation
  FrameSample eval_fd_first(double theta, double z) const {
    const double d = fd_step;
    auto r = embed_fn;
    auto rt = [&](double t_) { return r(t_, z); };
    auto rz = [&](double z_) { return r(theta, z_); };
    const Vec3 r_th = fd1(rt, theta, d);
    const Vec3 r_z = fd1(rz, z, d);
    const Vec3 r_thth = fd2(rt, theta, d);
    const Vec3 r_zz = fd2(rz, z, d);
    FrameSample f;
    f.A_theta = r_th.norm();
    f.A_z = r_z.norm();
    Vec3 n = (r_th / f.A_theta).cross(r_z / f.A_z);
    n.normalize();
    if (flip_normal) n = -n;
    f.kappa_theta = -n.dot(r_thth) / (f.A_theta * f.A_theta);
    f.kappa_z = -n.dot(r_zz) / (f.A_z * f.A_z);
    return f;
  }
};

namespace {

std::shared_ptr<const SurfacePatch::Impl> make_sphere(const std::map<std::string, double>& p) {
  const double R = get_or(p, "radius", 1.0);
  const double z1 = get_or(p, "z1", 0.2);
  const double z2 = get_or(p, "z2", 0.8);
  if (R <= 0.0) throw std::invalid_argument("sphere-cap: radius must be positive");
  if (z2 > (M_PI - 1e-6) * R)
    throw std::invalid_argument("sphere-cap: band reaches the south pole");
  auto impl = std::make_shared<SurfacePatch::Impl>();
  impl->kind = SurfaceKind::SphereCap;
  impl->z1 = z1;
  impl->z2 = z2;
  impl->periodic = true;
  impl->apex = (z1 == 0.0);
  impl->frame_fn = [R](double theta, double z) {
    FrameSample f;
    const double a = kTwoPi * theta;
    const double ca = std::cos(a), sa = std::sin(a);
    const double sz = std::sin(z / R), cz = std::cos(z / R);
    f.position = Vec3(R * sz * ca, R * sz * sa, R * cz);
    f.normal = Vec3(sz * ca, sz * sa, cz);
    f.e_theta = Vec3(-sa, ca, 0.0);
    f.e_z = Vec3(cz * ca, cz * sa, -sz);
    f.A_theta = kTwoPi * R * sz;
    f.A_z = 1.0;
    f.kappa_theta = 1.0 / R;
    f.kappa_z = 1.0 / R;
    f.A_theta_dz = kTwoPi * cz;
    return f;
  };
  return impl;
}

std::shared_ptr<const SurfacePatch::Impl> make_quartic(const std::map<std::string, double>& p) {
  const double S = get_or(p, "scale", 1.0);
  const double z1 = get_or(p, "z1", 0.0);
  const double z2 = get_or(p, "z2", 0.95);
  if (S <= 0.0) throw std::invalid_argument("quartic-cap: scale must be positive");
  auto impl = std::make_shared<SurfacePatch::Impl>();
  impl->kind = SurfaceKind::QuarticCap;
  impl->z1 = z1;
  impl->z2 = z2;
  impl->periodic = true;
  impl->apex = (z1 == 0.0);
  if (z1 == 0.0) impl->flats.push_back(Vec2(0.0, 0.0));
  impl->frame_fn = [S](double theta, double z) {
    FrameSample f;
    const double a = kTwoPi * theta;
    const double ca = std::cos(a), sa = std::sin(a);
    const double z3 = z * z * z;
    const double w = 1.0 + 16.0 * z3 * z3;
    const double sq = std::sqrt(w);
    f.position = S * Vec3(z * ca, z3 * z, z * sa);
    f.e_theta = Vec3(-sa, 0.0, ca);
    f.e_z = Vec3(ca, 4.0 * z3, sa) / sq;
    f.normal = Vec3(4.0 * z3 * ca, -1.0, 4.0 * z3 * sa) / sq;
    f.A_theta = kTwoPi * S * z;
    f.A_z = S * sq;
    f.kappa_theta = 4.0 * z * z / (S * sq);
    f.kappa_z = 12.0 * z * z / (S * w * sq);
    f.A_theta_dz = kTwoPi * S;
    f.A_z_dz = S * 48.0 * z3 * z * z / sq;
    const double z6 = z3 * z3;
    f.kappa_theta_grad[1] = 8.0 * z * (1.0 - 8.0 * z6) / (S * w * sq);
    f.kappa_z_grad[1] = 24.0 * z * (1.0 - 56.0 * z6) / (S * w * w * sq);
    return f;
  };
  return impl;
}

std::shared_ptr<const SurfacePatch::Impl> make_cylinder(const std::map<std::string, double>& p) {
  const double R = get_or(p, "radius", 1.0);
  const double H = get_or(p, "height", 1.0);
  const double z1 = get_or(p, "z1", 0.0);
  const double z2 = get_or(p, "z2", 1.0);
  if (R <= 0.0 || H <= 0.0) throw std::invalid_argument("cylinder-strip: radius/height positive");
  auto impl = std::make_shared<SurfacePatch::Impl>();
  impl->kind = SurfaceKind::CylinderStrip;
  impl->z1 = z1;
  impl->z2 = z2;
  impl->periodic = true;
  impl->apex = false;
  impl->frame_fn = [R, H](double theta, double z) {
    FrameSample f;
    const double a = kTwoPi * theta;
    const double ca = std::cos(a), sa = std::sin(a);
    f.position = Vec3(R * ca, R * sa, H * z);
    f.normal = Vec3(ca, sa, 0.0);
    f.e_theta = Vec3(-sa, ca, 0.0);
    f.e_z = Vec3(0.0, 0.0, 1.0);
    f.A_theta = kTwoPi * R;
    f.A_z = H;
    f.kappa_theta = 1.0 / R;
    f.kappa_z = 0.0;
    return f;
  };
  return impl;
}

void validate_band(double z1, double z2) {
  if (!(z1 >= 0.0 && z1 < z2 && z2 <= 1.0))
    throw std::invalid_argument("surface band violates 0 <= z1 < z2 <= 1");
  if (z2 - z1 < 1e-6) throw std::invalid_argument("surface band z2 - z1 below minimal extent");
}

}  // namespace

SurfacePatch SurfacePatch::make(SurfaceKind kind, const std::map<std::string, double>& params) {
  std::shared_ptr<const Impl> impl;
  switch (kind) {
    case SurfaceKind::SphereCap: impl = make_sphere(params); break;
    case SurfaceKind::QuarticCap: impl = make_quartic(params); break;
    case SurfaceKind::CylinderStrip: impl = make_cylinder(params); break;
    case SurfaceKind::CustomAnalytic:
      throw std::invalid_argument("custom-analytic surfaces are built with SurfacePatch::custom");
  }
  validate_band(impl->z1, impl->z2);
  return SurfacePatch(std::move(impl));
}

SurfacePatch SurfacePatch::make(const std::string& kind, const std::map<std::string, double>& params) {
  return make(surface_kind_from_string(kind), params);
}

SurfacePatch SurfacePatch::custom(std::function<Vec3(double, double)> embedding, double z1,
                                  double z2, bool periodic_theta, std::vector<Vec2> flat_points,
                                  bool flip_normal, double fd_step) {
  validate_band(z1, z2);
  auto impl = std::make_shared<Impl>();
  impl->kind = SurfaceKind::CustomAnalytic;
  impl->z1 = z1;
  impl->z2 = z2;
  impl->periodic = periodic_theta;
  impl->flats = std::move(flat_points);
  impl->embed_fn = std::move(embedding);
  impl->flip_normal = flip_normal;
  impl->fd_step = fd_step;
  impl->fd_frame = true;
  // principal-coordinate validation on a coarse grid: orthogonal coordinate
  // curves and vanishing mixed second fundamental form
  auto patch = SurfacePatch(impl);
  const int n = 9;
  for (int i = 1; i < n; ++i) {
    for (int j = 1; j < n; ++j) {
      const double th = i / double(n);
      const double z = z1 + (z2 - z1) * j / double(n);
      FrameSample f = impl->eval(th, z);
      const double orth = std::abs(f.e_theta.dot(f.e_z));
      if (orth > 1e-6)
        throw std::invalid_argument("custom surface: coordinates not orthogonal at sample");
      auto rz2 = [&](double zz) {
        auto rt = [&](double tt) { return impl->embed_fn(tt, zz); };
        return fd1(rt, th, fd_step);
      };
      const Vec3 r_thz = fd1(rz2, z, fd_step);
      const double mixed = std::abs(f.normal.dot(r_thz)) / (f.A_theta * f.A_z);
      const double scale = std::max(std::abs(f.kappa_theta), std::abs(f.kappa_z)) + 1e-3;
      if (mixed > 1e-4 * scale + 1e-6)
        throw std::invalid_argument("custom surface: coordinates not principal at sample");
    }
  }
  return patch;
}

SurfacePatch SurfacePatch::custom_frame(std::function<FrameSample(double, double)> frame,
                                        double z1, double z2, bool periodic_theta,
                                        std::vector<Vec2> flat_points) {
  validate_band(z1, z2);
  auto impl = std::make_shared<Impl>();
  impl->kind = SurfaceKind::CustomAnalytic;
  impl->z1 = z1;
  impl->z2 = z2;
  impl->periodic = periodic_theta;
  impl->flats = std::move(flat_points);
  impl->frame_fn = std::move(frame);
  return SurfacePatch(std::move(impl));
}

FrameSample SurfacePatch::frame(double theta, double z) const {
  const auto& im = *impl_;
  if (im.periodic) theta = wrap_unit(theta);
  else if (theta < 0.0 || theta > 1.0)
    throw std::domain_error("frame: theta outside [0,1]");
  if (z < im.z1 || z > im.z2) throw std::domain_error("frame: z outside [z1,z2]");
  if (im.apex && z < im.guard)
    throw std::domain_error("frame: inside guard radius of the polar apex");
  return im.eval(theta, z);
}

struct SurfacePatchAccess {
  static const SurfacePatch::Impl& impl(const SurfacePatch& s) { return *s.impl_; }
};

namespace detail {
FrameSample frame_unchecked(const SurfacePatch& s, double theta, double z) {
  const auto& im = SurfacePatchAccess::impl(s);
  if (im.periodic) theta = wrap_unit(theta);
  return im.eval(theta, z);
}
}  // namespace detail

double SurfacePatch::z1() const { return impl_->z1; }
double SurfacePatch::z2() const { return impl_->z2; }
bool SurfacePatch::periodic_theta() const { return impl_->periodic; }
bool SurfacePatch::polar_apex() const { return impl_->apex; }
double SurfacePatch::guard_radius() const { return impl_->guard; }
SurfaceKind SurfacePatch::kind() const { return impl_->kind; }
const std::vector<Vec2>& SurfacePatch::flat_points() const { return impl_->flats; }

Vec3 SurfacePatch::position(double theta, double z) const {
  const auto& im = *impl_;
  if (im.periodic) theta = wrap_unit(theta);
  if (im.fd_frame) return im.embed_fn(theta, z);
  return im.eval(theta, z).position;  // catalog formulas are regular at the apex
}

double SurfacePatch::max_principal_curvature() const {
  const auto& im = *impl_;
  if (im.max_kappa_cache >= 0.0) return im.max_kappa_cache;
  const int n = 256;
  const double zlo = im.apex ? std::max(im.z1, im.guard) : im.z1;
  double mx = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double z = zlo + (im.z2 - zlo) * j / double(n);
    for (int i = 0; i < 5; ++i) {
      FrameSample f = im.eval(i / 5.0, z);
      mx = std::max(mx, std::max(std::abs(f.kappa_theta), std::abs(f.kappa_z)));
    }
  }
  im.max_kappa_cache = mx;
  return mx;
}

double SurfacePatch::max_thickness() const {
  const double k = max_principal_curvature();
  return k > 0.0 ? 2.0 / k : std::numeric_limits<double>::infinity();
}

Vec2 SurfacePatch::plane_coords(double theta, double z) const {
  if (impl_->apex) {
    const double a = kTwoPi * theta;
    return Vec2(z * std::cos(a), z * std::sin(a));
  }
  return Vec2(theta, z);
}

double SurfacePatch::param_distance(const Vec2& p, const Vec2& q) const {
  if (impl_->apex) return (plane_coords(p[0], p[1]) - plane_coords(q[0], q[1])).norm();
  double dth = p[0] - q[0];
  if (impl_->periodic) {
    dth = std::fmod(std::abs(dth), 1.0);
    dth = std::min(dth, 1.0 - dth);
  }
  const double dz = p[1] - q[1];
  return std::sqrt(dth * dth + dz * dz);
}

namespace {
int nested_density(int requested) {
  int n = 2;
  while (n + 1 < requested) n *= 2;
  return n + 1;
}
}  // namespace

ShellParams compute_shell_params(const SurfacePatch& surface, int sample_density) {
  if (sample_density < 16) throw std::invalid_argument("compute_shell_params: density >= 16");
  const int n = nested_density(sample_density);
  const double z1 = surface.z1(), z2 = surface.z2();
  const double zlo = surface.polar_apex() ? std::max(z1, 4 * surface.guard_radius()) : z1;

  ShellParams out;
  out.a = std::numeric_limits<double>::infinity();
  out.l = out.L = z2 - z1;  // catalog bands have constant z-extent
  double c1_witness = 1.0;
  double c2_max = 0.0;
  const auto& flats = surface.flat_points();

  for (int j = 0; j < n; ++j) {
    const double z = zlo + (z2 - zlo) * j / double(n - 1);
    for (int i = 0; i < n; ++i) {
      const double th = surface.periodic_theta() ? i / double(n) : i / double(n - 1);
      FrameSample f = detail::frame_unchecked(surface, th, z);
      out.A = std::max(out.A, f.A_theta + f.A_z);
      out.a = std::min(out.a, std::min(f.A_theta, f.A_z));
      const double gA = f.surface_grad_norm(f.A_theta_dtheta, f.A_theta_dz) +
                        f.surface_grad_norm(f.A_z_dtheta, f.A_z_dz);
      out.B = std::max(out.B, gA);
      double kb = std::max(std::abs(f.kappa_theta), std::abs(f.kappa_z));
      kb = std::max(kb, f.surface_grad_norm(f.kappa_theta_grad[0], f.kappa_theta_grad[1]));
      kb = std::max(kb, f.surface_grad_norm(f.kappa_z_grad[0], f.kappa_z_grad[1]));
      out.K = std::max(out.K, kb);

      // quadratic growth witness near flat points (chord distance)
      for (const Vec2& fp : flats) {
        const double pd = surface.param_distance(Vec2(th, z), fp);
        if (pd > 0.3 || pd < 1e-3) continue;
        const double d2 = (f.position - surface.position(fp[0], fp[1])).squaredNorm();
        if (d2 <= 0.0) continue;
        for (double k : {f.kappa_theta, f.kappa_z}) {
          if (k <= 0.0) continue;
          c1_witness = std::max(c1_witness, std::max(k / d2, d2 / k));
        }
      }
      // curvature ratio gradient away from flat points
      bool near_flat = false;
      for (const Vec2& fp : flats)
        if (surface.param_distance(Vec2(th, z), fp) < 1e-2) near_flat = true;
      if (!near_flat && std::abs(f.kappa_z) > 1e-12) {
        const double kz2 = f.kappa_z * f.kappa_z;
        const double rt = (f.kappa_theta_grad[0] * f.kappa_z - f.kappa_theta * f.kappa_z_grad[0]) / kz2;
        const double rz = (f.kappa_theta_grad[1] * f.kappa_z - f.kappa_theta * f.kappa_z_grad[1]) / kz2;
        c2_max = std::max(c2_max, f.surface_grad_norm(rt, rz));
      }
    }
  }
  out.c1 = c1_witness;
  out.c2 = c2_max;
  return out;
}

ConditionReport check_flat_point_growth(const SurfacePatch& surface, double c1,
                                        double neighborhood_radius, int sample_density) {
  if (surface.flat_points().empty())
    throw std::invalid_argument("check_flat_point_growth: surface declares no flat points");
  ConditionReport rep;
  rep.id = "flat-point-growth";
  rep.tolerance = c1;
  rep.pass = true;
  double worst = 0.0;
  const double z1 = surface.z1(), z2 = surface.z2();
  const double zlo = surface.polar_apex() ? std::max(z1, 4 * surface.guard_radius()) : z1;
  for (const Vec2& fp : surface.flat_points()) {
    const Vec3 xi = surface.position(fp[0], fp[1]);
    for (int j = 0; j < sample_density; ++j) {
      const double z = zlo + (z2 - zlo) * j / double(sample_density - 1);
      for (int i = 0; i < sample_density; ++i) {
        const double th = i / double(sample_density);
        const double pd = surface.param_distance(Vec2(th, z), fp);
        if (pd > neighborhood_radius || pd < 1e-3) continue;
        FrameSample f = detail::frame_unchecked(surface, th, z);
        const double d2 = (f.position - xi).squaredNorm();
        for (double k : {f.kappa_theta, f.kappa_z}) {
          const double need = std::max(k / d2, d2 / std::max(k, 1e-300));
          if (need > worst) {
            worst = need;
            rep.worst_point = Vec2(th, z);
          }
        }
      }
    }
  }
  rep.measured = worst;
  rep.pass = worst <= c1;
  return rep;
}

ConditionReport check_curvature_ratio(const SurfacePatch& surface, double c2,
                                      int sample_density) {
  ConditionReport rep;
  rep.id = "curvature-ratio-gradient";
  rep.tolerance = c2;
  const double z1 = surface.z1(), z2 = surface.z2();
  const double zlo = surface.polar_apex() ? std::max(z1, 4 * surface.guard_radius()) : z1;

  // directional-limit consistency at each flat point
  for (const Vec2& fp : surface.flat_points()) {
    const double ring = std::max(1e-2, 8 * surface.guard_radius());
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < 16; ++i) {
      double th, z;
      if (surface.polar_apex()) {
        th = i / 16.0;
        z = fp[1] + ring;
      } else {
        th = fp[0] + ring * std::cos(kTwoPi * i / 16.0);
        z = fp[1] + ring * std::sin(kTwoPi * i / 16.0);
      }
      if (z < zlo || z > z2) continue;
      FrameSample f = detail::frame_unchecked(surface, th, z);
      if (std::abs(f.kappa_z) < 1e-14) continue;
      const double r = f.kappa_theta / f.kappa_z;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    if (hi - lo > 0.05 * (std::abs(hi) + std::abs(lo) + 1.0))
      throw std::runtime_error("check_curvature_ratio: ratio limit differs across directions");
  }

  double worst = 0.0;
  for (int j = 0; j < sample_density; ++j) {
    const double z = zlo + (z2 - zlo) * j / double(sample_density - 1);
    for (int i = 0; i < sample_density; ++i) {
      const double th = surface.periodic_theta() ? i / double(sample_density)
                                                 : i / double(sample_density - 1);
      bool near_flat = false;
      for (const Vec2& fp : surface.flat_points())
        if (surface.param_distance(Vec2(th, z), fp) < 1e-2) near_flat = true;
      if (near_flat) continue;
      FrameSample f = detail::frame_unchecked(surface, th, z);
      if (std::abs(f.kappa_z) < 1e-12) continue;
      const double kz2 = f.kappa_z * f.kappa_z;
      const double rt = (f.kappa_theta_grad[0] * f.kappa_z - f.kappa_theta * f.kappa_z_grad[0]) / kz2;
      const double rz = (f.kappa_theta_grad[1] * f.kappa_z - f.kappa_theta * f.kappa_z_grad[1]) / kz2;
      const double g = f.surface_grad_norm(rt, rz);
      if (g > worst) {
        worst = g;
        rep.worst_point = Vec2(th, z);
      }
    }
  }
  rep.measured = worst;
  rep.pass = worst <= c2;
  return rep;
}

double codazzi_gauss_residual(const SurfacePatch& surface, double theta, double z) {
  // outer derivative step: fine for analytic frames, coarser (noise-balanced)
  // when the frame itself comes from finite differences
  const bool fd = SurfacePatchAccess::impl(surface).fd_frame;
  const double d = fd ? 2e-2 : 1e-4;
  auto g1 = [&](double z_) {
    FrameSample f = detail::frame_unchecked(surface, theta, z_);
    return f.A_theta_dz / f.A_z;
  };
  auto g2 = [&](double t_) {
    FrameSample f = detail::frame_unchecked(surface, t_, z);
    return f.A_z_dtheta / f.A_theta;
  };
  const double dg1 = fd1(g1, z, d);
  const double dg2 = fd1(g2, theta, d);
  FrameSample f = detail::frame_unchecked(surface, theta, z);
  return dg1 + dg2 + f.A_z * f.A_theta * f.kappa_z * f.kappa_theta;
}

}  // namespace shellkorn
