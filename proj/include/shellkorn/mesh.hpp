#pragma once

#include "shellkorn/surface.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace shellkorn {

struct MeshResolution {
  int n_theta = 8;
  int n_z = 8;
  int n_t = 2;
};

/// z-grading toward a focus (the flat point of an h-sweep): cell density is
/// multiplied by `factor` inside `radius` of `center_z`.
struct GradingSpec {
  bool enabled = false;
  double center_z = 0.0;
  double radius = 0.0;
  double factor = 2.0;
};

/// Per-node Dirichlet mask over the lateral boundary and the free-dof layout.
struct DofMap {
  std::vector<bool> masked;      // per node
  std::vector<int> free_index;   // node -> first of its 3 free dofs, -1 if masked
  int n_free = 0;

  int masked_count() const {
    int c = 0;
    for (bool m : masked) c += m ? 1 : 0;
    return c;
  }
};

/// Cell subset picked by parameter-distance of cell centers to a point.
struct CellSet {
  std::vector<int> cells;
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

/// One Gauss point of a cell: parameter coordinates, the exact curvilinear
/// volume weight, and the reference coordinates in [-1,1]^3.
struct QuadPoint {
  double theta, z, t;
  double weight;
  double xi[3];
};

/// Structured hexahedral discretization of Omega^h over E x (-h/2, h/2).
/// Trilinear elements on the (theta, z, t) grid; theta is identified
/// periodically for surfaces of revolution; a polar apex collapses the z = z1
/// node ring to one node per t-layer. Immutable after build.
class ShellMesh {
 public:
  static ShellMesh build(const SurfacePatch& surface, double h, MeshResolution res,
                         GradingSpec grading = {});

  const SurfacePatch& surface() const { return surface_; }
  double thickness() const { return h_; }
  const MeshResolution& resolution() const { return res_; }

  int n_nodes() const { return static_cast<int>(node_param_.size()); }
  int n_cells() const { return static_cast<int>(cells_.size()); }

  const Vec3& node_param(int node) const { return node_param_[node]; }      // (theta, z, t)
  const Vec3& node_position(int node) const { return node_pos_[node]; }
  const std::array<int, 8>& cell_nodes(int cell) const { return cell_nodes_[cell]; }

  /// 2x2x2 Gauss points with exact curvilinear volume weights.
  std::array<QuadPoint, 8> cell_quadrature(int cell) const;
  /// same points with an arbitrary tensor order (volume refinement oracle)
  std::vector<QuadPoint> cell_quadrature(int cell, int order) const;

  double volume() const { return volume_; }
  double max_aspect_ratio() const { return max_aspect_; }

  const std::vector<double>& theta_grid() const { return th_grid_; }
  const std::vector<double>& z_grid() const { return z_grid_; }
  const std::vector<double>& t_grid() const { return t_grid_; }
  bool collapsed_apex() const { return apex_; }

  DofMap tag_dirichlet() const;
  CellSet subdomain(const Vec2& center, double radius) const;

  /// Flat text export: a node table (id theta z t x y z) and a cell table
  /// (8 node ids), column order as printed in the header lines.
  void write_text(std::ostream& os) const;

 private:
  ShellMesh(const SurfacePatch& s) : surface_(s) {}

  SurfacePatch surface_;
  double h_ = 0.0;
  MeshResolution res_;
  bool apex_ = false;
  bool periodic_ = true;
  std::vector<double> th_grid_, z_grid_, t_grid_;
  std::vector<int> node_id_;  // (i, j, k) -> node
  std::vector<Vec3> node_param_;
  std::vector<Vec3> node_pos_;
  std::vector<std::array<int, 8>> cell_nodes_;
  std::vector<std::array<int, 3>> cell_ijk_;
  double volume_ = 0.0;
  double max_aspect_ = 0.0;

  int grid_index(int i, int j, int k) const;
  int n_th_nodes() const;
};

}  // namespace shellkorn
