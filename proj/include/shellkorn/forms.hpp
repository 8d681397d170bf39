#pragma once

#include "shellkorn/fields.hpp"

#include <Eigen/Sparse>

namespace shellkorn {

using SpMat = Eigen::SparseMatrix<double>;

enum class AssemblyMode { Serial, Parallel };

enum class FormId { EnergyE, EnergyGrad, Mass, MassT, MassTheta, MassZ };

/// Sparse symmetric quadratic forms over the free dofs:
///   N  = |e(u)|^2,  D = |grad u|^2,  M = |u|^2 (weighted L2),
///   Mt, Mtheta, Mz = component masses in the per-point frame projection.
struct FormPencil {
  SpMat N, D, M, Mt, Mtheta, Mz;
  int n_free = 0;
  int quadrature_order = 2;
  std::string mesh_tag;

  const SpMat& form(FormId id) const {
    switch (id) {
      case FormId::EnergyE: return N;
      case FormId::EnergyGrad: return D;
      case FormId::Mass: return M;
      case FormId::MassT: return Mt;
      case FormId::MassTheta: return Mtheta;
      case FormId::MassZ: return Mz;
    }
    return N;
  }
};

/// Assembles all six forms in one sweep over the cells. The parallel path
/// computes per-cell local matrices concurrently and reduces them in cell
/// order, so serial and parallel assemblies are bit-identical.
/// Throws std::runtime_error when the triplet storage estimate exceeds
/// memory_budget_gb.
FormPencil assemble_forms(const ShellMesh& mesh, const DofMap& dofs,
                          AssemblyMode mode = AssemblyMode::Parallel,
                          double memory_budget_gb = 4.0);

/// Isotropic linearly elastic tensor L0 xi = 2 mu xi + lambda tr(xi) I.
struct ElasticTensor {
  double lambda = 1.0;
  double mu = 1.0;

  ElasticTensor(double lambda_, double mu_) : lambda(lambda_), mu(mu_) {
    if (!(mu > 0.0) || !(3.0 * lambda + 2.0 * mu > 0.0))
      throw std::invalid_argument("ElasticTensor: mu > 0 and 3 lambda + 2 mu > 0 required");
  }
  Mat3 apply(const Mat3& xi) const {
    return 2.0 * mu * xi + lambda * xi.trace() * Mat3::Identity();
  }
};

/// Symmetric stress tensor sampled at quadrature points.
class StressField {
 public:
  /// constant Cartesian stress
  static StressField uniform(const Mat3& sigma);
  /// sigma = -magnitude * d (x) d with a fixed Cartesian direction d
  static StressField uniaxial(const Vec3& direction, double magnitude);
  /// sigma = -magnitude * e_z (x) e_z along the local meridian direction
  static StressField meridian_compression(double magnitude);
  /// sigma = L0 e(u) of a given displacement's interpolant
  static StressField from_displacement(const DisplacementField& u, const ElasticTensor& L0);

  Mat3 at(const ShellMesh& mesh, int cell, const QuadPoint& q) const;
  StressField scaled(double s) const;
  const std::string& provenance() const { return provenance_; }

 private:
  std::function<Mat3(const ShellMesh&, int, const QuadPoint&)> fn_;
  std::string provenance_;
};

/// Elastic energy form: integral <L0 e(u), e(u)>.
SpMat assemble_elastic(const ShellMesh& mesh, const DofMap& dofs, const ElasticTensor& L0,
                       AssemblyMode mode = AssemblyMode::Parallel);

/// Geometric form: integral <sigma, grad(u)^T grad(u)>.
SpMat assemble_geometric(const ShellMesh& mesh, const DofMap& dofs, const StressField& sigma,
                         AssemblyMode mode = AssemblyMode::Parallel);

/// Coordinate text export (row col value per line, 0-based).
void write_coordinate_format(std::ostream& os, const SpMat& m);

}  // namespace shellkorn
