#include "shellkorn/forms.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace shellkorn {

namespace {

constexpr int kChunk = 2048;  // cells per parallel chunk; bounds local-matrix storage

struct CellGeometry {
  double N[8][8];        // shape values per gauss point
  Vec3 g[8][8];          // cartesian shape gradients [gauss][node]
  double w[8];           // quadrature weights (curvilinear volume factor)
  Vec3 frame_n[8], frame_eth[8], frame_ez[8];
};

void cell_geometry(const ShellMesh& mesh, int cell, CellGeometry& out) {
  const auto& nodes = mesh.cell_nodes(cell);
  Eigen::Matrix<double, 3, 8> X;
  for (int a = 0; a < 8; ++a) X.col(a) = mesh.node_position(nodes[a]);
  static const double sgn[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                                   {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};
  const auto qp = mesh.cell_quadrature(cell);
  for (int g = 0; g < 8; ++g) {
    const QuadPoint& q = qp[g];
    double dN[8][3];
    Mat3 J = Mat3::Zero();
    for (int a = 0; a < 8; ++a) {
      const double sx = sgn[a][0], sy = sgn[a][1], sz = sgn[a][2];
      out.N[g][a] = (1 + sx * q.xi[0]) * (1 + sy * q.xi[1]) * (1 + sz * q.xi[2]) / 8.0;
      dN[a][0] = sx * (1 + sy * q.xi[1]) * (1 + sz * q.xi[2]) / 8.0;
      dN[a][1] = sy * (1 + sx * q.xi[0]) * (1 + sz * q.xi[2]) / 8.0;
      dN[a][2] = sz * (1 + sx * q.xi[0]) * (1 + sy * q.xi[1]) / 8.0;
      for (int p = 0; p < 3; ++p) J.col(p) += dN[a][p] * X.col(a);
    }
    const Mat3 Jinv = J.inverse();
    for (int a = 0; a < 8; ++a) {
      Vec3 gr = Vec3::Zero();
      for (int p = 0; p < 3; ++p) gr += dN[a][p] * Jinv.row(p).transpose();
      out.g[g][a] = gr;
    }
    out.w[g] = q.weight;
    FrameSample f = detail::frame_unchecked(mesh.surface(), q.theta, q.z);
    out.frame_n[g] = f.normal;
    out.frame_eth[g] = f.e_theta;
    out.frame_ez[g] = f.e_z;
  }
}

using Local = Eigen::Matrix<double, 24, 24>;

struct PencilLocals {
  Local N, D, M, Mt, Mth, Mz;
  void zero() {
    N.setZero();
    D.setZero();
    M.setZero();
    Mt.setZero();
    Mth.setZero();
    Mz.setZero();
  }
};

void pencil_kernel(const CellGeometry& geo, PencilLocals& loc) {
  loc.zero();
  for (int g = 0; g < 8; ++g) {
    const double w = geo.w[g];
    for (int a = 0; a < 8; ++a) {
      for (int b = 0; b < 8; ++b) {
        const Vec3& ga = geo.g[g][a];
        const Vec3& gb = geo.g[g][b];
        const double gg = w * ga.dot(gb);
        const double nn = w * geo.N[g][a] * geo.N[g][b];
        for (int i = 0; i < 3; ++i) {
          loc.D(3 * a + i, 3 * b + i) += gg;
          loc.N(3 * a + i, 3 * b + i) += 0.5 * gg;
          loc.M(3 * a + i, 3 * b + i) += nn;
          for (int j = 0; j < 3; ++j) {
            loc.N(3 * a + i, 3 * b + j) += 0.5 * w * ga[j] * gb[i];
            loc.Mt(3 * a + i, 3 * b + j) += nn * geo.frame_n[g][i] * geo.frame_n[g][j];
            loc.Mth(3 * a + i, 3 * b + j) += nn * geo.frame_eth[g][i] * geo.frame_eth[g][j];
            loc.Mz(3 * a + i, 3 * b + j) += nn * geo.frame_ez[g][i] * geo.frame_ez[g][j];
          }
        }
      }
    }
  }
}

void check_budget(const ShellMesh& mesh, int n_forms, double budget_gb) {
  const double triplet_bytes = double(mesh.n_cells()) * 576.0 * 16.0 * n_forms;
  if (triplet_bytes > budget_gb * 1e9)
    throw std::runtime_error("assembly memory budget exceeded");
}

// Assembles one or more forms with a shared scatter: kernel(cell_geometry) ->
// array of local matrices in a fixed order. Parallel over cells in chunks,
// reduction strictly in cell order.
template <int NF, typename Kernel>
std::array<SpMat, NF> assemble_generic(const ShellMesh& mesh, const DofMap& dofs, Kernel kernel,
                                       AssemblyMode mode) {
  const int nc = mesh.n_cells();
  std::array<std::vector<Eigen::Triplet<double>>, NF> trips;
  for (auto& t : trips) t.reserve(size_t(nc) * 400);

  std::vector<std::array<Local, NF>> locals(std::min(kChunk, nc));
  for (int chunk = 0; chunk < nc; chunk += kChunk) {
    const int end = std::min(chunk + kChunk, nc);
    const bool par = (mode == AssemblyMode::Parallel);
#pragma omp parallel for schedule(static) if (par)
    for (int c = chunk; c < end; ++c) {
      CellGeometry geo;
      cell_geometry(mesh, c, geo);
      kernel(geo, locals[c - chunk]);
    }
    for (int c = chunk; c < end; ++c) {
      const auto& nodes = mesh.cell_nodes(c);
      int dof[24];
      for (int a = 0; a < 8; ++a) {
        const int fi = dofs.free_index[nodes[a]];
        for (int i = 0; i < 3; ++i) dof[3 * a + i] = fi < 0 ? -1 : fi + i;
      }
      for (int r = 0; r < 24; ++r) {
        if (dof[r] < 0) continue;
        for (int s = 0; s < 24; ++s) {
          if (dof[s] < 0) continue;
          for (int f = 0; f < NF; ++f) {
            const double v = locals[c - chunk][f](r, s);
            if (v != 0.0) trips[f].emplace_back(dof[r], dof[s], v);
          }
        }
      }
    }
  }
  std::array<SpMat, NF> out;
  for (int f = 0; f < NF; ++f) {
    out[f].resize(dofs.n_free, dofs.n_free);
    out[f].setFromTriplets(trips[f].begin(), trips[f].end());
    out[f].makeCompressed();
  }
  return out;
}

}  // namespace

FormPencil assemble_forms(const ShellMesh& mesh, const DofMap& dofs, AssemblyMode mode,
                          double memory_budget_gb) {
  check_budget(mesh, 6, memory_budget_gb);
  auto kernel = [](const CellGeometry& geo, std::array<Local, 6>& loc) {
    PencilLocals p;
    pencil_kernel(geo, p);
    loc = {p.N, p.D, p.M, p.Mt, p.Mth, p.Mz};
  };
  auto mats = assemble_generic<6>(mesh, dofs, kernel, mode);
  FormPencil out;
  out.N = std::move(mats[0]);
  out.D = std::move(mats[1]);
  out.M = std::move(mats[2]);
  out.Mt = std::move(mats[3]);
  out.Mtheta = std::move(mats[4]);
  out.Mz = std::move(mats[5]);
  out.n_free = dofs.n_free;
  return out;
}

StressField StressField::uniform(const Mat3& sigma) {
  if (!sigma.isApprox(sigma.transpose(), 1e-12))
    throw std::invalid_argument("StressField: sigma must be symmetric");
  StressField s;
  s.fn_ = [sigma](const ShellMesh&, int, const QuadPoint&) { return sigma; };
  s.provenance_ = "config-supplied";
  return s;
}

StressField StressField::uniaxial(const Vec3& direction, double magnitude) {
  const Vec3 d = direction.normalized();
  return uniform(-magnitude * d * d.transpose());
}

StressField StressField::meridian_compression(double magnitude) {
  StressField s;
  s.fn_ = [magnitude](const ShellMesh& mesh, int, const QuadPoint& q) -> Mat3 {
    FrameSample f = detail::frame_unchecked(mesh.surface(), q.theta, q.z);
    return -magnitude * f.e_z * f.e_z.transpose();
  };
  s.provenance_ = "config-supplied";
  return s;
}

StressField StressField::from_displacement(const DisplacementField& u, const ElasticTensor& L0) {
  StressField s;
  s.fn_ = [&u, L0](const ShellMesh& mesh, int cell, const QuadPoint& q) -> Mat3 {
    PointEval pe = eval_interpolant(u, cell, q);
    (void)mesh;
    const Mat3 e = 0.5 * (pe.grad_cart + pe.grad_cart.transpose());
    return L0.apply(e);
  };
  s.provenance_ = "derived-from-displacement";
  return s;
}

Mat3 StressField::at(const ShellMesh& mesh, int cell, const QuadPoint& q) const {
  return fn_(mesh, cell, q);
}

StressField StressField::scaled(double s) const {
  StressField out;
  auto fn = fn_;
  out.fn_ = [fn, s](const ShellMesh& m, int c, const QuadPoint& q) -> Mat3 {
    return s * fn(m, c, q);
  };
  out.provenance_ = provenance_;
  return out;
}

SpMat assemble_elastic(const ShellMesh& mesh, const DofMap& dofs, const ElasticTensor& L0,
                       AssemblyMode mode) {
  check_budget(mesh, 1, 4.0);
  const double mu = L0.mu, lambda = L0.lambda;
  auto kernel = [mu, lambda](const CellGeometry& geo, std::array<Local, 1>& loc) {
    Local& A = loc[0];
    A.setZero();
    for (int g = 0; g < 8; ++g) {
      const double w = geo.w[g];
      for (int a = 0; a < 8; ++a) {
        for (int b = 0; b < 8; ++b) {
          const Vec3& ga = geo.g[g][a];
          const Vec3& gb = geo.g[g][b];
          const double gg = w * ga.dot(gb);
          for (int i = 0; i < 3; ++i) {
            A(3 * a + i, 3 * b + i) += mu * gg;
            for (int j = 0; j < 3; ++j)
              A(3 * a + i, 3 * b + j) += w * (mu * ga[j] * gb[i] + lambda * ga[i] * gb[j]);
          }
        }
      }
    }
  };
  return assemble_generic<1>(mesh, dofs, kernel, mode)[0];
}

SpMat assemble_geometric(const ShellMesh& mesh, const DofMap& dofs, const StressField& sigma,
                         AssemblyMode mode) {
  check_budget(mesh, 1, 4.0);
  // sigma sampling needs the cell index, so this runs its own loop instead of
  // the shared generic kernel
  const int nc = mesh.n_cells();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(size_t(nc) * 200);
  std::vector<Local> locals(std::min(kChunk, nc));
  for (int chunk = 0; chunk < nc; chunk += kChunk) {
    const int end = std::min(chunk + kChunk, nc);
    const bool par = (mode == AssemblyMode::Parallel);
#pragma omp parallel for schedule(static) if (par)
    for (int c = chunk; c < end; ++c) {
      CellGeometry geo;
      cell_geometry(mesh, c, geo);
      Local& G = locals[c - chunk];
      G.setZero();
      const auto qp = mesh.cell_quadrature(c);
      for (int g = 0; g < 8; ++g) {
        const Mat3 s = sigma.at(mesh, c, qp[g]);
        const double w = geo.w[g];
        for (int a = 0; a < 8; ++a) {
          for (int b = 0; b < 8; ++b) {
            const double v = w * geo.g[g][a].dot(s * geo.g[g][b]);
            for (int i = 0; i < 3; ++i) G(3 * a + i, 3 * b + i) += v;
          }
        }
      }
    }
    for (int c = chunk; c < end; ++c) {
      const auto& nodes = mesh.cell_nodes(c);
      int dof[24];
      for (int a = 0; a < 8; ++a) {
        const int fi = dofs.free_index[nodes[a]];
        for (int i = 0; i < 3; ++i) dof[3 * a + i] = fi < 0 ? -1 : fi + i;
      }
      for (int r = 0; r < 24; ++r) {
        if (dof[r] < 0) continue;
        for (int s = 0; s < 24; ++s) {
          if (dof[s] < 0) continue;
          const double v = locals[c - chunk](r, s);
          if (v != 0.0) trips.emplace_back(dof[r], dof[s], v);
        }
      }
    }
  }
  SpMat out(dofs.n_free, dofs.n_free);
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

void write_coordinate_format(std::ostream& os, const SpMat& m) {
  os.precision(17);
  os << "# " << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      os << it.row() << " " << it.col() << " " << it.value() << "\n";
}

}  // namespace shellkorn
