#pragma once

#include "shellkorn/forms.hpp"

namespace shellkorn {

struct SolverOptions {
  double tol = 1e-10;        // Lanczos residual target on the Ritz pair
  int max_iters = 500;       // operator applications cap
  int subspace = 80;         // restart width
  std::uint64_t seed = 0x5eedULL;
  bool positive_only = false;  // pick the largest positive Ritz value (indefinite pencils)
};

/// Minimized Rayleigh quotient num(u)/den(u) with its minimizer and solver
/// diagnostics. `residual` is |num*u - value*den*u| / |den*u|.
struct QuotientResult {
  double value = 0.0;
  Eigen::VectorXd minimizer;  // free dofs
  double residual = 0.0;
  int iterations = 0;
  std::string solver_tag;
  bool null_denominator = false;  // quotient 0 with a null-direction witness
};

/// Smallest generalized eigenvalue of (num, den): shift-invert Lanczos at
/// shift 0 on num^{-1} den in the num inner product (num must be positive
/// definite; a numerically singular num is reported as quotient 0 with the
/// null direction as witness). Deterministic for a fixed seed.
/// With positive_only set, returns 1 / (largest positive Ritz value), i.e. the
/// smallest positive eigenvalue of the indefinite pencil.
QuotientResult min_quotient(const SpMat& num, const SpMat& den, const SolverOptions& opts = {});

/// Form-id convenience wrapper over a pencil.
QuotientResult min_quotient(const FormPencil& pencil, FormId num, FormId den,
                            const SolverOptions& opts = {});

/// Full dense generalized symmetric eigensolve (free-dof count <= 2000).
QuotientResult dense_oracle(const SpMat& num, const SpMat& den, bool positive_only = false);
QuotientResult dense_oracle(const FormPencil& pencil, FormId num, FormId den);

/// (|u_theta|^2 / |e(u)|^2, |u_z|^2 / |e(u)|^2) of a nonzero field in V^h.
std::pair<double, double> korn_poincare_ratios(const FormPencil& pencil,
                                               const Eigen::VectorXd& free_values);

/// Rayleigh quotient of an explicit trial field through the pencil forms.
double rayleigh_quotient(const SpMat& num, const SpMat& den, const Eigen::VectorXd& u);

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace shellkorn
