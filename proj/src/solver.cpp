#include "shellkorn/solver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>

namespace shellkorn {

namespace {

Eigen::VectorXd seeded_start(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

double pencil_residual(const SpMat& num, const SpMat& den, double value,
                       const Eigen::VectorXd& u) {
  const Eigen::VectorXd du = den * u;
  const double dn = du.norm();
  if (dn == 0.0) return 0.0;
  return (num * u - value * du).norm() / dn;
}

}  // namespace

QuotientResult min_quotient(const SpMat& num, const SpMat& den, const SolverOptions& opts) {
  const int n = static_cast<int>(num.rows());
  if (n == 0) throw SolverError("min_quotient: empty pencil");
  QuotientResult out;
  out.solver_tag = "iterative";

  Eigen::SimplicialLDLT<SpMat> chol;
  chol.compute(num);
  bool num_pd = (chol.info() == Eigen::Success);
  if (num_pd) {
    const auto& dvec = chol.vectorD();
    const double dmax = dvec.maxCoeff();
    if (dvec.minCoeff() <= dmax * 1e-14) num_pd = false;
  }
  if (!num_pd) {
    // numerator singular: the quotient minimum is 0, witnessed by a null
    // direction of num (inverse iteration on a lightly shifted matrix)
    SpMat shifted = num;
    double scale = 0.0;
    for (int k = 0; k < num.outerSize(); ++k)
      for (SpMat::InnerIterator it(num, k); it; ++it)
        if (it.row() == it.col()) scale = std::max(scale, std::abs(it.value()));
    SpMat eye(n, n);
    eye.setIdentity();
    shifted = num + (scale * 1e-12) * eye;
    Eigen::SimplicialLDLT<SpMat> chol2(shifted);
    if (chol2.info() != Eigen::Success) throw SolverError("min_quotient: factorization failed");
    Eigen::VectorXd v = seeded_start(n, opts.seed).normalized();
    for (int it = 0; it < 50; ++it) v = chol2.solve(v).normalized();
    out.value = 0.0;
    out.minimizer = v;
    out.null_denominator = true;
    out.residual = pencil_residual(num, den, 0.0, v);
    out.iterations = 50;
    return out;
  }

  // Lanczos on B = num^{-1} den, self-adjoint in the num inner product.
  // Largest Ritz value theta_max = 1 / lambda_min(num, den); with
  // positive_only, the largest positive theta.
  const int m_max = std::min(opts.subspace, n);
  Eigen::VectorXd v = seeded_start(n, opts.seed);
  int total_ops = 0;
  double theta_best = 0.0;
  Eigen::VectorXd ritz_best;
  double conv = std::numeric_limits<double>::infinity();
  bool exhausted = false;

  for (int restart = 0; restart < 64 && total_ops < opts.max_iters && !exhausted; ++restart) {
    double nv = std::sqrt(v.dot(num * v));
    if (!(nv > 0.0)) throw SolverError("min_quotient: degenerate start vector");
    std::vector<Eigen::VectorXd> V, NV;  // basis and cached num * basis
    V.push_back(v / nv);
    NV.push_back(num * V[0]);
    std::vector<double> alpha, beta;

    auto extract_ritz = [&]() -> bool {
      const int k = static_cast<int>(alpha.size());
      if (k == 0) return false;
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
      for (int i = 0; i < k; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      int pick = -1;
      for (int i = k - 1; i >= 0; --i) {
        if (!opts.positive_only || es.eigenvalues()[i] > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0) return false;
      const double theta = es.eigenvalues()[pick];
      const double tail = beta.empty() ? 0.0 : std::abs(beta[k - 1] * es.eigenvectors()(k - 1, pick));
      conv = tail / std::max(std::abs(theta), 1e-300);
      Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < k; ++i) y += es.eigenvectors()(i, pick) * V[i];
      theta_best = theta;
      ritz_best = y;
      return true;
    };

    for (int m = 0; m < m_max && total_ops < opts.max_iters; ++m) {
      Eigen::VectorXd w = chol.solve(den * V[m]);
      ++total_ops;
      const double a = w.dot(NV[m]);
      alpha.push_back(a);
      // two-pass classical Gram-Schmidt against the whole basis (num inner
      // product, cached duals)
      for (int pass = 0; pass < 2; ++pass)
        for (size_t kk = 0; kk < V.size(); ++kk) w -= NV[kk].dot(w) * V[kk];
      const double b = std::sqrt(std::max(0.0, w.dot(num * w)));
      if (b < 1e-14) {
        beta.push_back(0.0);
        // invariant subspace reached: Ritz values are exact
        if (extract_ritz()) {
          conv = 0.0;
          exhausted = true;
          break;
        }
        if (opts.positive_only)
          throw SolverError("min_quotient: no destabilizing direction found");
        throw SolverError("min_quotient: Lanczos breakdown");
      }
      beta.push_back(b);
      V.push_back(w / b);
      NV.push_back(num * V.back());

      if (m >= 2 && (m % 4 == 0 || m == m_max - 1)) {
        if (extract_ritz() && conv < opts.tol) break;
      }
    }
    if (ritz_best.size() == 0 && !extract_ritz()) {
      if (opts.positive_only) throw SolverError("min_quotient: no destabilizing direction found");
      throw SolverError("min_quotient: Lanczos breakdown");
    }
    if (conv < opts.tol) break;
    v = ritz_best;  // restart from the best Ritz vector
  }
  out.iterations = total_ops;
  if (!(conv < opts.tol))
    throw SolverError("min_quotient: no convergence within iteration cap");

  if (theta_best <= 0.0) {
    if (opts.positive_only) throw SolverError("min_quotient: no destabilizing direction found");
    // den vanishes on the whole explored space
    out.value = 0.0;
    out.null_denominator = true;
    out.minimizer = ritz_best;
    out.residual = pencil_residual(num, den, 0.0, ritz_best);
    return out;
  }
  out.value = 1.0 / theta_best;
  out.minimizer = ritz_best.normalized();
  out.residual = pencil_residual(num, den, out.value, out.minimizer);
  return out;
}

QuotientResult min_quotient(const FormPencil& pencil, FormId num, FormId den,
                            const SolverOptions& opts) {
  return min_quotient(pencil.form(num), pencil.form(den), opts);
}

QuotientResult dense_oracle(const SpMat& num, const SpMat& den, bool positive_only) {
  const int n = static_cast<int>(num.rows());
  if (n > 2000) throw SolverError("dense_oracle: free-dof count exceeds 2000");
  QuotientResult out;
  out.solver_tag = "dense-oracle";
  Eigen::MatrixXd A = Eigen::MatrixXd(den);  // den v = mu num v with num SPD
  Eigen::MatrixXd B = Eigen::MatrixXd(num);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
  if (es.info() != Eigen::Success) throw SolverError("dense_oracle: eigensolve failed");
  const auto& mu = es.eigenvalues();
  int pick = -1;
  for (int i = n - 1; i >= 0; --i) {
    if (!positive_only || mu[i] > 0.0) {
      pick = i;
      break;
    }
  }
  if (pick < 0 || mu[pick] <= 0.0) {
    if (positive_only) throw SolverError("dense_oracle: no destabilizing direction");
    out.value = 0.0;
    out.null_denominator = true;
    out.minimizer = es.eigenvectors().col(n - 1);
    return out;
  }
  out.value = 1.0 / mu[pick];
  out.minimizer = es.eigenvectors().col(pick).normalized();
  out.residual = pencil_residual(num, den, out.value, out.minimizer);
  out.iterations = 1;
  return out;
}

QuotientResult dense_oracle(const FormPencil& pencil, FormId num, FormId den) {
  return dense_oracle(pencil.form(num), pencil.form(den));
}

std::pair<double, double> korn_poincare_ratios(const FormPencil& pencil,
                                               const Eigen::VectorXd& u) {
  const double e2 = u.dot(pencil.N * u);
  if (u.norm() == 0.0 || e2 == 0.0)
    throw std::invalid_argument("korn_poincare_ratios: zero field");
  return {u.dot(pencil.Mtheta * u) / e2, u.dot(pencil.Mz * u) / e2};
}

double rayleigh_quotient(const SpMat& num, const SpMat& den, const Eigen::VectorXd& u) {
  const double d = u.dot(den * u);
  if (d == 0.0) throw std::invalid_argument("rayleigh_quotient: zero denominator");
  return u.dot(num * u) / d;
}

}  // namespace shellkorn
