#pragma once

// Kernel PCA with a cosine kernel.
//
// Fitting builds K_ij = cos(x_i, x_j) over the M training anchors, double
// centers it and keeps the leading S eigenpairs (lambda_k, u_k). A vector x
// maps to
//   z_k = k_c(x) . u_k / sqrt(lambda_k),
//   k_c(x)_i = k(x, x_i) - mean_j k(x, x_j) - row_mean_i + total_mean,
// so training vector i lands at sqrt(lambda_k) * u_k(i).

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "embedding_store.hpp"

namespace chronoline {

// Eigenvalues at or below this fraction of max(lambda_max, 1) are dropped.
inline constexpr double kEigenCutoff = 1e-10;
inline constexpr int kDefaultKpcaDims = 13;

class Projector {
 public:
  // Raw state; used when loading a serialized model.
  Projector(Matrix training, Vector eigvals, Matrix eigvecs, Vector row_mean, double total_mean,
            int requested_dims)
      : training_(std::move(training)),
        eigvals_(std::move(eigvals)),
        eigvecs_(std::move(eigvecs)),
        row_mean_(std::move(row_mean)),
        total_mean_(total_mean),
        requested_dims_(requested_dims) {
    const auto m = training_.rows();
    detail::require(m >= 1 && training_.cols() >= 1, "projector has no training vectors");
    detail::require(eigvals_.size() >= 1 && eigvals_.size() <= m, "projector dimension must be in [1, M]");
    detail::require(eigvecs_.rows() == m && eigvecs_.cols() == eigvals_.size(), "eigenvector matrix shape mismatch");
    detail::require(row_mean_.size() == m, "row mean length mismatch");
    for (Eigen::Index k = 0; k < eigvals_.size(); ++k) {
      detail::require(eigvals_[k] > 0.0, "eigenvalues must be strictly positive");
      if (k > 0) detail::require(eigvals_[k] <= eigvals_[k - 1], "eigenvalues must be non-increasing");
    }
    norms_ = training_.rowwise().norm();
    for (Eigen::Index i = 0; i < m; ++i) detail::require(norms_[i] > 0.0, "training vector has zero norm");
  }

  static Projector fit(const TimeAnchorSet& anchors, int s_dim = kDefaultKpcaDims) {
    return fit(anchors.vectors(), s_dim);
  }

  // Rows of `training` are the anchors in ascending year order.
  static Projector fit(const Matrix& training, int s_dim) {
    const auto m = training.rows();
    detail::require(s_dim >= 1, "KPCA dimension must be at least 1");
    detail::require(s_dim <= m, "KPCA dimension " + std::to_string(s_dim) + " exceeds number of anchors " +
                                    std::to_string(m));
    const Vector norms = training.rowwise().norm();
    for (Eigen::Index i = 0; i < m; ++i) detail::require(norms[i] > 0.0, "training vector has zero norm");

    const Matrix unit = norms.cwiseInverse().asDiagonal() * training;
    const Matrix kernel = unit * unit.transpose();
    const Vector row_mean = kernel.rowwise().mean();
    const double total_mean = row_mean.mean();
    Matrix centered = kernel;
    centered.colwise() -= row_mean;
    centered.rowwise() -= row_mean.transpose();
    centered.array() += total_mean;
    centered = 0.5 * (centered + centered.transpose());

    Eigen::SelfAdjointEigenSolver<Matrix> solver(centered);
    detail::require(solver.info() == Eigen::Success, "eigendecomposition failed");
    // Eigen returns ascending order.
    const Vector& all_vals = solver.eigenvalues();
    const Matrix& all_vecs = solver.eigenvectors();
    const double lambda_max = all_vals[m - 1];
    const double cutoff = kEigenCutoff * std::max(lambda_max, 1.0);

    int kept = 0;
    while (kept < s_dim && all_vals[m - 1 - kept] > cutoff) ++kept;
    detail::require(kept > 0, "all eigenvalues below threshold");

    Vector vals(kept);
    Matrix vecs(m, kept);
    for (int k = 0; k < kept; ++k) {
      vals[k] = all_vals[m - 1 - k];
      Vector u = all_vecs.col(m - 1 - k);
      // Deterministic sign: largest-magnitude entry positive.
      Eigen::Index arg = 0;
      u.cwiseAbs().maxCoeff(&arg);
      if (u[arg] < 0) u = -u;
      vecs.col(k) = u / u.norm();
    }
    return Projector(training, std::move(vals), std::move(vecs), row_mean, total_mean, s_dim);
  }

  int dims() const noexcept { return static_cast<int>(eigvals_.size()); }
  int requested_dims() const noexcept { return requested_dims_; }
  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(training_.cols()); }
  std::size_t training_size() const noexcept { return static_cast<std::size_t>(training_.rows()); }

  const Matrix& training() const noexcept { return training_; }
  const Vector& eigenvalues() const noexcept { return eigvals_; }
  const Matrix& eigenvectors() const noexcept { return eigvecs_; }
  const Vector& row_mean() const noexcept { return row_mean_; }
  double total_mean() const noexcept { return total_mean_; }

  Vector transform(const Eigen::Ref<const Vector>& x) const {
    detail::require(static_cast<std::size_t>(x.size()) == input_dim(),
                    "vector dimension " + std::to_string(x.size()) + " does not match projector input dimension " +
                        std::to_string(input_dim()));
    const double xn = x.norm();
    detail::require(xn > 0.0, "cannot project a zero-norm vector");
    Vector k = (training_ * x).cwiseQuotient(norms_) / xn;
    const double k_mean = k.mean();
    k.array() -= k_mean;
    k -= row_mean_;
    k.array() += total_mean_;
    Vector z = eigvecs_.transpose() * k;
    return z.cwiseQuotient(eigvals_.cwiseSqrt());
  }

  // Training projections sqrt(lambda_k) * u_k, one row per anchor.
  Matrix training_projections() const { return eigvecs_ * eigvals_.cwiseSqrt().asDiagonal(); }

 private:
  Matrix training_;
  Vector eigvals_;
  Matrix eigvecs_;
  Vector row_mean_;
  double total_mean_;
  int requested_dims_;
  Vector norms_;
};

// One row per record, in set order.
inline Matrix project_all(const Projector& proj, const EmbeddingSet& set) {
  Matrix out(static_cast<Eigen::Index>(set.size()), proj.dims());
  if (set.empty()) return out;
  detail::require(set.dim() == proj.input_dim(), "set dimension does not match projector input dimension");
  for (std::size_t i = 0; i < set.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = proj.transform(set[i].vec);
  return out;
}

}  // namespace chronoline
