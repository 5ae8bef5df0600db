#include "chronoline/kpca.hpp"

#include <gtest/gtest.h>

#include <Eigen/SVD>

#include "chronoline/metrics.hpp"
#include "chronoline/synthetic.hpp"

using namespace chronoline;

namespace {

TimeAnchorSet two_axis_anchors() {
  Matrix m(2, 2);
  m << 1, 0, 0, 1;
  return TimeAnchorSet(1700, 1701, m);
}

TimeAnchorSet helix_anchors(int dim = 64, Year y_min = 1700, Year y_max = 2024) {
  SyntheticSpec spec;
  spec.dim = dim;
  spec.y_min = y_min;
  spec.y_max = y_max;
  spec.queries_per_year = 0;
  return generate(spec).anchors;
}

TEST(KpcaFit, TwoAxisHandEigendecomposition) {
  // K = I, K_c = [[.5,-.5],[-.5,.5]] with eigenvalues {1, 0}.
  const auto proj = Projector::fit(two_axis_anchors(), 2);
  EXPECT_EQ(proj.requested_dims(), 2);
  ASSERT_EQ(proj.dims(), 1);
  EXPECT_NEAR(proj.eigenvalues()[0], 1.0, 1e-12);
  EXPECT_NEAR(proj.total_mean(), 0.5, 1e-15);
  const double a = proj.transform(Vector::Unit(2, 0))[0];
  const double b = proj.transform(Vector::Unit(2, 1))[0];
  EXPECT_NEAR(std::abs(a), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(a, -b, 1e-12);
  EXPECT_NEAR(proj.transform((Vector(2) << 1, 1).finished().normalized())[0], 0.0, 1e-12);
}

TEST(KpcaFit, Errors) {
  Matrix same(2, 2);
  same << 0.6, 0.8, 0.6, 0.8;
  try {
    Projector::fit(TimeAnchorSet(1700, 1701, same), 1);
    FAIL() << "expected degenerate error";
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("all eigenvalues below threshold"), std::string::npos);
  }
  EXPECT_THROW(Projector::fit(two_axis_anchors(), 3), ContractError);
  EXPECT_THROW(Projector::fit(two_axis_anchors(), 0), ContractError);
  Matrix zero = Matrix::Zero(2, 2);
  zero(0, 0) = 1;
  EXPECT_THROW(Projector::fit(TimeAnchorSet(1700, 1701, zero), 1), ContractError);
}

TEST(KpcaFit, PaperScaleAnchors) {
  const auto proj = Projector::fit(helix_anchors(), 13);
  EXPECT_GE(proj.dims(), 1);
  EXPECT_LE(proj.dims(), 13);
  EXPECT_EQ(proj.training_size(), 325u);
}

TEST(KpcaFit, EigenpairInvariants) {
  SyntheticSpec spec;
  spec.dim = 40;
  spec.y_min = 1900;
  spec.y_max = 1999;
  spec.noise_sigma = 0.1;
  const auto data = generate(spec);
  // Use noisy queries as anchors so that the kernel has full rank.
  const auto anchors = to_anchor_set(data.queries, 1900, 1999);
  const auto proj = Projector::fit(anchors, 30);
  ASSERT_EQ(proj.dims(), 30);
  const auto& vals = proj.eigenvalues();
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    EXPECT_GT(vals[k], 0.0);
    if (k) {
      EXPECT_LE(vals[k], vals[k - 1]);
    }
  }
  const Matrix gram = proj.eigenvectors().transpose() * proj.eigenvectors();
  EXPECT_LE((gram - Matrix::Identity(30, 30)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(KpcaFit, CenteredKernelIsSymmetricPsd) {
  SyntheticSpec spec;
  spec.dim = 30;
  spec.y_min = 1900;
  spec.y_max = 1979;
  spec.noise_sigma = 0.2;
  const auto anchors = to_anchor_set(generate(spec).queries, 1900, 1979);
  const Matrix& x = anchors.vectors();
  const auto m = x.rows();
  Matrix k(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) k(i, j) = x.row(i).dot(x.row(j)) / (x.row(i).norm() * x.row(j).norm());
  const Matrix ones = Matrix::Constant(m, m, 1.0 / static_cast<double>(m));
  const Matrix kc = k - ones * k - k * ones + ones * k * ones;
  EXPECT_LE((kc - kc.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> es(kc);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8 * es.eigenvalues().maxCoeff());
  // The projector's eigenvalues are the leading eigenvalues of this matrix.
  const auto proj = Projector::fit(anchors, 5);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(proj.eigenvalues()[i], es.eigenvalues()[m - 1 - i], 1e-9);
}

TEST(KpcaTransform, TrainingRowsReproduceTrainingProjections) {
  const auto anchors = helix_anchors(48, 1800, 1899);
  const auto proj = Projector::fit(anchors, 13);
  const Matrix train = proj.training_projections();
  for (Eigen::Index i = 0; i < anchors.vectors().rows(); ++i) {
    const Vector z = proj.transform(anchors.vectors().row(i).transpose());
    EXPECT_LE((z - train.row(i).transpose()).cwiseAbs().maxCoeff(), 1e-8) << "row " << i;
  }
}

TEST(KpcaTransform, MatchesLinearPcaScoresOnUnitVectors) {
  // On unit vectors the cosine kernel is linear, so KPCA scores equal the
  // principal component scores of the centered data up to sign.
  const auto anchors = helix_anchors(20, 1900, 1960);
  const auto proj = Projector::fit(anchors, 3);
  const Matrix& x = anchors.vectors();
  const Matrix xc = x.rowwise() - x.colwise().mean();
  Eigen::JacobiSVD<Matrix> svd(xc, Eigen::ComputeThinU);
  const Matrix scores = svd.matrixU().leftCols(3) * svd.singularValues().head(3).asDiagonal();
  const Matrix z = project_all(proj, to_embedding_set(anchors));
  for (int k = 0; k < 3; ++k) {
    const double sign = z.col(k).dot(scores.col(k)) >= 0 ? 1.0 : -1.0;
    EXPECT_LE((z.col(k) - sign * scores.col(k)).cwiseAbs().maxCoeff(), 1e-8) << "component " << k;
  }
}

TEST(KpcaTransform, ScaleInvariantAndDimensionChecked) {
  const auto anchors = helix_anchors(16, 1900, 1950);
  const auto proj = Projector::fit(anchors, 3);
  const Vector x = anchors.vectors().row(7).transpose();
  EXPECT_LE((proj.transform(x) - proj.transform(5.0 * x)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(proj.transform(Vector::Ones(15)), ContractError);
  EXPECT_THROW(proj.transform(Vector::Zero(16)), ContractError);
}

TEST(KpcaProjectAll, EmptySingleAndLoop) {
  const auto anchors = helix_anchors(16, 1900, 1950);
  const auto proj = Projector::fit(anchors, 4);
  EXPECT_EQ(project_all(proj, EmbeddingSet{}).rows(), 0);

  const EmbeddingSet one(16, {{"only", 1900, std::nullopt, anchors.anchor(1910).transpose()}});
  const Matrix single = project_all(proj, one);
  ASSERT_EQ(single.rows(), 1);
  EXPECT_EQ(Vector(single.row(0).transpose()), proj.transform(one[0].vec));

  const auto set = to_embedding_set(anchors);
  const Matrix all = project_all(proj, set);
  for (std::size_t i = 0; i < set.size(); ++i)
    EXPECT_EQ(Vector(all.row(static_cast<Eigen::Index>(i)).transpose()), proj.transform(set[i].vec));
}

TEST(KpcaOneDim, OrdersMonotoneManifold) {
  SyntheticSpec spec;
  spec.dim = 64;
  spec.kind = CurveKind::Line;
  spec.queries_per_year = 0;
  const auto anchors = generate(spec).anchors;
  const auto proj = Projector::fit(anchors, 1);
  const Matrix z = project_all(proj, to_embedding_set(anchors));
  std::vector<double> coord(z.col(0).data(), z.col(0).data() + z.rows());
  const auto years = anchors.years();
  const auto scores = ranking_scores(years, coord);
  EXPECT_GE(std::abs(scores.rho), 0.95);
}

TEST(KpcaOneDim, SignFlipLeavesOrderingMetricsInvariant) {
  SyntheticSpec spec;
  spec.dim = 32;
  spec.kind = CurveKind::SCurve;
  spec.queries_per_year = 0;
  const auto anchors = generate(spec).anchors;
  const auto proj = Projector::fit(anchors, 1);
  const Matrix z = project_all(proj, to_embedding_set(anchors));
  std::vector<double> c(z.col(0).data(), z.col(0).data() + z.rows());
  std::vector<double> flipped(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) flipped[i] = -c[i];
  const auto years = anchors.years();
  const auto a = ranking_scores(years, c);
  const auto b = ranking_scores(years, flipped);
  EXPECT_NEAR(std::abs(a.rho), std::abs(b.rho), 1e-12);
  EXPECT_NEAR(std::abs(a.tau), std::abs(b.tau), 1e-12);
}

}  // namespace
