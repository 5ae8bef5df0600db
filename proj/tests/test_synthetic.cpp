#include "chronoline/synthetic.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <random>

#include "chronoline/kpca.hpp"
#include "chronoline/metrics.hpp"
#include "chronoline/timeline.hpp"

using namespace chronoline;

namespace {

bool bit_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

TEST(Synthetic, NoiselessQueriesEqualAnchors) {
  SyntheticSpec spec;
  spec.dim = 32;
  spec.noise_sigma = 0.0;
  spec.queries_per_year = 1;
  const auto data = generate(spec);
  ASSERT_EQ(data.anchors.size(), 325u);
  ASSERT_EQ(data.queries.size(), 325u);
  for (const auto& q : data.queries) {
    ASSERT_TRUE(q.year.has_value());
    EXPECT_EQ(q.vec, Vector(data.anchors.anchor(*q.year).transpose()));
    EXPECT_EQ(q.label, "helix");
  }
}

TEST(Synthetic, SameSeedIsBitIdentical) {
  SyntheticSpec spec;
  spec.dim = 48;
  spec.noise_sigma = 0.05;
  spec.queries_per_year = 3;
  const auto a = generate(spec);
  const auto b = generate(spec);
  EXPECT_TRUE(bit_equal(a.anchors.vectors(), b.anchors.vectors()));
  EXPECT_TRUE(bit_equal(a.queries.matrix(), b.queries.matrix()));
  spec.seed = 8;
  EXPECT_FALSE(bit_equal(a.queries.matrix(), generate(spec).queries.matrix()));
}

TEST(Synthetic, UnitNormAndLabels) {
  SyntheticSpec spec;
  spec.dim = 16;
  spec.kind = CurveKind::SCurve;
  spec.noise_sigma = 0.3;
  spec.queries_per_year = 2;
  spec.y_min = 1990;
  spec.y_max = 1999;
  const auto data = generate(spec);
  EXPECT_EQ(data.queries.size(), 20u);
  EXPECT_EQ(data.queries[0].id, "q1990_0");
  EXPECT_EQ(data.queries[1].id, "q1990_1");
  for (const auto& q : data.queries) EXPECT_NEAR(q.vec.norm(), 1.0, 1e-9);
  for (Eigen::Index i = 0; i < data.anchors.vectors().rows(); ++i) EXPECT_NEAR(data.anchors.vectors().row(i).norm(), 1.0, 1e-9);
}

TEST(Synthetic, FrameIsOrthonormalAndPreservesDistances) {
  SyntheticSpec spec;
  spec.dim = 40;
  const auto data = generate(spec);
  const Matrix& f = data.frame;
  EXPECT_LE((f.transpose() * f - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
  std::vector<Eigen::Vector4d> base;
  for (double u : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    Eigen::Vector4d c;
    c << base_curve_point(CurveKind::Helix, u), 1.0;
    base.push_back(c);
  }
  for (const auto& a : base)
    for (const auto& b : base) EXPECT_NEAR((f * a - f * b).norm(), (a - b).norm(), 1e-9);
}

TEST(Synthetic, BaseCurves) {
  EXPECT_EQ(base_curve_point(CurveKind::Line, 0.25), Eigen::Vector3d(0.25, 0, 0));
  const auto h = base_curve_point(CurveKind::Helix, 0.125);
  EXPECT_NEAR(h.x(), std::cos(std::numbers::pi / 2), 1e-15);
  EXPECT_NEAR(h.y(), 1.0, 1e-15);
  EXPECT_EQ(h.z(), 0.125);
  EXPECT_EQ(base_curve_point(CurveKind::SCurve, 0.5), Eigen::Vector3d(0.5, 0, 0));
}

TEST(Synthetic, InvalidSpecs) {
  SyntheticSpec spec;
  spec.dim = 3;
  EXPECT_THROW(generate(spec), ContractError);
  spec = {};
  spec.noise_sigma = -0.1;
  EXPECT_THROW(generate(spec), ContractError);
  spec = {};
  spec.y_min = 2000;
  spec.y_max = 1999;
  EXPECT_THROW(generate(spec), ContractError);
  EXPECT_THROW(parse_curve_kind("spiral"), ContractError);
  EXPECT_EQ(parse_curve_kind("s-curve"), CurveKind::SCurve);
}

TEST(Synthetic, HelixDefeatsOneDimensionalKpca) {
  SyntheticSpec spec;
  spec.dim = 32;
  spec.queries_per_year = 0;
  const auto anchors = generate(spec).anchors;
  const auto proj = Projector::fit(anchors, 1);
  const Matrix z = project_all(proj, to_embedding_set(anchors));
  std::vector<double> c(z.col(0).data(), z.col(0).data() + z.rows());
  const auto years = anchors.years();
  EXPECT_LT(std::abs(ranking_scores(years, c).rho), 0.9);
}

TEST(Synthetic, HelixBezierPipelineRecoversChronology) {
  SyntheticSpec spec;
  spec.dim = 128;
  spec.queries_per_year = 0;
  const auto anchors = generate(spec).anchors;
  const auto model = fit_timeline(anchors, TimelineSpace::Kpca, Projector::fit(anchors, 13), 200, 1000);
  EXPECT_GE(std::abs(ranking_scores(model.anchor_params()).rho), 0.99);
}

}  // namespace
