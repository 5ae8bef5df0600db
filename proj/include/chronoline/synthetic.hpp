#pragma once

// Synthetic chronological manifolds with known year labels.
//
// Year y maps to u = (y - y_min) / (y_max - y_min) and to a 3D base point
//   line:    (u, 0, 0)
//   helix:   (cos 4 pi u, sin 4 pi u, u)
//   s-curve: (u, tanh(6u - 3), 0)
// The base point is embedded in R^N as F * (c, 1) where F is a seeded random
// N x 4 orthonormal frame; the fourth column is a constant offset direction
// shared by all points so that no embedded point is the zero vector.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/QR>

#include "embedding_store.hpp"

namespace chronoline {

enum class CurveKind { Line, Helix, SCurve };

inline std::string_view to_string(CurveKind k) {
  switch (k) {
    case CurveKind::Line: return "line";
    case CurveKind::Helix: return "helix";
    case CurveKind::SCurve: return "s-curve";
  }
  return "line";
}

inline CurveKind parse_curve_kind(std::string_view s) {
  if (s == "line") return CurveKind::Line;
  if (s == "helix") return CurveKind::Helix;
  if (s == "s-curve") return CurveKind::SCurve;
  detail::fail("unknown curve kind '" + std::string(s) + "' (expected line, helix or s-curve)");
}

struct SyntheticSpec {
  int dim = 512;
  Year y_min = 1700;
  Year y_max = 2024;
  CurveKind kind = CurveKind::Helix;
  double noise_sigma = 0.0;
  int queries_per_year = 1;
  std::uint64_t seed = 7;

  void validate() const {
    detail::require(dim >= 4, "synthetic dimension must be at least 4");
    detail::require(y_min <= y_max, "synthetic year range is empty: ymin > ymax");
    detail::require(std::isfinite(noise_sigma) && noise_sigma >= 0.0, "noise sigma must be finite and >= 0");
    detail::require(queries_per_year >= 0, "queries per year must be >= 0");
  }
};

inline Eigen::Vector3d base_curve_point(CurveKind kind, double u) {
  constexpr double two_turns = 4.0 * std::numbers::pi;
  switch (kind) {
    case CurveKind::Line: return {u, 0.0, 0.0};
    case CurveKind::Helix: return {std::cos(two_turns * u), std::sin(two_turns * u), u};
    case CurveKind::SCurve: return {u, std::tanh(6.0 * u - 3.0), 0.0};
  }
  return {u, 0.0, 0.0};
}

// N x cols matrix with orthonormal columns, from the QR factorization of a
// Gaussian matrix.
inline Matrix random_orthonormal_frame(int dim, int cols, std::mt19937_64& rng) {
  detail::require(cols >= 1 && cols <= dim, "frame needs 1 <= cols <= dim");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(dim, cols);
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, cols);
  return q;
}

struct SyntheticData {
  TimeAnchorSet anchors;
  EmbeddingSet queries;
  Matrix frame;  // N x 4
};

inline SyntheticData generate(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const Matrix frame = random_orthonormal_frame(spec.dim, 4, rng);
  const double span = static_cast<double>(spec.y_max - spec.y_min);
  auto embed = [&](Year y) -> Vector {
    const double u = span > 0 ? (y - spec.y_min) / span : 0.0;
    Eigen::Vector4d c;
    c << base_curve_point(spec.kind, u), 1.0;
    return frame * c;
  };

  const auto count = static_cast<Eigen::Index>(spec.y_max - spec.y_min) + 1;
  Matrix anchors(count, spec.dim);
  std::vector<EmbeddingRecord> queries;
  queries.reserve(static_cast<std::size_t>(count) * static_cast<std::size_t>(spec.queries_per_year));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::string label(to_string(spec.kind));
  for (Year y = spec.y_min; y <= spec.y_max; ++y) {
    const Vector x = embed(y);
    anchors.row(y - spec.y_min) = normalized(x);
    for (int q = 0; q < spec.queries_per_year; ++q) {
      Vector noisy = x;
      for (Eigen::Index i = 0; i < noisy.size(); ++i) noisy[i] += spec.noise_sigma * gauss(rng);
      queries.push_back({"q" + std::to_string(y) + "_" + std::to_string(q), y, label, normalized(std::move(noisy))});
    }
  }
  return {TimeAnchorSet(spec.y_min, spec.y_max, std::move(anchors)),
          EmbeddingSet(static_cast<std::size_t>(spec.dim), std::move(queries)), frame};
}

}  // namespace chronoline
