#pragma once

// Explicit timeline: a single Bezier curve through control points picked
// uniformly from the year-sorted anchors, discretized into N_samples points.
// Anchors and queries are mapped to the parameter t of their nearest sample;
// years are then read off by nearest anchor parameter or by linear
// interpolation between the anchors straddling the query parameter.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "detail/parallel.hpp"
#include "embedding_store.hpp"
#include "kpca.hpp"

namespace chronoline {

inline constexpr int kDefaultControlPoints = 200;
inline constexpr int kDefaultCurveSamples = 1000;

// Point on the Bezier curve with control points given as rows of
// `control_points`, evaluated by repeated convex combination.
inline Vector decasteljau(const Eigen::Ref<const Matrix>& control_points, double t) {
  const auto k = control_points.rows();
  detail::require(k >= 2, "Bezier curve needs at least 2 control points");
  detail::require(t >= 0.0 && t <= 1.0, "curve parameter t must lie in [0, 1]");
  Matrix work = control_points.transpose();  // one column per control point
  const double s = 1.0 - t;
  for (Eigen::Index n = k - 1; n > 0; --n)
    for (Eigen::Index i = 0; i < n; ++i) work.col(i) = s * work.col(i) + t * work.col(i + 1);
  return work.col(0);
}

// Indices round(i * (M - 1) / (K - 1)) for i = 0..K-1, rounding halves up.
inline std::vector<std::size_t> control_point_indices(std::size_t m, std::size_t k) {
  detail::require(k >= 2, "need at least 2 control points");
  detail::require(k <= m, "control point count " + std::to_string(k) + " exceeds number of anchors " +
                              std::to_string(m));
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = (2 * i * (m - 1) + (k - 1)) / (2 * (k - 1));
  return idx;
}

inline Matrix select_control_points(const Eigen::Ref<const Matrix>& sorted_anchors, std::size_t k) {
  const auto idx = control_point_indices(static_cast<std::size_t>(sorted_anchors.rows()), k);
  Matrix out(static_cast<Eigen::Index>(k), sorted_anchors.cols());
  for (std::size_t i = 0; i < k; ++i)
    out.row(static_cast<Eigen::Index>(i)) = sorted_anchors.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

// Index of the Euclidean-nearest row; ties go to the lower index.
inline std::size_t nearest_sample(const Matrix& samples, const Eigen::Ref<const Vector>& point) {
  detail::require(samples.rows() > 0, "no curve samples");
  detail::require(samples.cols() == point.size(), "point dimension " + std::to_string(point.size()) +
                                                      " does not match curve dimension " +
                                                      std::to_string(samples.cols()));
  std::size_t best = 0;
  double best_d = (samples.row(0).transpose() - point).squaredNorm();
  for (Eigen::Index j = 1; j < samples.rows(); ++j) {
    const double d = (samples.row(j).transpose() - point).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(j);
    }
  }
  return best;
}

class BezierCurve {
 public:
  BezierCurve(Matrix control_points, int n_samples, unsigned threads = default_thread_count())
      : control_points_(std::move(control_points)), samples_(n_samples > 0 ? n_samples : 0, control_points_.cols()) {
    detail::require(control_points_.rows() >= 2, "Bezier curve needs at least 2 control points");
    detail::require(n_samples >= control_points_.rows(), "sample count must be at least the control point count");
    detail::parallel_for(
        static_cast<std::size_t>(n_samples),
        [&](std::size_t j) { samples_.row(static_cast<Eigen::Index>(j)) = decasteljau(control_points_, param(j)); },
        threads);
  }

  const Matrix& control_points() const noexcept { return control_points_; }
  const Matrix& samples() const noexcept { return samples_; }
  int degree() const noexcept { return static_cast<int>(control_points_.rows()) - 1; }
  int sample_count() const noexcept { return static_cast<int>(samples_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(control_points_.cols()); }

  // t_j = j / (N_samples - 1).
  double param(std::size_t j) const noexcept {
    return static_cast<double>(j) / static_cast<double>(samples_.rows() - 1);
  }

  // Parameter of the nearest discretized sample.
  double closest_param(const Eigen::Ref<const Vector>& point) const { return param(nearest_sample(samples_, point)); }

 private:
  Matrix control_points_;
  Matrix samples_;
};

enum class TimelineSpace { Ambient, Kpca };
enum class Inference { Nn, Interp };

inline std::string_view to_string(TimelineSpace s) { return s == TimelineSpace::Kpca ? "kpca" : "ambient"; }
inline std::string_view to_string(Inference m) { return m == Inference::Interp ? "interp" : "nn"; }

inline TimelineSpace parse_space(std::string_view s) {
  if (s == "kpca") return TimelineSpace::Kpca;
  if (s == "ambient") return TimelineSpace::Ambient;
  detail::fail("unknown timeline space '" + std::string(s) + "' (expected ambient or kpca)");
}

inline Inference parse_inference(std::string_view s) {
  if (s == "nn") return Inference::Nn;
  if (s == "interp") return Inference::Interp;
  detail::fail("unknown inference method '" + std::string(s) + "' (expected nn or interp)");
}

// Curve parameter of every anchor year, indexed from y_min.
class AnchorParams {
 public:
  AnchorParams(Year y_min, std::vector<double> t) : y_min_(y_min), t_(std::move(t)) {
    detail::require(!t_.empty(), "anchor parameters are empty");
    for (double v : t_) detail::require(v >= 0.0 && v <= 1.0, "anchor parameter outside [0, 1]");
  }

  Year y_min() const noexcept { return y_min_; }
  Year y_max() const noexcept { return y_min_ + static_cast<Year>(t_.size()) - 1; }
  std::size_t size() const noexcept { return t_.size(); }
  const std::vector<double>& values() const noexcept { return t_; }
  double at(Year y) const { return t_.at(static_cast<std::size_t>(y - y_min_)); }

  // Year whose parameter is closest to t; ties go to the smaller year.
  Year nearest_year(double t) const {
    std::size_t best = 0;
    double best_d = std::abs(t_[0] - t);
    for (std::size_t i = 1; i < t_.size(); ++i) {
      const double d = std::abs(t_[i] - t);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return y_min_ + static_cast<Year>(best);
  }

  // Linear interpolation between the anchors straddling t, clamped to the
  // extreme anchors outside their parameter range.
  double interpolate_year(double t) const {
    std::optional<std::size_t> before, after;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (t_[i] <= t && (!before || t_[i] > t_[*before])) before = i;
      if (t_[i] >= t && (!after || t_[i] < t_[*after])) after = i;
    }
    if (!before) return year_of(*after);
    if (!after) return year_of(*before);
    const double d_before = t - t_[*before];
    const double d_after = t_[*after] - t;
    if (d_before + d_after == 0.0) return year_of(*before);
    const double w = d_before / (d_before + d_after);
    return (1.0 - w) * year_of(*before) + w * year_of(*after);
  }

 private:
  double year_of(std::size_t i) const { return static_cast<double>(y_min_ + static_cast<Year>(i)); }

  Year y_min_;
  std::vector<double> t_;
};

struct TimePrediction {
  std::string id;
  double y_pred = 0.0;
  double t_query = 0.0;
  Inference method = Inference::Nn;
};

class TimelineModel {
 public:
  TimelineModel(BezierCurve curve, TimelineSpace space, std::optional<Projector> projector, AnchorParams params)
      : curve_(std::move(curve)), space_(space), projector_(std::move(projector)), params_(std::move(params)) {
    if (space_ == TimelineSpace::Kpca) {
      detail::require(projector_.has_value(), "kpca timeline requires a projector");
      detail::require(static_cast<std::size_t>(projector_->dims()) == curve_.dim(),
                      "projector output dimension does not match curve dimension");
    } else {
      detail::require(!projector_.has_value(), "ambient timeline must not carry a projector");
    }
  }

  const BezierCurve& curve() const noexcept { return curve_; }
  TimelineSpace space() const noexcept { return space_; }
  const std::optional<Projector>& projector() const noexcept { return projector_; }
  const AnchorParams& anchor_params() const noexcept { return params_; }
  Year y_min() const noexcept { return params_.y_min(); }
  Year y_max() const noexcept { return params_.y_max(); }

  // Dimension of the embedding vectors the model accepts.
  std::size_t input_dim() const noexcept { return projector_ ? projector_->input_dim() : curve_.dim(); }

  // Moves an embedding into the curve's space.
  Vector to_curve_space(const Eigen::Ref<const Vector>& x) const {
    detail::require(static_cast<std::size_t>(x.size()) == input_dim(),
                    "query dimension " + std::to_string(x.size()) + " does not match model dimension " +
                        std::to_string(input_dim()));
    if (projector_) return projector_->transform(x);
    return x;
  }

 private:
  BezierCurve curve_;
  TimelineSpace space_;
  std::optional<Projector> projector_;
  AnchorParams params_;
};

inline TimelineModel fit_timeline(const TimeAnchorSet& anchors, TimelineSpace space,
                                  std::optional<Projector> projector = std::nullopt,
                                  int k = kDefaultControlPoints, int n_samples = kDefaultCurveSamples,
                                  unsigned threads = default_thread_count()) {
  detail::require(k >= 2, "need at least 2 control points");
  Matrix points;
  if (space == TimelineSpace::Kpca) {
    detail::require(projector.has_value(), "kpca timeline requires a projector");
    detail::require(projector->training().rows() == anchors.vectors().rows() &&
                        projector->training().cols() == anchors.vectors().cols() &&
                        projector->training() == anchors.vectors(),
                    "projector was not fitted on these anchors");
    points.resize(anchors.vectors().rows(), projector->dims());
    for (Eigen::Index i = 0; i < points.rows(); ++i) points.row(i) = projector->transform(anchors.vectors().row(i).transpose());
  } else {
    detail::require(!projector.has_value(), "ambient timeline must not carry a projector");
    points = anchors.vectors();
  }
  BezierCurve curve(select_control_points(points, static_cast<std::size_t>(k)), n_samples, threads);
  std::vector<double> t(static_cast<std::size_t>(points.rows()));
  detail::parallel_for(
      t.size(), [&](std::size_t i) { t[i] = curve.closest_param(points.row(static_cast<Eigen::Index>(i)).transpose()); },
      threads);
  return TimelineModel(std::move(curve), space, std::move(projector), AnchorParams(anchors.y_min(), std::move(t)));
}

inline double map_to_curve(const TimelineModel& model, const Eigen::Ref<const Vector>& query) {
  return model.curve().closest_param(model.to_curve_space(query));
}

inline TimePrediction predict_nn(const TimelineModel& model, const Eigen::Ref<const Vector>& query) {
  TimePrediction p;
  p.t_query = map_to_curve(model, query);
  p.y_pred = model.anchor_params().nearest_year(p.t_query);
  p.method = Inference::Nn;
  return p;
}

inline TimePrediction predict_interp(const TimelineModel& model, const Eigen::Ref<const Vector>& query) {
  TimePrediction p;
  p.t_query = map_to_curve(model, query);
  p.y_pred = model.anchor_params().interpolate_year(p.t_query);
  p.method = Inference::Interp;
  return p;
}

inline TimePrediction predict(const TimelineModel& model, const Eigen::Ref<const Vector>& query, Inference method) {
  return method == Inference::Interp ? predict_interp(model, query) : predict_nn(model, query);
}

inline std::vector<TimePrediction> predict_batch(const TimelineModel& model, const EmbeddingSet& queries,
                                                 Inference method, unsigned threads = default_thread_count()) {
  std::vector<TimePrediction> out(queries.size());
  if (queries.empty()) return out;
  detail::require(queries.dim() == model.input_dim(), "query dimension " + std::to_string(queries.dim()) +
                                                          " does not match model dimension " +
                                                          std::to_string(model.input_dim()));
  detail::parallel_for(
      queries.size(),
      [&](std::size_t i) {
        out[i] = predict(model, queries[i].vec, method);
        out[i].id = queries[i].id;
      },
      threads);
  return out;
}

}  // namespace chronoline
