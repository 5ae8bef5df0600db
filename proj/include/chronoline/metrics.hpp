#pragma once

// Accuracy metrics (MAE, time-adaptive accuracy index) and ranking metrics
// (Spearman rho, Kendall tau, adjacent-swap distance) for chronological
// orderings.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "embedding_store.hpp"
#include "probing.hpp"
#include "timeline.hpp"

namespace chronoline {

inline double mae(std::span<const double> preds, std::span<const double> truths) {
  detail::require(!preds.empty(), "mae of empty input");
  detail::require(preds.size() == truths.size(), "mae inputs differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) sum += std::abs(preds[i] - truths[i]);
  return sum / static_cast<double>(preds.size());
}

// Tolerance T(y) and intolerance I(y) thresholds, linear in the ground-truth
// year between their values at y_min and y_max and constant outside.
struct TaiConfig {
  double t_at_ymin = 20.0;
  double i_at_ymin = 50.0;
  double t_at_ymax = 5.0;
  double i_at_ymax = 15.0;
  Year y_min = 1700;
  Year y_max = 2024;

  void validate() const {
    detail::require(y_min <= y_max, "TAI range is empty: ymin > ymax");
    detail::require(std::isfinite(t_at_ymin) && std::isfinite(i_at_ymin) && std::isfinite(t_at_ymax) &&
                        std::isfinite(i_at_ymax),
                    "TAI thresholds must be finite");
    detail::require(t_at_ymin >= 0.0 && t_at_ymin < i_at_ymin, "TAI needs 0 <= T < I at ymin");
    detail::require(t_at_ymax >= 0.0 && t_at_ymax < i_at_ymax, "TAI needs 0 <= T < I at ymax");
  }

  // (T(y), I(y))
  std::pair<double, double> thresholds(double truth) const {
    if (y_max == y_min) return {t_at_ymin, i_at_ymin};
    const double y = std::clamp(truth, static_cast<double>(y_min), static_cast<double>(y_max));
    const double f = (y - y_min) / static_cast<double>(y_max - y_min);
    return {t_at_ymin + f * (t_at_ymax - t_at_ymin), i_at_ymin + f * (i_at_ymax - i_at_ymin)};
  }
};

// Piecewise score: 1 within tolerance, 1 - err/I between the thresholds,
// 0 beyond intolerance. Discontinuous at err = T as defined.
inline double tai(double pred, double truth, const TaiConfig& cfg) {
  cfg.validate();
  const auto [tol, intol] = cfg.thresholds(truth);
  const double err = std::abs(pred - truth);
  if (err <= tol) return 1.0;
  if (err >= intol) return 0.0;
  return 1.0 - err / intol;
}

// Fractional ranks (1-based); tied values share their average rank.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double spearman(std::span<const double> a, std::span<const double> b) {
  detail::require(a.size() == b.size(), "spearman inputs differ in length");
  detail::require(a.size() >= 2, "spearman needs at least 2 elements");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double mean = 0.5 * static_cast<double>(a.size() + 1);
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = ra[i] - mean;
    const double db = rb[i] - mean;
    cov += da * db;
    va += da * da;
    vb += db * db;
  }
  detail::require(va > 0.0 && vb > 0.0, "spearman undefined: zero rank variance");
  return cov / std::sqrt(va * vb);
}

// Tau-a: (concordant - discordant) / (n(n-1)/2). Pairs tied in either input
// count as neither.
inline double kendall(std::span<const double> a, std::span<const double> b) {
  detail::require(a.size() == b.size(), "kendall inputs differ in length");
  detail::require(a.size() >= 2, "kendall needs at least 2 elements");
  const auto n = static_cast<std::int64_t>(a.size());
  std::int64_t score = 0;
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = i + 1; j < n; ++j) {
      const double da = a[j] - a[i];
      const double db = b[j] - b[i];
      if (da == 0.0 || db == 0.0) continue;
      score += ((da > 0) == (db > 0)) ? 1 : -1;
    }
  return static_cast<double>(score) / static_cast<double>(n * (n - 1) / 2);
}

// Number of pairs i < j with v[i] > v[j], by merge sort.
template <typename T>
std::int64_t inversion_count(std::vector<T> v) {
  std::vector<T> buf(v.size());
  std::int64_t count = 0;
  for (std::size_t width = 1; width < v.size(); width *= 2) {
    for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, v.size());
      const std::size_t hi = std::min(lo + 2 * width, v.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          count += static_cast<std::int64_t>(mid - i);
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
    }
    std::swap(v, buf);
  }
  return count;
}

// 1 - 2S/M where S is the minimum number of adjacent swaps turning
// `predicted` into `truth` and M = N(N-1)/2.
template <typename T>
double mndl(const std::vector<T>& predicted, const std::vector<T>& truth) {
  detail::require(predicted.size() == truth.size(), "orders differ in length");
  detail::require(truth.size() >= 2, "orders need at least 2 elements");
  std::map<T, std::size_t> position;
  for (std::size_t i = 0; i < truth.size(); ++i)
    detail::require(position.emplace(truth[i], i).second, "true order has repeated elements");
  std::vector<std::size_t> seq(predicted.size());
  std::vector<bool> used(truth.size(), false);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    auto it = position.find(predicted[i]);
    detail::require(it != position.end() && !used[it->second], "orders are not permutations of each other");
    used[it->second] = true;
    seq[i] = it->second;
  }
  const auto n = static_cast<std::int64_t>(truth.size());
  const std::int64_t m = n * (n - 1) / 2;
  const std::int64_t s = inversion_count(std::move(seq));
  return static_cast<double>(m - 2 * s) / static_cast<double>(m);
}

struct RankingScores {
  double rho = 0.0;
  double tau = 0.0;
  double mndl = 0.0;
};

// Compares the order induced by `coords` (one per year) with chronology.
// Tied coordinates are ordered by year in the swap distance.
inline RankingScores ranking_scores(std::span<const Year> years, std::span<const double> coords) {
  detail::require(years.size() == coords.size(), "years and coordinates differ in length");
  std::vector<double> y(years.begin(), years.end());
  RankingScores r;
  r.rho = spearman(y, coords);
  r.tau = kendall(y, coords);
  std::vector<std::size_t> idx(years.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return coords[a] < coords[b] || (coords[a] == coords[b] && years[a] < years[b]);
  });
  std::vector<Year> predicted(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) predicted[i] = years[idx[i]];
  std::vector<Year> truth(years.begin(), years.end());
  std::sort(truth.begin(), truth.end());
  r.mndl = mndl(predicted, truth);
  return r;
}

inline RankingScores ranking_scores(const AnchorParams& params) {
  std::vector<Year> years(params.size());
  for (std::size_t i = 0; i < years.size(); ++i) years[i] = params.y_min() + static_cast<Year>(i);
  return ranking_scores(years, params.values());
}

inline RankingScores ranking_scores(const ExternalProjection1D& proj) {
  const auto years = proj.years();
  return ranking_scores(years, proj.values());
}

struct YearPrediction {
  std::string id;
  double y_pred = 0.0;
};

inline std::vector<YearPrediction> to_year_predictions(const std::vector<ProbeResult>& results) {
  std::vector<YearPrediction> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back({r.id, static_cast<double>(r.y_pred)});
  return out;
}

inline std::vector<YearPrediction> to_year_predictions(const std::vector<TimePrediction>& results) {
  std::vector<YearPrediction> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back({r.id, r.y_pred});
  return out;
}

struct LabelStats {
  double mae = 0.0;
  double tai = 0.0;
  std::size_t n = 0;
  Year year_min = 0;
  Year year_max = 0;
};

struct EvalReport {
  double mae = 0.0;
  double tai = 0.0;
  std::size_t n = 0;
  std::map<std::string, LabelStats> per_label;
  std::optional<RankingScores> ranking;
};

// Queries without a label are counted overall but not per label.
inline EvalReport evaluate(const std::vector<YearPrediction>& preds, const EmbeddingSet& truths,
                           const TaiConfig& cfg, std::optional<RankingScores> ranking = std::nullopt) {
  cfg.validate();
  detail::require(!preds.empty(), "no predictions to evaluate");
  std::unordered_map<std::string, const EmbeddingRecord*> by_id;
  for (const auto& r : truths) by_id.emplace(r.id, &r);

  struct Acc {
    double abs_err = 0.0, tai = 0.0;
    std::size_t n = 0;
    Year lo = 0, hi = 0;
  };
  Acc all;
  std::map<std::string, Acc> labels;
  for (const auto& p : preds) {
    auto it = by_id.find(p.id);
    detail::require(it != by_id.end(), "prediction for unknown id '" + p.id + "'");
    const auto& rec = *it->second;
    detail::require(rec.year.has_value(), "ground truth for '" + p.id + "' has no year");
    const double truth = *rec.year;
    const double err = std::abs(p.y_pred - truth);
    const double score = tai(p.y_pred, truth, cfg);
    auto add = [&](Acc& a) {
      a.lo = a.n ? std::min(a.lo, *rec.year) : *rec.year;
      a.hi = a.n ? std::max(a.hi, *rec.year) : *rec.year;
      a.abs_err += err;
      a.tai += score;
      ++a.n;
    };
    add(all);
    if (rec.label) add(labels[*rec.label]);
  }

  EvalReport report;
  report.n = all.n;
  report.mae = all.abs_err / static_cast<double>(all.n);
  report.tai = all.tai / static_cast<double>(all.n);
  for (const auto& [label, a] : labels)
    report.per_label[label] = {a.abs_err / static_cast<double>(a.n), a.tai / static_cast<double>(a.n), a.n, a.lo, a.hi};
  report.ranking = ranking;
  return report;
}

}  // namespace chronoline
