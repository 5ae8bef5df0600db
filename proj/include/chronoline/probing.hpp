#pragma once

// Time probing: the predicted year is the anchor with the largest raw dot
// product against the query. Scores are not passed through a softmax.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "detail/parallel.hpp"
#include "embedding_store.hpp"

namespace chronoline {

struct ProbeResult {
  std::string id;
  Year y_pred = 0;
  double score = 0.0;
  // Top-k (year, score) pairs ordered by score descending, then year ascending.
  std::optional<std::vector<std::pair<Year, double>>> ranked_years;
};

namespace detail {

inline ProbeResult probe_scores(const Vector& scores, Year y_min, std::size_t top_k) {
  ProbeResult r;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;  // strict: ties keep the earlier year
  r.y_pred = y_min + static_cast<Year>(best);
  r.score = scores[best];
  if (top_k > 1) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(scores.size()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
    const auto k = std::min(top_k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](Eigen::Index a, Eigen::Index b) {
                        return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
                      });
    std::vector<std::pair<Year, double>> ranked;
    ranked.reserve(k);
    for (std::size_t i = 0; i < k; ++i) ranked.emplace_back(y_min + static_cast<Year>(order[i]), scores[order[i]]);
    r.ranked_years = std::move(ranked);
  }
  return r;
}

}  // namespace detail

inline ProbeResult probe(const Eigen::Ref<const Vector>& query, const TimeAnchorSet& anchors,
                         std::size_t top_k = 1) {
  detail::require(top_k >= 1, "top_k must be at least 1");
  detail::require(anchors.size() > 0, "anchor set is empty");
  detail::require(static_cast<std::size_t>(query.size()) == anchors.dim(),
                  "query dimension " + std::to_string(query.size()) + " does not match anchor dimension " +
                      std::to_string(anchors.dim()));
  const Vector scores = anchors.vectors() * query;
  return detail::probe_scores(scores, anchors.y_min(), top_k);
}

inline std::vector<ProbeResult> probe_batch(const EmbeddingSet& queries, const TimeAnchorSet& anchors,
                                            std::size_t top_k = 1, unsigned threads = default_thread_count()) {
  std::vector<ProbeResult> out(queries.size());
  if (queries.empty()) return out;
  detail::require(queries.dim() == anchors.dim(), "query dimension " + std::to_string(queries.dim()) +
                                                      " does not match anchor dimension " +
                                                      std::to_string(anchors.dim()));
  detail::parallel_for(
      queries.size(),
      [&](std::size_t i) {
        out[i] = probe(queries[i].vec, anchors, top_k);
        out[i].id = queries[i].id;
      },
      threads);
  return out;
}

}  // namespace chronoline
