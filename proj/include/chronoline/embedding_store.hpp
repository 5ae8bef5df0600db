#pragma once

// Data model and file formats for embeddings, time anchors and external
// one-dimensional projections.
//
// Embedding files are JSON Lines, one record per line:
//   {"id": "...", "year": 1950, "label": "cars", "vec": [0.6, 0.8]}
// "year" and "label" are optional. Projection files are CSV with a
// `year,value` header and one row per year.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "detail/file_io.hpp"
#include "detail/json_out.hpp"
#include "error.hpp"

namespace chronoline {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Year = int;

// Vectors whose norm is already this close to 1 are left untouched, which
// makes normalization idempotent bit-for-bit.
inline constexpr double kUnitNormTolerance = 1e-12;

inline Vector normalized(Vector v) {
  const double n = v.norm();
  detail::require(std::isfinite(n), "vector has non-finite entries");
  detail::require(n > 0.0, "cannot normalize a zero-norm vector");
  if (std::abs(n - 1.0) > kUnitNormTolerance) v /= n;
  return v;
}

struct EmbeddingRecord {
  std::string id;
  std::optional<Year> year;
  std::optional<std::string> label;
  Vector vec;
};

// Ordered, id-unique collection of equal-length embeddings.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;

  EmbeddingSet(std::size_t dim, std::vector<EmbeddingRecord> records)
      : dim_(dim), records_(std::move(records)) {
    std::unordered_set<std::string_view> seen;
    for (const auto& r : records_) {
      detail::require(static_cast<std::size_t>(r.vec.size()) == dim_,
                      "record '" + r.id + "' has dimension " + std::to_string(r.vec.size()) +
                          ", expected " + std::to_string(dim_));
      detail::require(seen.insert(r.id).second, "duplicate id '" + r.id + "'");
    }
    detail::require(records_.empty() || dim_ >= 2, "embedding dimension must be at least 2");
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const std::vector<EmbeddingRecord>& records() const noexcept { return records_; }
  const EmbeddingRecord& operator[](std::size_t i) const { return records_[i]; }
  auto begin() const noexcept { return records_.begin(); }
  auto end() const noexcept { return records_.end(); }

  // Row i is the vector of record i.
  Matrix matrix() const {
    Matrix m(static_cast<Eigen::Index>(records_.size()), static_cast<Eigen::Index>(dim_));
    for (std::size_t i = 0; i < records_.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = records_[i].vec;
    return m;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<EmbeddingRecord> records_;
};

// One anchor vector per year over the closed range [y_min, y_max].
class TimeAnchorSet {
 public:
  TimeAnchorSet(Year y_min, Year y_max, Matrix vectors)
      : y_min_(y_min), y_max_(y_max), vectors_(std::move(vectors)) {
    detail::require(y_min_ <= y_max_, "anchor range is empty: ymin > ymax");
    detail::require(vectors_.rows() == static_cast<Eigen::Index>(y_max_ - y_min_) + 1,
                    "anchor matrix must have one row per year in range");
    detail::require(vectors_.cols() >= 2, "embedding dimension must be at least 2");
  }

  Year y_min() const noexcept { return y_min_; }
  Year y_max() const noexcept { return y_max_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(vectors_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(vectors_.cols()); }
  bool contains(Year y) const noexcept { return y >= y_min_ && y <= y_max_; }

  // Rows in ascending year order.
  const Matrix& vectors() const noexcept { return vectors_; }

  auto anchor(Year y) const {
    detail::require(contains(y), "year " + std::to_string(y) + " outside anchor range");
    return vectors_.row(y - y_min_);
  }

  std::vector<Year> years() const {
    std::vector<Year> ys(size());
    for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = y_min_ + static_cast<Year>(i);
    return ys;
  }

 private:
  Year y_min_;
  Year y_max_;
  Matrix vectors_;
};

// Per-year coordinate computed by an external 1D projection (e.g. UMAP).
class ExternalProjection1D {
 public:
  ExternalProjection1D(Year y_min, std::vector<double> values)
      : y_min_(y_min), values_(std::move(values)) {
    detail::require(!values_.empty(), "projection is empty");
    for (double v : values_) detail::require(std::isfinite(v), "projection value is not finite");
  }

  Year y_min() const noexcept { return y_min_; }
  Year y_max() const noexcept { return y_min_ + static_cast<Year>(values_.size()) - 1; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }

  double value(Year y) const {
    detail::require(y >= y_min() && y <= y_max(), "year " + std::to_string(y) + " outside projection range");
    return values_[static_cast<std::size_t>(y - y_min_)];
  }

  std::vector<Year> years() const {
    std::vector<Year> ys(values_.size());
    for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = y_min_ + static_cast<Year>(i);
    return ys;
  }

 private:
  Year y_min_;
  std::vector<double> values_;
};

namespace detail {

inline EmbeddingRecord parse_record(const std::string& line, const std::string& source, std::size_t lineno,
                                    bool normalize) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source, lineno, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(source, lineno, "expected a JSON object");

  EmbeddingRecord rec;
  auto id = j.find("id");
  if (id == j.end() || !id->is_string()) throw ParseError(source, lineno, "missing string field 'id'");
  rec.id = id->get<std::string>();

  if (auto y = j.find("year"); y != j.end() && !y->is_null()) {
    if (!y->is_number_integer()) throw ParseError(source, lineno, "'year' must be an integer");
    rec.year = y->get<Year>();
  }
  if (auto l = j.find("label"); l != j.end() && !l->is_null()) {
    if (!l->is_string()) throw ParseError(source, lineno, "'label' must be a string");
    rec.label = l->get<std::string>();
  }

  auto v = j.find("vec");
  if (v == j.end() || !v->is_array()) throw ParseError(source, lineno, "missing array field 'vec'");
  rec.vec.resize(static_cast<Eigen::Index>(v->size()));
  for (std::size_t i = 0; i < v->size(); ++i) {
    const auto& x = (*v)[i];
    if (!x.is_number()) throw ParseError(source, lineno, "'vec' entries must be numbers");
    rec.vec[static_cast<Eigen::Index>(i)] = x.get<double>();
    if (!std::isfinite(rec.vec[static_cast<Eigen::Index>(i)]))
      throw ParseError(source, lineno, "'vec' entry is not finite");
  }
  if (normalize) {
    if (rec.vec.norm() == 0.0) throw ParseError(source, lineno, "zero-norm vector cannot be normalized");
    rec.vec = normalized(std::move(rec.vec));
  }
  return rec;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline EmbeddingSet parse_embeddings(std::istream& in, const std::string& source = "<stream>",
                                     bool normalize = true) {
  std::vector<EmbeddingRecord> records;
  std::unordered_set<std::string> ids;
  std::optional<std::size_t> dim;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    auto rec = detail::parse_record(line, source, lineno, normalize);
    const auto n = static_cast<std::size_t>(rec.vec.size());
    if (!dim) {
      if (n < 2) throw ParseError(source, lineno, "embedding dimension must be at least 2");
      dim = n;
    } else if (n != *dim) {
      throw ParseError(source, lineno,
                       "dimension mismatch: got " + std::to_string(n) + ", expected " + std::to_string(*dim));
    }
    if (!ids.insert(rec.id).second) throw ParseError(source, lineno, "duplicate id '" + rec.id + "'");
    records.push_back(std::move(rec));
  }
  return EmbeddingSet(dim.value_or(0), std::move(records));
}

inline EmbeddingSet load_embeddings(const std::filesystem::path& path, bool normalize = true) {
  auto in = detail::open_input(path);
  return parse_embeddings(in, path.string(), normalize);
}

inline void write_record(std::ostream& os, const EmbeddingRecord& r) {
  detail::JsonWriter w(os);
  w.begin_object().key("id").value(r.id);
  if (r.year) w.key("year").value(*r.year);
  if (r.label) w.key("label").value(*r.label);
  w.key("vec").begin_array();
  for (Eigen::Index i = 0; i < r.vec.size(); ++i) w.value(r.vec[i]);
  w.end_array().end_object();
  os << '\n';
}

inline std::string format_embeddings(const EmbeddingSet& set) {
  std::ostringstream os;
  for (const auto& r : set) write_record(os, r);
  return os.str();
}

inline void save_embeddings(const std::filesystem::path& path, const EmbeddingSet& set) {
  detail::write_file_atomic(path, format_embeddings(set));
}

// Collects one anchor per year in [y_min, y_max]. Records outside the range
// are ignored; every record must carry a year.
inline TimeAnchorSet to_anchor_set(const EmbeddingSet& set, Year y_min, Year y_max) {
  detail::require(y_min <= y_max, "anchor range is empty: ymin > ymax");
  detail::require(!set.empty(), "anchor set is empty");
  const auto count = static_cast<std::size_t>(y_max - y_min) + 1;
  std::vector<const EmbeddingRecord*> slot(count, nullptr);
  for (const auto& r : set) {
    detail::require(r.year.has_value(), "anchor record '" + r.id + "' has no year");
    const Year y = *r.year;
    if (y < y_min || y > y_max) continue;
    auto& s = slot[static_cast<std::size_t>(y - y_min)];
    detail::require(s == nullptr, "duplicate anchor year " + std::to_string(y));
    s = &r;
  }
  Matrix m(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(set.dim()));
  for (std::size_t i = 0; i < count; ++i) {
    detail::require(slot[i] != nullptr, "missing anchor year " + std::to_string(y_min + static_cast<Year>(i)));
    m.row(static_cast<Eigen::Index>(i)) = slot[i]->vec;
  }
  return TimeAnchorSet(y_min, y_max, std::move(m));
}

// Inverse of to_anchor_set; ids are "t<year>".
inline EmbeddingSet to_embedding_set(const TimeAnchorSet& anchors) {
  std::vector<EmbeddingRecord> records;
  records.reserve(anchors.size());
  for (Year y : anchors.years()) records.push_back({"t" + std::to_string(y), y, std::nullopt, anchors.anchor(y)});
  return EmbeddingSet(anchors.dim(), std::move(records));
}

inline ExternalProjection1D parse_projection_1d(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::map<Year, double> rows;
  while (std::getline(in, line)) {
    ++lineno;
    auto text = detail::trim(line);
    if (text.empty()) continue;
    if (!header) {
      if (text != "year,value") throw ParseError(source, lineno, "expected header 'year,value'");
      header = true;
      continue;
    }
    auto comma = text.find(',');
    if (comma == std::string_view::npos) throw ParseError(source, lineno, "expected 'year,value'");
    auto ytext = detail::trim(text.substr(0, comma));
    auto vtext = detail::trim(text.substr(comma + 1));
    Year y{};
    auto yr = std::from_chars(ytext.data(), ytext.data() + ytext.size(), y);
    if (yr.ec != std::errc{} || yr.ptr != ytext.data() + ytext.size())
      throw ParseError(source, lineno, "invalid year '" + std::string(ytext) + "'");
    double v{};
    auto vr = std::from_chars(vtext.data(), vtext.data() + vtext.size(), v);
    if (vr.ec != std::errc{} || vr.ptr != vtext.data() + vtext.size())
      throw ParseError(source, lineno, "invalid value '" + std::string(vtext) + "'");
    if (!std::isfinite(v)) throw ParseError(source, lineno, "value is not finite");
    if (!rows.emplace(y, v).second) throw ParseError(source, lineno, "duplicate year " + std::to_string(y));
  }
  if (!header) throw ParseError(source, 0, "missing header 'year,value'");
  if (rows.empty()) throw ParseError(source, 0, "no projection rows");
  const Year first = rows.begin()->first;
  std::vector<double> values;
  values.reserve(rows.size());
  Year expect = first;
  for (const auto& [y, v] : rows) {
    if (y != expect) throw ParseError(source, 0, "non-contiguous years: missing " + std::to_string(expect));
    values.push_back(v);
    ++expect;
  }
  return ExternalProjection1D(first, std::move(values));
}

inline ExternalProjection1D load_projection_1d(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_projection_1d(in, path.string());
}

}  // namespace chronoline
