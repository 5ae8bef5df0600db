#pragma once

// Serialization of timeline models, prediction records and evaluation
// reports. All reals are written as shortest round-trip decimals.

#include <filesystem>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "detail/file_io.hpp"
#include "detail/json_out.hpp"
#include "embedding_store.hpp"
#include "kpca.hpp"
#include "metrics.hpp"
#include "probing.hpp"
#include "timeline.hpp"

namespace chronoline {

inline constexpr std::string_view kModelFormat = "chronoline-timeline";
inline constexpr int kModelVersion = 1;

namespace detail {

inline void write_matrix(JsonWriter& w, const Matrix& m) {
  w.begin_array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    w.begin_array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) w.value(m(i, j));
    w.end_array();
  }
  w.end_array();
}

inline void write_vector(JsonWriter& w, const Vector& v) {
  w.begin_array();
  for (Eigen::Index i = 0; i < v.size(); ++i) w.value(v[i]);
  w.end_array();
}

inline const nlohmann::json& field(const nlohmann::json& j, const char* name, const std::string& source) {
  auto it = j.find(name);
  if (it == j.end()) throw ParseError(source, 0, std::string("missing field '") + name + "'");
  return *it;
}

inline Vector read_vector(const nlohmann::json& j, const std::string& source, const char* what) {
  if (!j.is_array()) throw ParseError(source, 0, std::string("'") + what + "' must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError(source, 0, std::string("'") + what + "' entries must be numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

inline Matrix read_matrix(const nlohmann::json& j, const std::string& source, const char* what) {
  if (!j.is_array() || j.empty()) throw ParseError(source, 0, std::string("'") + what + "' must be a non-empty array");
  const auto cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Vector row = read_vector(j[i], source, what);
    if (static_cast<std::size_t>(row.size()) != cols) throw ParseError(source, 0, std::string("'") + what + "' is ragged");
    m.row(static_cast<Eigen::Index>(i)) = row;
  }
  return m;
}

}  // namespace detail

inline std::string format_model(const TimelineModel& model) {
  std::ostringstream os;
  detail::JsonWriter w(os);
  w.begin_object();
  w.key("format").value(kModelFormat);
  w.key("version").value(kModelVersion);
  w.key("space").value(to_string(model.space()));
  w.key("y_min").value(model.y_min());
  w.key("y_max").value(model.y_max());
  w.key("control_point_count").value(static_cast<std::size_t>(model.curve().control_points().rows()));
  w.key("n_samples").value(model.curve().sample_count());
  w.key("anchor_params").array(model.anchor_params().values());
  w.key("control_points");
  detail::write_matrix(w, model.curve().control_points());
  w.key("projector");
  if (const auto& p = model.projector()) {
    w.begin_object();
    w.key("kernel").value("cosine");
    w.key("requested_dims").value(p->requested_dims());
    w.key("dims").value(p->dims());
    w.key("eigvals");
    detail::write_vector(w, p->eigenvalues());
    w.key("eigvecs");
    detail::write_matrix(w, p->eigenvectors());
    w.key("row_mean");
    detail::write_vector(w, p->row_mean());
    w.key("total_mean").value(p->total_mean());
    w.key("training_vectors");
    detail::write_matrix(w, p->training());
    w.end_object();
  } else {
    w.null();
  }
  w.end_object();
  os << '\n';
  return os.str();
}

inline void save_model(const std::filesystem::path& path, const TimelineModel& model) {
  detail::write_file_atomic(path, format_model(model));
}

inline TimelineModel parse_model(const std::string& text, const std::string& source = "<model>",
                                 unsigned threads = default_thread_count()) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source, 0, std::string("malformed JSON: ") + e.what());
  }
  using detail::field;
  if (!j.is_object() || j.value("format", std::string{}) != kModelFormat)
    throw ParseError(source, 0, "not a timeline model file");
  if (field(j, "version", source) != kModelVersion) throw ParseError(source, 0, "unsupported model version");
  const auto space = parse_space(field(j, "space", source).get<std::string>());
  const Year y_min = field(j, "y_min", source).get<Year>();
  const int n_samples = field(j, "n_samples", source).get<int>();
  const Vector t = detail::read_vector(field(j, "anchor_params", source), source, "anchor_params");
  Matrix control = detail::read_matrix(field(j, "control_points", source), source, "control_points");

  std::optional<Projector> projector;
  const auto& pj = field(j, "projector", source);
  if (!pj.is_null()) {
    if (field(pj, "kernel", source) != "cosine") throw ParseError(source, 0, "unsupported kernel");
    projector.emplace(detail::read_matrix(field(pj, "training_vectors", source), source, "training_vectors"),
                      detail::read_vector(field(pj, "eigvals", source), source, "eigvals"),
                      detail::read_matrix(field(pj, "eigvecs", source), source, "eigvecs"),
                      detail::read_vector(field(pj, "row_mean", source), source, "row_mean"),
                      field(pj, "total_mean", source).get<double>(), field(pj, "requested_dims", source).get<int>());
  }
  std::vector<double> params(t.data(), t.data() + t.size());
  if (y_min + static_cast<Year>(params.size()) - 1 != field(j, "y_max", source).get<Year>())
    throw ParseError(source, 0, "anchor_params does not cover [y_min, y_max]");
  return TimelineModel(BezierCurve(std::move(control), n_samples, threads), space, std::move(projector),
                       AnchorParams(y_min, std::move(params)));
}

inline TimelineModel load_model(const std::filesystem::path& path, unsigned threads = default_thread_count()) {
  return parse_model(detail::read_file(path), path.string(), threads);
}

inline std::string format_predictions(const std::vector<TimePrediction>& preds) {
  std::ostringstream os;
  for (const auto& p : preds) {
    detail::JsonWriter w(os);
    w.begin_object().key("id").value(p.id).key("y_pred").value(p.y_pred).key("t").value(p.t_query);
    w.key("method").value(to_string(p.method)).end_object();
    os << '\n';
  }
  return os.str();
}

inline std::string format_probe_results(const std::vector<ProbeResult>& results) {
  std::ostringstream os;
  for (const auto& r : results) {
    detail::JsonWriter w(os);
    w.begin_object().key("id").value(r.id).key("y_pred").value(r.y_pred).key("score").value(r.score);
    if (r.ranked_years) {
      w.key("ranked").begin_array();
      for (const auto& [y, s] : *r.ranked_years) w.begin_array().value(y).value(s).end_array();
      w.end_array();
    }
    w.end_object();
    os << '\n';
  }
  return os.str();
}

// Reads any JSONL with "id" and numeric "y_pred" per line (probe or
// timeline output).
inline std::vector<YearPrediction> parse_year_predictions(std::istream& in, const std::string& source = "<stream>") {
  std::vector<YearPrediction> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(source, lineno, std::string("malformed JSON: ") + e.what());
    }
    auto id = j.find("id");
    auto y = j.find("y_pred");
    if (!j.is_object() || id == j.end() || !id->is_string() || y == j.end() || !y->is_number())
      throw ParseError(source, lineno, "expected fields 'id' (string) and 'y_pred' (number)");
    out.push_back({id->get<std::string>(), y->get<double>()});
  }
  return out;
}

inline std::vector<YearPrediction> load_year_predictions(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_year_predictions(in, path.string());
}

// Ordered key/value provenance entries.
using ParamValue = std::variant<std::string, double, long long>;
using Parameters = std::vector<std::pair<std::string, ParamValue>>;

inline std::string format_report(const EvalReport& report, const Parameters& params = {}) {
  std::ostringstream os;
  detail::JsonWriter w(os);
  w.begin_object();
  w.key("n").value(report.n);
  w.key("mae").value(report.mae);
  w.key("tai").value(report.tai);
  w.key("per_label").begin_object();
  for (const auto& [label, s] : report.per_label) {
    w.key(label).begin_object();
    w.key("n").value(s.n).key("mae").value(s.mae).key("tai").value(s.tai);
    w.key("year_min").value(s.year_min).key("year_max").value(s.year_max);
    w.end_object();
  }
  w.end_object();
  w.key("ranking");
  if (report.ranking) {
    w.begin_object();
    w.key("rho").value(report.ranking->rho).key("tau").value(report.ranking->tau);
    w.key("mndl").value(report.ranking->mndl);
    w.end_object();
  } else {
    w.null();
  }
  w.key("parameters").begin_object();
  for (const auto& [k, v] : params) {
    w.key(k);
    std::visit([&](const auto& x) { w.value(x); }, v);
  }
  w.end_object();
  w.end_object();
  os << '\n';
  return os.str();
}

}  // namespace chronoline
