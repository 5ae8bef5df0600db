#pragma once

// Command-line front end: gen-synthetic, probe, project, fit, predict,
// evaluate. Exit codes: 0 success, 2 usage error, 3 I/O failure,
// 4 contract violation, 1 anything else.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chronoline.hpp"

namespace chronoline::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kIo = 3, kContract = 4 };

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline TaiConfig parse_tai(const std::string& text, Year y_min, Year y_max) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      chronoline::detail::require(used == item.size(), "");
    } catch (const std::exception&) {
      chronoline::detail::fail("--tai expects four numbers T_min,I_min,T_max,I_max; got '" + text + "'");
    }
  }
  chronoline::detail::require(v.size() == 4, "--tai expects four numbers T_min,I_min,T_max,I_max; got '" + text + "'");
  TaiConfig cfg{v[0], v[1], v[2], v[3], y_min, y_max};
  cfg.validate();
  return cfg;
}

inline void append_rows(std::ostringstream& os, const EmbeddingSet& set, const Matrix& coords) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& r = set[i];
    os << csv_field(r.id) << ',' << (r.year ? std::to_string(*r.year) : std::string{}) << ','
       << (r.label ? csv_field(*r.label) : std::string{});
    for (Eigen::Index k = 0; k < coords.cols(); ++k)
      os << ',' << chronoline::detail::format_real(coords(static_cast<Eigen::Index>(i), k));
    os << '\n';
  }
}

}  // namespace detail

struct Streams {
  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
};

inline int run(const std::vector<std::string>& args, Streams io = {}) {
  CLI::App app{"Timeline extraction and year-of-first-appearance prediction from embedding spaces",
               "chronoline"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Print progress to stderr");
  app.footer("Environment: CHRONOLINE_THREADS caps the number of worker threads.");

  Year y_min = 1700, y_max = 2024;
  bool no_normalize = false;
  auto add_range = [&](CLI::App* sub) {
    sub->add_option("--ymin", y_min, "First year of the anchor range");
    sub->add_option("--ymax", y_max, "Last year of the anchor range");
  };
  auto add_normalize = [&](CLI::App* sub) {
    sub->add_flag("--no-normalize", no_normalize, "Keep input vectors as stored instead of scaling to unit norm");
  };

  // gen-synthetic
  auto* gen = app.add_subcommand("gen-synthetic", "Write a synthetic anchor set and labeled query set");
  std::string kind = "helix", anchors_out, queries_out;
  int dim = 512, per_year = 1;
  double sigma = 0.0;
  std::uint64_t seed = 7;
  gen->add_option("--kind", kind, "Base curve: line, helix or s-curve");
  gen->add_option("--dim", dim, "Embedding dimension");
  gen->add_option("--sigma", sigma, "Isotropic query noise standard deviation");
  gen->add_option("--per-year", per_year, "Queries per year");
  gen->add_option("--seed", seed, "Random seed");
  add_range(gen);
  gen->add_option("--anchors-out", anchors_out, "Anchor JSONL output")->required();
  gen->add_option("--queries-out", queries_out, "Query JSONL output")->required();

  // probe
  auto* probe_cmd = app.add_subcommand("probe", "Predict years by maximum dot product against anchors");
  std::string anchors_path, queries_path, out_path;
  std::size_t top_k = 1;
  probe_cmd->add_option("--anchors", anchors_path, "Anchor JSONL")->required();
  probe_cmd->add_option("--queries", queries_path, "Query JSONL")->required();
  add_range(probe_cmd);
  probe_cmd->add_option("--top-k", top_k, "Number of ranked years to report per query");
  probe_cmd->add_option("--out", out_path, "Result JSONL")->required();
  add_normalize(probe_cmd);

  // project
  auto* project_cmd = app.add_subcommand("project", "Cosine-KPCA coordinates of anchors and queries as CSV");
  int project_dims = 3;
  project_cmd->add_option("--anchors", anchors_path, "Anchor JSONL")->required();
  project_cmd->add_option("--queries", queries_path, "Query JSONL (optional)");
  add_range(project_cmd);
  project_cmd->add_option("--dims", project_dims, "Number of KPCA components");
  project_cmd->add_option("--out", out_path, "CSV output")->required();
  add_normalize(project_cmd);

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit a Bezier timeline to the anchors");
  std::string space = "kpca", model_path;
  int fit_dims = kDefaultKpcaDims, control_points = kDefaultControlPoints, samples = kDefaultCurveSamples;
  fit_cmd->add_option("--anchors", anchors_path, "Anchor JSONL")->required();
  fit_cmd->add_option("--space", space, "Curve space: kpca or ambient");
  fit_cmd->add_option("--dims", fit_dims, "KPCA components (kpca space only)");
  fit_cmd->add_option("--control-points", control_points, "Number of Bezier control points");
  fit_cmd->add_option("--samples", samples, "Number of curve samples");
  add_range(fit_cmd);
  fit_cmd->add_option("--model-out", model_path, "Model JSON output")->required();
  add_normalize(fit_cmd);

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Predict query years with a fitted timeline");
  std::string inference = "nn";
  predict_cmd->add_option("--model", model_path, "Model JSON")->required();
  predict_cmd->add_option("--queries", queries_path, "Query JSONL")->required();
  predict_cmd->add_option("--inference", inference, "nn or interp");
  predict_cmd->add_option("--out", out_path, "Prediction JSONL")->required();
  add_normalize(predict_cmd);

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against ground-truth years");
  std::string pred_path, truth_path, tai_text = "20,50,5,15", projection_path, ranking_model_path;
  eval_cmd->add_option("--pred", pred_path, "Prediction JSONL (probe or predict output)")->required();
  eval_cmd->add_option("--truth", truth_path, "Query JSONL with ground-truth years")->required();
  eval_cmd->add_option("--tai", tai_text, "TAI thresholds T(ymin),I(ymin),T(ymax),I(ymax)");
  add_range(eval_cmd);
  auto* model_opt = eval_cmd->add_option("--model", ranking_model_path, "Also score the anchor ordering of this model");
  eval_cmd->add_option("--projection", projection_path, "Also score an external 1D projection CSV (year,value)")
      ->excludes(model_opt);
  eval_cmd->add_option("--out", out_path, "Report JSON")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("chronoline");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success&) {
    const CLI::App* target = &app;
    for (const auto* sub : app.get_subcommands()) target = sub;
    io.out << target->help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    io.err << "error: " << e.what() << "\n\n";
    const CLI::App* target = &app;
    for (const auto* sub : app.get_subcommands()) target = sub;
    io.err << target->help();
    return kUsage;
  }

  auto log = [&](const std::string& msg) {
    if (verbose) io.err << msg << '\n';
  };
  const bool normalize = !no_normalize;

  try {
    if (*gen) {
      SyntheticSpec spec;
      spec.dim = dim;
      spec.y_min = y_min;
      spec.y_max = y_max;
      spec.kind = parse_curve_kind(kind);
      spec.noise_sigma = sigma;
      spec.queries_per_year = per_year;
      spec.seed = seed;
      const auto data = generate(spec);
      save_embeddings(anchors_out, to_embedding_set(data.anchors));
      save_embeddings(queries_out, data.queries);
      log("wrote " + std::to_string(data.anchors.size()) + " anchors and " + std::to_string(data.queries.size()) +
          " queries");
    } else if (*probe_cmd) {
      const auto anchors = to_anchor_set(load_embeddings(anchors_path, normalize), y_min, y_max);
      const auto queries = load_embeddings(queries_path, normalize);
      const auto results = probe_batch(queries, anchors, top_k);
      chronoline::detail::write_file_atomic(out_path, format_probe_results(results));
      log("probed " + std::to_string(results.size()) + " queries against " + std::to_string(anchors.size()) +
          " anchors");
    } else if (*project_cmd) {
      const auto anchor_set = load_embeddings(anchors_path, normalize);
      const auto anchors = to_anchor_set(anchor_set, y_min, y_max);
      const auto proj = Projector::fit(anchors, project_dims);
      if (proj.dims() < proj.requested_dims())
        io.err << "warning: KPCA kept " << proj.dims() << " of " << proj.requested_dims()
               << " requested components (remaining eigenvalues below threshold)\n";
      std::ostringstream os;
      os << "id,year,label";
      for (int k = 1; k <= proj.dims(); ++k) os << ",c" << k;
      os << '\n';
      const auto anchor_records = to_embedding_set(anchors);
      detail::append_rows(os, anchor_records, project_all(proj, anchor_records));
      if (!queries_path.empty()) {
        const auto queries = load_embeddings(queries_path, normalize);
        detail::append_rows(os, queries, project_all(proj, queries));
      }
      chronoline::detail::write_file_atomic(out_path, os.str());
    } else if (*fit_cmd) {
      const auto anchors = to_anchor_set(load_embeddings(anchors_path, normalize), y_min, y_max);
      const auto sp = parse_space(space);
      std::optional<Projector> proj;
      if (sp == TimelineSpace::Kpca) {
        proj = Projector::fit(anchors, fit_dims);
        if (proj->dims() < proj->requested_dims())
          io.err << "warning: KPCA kept " << proj->dims() << " of " << proj->requested_dims()
                 << " requested components (remaining eigenvalues below threshold)\n";
      }
      const auto model = fit_timeline(anchors, sp, std::move(proj), control_points, samples);
      save_model(model_path, model);
      log("fitted timeline over " + std::to_string(anchors.size()) + " anchors in " + std::string(to_string(sp)) +
          " space");
    } else if (*predict_cmd) {
      const auto method = parse_inference(inference);
      const auto model = load_model(model_path);
      const auto queries = load_embeddings(queries_path, normalize);
      const auto preds = predict_batch(model, queries, method);
      chronoline::detail::write_file_atomic(out_path, format_predictions(preds));
      log("predicted " + std::to_string(preds.size()) + " queries");
    } else if (*eval_cmd) {
      const auto cfg = detail::parse_tai(tai_text, y_min, y_max);
      const auto preds = load_year_predictions(pred_path);
      const auto truths = load_embeddings(truth_path, false);
      Parameters params{{"tai_t_at_ymin", cfg.t_at_ymin}, {"tai_i_at_ymin", cfg.i_at_ymin},
                        {"tai_t_at_ymax", cfg.t_at_ymax}, {"tai_i_at_ymax", cfg.i_at_ymax},
                        {"ymin", static_cast<long long>(y_min)}, {"ymax", static_cast<long long>(y_max)}};
      std::optional<RankingScores> ranking;
      if (!ranking_model_path.empty()) {
        const auto model = load_model(ranking_model_path);
        ranking = ranking_scores(model.anchor_params());
        params.emplace_back("ranking_source", std::string("model"));
        params.emplace_back("space", std::string(to_string(model.space())));
        if (model.projector()) {
          params.emplace_back("kpca_dims", static_cast<long long>(model.projector()->dims()));
          params.emplace_back("kpca_requested_dims", static_cast<long long>(model.projector()->requested_dims()));
        }
        params.emplace_back("control_points", static_cast<long long>(model.curve().control_points().rows()));
        params.emplace_back("samples", static_cast<long long>(model.curve().sample_count()));
        params.emplace_back("model_ymin", static_cast<long long>(model.y_min()));
        params.emplace_back("model_ymax", static_cast<long long>(model.y_max()));
      } else if (!projection_path.empty()) {
        const auto proj = load_projection_1d(projection_path);
        ranking = ranking_scores(proj);
        params.emplace_back("ranking_source", std::string("projection"));
        params.emplace_back("projection_ymin", static_cast<long long>(proj.y_min()));
        params.emplace_back("projection_ymax", static_cast<long long>(proj.y_max()));
      } else {
        params.emplace_back("ranking_source", std::string("none"));
      }
      const auto report = evaluate(preds, truths, cfg, ranking);
      chronoline::detail::write_file_atomic(out_path, format_report(report, params));
      log("evaluated " + std::to_string(report.n) + " predictions: mae " +
          chronoline::detail::format_real(report.mae) + ", tai " + chronoline::detail::format_real(report.tai));
    }
  } catch (const IoError& e) {
    io.err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ContractError& e) {
    io.err << "error: " << e.what() << '\n';
    return kContract;
  } catch (const nlohmann::json::exception& e) {
    io.err << "error: malformed input: " << e.what() << '\n';
    return kContract;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

}  // namespace chronoline::cli
