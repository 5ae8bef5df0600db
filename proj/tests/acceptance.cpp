// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chronoline/chronoline.hpp"
#include "chronoline/cli.hpp"
#include "chronoline/detail/file_io.hpp"
#include "oracles.hpp"

using namespace chronoline;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, const std::function<Outcome()>& body, double time_limit_s = 0) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (time_limit_s > 0 && secs >= time_limit_s) {
    o.pass = false;
    o.detail += " (time limit " + std::to_string(time_limit_s) + " s exceeded)";
  }
  if (!o.pass) ++failures;
  std::printf("%s %-28s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome metric_oracles() {
  long cases = 0, mismatches = 0;
  for (int n = 2; n <= 7; ++n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    const std::vector<int> truth = p;
    std::vector<double> pos(p.begin(), p.end());
    const double m = n * (n - 1) / 2.0;
    do {
      std::vector<double> pd(p.begin(), p.end());
      const double k = kendall(pos, pd);
      const double d = mndl(p, truth);
      const double ref_k = oracle::kendall_pairs(pos, pd);
      const double ref_d = (m - 2.0 * static_cast<double>(oracle::bubble_swaps(p))) / m;
      if (k != ref_k || d != ref_d || k != d) ++mismatches;
      ++cases;
    } while (std::next_permutation(p.begin(), p.end()));
  }
  return {mismatches == 0 && cases == 5912,
          std::to_string(cases) + " permutations, " + std::to_string(mismatches) + " mismatches"};
}

Outcome spearman_fixture() {
  const std::vector<double> a{1, 2, 3}, b{1, 3, 2};
  const double fixture = spearman(a, b);
  bool ok = fixture == 0.5;
  for (int n = 2; n <= 100; ++n) {
    std::vector<double> up(static_cast<std::size_t>(n));
    std::iota(up.begin(), up.end(), 0.0);
    std::vector<double> down(up.rbegin(), up.rend());
    ok = ok && spearman(up, up) == 1.0 && spearman(up, down) == -1.0;
  }
  return {ok, fmt("fixture rho=%.17g; identity/reversal N=2..100", fixture)};
}

Outcome tai_examples() {
  const TaiConfig cfg;
  const double got[4] = {tai(1710, 1700, cfg), tai(1735, 1700, cfg), tai(2039, 2024, cfg), tai(1874, 1862, cfg)};
  const double want[4] = {1.0, 0.30, 0.0, 1.0};
  double worst = 0;
  for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
  return {worst <= 1e-12, fmt("max |diff| = %.3g", worst)};
}

Outcome decasteljau_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> degree(1, 10), dim(1, 6);
  std::normal_distribution<double> g(0, 1);
  double worst = 0;
  for (int poly = 0; poly < 100; ++poly) {
    Matrix p(degree(rng) + 1, dim(rng));
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = g(rng);
    for (int j = 0; j <= 100; ++j) {
      const double t = j / 100.0;
      worst = std::max(worst, (decasteljau(p, t) - oracle::bernstein(p, t)).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-9, fmt("100 polygons x 101 t, max |diff| = %.3g", worst)};
}

SyntheticData helix(double sigma, int dim = 512) {
  SyntheticSpec spec;
  spec.dim = dim;
  spec.noise_sigma = sigma;
  return generate(spec);
}

Outcome chronology_recovery() {
  const auto data = helix(0.0);
  auto proj = Projector::fit(data.anchors, 13);
  const auto model = fit_timeline(data.anchors, TimelineSpace::Kpca, std::move(proj), 200, 1000);
  const auto s = ranking_scores(model.anchor_params());
  const bool ok = data.anchors.size() == 325 && std::abs(s.rho) >= 0.99 && std::abs(s.tau) >= 0.98 &&
                  std::abs(s.mndl) >= 0.98;
  return {ok, fmt("rho=%.4f tau=%.4f mndl=%.4f", s.rho, s.tau, s.mndl)};
}

double sweep_mae(const SyntheticData& data, std::optional<int> dims) {
  std::optional<Projector> proj;
  if (dims) proj = Projector::fit(data.anchors, *dims);
  const auto space = dims ? TimelineSpace::Kpca : TimelineSpace::Ambient;
  const auto model = fit_timeline(data.anchors, space, std::move(proj), 200, 1000);
  const auto preds = to_year_predictions(predict_batch(model, data.queries, Inference::Nn));
  return evaluate(preds, data.queries, TaiConfig{}).mae;
}

Outcome dimension_sweep() {
  const auto data = helix(0.05);
  const double s1 = sweep_mae(data, 1);
  const double s13 = sweep_mae(data, 13);
  const double full = sweep_mae(data, std::nullopt);
  const bool ok = s13 <= 1.1 * full && s1 >= s13;
  return {ok, fmt("MAE S=1 %.3f, S=13 %.3f, ambient %.3f", s1, s13, full)};
}

int cli_call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, {out, err});
  if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

// gen -> fit -> predict -> evaluate through the CLI; returns the report text.
std::string pipeline(const oracle::TempDir& dir, const std::string& sigma, const std::string& inference) {
  const auto p = [&](const char* name) { return (dir / name).string(); };
  if (cli_call({"gen-synthetic", "--kind", "helix", "--sigma", sigma, "--seed", "7", "--anchors-out", p("a.jsonl"),
                "--queries-out", p("q.jsonl")}) != 0 ||
      cli_call({"fit", "--anchors", p("a.jsonl"), "--model-out", p("m.json")}) != 0 ||
      cli_call({"predict", "--model", p("m.json"), "--queries", p("q.jsonl"), "--inference", inference, "--out",
                p("pred.jsonl")}) != 0 ||
      cli_call({"evaluate", "--pred", p("pred.jsonl"), "--truth", p("q.jsonl"), "--model", p("m.json"), "--out",
                p("report.json")}) != 0)
    throw std::runtime_error("pipeline step failed");
  return detail::read_file(dir / "report.json");
}

Outcome end_to_end() {
  oracle::TempDir dir("accept_e2e");
  const auto rep = nlohmann::json::parse(pipeline(dir, "0", "interp"));
  const double mae = rep["mae"], t = rep["tai"];
  return {mae <= 1.0 && t >= 0.99, fmt("MAE=%.4g TAI=%.4g", mae, t)};
}

Outcome probing_identity() {
  const auto data = helix(0.0);
  int exact = 0;
  for (Year y = data.anchors.y_min(); y <= data.anchors.y_max(); ++y)
    exact += probe(data.anchors.anchor(y).transpose(), data.anchors).y_pred == y;
  std::mt19937_64 rng(11);
  std::lognormal_distribution<double> scale(0.0, 3.0);
  std::uniform_int_distribution<std::size_t> pick(0, data.queries.size() - 1);
  const auto noisy = helix(0.1);
  int invariant = 0;
  for (int i = 0; i < 100; ++i) {
    const Vector q = noisy.queries[pick(rng)].vec;
    invariant += probe(scale(rng) * q, noisy.anchors).y_pred == probe(q, noisy.anchors).y_pred;
  }
  return {exact == 325 && invariant == 100,
          std::to_string(exact) + "/325 exact, " + std::to_string(invariant) + "/100 scale-invariant"};
}

Outcome determinism() {
  oracle::TempDir a("accept_det_a"), b("accept_det_b");
  const auto ra = pipeline(a, "0.05", "nn");
  const auto rb = pipeline(b, "0.05", "nn");
  return {ra == rb && !ra.empty(), std::to_string(ra.size()) + " report bytes, identical=" + (ra == rb ? "yes" : "no")};
}

}  // namespace

int main() {
  criterion("metric-oracle-equivalence", metric_oracles, 10.0);
  criterion("spearman-fixture", spearman_fixture);
  criterion("tai-examples", tai_examples);
  criterion("decasteljau-vs-bernstein", decasteljau_oracle);
  criterion("chronology-recovery", chronology_recovery, 60.0);
  criterion("dimension-sweep", dimension_sweep);
  criterion("end-to-end-noiseless", end_to_end);
  criterion("probing-identity", probing_identity);
  criterion("determinism", determinism);
  std::printf("%s: %d failing\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
