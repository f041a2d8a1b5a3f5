// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Runs offline against the mock backend and a loopback stub server.
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "e2e_fixture.hpp"
#include "oracles.hpp"
#include "pstar/cost.hpp"
#include "pstar/dfv.hpp"
#include "pstar/evaluation.hpp"
#include "pstar/executor.hpp"
#include "pstar/http_backend.hpp"
#include "pstar/library.hpp"
#include "pstar/mock_backend.hpp"
#include "pstar/pipeline.hpp"
#include "pstar/sampler.hpp"
#include "pstar/search.hpp"
#include "search_fixtures.hpp"
#include "stub_server.hpp"
#include "support.hpp"
#include "synthetic_images.hpp"

using namespace pstar;

namespace {

// Collects failed sub-checks for one criterion.
struct Checker {
  std::vector<std::string> failures;
  std::size_t count = 0;
  void operator()(bool ok, const std::string& what) {
    ++count;
    if (!ok && failures.size() < 5) failures.push_back(what);
    else if (!ok) failures.back() = "...";
  }
  bool ok() const { return failures.empty(); }
};

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

int failed_criteria = 0;

void criterion(const std::string& name, double limit_seconds, const std::function<void(Checker&)>& body) {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_seconds > 0) c(secs < limit_seconds, "runtime " + std::to_string(secs) + " s over the limit");
  const bool ok = c.ok();
  if (!ok) ++failed_criteria;
  std::printf("%s  %-34s %4zu checks  %7.3f s", ok ? "PASS" : "FAIL", name.c_str(), c.count, secs);
  if (limit_seconds > 0) std::printf(" (limit %.0f s)", limit_seconds);
  std::printf("\n");
  for (const auto& f : c.failures) std::printf("      - %s\n", f.c_str());
  std::fflush(stdout);
}

SearchState distinct_state(const std::vector<std::pair<FunctionId, int>>& steps, const CostConfig& cfg) {
  SearchState s;
  int next = 0;
  for (auto [fn, len] : steps) {
    std::string text;
    for (int i = 0; i < len; ++i) text += "t" + std::to_string(next++) + " ";
    s = s.extend(fn, text, cfg);
  }
  return s;
}

struct CountingTrace : TraceSink {
  std::size_t accepted = 0;
  std::string last;
  void emit(const nlohmann::json& e) override {
    if (e["event"] == "judge" && e["correct"] == true) ++accepted;
    last = e["event"];
  }
};

EmbeddingVector random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(dim);
  double norm = 0;
  for (auto& x : v) {
    x = n(rng);
    norm += x * x;
  }
  for (auto& x : v) x /= std::sqrt(norm);
  return {v};
}

LibraryEntry random_entry(std::mt19937_64& rng, const std::string& id, std::size_t dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  LibraryEntry e;
  e.question_id = id;
  e.question = "question " + id;
  FeatureVector z;
  for (auto& x : z) x = n(rng);
  e.dfv.normalized = z;
  e.embedding = random_unit(rng, dim);
  e.path.functions = {FunctionId::RR, FunctionId::OA};
  e.path.source_question_id = id;
  e.path.final_answer = "A";
  return e;
}

std::string openssl_base64(const std::string& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

JudgedResult yn(const char* predicted, const char* reference) {
  JudgedResult r;
  r.format = AnswerFormat::YesNo;
  r.predicted = predicted;
  r.reference = reference;
  r.correct = std::string(predicted) == reference;
  return r;
}

void dfv_suite(Checker& c) {
  TextMetrics m;
  m.asl = 10;
  m.asw = 1.5;
  c(close(flesch_reading_ease(m), 69.785, 1e-9), "FRE(10, 1.5) = 69.785");
  const auto cat = compute_dfv("The cat sat.", nullptr);
  c(close(cat.fre, 119.19, 1e-9), "FRE of 'The cat sat.' = 119.19");
  c(close(cat.clc, 3.0, 1e-9), "CLC of 'The cat sat.' = 3");
  c(cat.edge_density == 0.0 && cat.color_diversity == 0.0, "image-less sentinels");
  c(close(shannon_entropy("a a a a"), 0.0, 1e-9), "entropy of one repeated word = 0");
  c(close(shannon_entropy("a b"), 1.0, 1e-9), "entropy of two words = 1");
  c(close(shannon_entropy("a a b b c c d d"), 2.0, 1e-9), "entropy of four uniform words = 2");

  for (const auto& [name, img] : testing::synthetic_images()) {
    const auto mine = canny(img);
    const auto ref = oracle::canny_edges(img);
    std::size_t diff = 0;
    for (std::size_t i = 0; i < ref.size(); ++i) diff += (mine.mask[i] != 0) != (ref[i] != 0);
    c(mine.mask.size() == ref.size() && static_cast<double>(diff) <= 0.02 * static_cast<double>(ref.size()),
      "canny disagreement on " + name);

    std::set<std::uint32_t> distinct;
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) {
        const auto p = img.at(x, y);
        distinct.insert((p.r << 16) | (p.g << 8) | p.b);
      }
    c(color_diversity(img) ==
          static_cast<double>(distinct.size()) / (static_cast<double>(img.width()) * img.height()),
      "color diversity on " + name);
  }
  c(color_diversity(RgbImage(10, 10, {255, 0, 0})) == 0.01, "single-color 10x10 = 0.01");
}

void normalization(Checker& c) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<FeatureVector> v(1000);
  for (auto& x : v) x = {60 + 20 * n(rng), 4 + n(rng), 12 + 5 * n(rng), 0.05 + 0.01 * n(rng), n(rng) * 3};
  const auto s = fit_normalization(std::span<const FeatureVector>(v));
  std::array<double, kFeatureDims> mean{}, var{};
  std::vector<FeatureVector> z;
  for (const auto& x : v) z.push_back(apply_normalization(x, s));
  for (const auto& x : z)
    for (std::size_t d = 0; d < kFeatureDims; ++d) mean[d] += x[d] / 1000.0;
  for (const auto& x : z)
    for (std::size_t d = 0; d < kFeatureDims; ++d) var[d] += (x[d] - mean[d]) * (x[d] - mean[d]) / 1000.0;
  for (std::size_t d = 0; d < kFeatureDims; ++d) {
    c(std::abs(mean[d]) < 1e-9, "mean of dim " + std::to_string(d));
    c(std::abs(std::sqrt(var[d]) - 1.0) < 1e-9, "std of dim " + std::to_string(d));
  }
  std::vector<FeatureVector> flat(50, FeatureVector{0.1, 0.2, 0.3, 0.4, 0.5});
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i][2] = static_cast<double>(i);
  const auto sf = fit_normalization(std::span<const FeatureVector>(flat));
  for (const auto& x : flat) {
    const auto zx = apply_normalization(x, sf);
    for (std::size_t d : {0, 1, 3, 4}) c(zx[d] == 0.0 && sf.degenerate[d], "degenerate dim maps to 0");
  }
}

void max_min(Checker& c) {
  std::vector<FeatureVector> line;
  for (int i = 0; i < 10; ++i) line.push_back({static_cast<double>(i), 0, 0, 0, 0});
  c(max_min_sample(line, 3).indices == std::vector<std::size_t>{0, 9, 4}, "hand-derived [0, 9, 4]");
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> n_dist(1, 50), k_dist(1, 10);
  std::normal_distribution<double> d(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = n_dist(rng), k = k_dist(rng);
    std::vector<FeatureVector> v(n);
    for (auto& x : v)
      for (auto& e : x) e = trial % 5 == 0 ? std::round(d(rng) * 1.5) : d(rng);
    c(max_min_sample(v, k).indices == oracle::max_min(v, k), "oracle instance " + std::to_string(trial));
  }
}

void cost_model(Checker& c) {
  const CostConfig cfg;
  auto s = distinct_state({{FunctionId::RR, 10}}, cfg);
  c(close(g_cost(s, cfg), 10.0, 1e-12), "g of RR(10) = 10");
  std::string sr;
  for (int i = 0; i < 10; ++i) sr += "t" + std::to_string(i) + " ";
  for (int i = 0; i < 10; ++i) sr += "n" + std::to_string(i) + " ";
  s = s.extend(FunctionId::SR, sr, cfg);
  c(close(g_cost(s, cfg), 82.0, 1e-12), "g after SR(20, u = 0.5) = 82");
  const auto g100 = distinct_state({{FunctionId::RR, 100}}, cfg);
  c(close(h_cost(g100, FunctionId::SA, cfg), 3140.0, 1e-12), "h(SA | G = 100) = 3140");
  c(close(g_cost(s, cfg) + h_cost(g100, FunctionId::SA, cfg), 3222.0, 1e-12), "f = 82 + 3140 = 3222");
  CostConfig wide = cfg;
  wide.token_budgets[index_of(FunctionId::RR)] = 3000;
  const auto big = distinct_state({{FunctionId::RR, 1475}, {FunctionId::RR, 1475}}, wide);
  c(close(h_cost(big, FunctionId::OA, cfg), 160.0, 1e-12), "h(OA | G = 2950) = 160 (clamped)");
  for (int G : {2899, 2900, 2901, 3000}) {
    const auto st = distinct_state({{FunctionId::RR, G}}, wide);
    c(h_cost(st, FunctionId::OA, cfg) == 160.0 + std::max(0.0, 3000.0 - G - 100.0),
      "clamp at G = " + std::to_string(G));
  }

  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> depth(0, 4), fn(0, 8), len(0, 60), word(0, 80);
  for (int trial = 0; trial < 1000; ++trial) {
    SearchState st;
    const int dd = depth(rng);
    for (int k = 0; k < dd; ++k) {
      const auto f = kAllFunctions[static_cast<std::size_t>(fn(rng))];
      std::string text;
      const int n = std::min<int>(len(rng), static_cast<int>(cfg.budget(f)));
      for (int i = 0; i < n; ++i) text += "w" + std::to_string(word(rng)) + " ";
      st = st.extend(f, text, cfg);
    }
    const auto cand = kAllFunctions[static_cast<std::size_t>(fn(rng))];
    c(close(f_cost(st, cand, cfg), g_cost(st, cfg) + h_cost(st, cand, cfg), 1e-12), "f = g + h");
  }

  std::mt19937_64 urng(7);
  std::uniform_int_distribution<int> ulen(0, 12), uword(0, 15), nprior(0, 4);
  for (int trial = 0; trial < 500; ++trial) {
    auto gen = [&] {
      std::vector<std::string> v(static_cast<std::size_t>(ulen(urng)));
      for (auto& t : v) t = "w" + std::to_string(uword(urng));
      return v;
    };
    const auto r = gen();
    std::vector<std::vector<std::string>> ps(static_cast<std::size_t>(nprior(urng)));
    for (auto& p : ps) p = gen();
    c(usefulness(r, ps) == oracle::usefulness(r, ps), "usefulness oracle case " + std::to_string(trial));
  }
}

void astar(Checker& c) {
  for (int i = 0; i < 20; ++i) {
    const auto tag = "scenario " + std::to_string(i) + ": ";
    const auto sc = testing::make_scenario(i);
    MockBackend mock(sc.script);
    CountingTrace trace;
    SearchOptions opts;
    opts.check_frontier = true;
    opts.trace = &trace;
    const auto r = search(testing::search_question(), mock, CostConfig{}, AnswerJudge{}, opts);
    const auto ref = testing::reference_run(sc.script);
    c(r.stats.frontier_checks == r.stats.attempts_total, tag + "(a) frontier minimum not checked on every pop");
    c(r.stats.popped_f == ref.popped_f, tag + "(a) pop order differs from the reference");
    c(r.stats.attempts_per_try.size() <= 3, tag + "(b) more than two retries");
    for (auto a : r.stats.attempts_per_try) c(a <= 100, tag + "(b) more than 100 attempts in a try");
    c(r.stats.max_depth_reached <= 5, tag + "(c) depth above 5");
    for (const auto& call : mock.calls()) c(parse_path(call.key.path).size() <= 5, tag + "(c) deep prompt");
    c(r.solved() == ref.solved, tag + "(d) solved status differs from the reference");
    if (r.solved()) {
      c(format_path(r.path->functions) == sc.goal, tag + "(d) wrong goal path");
      c(mock.calls().back().key.path == sc.goal, tag + "(d) calls continued after the goal");
      c(trace.accepted == 1 && trace.last == "result", tag + "(d) search did not halt at the first correct OA");
    }
  }
}

void retrieval(Checker& c) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> alpha_dist(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    LibraryHeader h;
    h.dim = 8;
    h.stats.means = {1, 2, 3, 4, 5};
    h.stats.stds = {1, 1, 1, 1, 1};
    PseudocodeLibrary lib(h);
    std::vector<std::string> ids;
    std::vector<FeatureVector> dfvs;
    std::vector<std::vector<double>> embs;
    for (int i = 0; i < 100; ++i) {
      char id[16];
      std::snprintf(id, sizeof id, "s%04d", i);
      auto e = random_entry(rng, id, 8);
      ids.push_back(e.question_id);
      dfvs.push_back(*e.dfv.normalized);
      embs.push_back(e.embedding.values);
      lib.add(std::move(e));
    }
    const auto q = random_entry(rng, "query", 8);
    const double alpha = trial % 3 == 0 ? 0.5 : alpha_dist(rng);
    const std::size_t k = trial % 2 ? 1 : 3;
    const auto got = retrieve(*q.dfv.normalized, q.embedding, lib, {alpha, k});
    const auto ref = oracle::retrieve(*q.dfv.normalized, q.embedding.values, ids, dfvs, embs, alpha, k);
    bool same = got.size() == ref.size();
    for (std::size_t i = 0; same && i < got.size(); ++i)
      same = got[i].entry->question_id == ref[i].id && close(got[i].score, ref[i].score, 1e-12);
    c(same, "library " + std::to_string(trial) + " differs from the brute-force scan");

    if (trial % 100 == 0) {
      const auto& self = lib.entries()[static_cast<std::size_t>(trial / 100)];
      const auto top = retrieve(*self.dfv.normalized, self.embedding, lib, {alpha, 1});
      c(close(top[0].score, -(1.0 - alpha) + alpha * 0.0, 1e-12), "self-retrieval score");
      c(top[0].entry->question_id == self.question_id || alpha == 0.0, "self-retrieval entry");
    }
  }
}

void end_to_end(Checker& c) {
  testing::TempDir a, b;
  testing::write_e2e_fixture(a.path());
  testing::write_e2e_fixture(b.path());
  const auto ra = testing::run_e2e_pipeline(a.path());
  c(ra.empty(), "first run: " + ra);
  const auto rb = testing::run_e2e_pipeline(b.path());
  c(rb.empty(), "second run: " + rb);
  if (!ra.empty() || !rb.empty()) return;
  c(read_feature_file(a / "features.jsonl").size() == 10, "10 feature rows");
  c(read_id_list(a / "seeds.txt").size() == 5, "5 seeds");
  c(load_library(a / "library.jsonl").size() >= 4, "at least 4 solved seeds");
  c(read_transcripts(a / "transcripts.jsonl").size() == 5, "5 held-out transcripts");
  c(nlohmann::json::parse(testing::slurp(a / "report.json"))["total"] == 5, "report covers 5 questions");
  for (const auto& f : testing::e2e_outputs())
    c(testing::slurp(a / f) == testing::slurp(b / f), f + " differs between reruns");
}

void fixed_path_and_consistency(Checker& c) {
  std::vector<DatasetRecord> ten;
  for (int i = 0; i < 10; ++i)
    ten.push_back(testing::mcqa("r" + std::to_string(i), "Question " + std::to_string(i) + "?", {"one", "two", "three"},
                                "B"));
  MockBackend mock;
  mock.set_default("Answer: A");
  for (int i = 0; i < 6; ++i) mock.set("r" + std::to_string(i) + "|SA() RR() RR() OA()", "Answer: B");
  const auto fp = run_fixed_path_eval(ten, parse_path("SA() RR() RR()"), mock);
  c(fp.correct == 6 && fp.accuracy == 0.6, "fixed path accuracy 6/10");

  std::vector<DatasetRecord> five;
  for (int i = 0; i < 5; ++i) five.push_back(testing::mcqa("c" + std::to_string(i), "Q?", {"x", "y", "z"}, "A"));
  MockBackend cm;
  cm.set_default("Thinking.");
  const std::vector<std::pair<const char*, const char*>> answers = {
      {"A", "A"}, {"A", "A"}, {"A", "B"}, {"C", "A"}, {"B", "C"}};
  for (std::size_t i = 0; i < answers.size(); ++i) {
    const auto id = "c" + std::to_string(i);
    cm.set(id + "|RR() OA()", std::string("Answer: ") + answers[i].first);
    cm.set(id + "|RR() OA() SR() RR() OA()", std::string("Answer: ") + answers[i].second);
  }
  const auto rep = run_consistency(five, cm);
  const std::array<double, 4> expected = {0.4, 0.2, 0.2, 0.2};
  double sum = 0;
  for (auto t : {Transition::CorrectCorrect, Transition::CorrectWrong, Transition::WrongCorrect,
                 Transition::WrongWrong}) {
    c(rep.ratio(t) == expected[static_cast<std::size_t>(t)], std::string("ratio ") + std::string(to_string(t)));
    sum += rep.ratio(t);
  }
  c(std::abs(sum - 1.0) < 1e-12, "four transition classes sum to 100%");
}

void http_conformance(Checker& c) {
  testing::TempDir dir;
  std::mt19937_64 rng(1);
  save_png(testing::random_image(rng, 9, 7), dir / "fig.png");
  const std::string reply = "The answer is (B).\n  Done ";
  testing::StubServer server([&](std::size_t) { return std::pair{200, testing::StubServer::completion(reply)}; });
  HttpEndpoint ep;
  ep.url = server.url();
  ep.model = "stub-vlm";
  HttpChatBackend backend(ep, true, [](std::string_view) {});
  const auto g = backend.generate({ChatTurn{Role::User, "Describe.", dir / "fig.png"}},
                                  GenerationParams::build_defaults(), {"q", "RR()"});
  c(g.text == reply, "response text altered");
  backend.generate({ChatTurn{Role::User, "Again", std::nullopt}}, GenerationParams::eval_defaults(), {"q", "RR()"});
  const auto bodies = server.bodies();
  if (bodies.size() != 2) {
    c(false, "expected 2 requests, saw " + std::to_string(bodies.size()));
    return;
  }
  const auto b0 = nlohmann::json::parse(bodies[0]);
  c(bodies[0].find("\"repetition_penalty\":1.05") != std::string::npos, "repetition_penalty 1.05");
  c(bodies[0].find("\"temperature\":1.0") != std::string::npos, "build temperature 1.0");
  c(bodies[0].find("\"top_p\":0.9") != std::string::npos, "top_p 0.9");
  c(bodies[1].find("\"temperature\":0.5") != std::string::npos, "eval temperature 0.5");
  const auto& content = b0["messages"][0]["content"];
  c(content.is_array() && content.size() == 2 &&
        content[1]["image_url"]["url"] == "data:image/png;base64," + openssl_base64(testing::slurp(dir / "fig.png")),
    "image sent as base64 data URL");
}

void metrics(Checker& c) {
  std::vector<JudgedResult> rs;
  for (int i = 0; i < 2; ++i) rs.push_back(yn("yes", "yes"));
  rs.push_back(yn("yes", "no"));
  rs.push_back(yn("no", "yes"));
  for (int i = 0; i < 6; ++i) rs.push_back(yn("no", "no"));
  const auto m = yes_no_metrics(rs);
  c(m.accuracy == 0.8, "accuracy 0.8");
  c(m.precision && *m.precision == 2.0 / 3.0, "precision 2/3");
  c(m.recall && *m.recall == 2.0 / 3.0, "recall tp/(tp+fn) = 2/3");
  rs.push_back(yn("no", "yes"));
  c(*yes_no_metrics(rs).recall == 0.5, "recall with two misses = 0.5");

  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> per(1, 6), groups(1, 10);
  std::bernoulli_distribution ok(0.7);
  for (int trial = 0; trial < 100; ++trial) {
    const int g = groups(rng), n = per(rng);
    std::vector<JudgedResult> v;
    for (int k = 0; k < g; ++k)
      for (int i = 0; i < n; ++i) {
        JudgedResult r;
        r.figure_id = "f" + std::to_string(k);
        r.correct = ok(rng);
        v.push_back(r);
      }
    std::shuffle(v.begin(), v.end(), rng);
    c(grouped_accuracy(v, GroupKey::Figure) <= accuracy(v), "grouped > plain on grouping " + std::to_string(trial));
  }
}

}  // namespace

int main() {
  criterion("dfv metric suite", 5, dfv_suite);
  criterion("normalization", 0, normalization);
  criterion("max-min sampling", 0, max_min);
  criterion("cost model", 0, cost_model);
  criterion("a* search (20 scenarios)", 10, astar);
  criterion("retrieval (1000 libraries)", 0, retrieval);
  criterion("end-to-end mock pipeline", 30, end_to_end);
  criterion("fixed-path and consistency", 0, fixed_path_and_consistency);
  criterion("http backend conformance", 0, http_conformance);
  criterion("metrics", 0, metrics);
  std::printf("%d of 10 criteria failed\n", failed_criteria);
  return failed_criteria == 0 ? 0 : 1;
}
