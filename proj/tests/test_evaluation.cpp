#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "pstar/error.hpp"
#include "pstar/evaluation.hpp"
#include "pstar/judge.hpp"
#include "support.hpp"

using namespace pstar;

namespace {

JudgedResult yn(const char* predicted, const char* reference) {
  JudgedResult r;
  r.format = AnswerFormat::YesNo;
  r.predicted = predicted;
  r.reference = reference;
  r.correct = std::string(predicted) == reference;
  return r;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Usage;
}

}  // namespace

TEST_CASE("confusion-matrix fixture") {
  std::vector<JudgedResult> rs;
  for (int i = 0; i < 2; ++i) rs.push_back(yn("yes", "yes"));
  rs.push_back(yn("yes", "no"));
  rs.push_back(yn("no", "yes"));
  for (int i = 0; i < 6; ++i) rs.push_back(yn("no", "no"));
  const auto m = yes_no_metrics(rs);
  CHECK(m.tp == 2);
  CHECK(m.fp == 1);
  CHECK(m.fn == 1);
  CHECK(m.tn == 6);
  CHECK(m.accuracy == 0.8);
  CHECK(accuracy(rs) == 0.8);
  REQUIRE(m.precision);
  CHECK(*m.precision == 2.0 / 3.0);
  // tp / (tp + fn)
  REQUIRE(m.recall);
  CHECK(*m.recall == 2.0 / 3.0);

  // Two missed positives instead of one: recall 0.5.
  rs.push_back(yn("no", "yes"));
  CHECK(*yes_no_metrics(rs).recall == 0.5);
}

TEST_CASE("degenerate metric cases") {
  std::vector<JudgedResult> all = {yn("yes", "yes"), yn("no", "no")};
  const auto m = yes_no_metrics(all);
  CHECK(m.accuracy == 1.0);
  CHECK(*m.precision == 1.0);
  CHECK(*m.recall == 1.0);

  std::vector<JudgedResult> none_yes = {yn("no", "yes"), yn("no", "no")};
  const auto n = yes_no_metrics(none_yes);
  CHECK_FALSE(n.precision);
  REQUIRE(n.recall);
  CHECK(*n.recall == 0.0);

  CHECK(kind_of([] { accuracy(std::vector<JudgedResult>{}); }) == ErrorKind::EmptyResults);
  JudgedResult other;
  other.format = AnswerFormat::Mcqa;
  CHECK(kind_of([&] { yes_no_metrics(std::vector<JudgedResult>{other}); }) == ErrorKind::FormatMismatch);
}

TEST_CASE("grouped accuracy") {
  auto res = [](const char* fig, bool ok) {
    JudgedResult r;
    r.figure_id = fig;
    r.question_group_id = fig;
    r.correct = ok;
    return r;
  };
  std::vector<JudgedResult> rs = {res("A", true), res("A", true), res("B", true), res("B", false)};
  CHECK(grouped_accuracy(rs, GroupKey::Figure) == 0.5);
  std::vector<JudgedResult> one = {res("A", true), res("A", false)};
  CHECK(grouped_accuracy(one, GroupKey::Figure) == 0.0);
  std::vector<JudgedResult> singles = {res("A", true), res("B", false), res("C", true), res("D", true)};
  CHECK(grouped_accuracy(singles, GroupKey::Question) == accuracy(singles));
  rs.push_back(JudgedResult{});
  CHECK(kind_of([&] { grouped_accuracy(rs, GroupKey::Figure); }) == ErrorKind::MissingGroupKey);

  // Unequal group sizes can push grouped accuracy above plain accuracy.
  std::vector<JudgedResult> skewed;
  for (int i = 0; i < 10; ++i) skewed.push_back(res("big", false));
  for (const char* f : {"s1", "s2", "s3"}) skewed.push_back(res(f, true));
  CHECK(grouped_accuracy(skewed, GroupKey::Figure) == 0.75);
  CHECK(accuracy(skewed) == 3.0 / 13.0);

  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> per(1, 6), groups(1, 10), size(1, 40);
  std::bernoulli_distribution ok(0.7);
  for (int trial = 0; trial < 100; ++trial) {
    // Every group the same size.
    const int g = groups(rng), m = per(rng);
    std::vector<JudgedResult> v;
    for (int k = 0; k < g; ++k)
      for (int i = 0; i < m; ++i) v.push_back(res(("f" + std::to_string(k)).c_str(), ok(rng)));
    std::shuffle(v.begin(), v.end(), rng);
    CHECK(grouped_accuracy(v, GroupKey::Figure) <= accuracy(v));

    // Arbitrary sizes: the size-weighted share of all-correct groups never
    // exceeds plain accuracy.
    std::vector<JudgedResult> w(static_cast<std::size_t>(size(rng)));
    std::uniform_int_distribution<int> pick(0, g - 1);
    for (auto& r : w) r = res(("f" + std::to_string(pick(rng))).c_str(), ok(rng));
    std::map<std::string, std::pair<std::size_t, bool>> by;
    for (const auto& r : w) {
      auto& [n, all] = by.try_emplace(*r.figure_id, 0, true).first->second;
      ++n;
      all = all && r.correct;
    }
    std::size_t covered = 0;
    for (const auto& [id, st] : by)
      if (st.second) covered += st.first;
    CHECK(static_cast<double>(covered) / static_cast<double>(w.size()) <= accuracy(w));
  }
}

TEST_CASE("strict match") {
  CHECK(strict_match("  New York.", "new york"));
  CHECK_FALSE(strict_match("NYC", "new york"));
  CHECK(strict_match("", ""));
  std::mt19937_64 rng(4);
  const std::vector<std::string> base = {"new york", "the eiffel tower", "42 apples", "blue whale"};
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> spaces(0, 3);
  for (int i = 0; i < 200; ++i) {
    const auto& s = base[static_cast<std::size_t>(i) % base.size()];
    std::string p(static_cast<std::size_t>(spaces(rng)), ' ');
    for (char c : s) {
      if (c == ' ') {
        p += std::string(static_cast<std::size_t>(1 + spaces(rng)), coin(rng) ? ' ' : '\t');
      } else {
        p += coin(rng) ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
      }
    }
    p += std::string(static_cast<std::size_t>(spaces(rng)), ' ');
    if (coin(rng)) p += ".";
    CHECK(strict_match(p, s));
    CHECK(strict_match(s, p));
    CHECK(strict_match(p, p));
  }
}

TEST_CASE("answer extraction") {
  auto q = testing::mcqa("q", "?", {"a", "b", "c", "d"}, "C");
  CHECK(extract_answer("Answer: C", q) == "C");
  CHECK(extract_answer("I think the answer is B.", q) == "B");
  CHECK(extract_answer("(D) is right", q) == "D");
  CHECK(extract_answer("Everything is fine", q) == std::nullopt);
  CHECK(extract_answer("E", q) == std::nullopt);
  CHECK(normalize_reference("c", q) == "C");
  CHECK(normalize_reference("b", q) == "B");
  q.answer = "c";
  CHECK(AnswerJudge{}.judge("Answer: C", q).correct);

  DatasetRecord yesno;
  yesno.format = AnswerFormat::YesNo;
  yesno.answer = "Yes";
  CHECK(extract_answer("No, there is no dog.", yesno) == "no");
  CHECK(AnswerJudge{}.judge("Yes. A dog is visible.", yesno).correct);

  DatasetRecord num;
  num.format = AnswerFormat::Numeric;
  num.answer = "1,250";
  CHECK(extract_answer("Step 1 gives 3, so the answer is 1,250.", num) == "1250");
  CHECK(AnswerJudge{}.judge("The answer is 1250.04", num).correct);
  CHECK_FALSE(AnswerJudge{}.judge("The answer is 1251", num).correct);
  num.answer = "0";
  CHECK(AnswerJudge{}.judge("Answer: 0", num).correct);

  DatasetRecord open;
  open.format = AnswerFormat::Open;
  open.answer = "New York";
  CHECK(AnswerJudge{}.judge("Reasoning...\nAnswer: new york.\nThanks", open).correct);
  CHECK_FALSE(AnswerJudge{}.judge("Answer: NYC", open).correct);
}

TEST_CASE("judge_prediction and summary") {
  std::vector<DatasetRecord> recs;
  for (int i = 0; i < 4; ++i) {
    DatasetRecord r;
    r.id = "y" + std::to_string(i);
    r.format = AnswerFormat::YesNo;
    r.answer = i % 2 ? "no" : "yes";
    r.figure_id = "f" + std::to_string(i / 2);
    recs.push_back(r);
  }
  std::vector<JudgedResult> rs;
  rs.push_back(judge_prediction(recs[0], std::string("yes")));
  rs.push_back(judge_prediction(recs[1], std::string("no")));
  rs.push_back(judge_prediction(recs[2], std::string("no")));
  rs.push_back(judge_prediction(recs[3], std::nullopt));
  CHECK(rs[0].correct);
  CHECK(rs[1].correct);
  CHECK_FALSE(rs[2].correct);
  CHECK_FALSE(rs[3].correct);
  const auto rep = summarize(rs);
  CHECK(rep.aacc == 0.5);
  REQUIRE(rep.facc);
  CHECK(*rep.facc == 0.5);
  CHECK_FALSE(rep.qacc);
  REQUIRE(rep.yes_no);
  CHECK(rep.yes_no->tp == 1);
  const auto j = to_json(rep);
  CHECK(j["aAcc"] == 0.5);
  CHECK(j["fAcc"] == 0.5);
  CHECK(j["qAcc"].is_null());
  const auto table = format_table(rep);
  CHECK(table.find("50.00") != std::string::npos);
  CHECK(table.find("fAcc") != std::string::npos);
}
