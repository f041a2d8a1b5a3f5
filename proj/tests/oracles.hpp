#pragma once
// Independent reference implementations the tests compare against. They share
// no code with the library beyond plain data types.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <opencv2/imgproc.hpp>

#include "pstar/dfv.hpp"
#include "pstar/image.hpp"

namespace oracle {

// OpenCV pipeline with the pinned parameters: luma, 5x5 Gaussian sigma 1.4,
// Sobel L2 magnitude, thresholds 50/150.
inline std::vector<std::uint8_t> canny_edges(const pstar::RgbImage& img) {
  cv::Mat rgb(img.height(), img.width(), CV_8UC3, const_cast<std::uint8_t*>(img.bytes().data()));
  cv::Mat gray, blurred, edges;
  cv::cvtColor(rgb, gray, cv::COLOR_RGB2GRAY);
  cv::GaussianBlur(gray, blurred, cv::Size(5, 5), 1.4, 1.4, cv::BORDER_REPLICATE);
  cv::Canny(blurred, edges, 50.0, 150.0, 3, true);
  std::vector<std::uint8_t> out(img.pixel_count());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out[static_cast<std::size_t>(y) * img.width() + x] = edges.at<uchar>(y, x) ? 1 : 0;
  return out;
}

inline double dist(const pstar::FeatureVector& a, const pstar::FeatureVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Greedy farthest-point selection recomputed from scratch at every step.
inline std::vector<std::size_t> max_min(const std::vector<pstar::FeatureVector>& v, std::size_t k) {
  const std::size_t n = v.size();
  pstar::FeatureVector c{};
  for (const auto& x : v)
    for (std::size_t d = 0; d < c.size(); ++d) c[d] += x[d];
  for (auto& x : c) x /= static_cast<double>(n);
  std::vector<std::size_t> picks;
  std::size_t first = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (dist(v[i], c) > dist(v[first], c)) first = i;
  picks.push_back(first);
  while (picks.size() < std::min(k, n)) {
    std::size_t best = n;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::find(picks.begin(), picks.end(), i) != picks.end()) continue;
      double m = std::numeric_limits<double>::infinity();
      for (auto p : picks) m = std::min(m, dist(v[i], v[p]));
      if (m > best_d) {
        best_d = m;
        best = i;
      }
    }
    picks.push_back(best);
  }
  return picks;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

struct ScoredId {
  std::string id;
  double score;
};

// Full scan, stable order by (score, id).
inline std::vector<ScoredId> retrieve(const pstar::FeatureVector& q, const std::vector<double>& qe,
                                      const std::vector<std::string>& ids,
                                      const std::vector<pstar::FeatureVector>& dfvs,
                                      const std::vector<std::vector<double>>& embs, double alpha, std::size_t k) {
  std::vector<ScoredId> all;
  for (std::size_t i = 0; i < ids.size(); ++i)
    all.push_back({ids[i], alpha * dist(q, dfvs[i]) - (1.0 - alpha) * cosine(qe, embs[i])});
  std::stable_sort(all.begin(), all.end(), [](const ScoredId& a, const ScoredId& b) {
    return a.score < b.score || (a.score == b.score && a.id < b.id);
  });
  all.resize(std::min(k, all.size()));
  return all;
}

inline std::vector<std::string> cost_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    std::size_t b = 0, e = cur.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(cur[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(cur[e - 1]))) --e;
    if (e > b) {
      std::string t = cur.substr(b, e - b);
      for (auto& ch : t) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      out.push_back(t);
    }
    cur.clear();
  };
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) flush();
    else cur += ch;
  }
  flush();
  return out;
}

inline double usefulness(const std::vector<std::string>& r, const std::vector<std::vector<std::string>>& priors,
                         double eps = 1e-3) {
  if (r.empty()) return eps;
  if (priors.empty()) return 1.0;
  std::set<std::string> seen;
  for (const auto& p : priors) seen.insert(p.begin(), p.end());
  const auto novel = std::count_if(r.begin(), r.end(), [&](const std::string& t) { return !seen.count(t); });
  return std::max(eps, static_cast<double>(novel) / static_cast<double>(r.size()));
}

// Reference A*: linear-scan frontier of (prefix, next) pairs, costs recomputed
// from the stored responses of each prefix.
struct AStarOutcome {
  bool solved = false;
  std::vector<std::string> path;  // function names
  std::size_t attempts = 0;
  std::vector<std::size_t> attempts_per_try;
  std::vector<double> popped_f;
};

struct AStarSpec {
  double M = 3000.0;
  std::map<std::string, double> lambda = {{"VA", 1.6}, {"SA", 1.6}, {"RR", 1.0}, {"SR", 1.8}, {"NA", 1.6},
                                          {"SP", 1.6}, {"KI", 1.6}, {"OA", 1.6}, {"ER", 1.8}};
  std::map<std::string, double> budget = {{"VA", 400}, {"SA", 400}, {"RR", 400}, {"SR", 400}, {"NA", 400},
                                          {"SP", 400}, {"KI", 400}, {"OA", 100}, {"ER", 400}};
  std::size_t max_attempts = 100, max_depth = 5, retries = 2;
};

inline AStarOutcome astar(const AStarSpec& spec, const std::function<std::string(const std::string& prefix)>& respond,
                          const std::function<bool(const std::string& oa_text)>& correct) {
  static const std::vector<std::string> kNames = {"VA", "SA", "RR", "SR", "NA", "SP", "KI", "OA", "ER"};
  struct Node {
    std::vector<std::string> fns;
    std::vector<std::vector<std::string>> toks;
  };
  struct Item {
    double f;
    std::size_t seq;
    std::size_t node;
    std::string next;
  };
  const auto g_of = [&](const Node& n) {
    double g = 0;
    for (std::size_t i = 0; i < n.fns.size(); ++i) {
      std::vector<std::vector<std::string>> pri(n.toks.begin(), n.toks.begin() + static_cast<long>(i));
      g += spec.lambda.at(n.fns[i]) * static_cast<double>(n.toks[i].size()) / usefulness(n.toks[i], pri);
    }
    return g;
  };
  const auto G_of = [](const Node& n) {
    double G = 0;
    for (const auto& t : n.toks) G += static_cast<double>(t.size());
    return G;
  };
  const auto join = [](const std::vector<std::string>& fns) {
    std::string s;
    for (const auto& f : fns) s += (s.empty() ? "" : " ") + f + "()";
    return s;
  };

  AStarOutcome out;
  for (std::size_t t = 0; t <= spec.retries; ++t) {
    std::vector<Node> nodes{Node{}};
    std::vector<Item> frontier;
    std::size_t seq = 0;
    const auto expand = [&](std::size_t id) {
      const double g = g_of(nodes[id]);
      const double G = G_of(nodes[id]);
      for (const auto& a : kNames) {
        const double B = spec.budget.at(a);
        frontier.push_back({g + (spec.lambda.at(a) * B + std::max(0.0, spec.M - G - B)), seq++, id, a});
      }
    };
    expand(0);
    std::size_t attempts = 0;
    bool done = false;
    while (!frontier.empty() && attempts < spec.max_attempts) {
      auto it = std::min_element(frontier.begin(), frontier.end(), [](const Item& a, const Item& b) {
        return a.f < b.f || (a.f == b.f && a.seq < b.seq);
      });
      Item item = *it;
      frontier.erase(it);
      out.popped_f.push_back(item.f);
      Node child = nodes[item.node];
      child.fns.push_back(item.next);
      const std::string text = respond(join(child.fns));
      child.toks.push_back(cost_tokens(text));
      ++attempts;
      ++out.attempts;
      if (item.next == "OA" && correct(text)) {
        out.solved = true;
        out.path = child.fns;
        done = true;
        break;
      }
      if (child.fns.size() < spec.max_depth) {
        nodes.push_back(child);
        expand(nodes.size() - 1);
      }
    }
    out.attempts_per_try.push_back(attempts);
    if (done) break;
  }
  return out;
}

}  // namespace oracle
