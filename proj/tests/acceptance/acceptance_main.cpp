// Acceptance suite: one [PASS]/[FAIL] line per criterion, exit status 0 only
// when every criterion passes. All tolerances are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "hashrec/hashrec.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace {

using namespace hashrec;
using Clock = std::chrono::steady_clock;

constexpr double kScoreRelTol = 1e-12;        // criterion 1
constexpr double kWorkedMatchTol = 1e-3;      // criterion 3
constexpr double kMinGoldenAccuracy = 0.90;   // criterion 4
constexpr double kMaxGoldenSeconds = 5.0;     // criterion 4
constexpr std::size_t kMinGoldenItems = 100;  // criterion 4
constexpr int kMatcherTrials = 1000;          // criteria 5, 6
constexpr double kLinTol = 1e-12;             // criterion 7
constexpr int kRandomDags = 50;               // criterion 7
constexpr int kRandomMatrices = 50;           // criterion 8
constexpr double kCostTol = 1e-6;             // criterion 8
constexpr double kMinPurity = 0.8;            // criterion 9
constexpr double kMaxPipelineSeconds = 300.0;  // criterion 9

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail.clear();
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

Outcome worked_segmentation() {
  Outcome o;
  const auto lex = testing::festival_lexicon();
  const auto bm = testing::festival_bigrams();
  const auto r = segment("#worldwidefestival", lex, bm);
  o.require(r.tokens == std::vector<std::string>{"worldwide", "festival"}, "wrong segmentation");
  const std::vector<std::string> one = {"worldwide", "festival"};
  const std::vector<std::string> two = {"world", "wide", "festival"};
  const double p1 = std::exp(score_segmentation(one, bm));
  const double p2 = std::exp(score_segmentation(two, bm));
  o.require(rel_err(p1, 0.0022) <= kScoreRelTol, fmt::format("exp(score1)={:.12g}, want 0.0022", p1));
  o.require(rel_err(p2, 0.00049) <= kScoreRelTol,
            fmt::format("exp(score2)={:.12g}, want 0.00049 (rel err {:.2e}); 0.05 x 0.0099 = 0.000495", p2,
                        rel_err(p2, 0.00049)));
  if (o.pass) o.detail = fmt::format("[worldwide festival], exp(score1)={:.12g}, exp(score2)={:.12g}", p1, p2);
  return o;
}

Outcome single_word_rule() {
  Outcome o;
  const auto lex = testing::festival_lexicon();
  std::vector<BigramModel> models;
  models.push_back(testing::festival_bigrams());
  BigramModel split_only;
  split_only.add("world", "wide", 1);
  models.push_back(std::move(split_only));
  BigramModel none(0.0);
  none.add("x", "y", 1);
  models.push_back(std::move(none));
  for (const auto& bm : models) {
    const auto r = segment("#worldwide", lex, bm);
    o.require(r.tokens == std::vector<std::string>{"worldwide"} && r.status == SegmentStatus::exact_word,
              "got " + text::join(r.tokens, " ") + " / " + std::string(to_string(r.status)));
  }
  if (o.pass) o.detail = "[worldwide] exact_word under 3 bigram models";
  return o;
}

Outcome worked_matching() {
  Outcome o;
  const std::vector<std::string> p1 = {"information", "office"};
  const std::vector<std::string> p2 = {"salary", "work", "company"};
  const double s = sim_profiles(p1, p2, testing::worked_example_table());
  o.require(std::abs(s - 0.584) <= kWorkedMatchTol, fmt::format("sim={:.6f}", s));
  if (o.pass) o.detail = fmt::format("sim_profiles={:.6f}", s);
  return o;
}

Outcome segmentation_accuracy() {
  Outcome o;
  const auto start = Clock::now();
  const auto lex = load_lexicon(HASHREC_DATA_DIR "/lexicon.txt").lexicon;
  const auto bm = load_bigrams(HASHREC_DATA_DIR "/bigrams.tsv");
  const auto golden = load_golden(HASHREC_DATA_DIR "/golden_hashtags.tsv");
  const auto report = evaluate_segmenter(golden, lex, bm);
  const double elapsed = seconds_since(start);

  std::set<std::size_t> lengths;
  std::set<std::string> tags;
  for (const auto& g : golden) {
    lengths.insert(g.expected.size());
    tags.insert(text::to_lower_ascii(g.hashtag));
  }
  o.require(golden.size() >= kMinGoldenItems, fmt::format("only {} golden items", golden.size()));
  o.require(lengths.count(1) && lengths.count(2) && lengths.count(3), "golden set lacks 1/2/3-word forms");
  for (const char* t : {"#throwbackthursday", "#dependentrelationship", "#airportend"})
    o.require(tags.count(t) == 1, std::string("golden set lacks ") + t);
  o.require(report.success_rate >= kMinGoldenAccuracy, fmt::format("accuracy {:.4f}", report.success_rate));
  o.require(elapsed < kMaxGoldenSeconds, fmt::format("took {:.2f}s", elapsed));
  if (o.pass)
    o.detail = fmt::format("{}/{} = {:.4f} in {:.2f}s", report.correct, report.total, report.success_rate, elapsed);
  return o;
}

Outcome greedy_oracle() {
  Outcome o;
  std::mt19937_64 rng(1001);
  int mismatches = 0;
  for (int t = 0; t < kMatcherTrials; ++t) {
    const auto sw = testing::RandomWordSim::make(8, rng);
    const auto a = testing::random_words(8, 4, rng);
    const auto b = testing::random_words(8, 4, rng);
    // sim_profiles puts the lexicographically smaller word list on the row side.
    const bool a_rows = !std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
    const auto& rows = a_rows ? a : b;
    const auto& cols = a_rows ? b : a;
    const auto oracle = testing::brute_force_greedy(testing::materialize(rows, cols, sw));
    const auto direct = match_words(rows, cols, sw);
    const bool ok = sim_profiles(a, b, sw) == oracle.similarity() && direct.sum == oracle.sum &&
                    direct.counter == oracle.counter && direct.counter == std::min(a.size(), b.size());
    if (!ok) ++mismatches;
  }
  o.require(mismatches == 0, fmt::format("{} of {} trials differ", mismatches, kMatcherTrials));
  if (o.pass) o.detail = fmt::format("{} trials equal the oracle, Counter = min(n, m)", kMatcherTrials);
  return o;
}

Outcome matcher_symmetry() {
  Outcome o;
  std::mt19937_64 rng(1002);
  int bad = 0;
  for (int t = 0; t < kMatcherTrials; ++t) {
    const auto sw = testing::RandomWordSim::make(10, rng);
    const auto a = testing::random_words(10, 6, rng);
    const auto b = testing::random_words(10, 6, rng);
    const double ab = sim_profiles(a, b, sw);
    const double ba = sim_profiles(b, a, sw);
    if (ab != ba || !(ab >= 0.0 && ab <= 1.0)) ++bad;
  }
  o.require(bad == 0, fmt::format("{} of {} trials asymmetric or out of range", bad, kMatcherTrials));
  if (o.pass) o.detail = fmt::format("{} trials bit-exact symmetric, in [0,1]", kMatcherTrials);
  return o;
}

Outcome taxonomy_correctness() {
  Outcome o;
  const auto t = testing::toy_taxonomy(16, 0, 8, 8);
  const double lin = t.lin("dog", "cat");
  o.require(std::abs(lin - 0.5) <= kLinTol, fmt::format("lin(dog,cat)={:.17g}", lin));
  o.require(t.ic("root") == 0.0, fmt::format("ic(root)={}", t.ic("root")));
  std::mt19937_64 rng(1007);
  int bad = 0;
  for (int trial = 0; trial < kRandomDags; ++trial) {
    const auto d = testing::random_dag(rng, 20);
    const auto tax = Taxonomy::build(d.synsets, d.edges, d.counts);
    const auto expected = testing::brute_force_propagation(d.synsets.size(), d.index_edges, d.own);
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (tax.frequency(static_cast<Taxonomy::Index>(i)) != expected[i]) {
        ++bad;
        break;
      }
    }
  }
  o.require(bad == 0, fmt::format("{} of {} DAGs disagree with the oracle", bad, kRandomDags));
  if (o.pass) o.detail = fmt::format("lin(dog,cat)={:.15f}, ic(root)=0, {} DAGs match", lin, kRandomDags);
  return o;
}

Outcome kmedoids_properties() {
  Outcome o;
  std::mt19937_64 rng(1008);
  int below = 0, missed = 0, trace = 0, irreproducible = 0;
  for (int trial = 0; trial < kRandomMatrices; ++trial) {
    const std::size_t n = 2 + rng() % 7;
    const std::size_t k = 1 + rng() % std::min<std::size_t>(3, n);
    const auto m = testing::random_matrix(n, rng);
    const double optimum = testing::brute_force_kmedoids_cost(m, k);
    bool hit = false;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const KMedoidsOptions opts{k, seed, 100};
      const auto c = k_medoids(m, opts);
      const auto again = k_medoids(m, opts);
      if (c.cost < optimum - kCostTol) ++below;
      hit = hit || std::abs(c.cost - optimum) <= kCostTol;
      if (!std::is_sorted(c.cost_trace.rbegin(), c.cost_trace.rend())) ++trace;
      if (c.medoids != again.medoids || c.assignment != again.assignment || c.cost_trace != again.cost_trace) {
        ++irreproducible;
      }
    }
    if (!hit) ++missed;
  }
  o.require(below == 0, fmt::format("{} runs below the optimum", below));
  o.require(missed == 0, fmt::format("{} matrices never reach the optimum in 10 seeds", missed));
  o.require(trace == 0, fmt::format("{} runs with increasing cost", trace));
  o.require(irreproducible == 0, fmt::format("{} runs not reproducible", irreproducible));

  const auto blobs = testing::two_blob_matrix();
  int blob_failures = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto c = k_medoids(blobs, {2, seed, 100});
    const auto& a = c.assignment;
    const bool ok = a[0] == a[1] && a[1] == a[2] && a[3] == a[4] && a[4] == a[5] && a[0] != a[3];
    if (!ok) ++blob_failures;
  }
  o.require(blob_failures == 0, fmt::format("two-blob missed for {} of 100 seeds", blob_failures));
  if (o.pass) o.detail = fmt::format("{} matrices x 10 seeds, two-blob recovered for 100 seeds", kRandomMatrices);
  return o;
}

Outcome desk_scale_pipeline() {
  Outcome o;
  testing::TempDir dir;
  testing::SyntheticOptions so;  // 5 pools x 100 users
  const auto corpus = testing::make_synthetic_corpus(dir / "in", so);

  PipelineConfig cfg;
  cfg.lexicon = corpus.lexicon;
  cfg.bigrams = corpus.bigrams;
  cfg.synsets = corpus.synsets;
  cfg.edges = corpus.edges;
  cfg.counts = corpus.counts;
  cfg.users = corpus.users;
  cfg.out_dir = dir / "out";
  cfg.k = 5;
  cfg.workers = 4;
  cfg.top_k = 10;

  const auto start = Clock::now();
  const auto reports = run_all(cfg);
  const double elapsed = seconds_since(start);

  const auto clustering = load_clusters(cfg.clusters_path());
  std::vector<int> labels;
  for (const auto& id : clustering.ids) labels.push_back(corpus.label.at(id));
  const double purity = testing::purity(clustering.assignment, labels);
  o.require(clustering.ids.size() == so.pools * so.users_per_pool, "wrong profile count");
  o.require(reports.size() == 4, "expected 4 stage reports");
  o.require(purity >= kMinPurity, fmt::format("purity {:.4f}", purity));
  o.require(elapsed < kMaxPipelineSeconds, fmt::format("took {:.1f}s", elapsed));
  if (o.pass) o.detail = fmt::format("{} profiles, purity {:.4f}, run-all {:.2f}s", clustering.ids.size(), purity, elapsed);
  return o;
}

Outcome recommendation_contract() {
  Outcome o;
  const auto m = testing::two_blob_matrix();
  const auto half = testing::two_blob_matrix(0.5);
  int crossed = 0, unsorted = 0, reordered = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto clustering = k_medoids(m, {2, seed, 100});
    const ClusterIndex index(clustering);
    for (const auto& target : m.ids()) {
      const auto r = recommend(target, index, m, 5);
      const auto s = recommend(target, index, half, 5);
      for (std::size_t i = 0; i < r.ranked.size(); ++i) {
        if (r.ranked[i].id[0] != target[0]) ++crossed;
        if (i && r.ranked[i].similarity > r.ranked[i - 1].similarity) ++unsorted;
      }
      std::vector<std::string> a, b;
      for (const auto& c : r.ranked) a.push_back(c.id);
      for (const auto& c : s.ranked) b.push_back(c.id);
      if (a != b) ++reordered;
    }
  }
  o.require(crossed == 0, fmt::format("{} recommendations cross blobs", crossed));
  o.require(unsorted == 0, fmt::format("{} unsorted lists", unsorted));
  o.require(reordered == 0, fmt::format("{} lists reordered by scaling", reordered));
  if (o.pass) o.detail = "in-blob, non-increasing, order unchanged at 0.5x, 20 seeds x 6 targets";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"worked segmentation example", worked_segmentation},
      {"single-word rule", single_word_rule},
      {"worked matching example", worked_matching},
      {"segmentation accuracy on golden set", segmentation_accuracy},
      {"greedy-oracle equivalence", greedy_oracle},
      {"matcher symmetry and range", matcher_symmetry},
      {"taxonomy correctness", taxonomy_correctness},
      {"k-medoids properties", kmedoids_properties},
      {"desk-scale pipeline", desk_scale_pipeline},
      {"recommendation contract", recommendation_contract},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::cout << fmt::format("[{}] {:>2}. {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail);
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
