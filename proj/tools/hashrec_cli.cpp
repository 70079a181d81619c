// hashrec: hashtag-based friend recommendation pipeline.
//
//   hashrec segment      --lexicon L --bigrams B [--in tags.txt]
//   hashrec evaluate     --lexicon L --bigrams B --golden golden.tsv
//   hashrec profiles     --lexicon L --bigrams B --in users.tsv --out profiles.tsv
//   hashrec simmatrix    --synsets S --edges E [--counts C] --profiles profiles.tsv --out sims.tsv
//   hashrec cluster      --sims sims.tsv --k 30 --seed 42 --max-iter 100 --out clusters.tsv
//   hashrec cluster-stats --clusters clusters.tsv
//   hashrec recommend    --clusters clusters.tsv --sims sims.tsv (--target ID | --all) --top 10
//   hashrec run-all      (all of the above inputs) --users users.tsv --out-dir DIR
//
// Every subcommand accepts --config FILE with `key = value` lines named after
// the long flags; flags given on the command line win.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hashrec/hashrec.hpp"

namespace {

using hashrec::fs::path;

struct CorpusFlags {
  std::string lexicon;
  std::string bigrams;
  double bigram_floor = hashrec::kDefaultBigramFloor;
  std::size_t max_candidates = hashrec::kDefaultMaxCandidates;

  void add_to(CLI::App* app) {
    app->add_option("--lexicon", lexicon, "Lexicon file, one word per line")->required();
    app->add_option("--bigrams", bigrams, "Bigram TSV: w1<TAB>w2<TAB>count")->required();
    app->add_option("--bigram-floor", bigram_floor, "Probability of unseen bigrams")->check(CLI::Range(0.0, 1.0));
    app->add_option("--max-candidates", max_candidates, "Cap on enumerated segmentations per hashtag")
        ->check(CLI::PositiveNumber);
  }

  std::pair<hashrec::Lexicon, hashrec::BigramModel> load() const {
    return hashrec::detail::in_stage("corpus", [&] {
      auto lex = hashrec::load_lexicon(lexicon);
      if (lex.skipped) std::cerr << fmt::format("lexicon: skipped {} non-letter lines\n", lex.skipped);
      return std::make_pair(std::move(lex.lexicon), hashrec::load_bigrams(bigrams, bigram_floor));
    });
  }
};

struct TaxonomyFlags {
  std::string synsets;
  std::string edges;
  std::string counts;
  double ic_max = hashrec::TaxonomyOptions{}.ic_max;

  void add_to(CLI::App* app) {
    app->add_option("--synsets", synsets, "Synsets TSV: id<TAB>pos<TAB>word1,word2")->required();
    app->add_option("--edges", edges, "Is-a edges TSV: child_id<TAB>parent_id")->required();
    app->add_option("--counts", counts, "Own-count TSV: id<TAB>count (optional)");
    app->add_option("--ic-max", ic_max, "Information content assigned to zero-frequency concepts")
        ->check(CLI::PositiveNumber);
  }

  std::optional<path> counts_path() const {
    return counts.empty() ? std::nullopt : std::optional<path>(counts);
  }
};

void add_config(CLI::App* app) {
  // Consumed by expand_config() before parsing; registered here for --help.
  app->add_option("--config", "Config file of key = value lines; command-line flags win");
}

// Rewrites `hashrec SUB ... --config FILE ...` into `hashrec SUB --k1=v1 ... ...`
// with the file's entries first. Options take the last value given, so flags
// on the command line override the file.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::optional<std::string> file;
  std::vector<std::string> rest;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!file || rest.empty()) return args;

  std::vector<std::string> out = {args[0], rest[0]};
  for (const auto& item : CLI::ConfigINI().from_file(*file)) {
    for (const auto& value : item.inputs) out.push_back("--" + item.name + "=" + value);
  }
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

// Writes to `out` atomically, or to stdout when out is empty.
template <class Writer>
void emit(const std::string& out, Writer&& writer) {
  if (out.empty()) {
    writer(std::cout);
  } else {
    hashrec::text::write_atomic_with(out, writer);
  }
}

void print_report(const hashrec::StageReport& r) {
  std::cerr << fmt::format("[{}] {} -> {} ({:.2f}s)\n", r.stage, r.cached ? "cached" : "done", r.artifact.string(),
                           r.seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hashtag-based friend recommendation: segmentation, profile matching, clustering"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  // segment
  CorpusFlags seg_corpus;
  std::string seg_in;
  auto* seg = app.add_subcommand("segment", "Segment hashtags read one per line");
  seg_corpus.add_to(seg);
  seg->add_option("--in", seg_in, "Input file (default: standard input)");
  add_config(seg);

  // evaluate
  CorpusFlags eval_corpus;
  std::string eval_golden;
  auto* eval = app.add_subcommand("evaluate", "Score the segmenter against a golden TSV");
  eval_corpus.add_to(eval);
  eval->add_option("--golden", eval_golden, "Golden TSV: hashtag<TAB>expected tokens")->required();
  add_config(eval);

  // profiles
  CorpusFlags prof_corpus;
  std::string prof_in, prof_out;
  std::size_t prof_workers = 1;
  auto* prof = app.add_subcommand("profiles", "Build word profiles from users' hashtags");
  prof_corpus.add_to(prof);
  prof->add_option("--in", prof_in, "Users TSV: id<TAB>tag1,tag2,...")->required();
  prof->add_option("--out", prof_out, "Profiles TSV to write")->required();
  prof->add_option("--workers", prof_workers)->check(CLI::PositiveNumber);
  add_config(prof);

  // simmatrix
  TaxonomyFlags sim_tax;
  std::string sim_profiles, sim_out;
  std::size_t sim_workers = 1;
  auto* sim = app.add_subcommand("simmatrix", "Pairwise profile similarity matrix");
  sim_tax.add_to(sim);
  sim->add_option("--profiles", sim_profiles, "Profiles TSV")->required();
  sim->add_option("--out", sim_out, "Sims TSV to write")->required();
  sim->add_option("--workers", sim_workers)->check(CLI::PositiveNumber);
  add_config(sim);

  // cluster
  std::string cl_sims, cl_out, cl_init = "uniform";
  hashrec::KMedoidsOptions cl_opts;
  auto* cl = app.add_subcommand("cluster", "k-medoids clustering of a sims TSV");
  cl->add_option("--sims", cl_sims, "Sims TSV")->required();
  cl->add_option("--k", cl_opts.k, "Number of clusters")->capture_default_str()->check(CLI::PositiveNumber);
  cl->add_option("--seed", cl_opts.seed, "Random seed")->capture_default_str();
  cl->add_option("--max-iter", cl_opts.max_iter)->capture_default_str()->check(CLI::PositiveNumber);
  cl->add_option("--init", cl_init, "Medoid initialization: plus_plus or uniform")->capture_default_str();
  bool cl_no_swap = false;
  cl->add_flag("--no-swap", cl_no_swap, "Stop when the alternation stalls, without swap moves");
  cl->add_option("--out", cl_out, "Clusters TSV to write")->required();
  add_config(cl);

  // cluster-stats
  std::string cs_clusters, cs_out;
  auto* cs = app.add_subcommand("cluster-stats", "Cluster-size histogram");
  cs->add_option("--clusters", cs_clusters, "Clusters TSV")->required();
  cs->add_option("--out", cs_out, "Histogram TSV (default: standard output)");
  add_config(cs);

  // recommend
  std::string rec_clusters, rec_sims, rec_target, rec_out;
  std::size_t rec_top = 0;
  bool rec_all = false;
  auto* rec = app.add_subcommand("recommend", "Top similar profiles inside a profile's cluster");
  rec->add_option("--clusters", rec_clusters, "Clusters TSV")->required();
  rec->add_option("--sims", rec_sims, "Sims TSV")->required();
  auto* target_opt = rec->add_option("--target", rec_target, "Profile id to recommend for");
  auto* all_opt = rec->add_flag("--all", rec_all, "Recommend for every profile");
  target_opt->excludes(all_opt);
  rec->add_option("--top", rec_top, "Number of recommendations per profile")->required()->check(CLI::PositiveNumber);
  rec->add_option("--out", rec_out, "Recommendations TSV (default: standard output)");
  add_config(rec);

  // run-all
  hashrec::PipelineConfig cfg;
  CorpusFlags run_corpus;
  TaxonomyFlags run_tax;
  std::string run_users, run_out_dir = cfg.out_dir.string(), run_init = "uniform";
  std::size_t run_top = 0;
  auto* run = app.add_subcommand("run-all", "profiles -> simmatrix -> cluster -> recommend, with caching");
  run_corpus.add_to(run);
  run_tax.add_to(run);
  run->add_option("--users", run_users, "Users TSV: id<TAB>tag1,tag2,...")->required();
  run->add_option("--out-dir", run_out_dir, "Directory for artifacts")->capture_default_str();
  run->add_option("--k", cfg.k)->capture_default_str()->check(CLI::PositiveNumber);
  run->add_option("--seed", cfg.seed)->capture_default_str();
  run->add_option("--max-iter", cfg.max_iter)->capture_default_str()->check(CLI::PositiveNumber);
  run->add_option("--init", run_init)->capture_default_str();
  bool run_no_swap = false;
  run->add_flag("--no-swap", run_no_swap);
  run->add_option("--top", run_top, "Recommendations per profile; 0 skips the recommend stage")->capture_default_str();
  run->add_option("--workers", cfg.workers)->capture_default_str()->check(CLI::PositiveNumber);
  add_config(run);

  try {
    auto args = expand_config(argc, argv);
    args.erase(args.begin());
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*seg) {
      const auto [lex, bm] = seg_corpus.load();
      const hashrec::SegmenterOptions opts{seg_corpus.max_candidates};
      std::ifstream file;
      if (!seg_in.empty()) file = hashrec::text::open_input(seg_in);
      std::istream& in = seg_in.empty() ? std::cin : file;
      hashrec::text::for_each_line(in, [&](std::string_view line, std::size_t number) {
        const auto raw = hashrec::text::trim(line);
        if (raw.empty()) return;
        const auto h = hashrec::Hashtag::try_parse(raw);
        if (!h) {
          std::cerr << fmt::format("line {}: skipping invalid hashtag '{}'\n", number, raw);
          std::cout << raw << "\tinvalid\t\n";
          return;
        }
        const auto r = hashrec::segment(*h, lex, bm, opts);
        std::cout << raw << '\t' << hashrec::to_string(r.status) << '\t' << hashrec::text::join(r.tokens, " ") << '\n';
      });
    } else if (*eval) {
      const auto [lex, bm] = eval_corpus.load();
      const auto golden = hashrec::load_golden(eval_golden);
      const auto report = hashrec::evaluate_segmenter(golden, lex, bm, {eval_corpus.max_candidates});
      std::cout << fmt::format("total\t{}\ncorrect\t{}\nsuccess_rate\t{:.6f}\n", report.total, report.correct,
                               report.success_rate);
      for (const auto& f : report.failures) {
        std::string flags;
        if (f.lexicon_miss) flags += "lexicon_miss ";
        if (f.unseen_bigram) flags += "unseen_bigram ";
        std::cout << fmt::format("FAIL\t{}\texpected={}\tproduced={}\tstatus={}\t{}\n", f.hashtag,
                                 hashrec::text::join(f.expected, " "), hashrec::text::join(f.produced, " "),
                                 f.status ? hashrec::to_string(*f.status) : "invalid", hashrec::text::trim(flags));
      }
    } else if (*prof) {
      print_report(hashrec::run_stage(
          hashrec::ProfilesStage{prof_in, prof_corpus.lexicon, prof_corpus.bigrams, prof_out, prof_corpus.bigram_floor,
                                 prof_corpus.max_candidates},
          {false, prof_workers}));
    } else if (*sim) {
      print_report(hashrec::run_stage(hashrec::SimMatrixStage{sim_profiles, sim_tax.synsets, sim_tax.edges,
                                                              sim_tax.counts_path(), sim_out, sim_tax.ic_max},
                                      {false, sim_workers}));
    } else if (*cl) {
      cl_opts.init = hashrec::parse_medoid_init(cl_init);
      cl_opts.swap = !cl_no_swap;
      print_report(hashrec::run_stage(hashrec::ClusterStage{cl_sims, cl_out, cl_opts}));
    } else if (*cs) {
      const auto c = hashrec::load_clusters(cs_clusters);
      emit(cs_out, [&](std::ostream& os) { hashrec::write_histogram(os, c); });
    } else if (*rec) {
      if (rec_target.empty() && !rec_all) throw hashrec::InputError("recommend needs --target ID or --all");
      const std::optional<std::string> target = rec_all ? std::nullopt : std::optional<std::string>(rec_target);
      if (rec_out.empty()) {
        const auto matrix = hashrec::load_similarity_tsv(rec_sims);
        const auto clustering = hashrec::load_clusters(rec_clusters);
        const hashrec::ClusterIndex index(clustering);
        if (target) {
          hashrec::write_recommendations(std::cout, hashrec::recommend(*target, index, matrix, rec_top));
        } else {
          for (const auto& id : clustering.ids)
            hashrec::write_recommendations(std::cout, hashrec::recommend(id, index, matrix, rec_top));
        }
      } else {
        print_report(hashrec::run_stage(hashrec::RecommendStage{rec_clusters, rec_sims, rec_out, rec_top, target}));
      }
    } else if (*run) {
      cfg.lexicon = run_corpus.lexicon;
      cfg.bigrams = run_corpus.bigrams;
      cfg.bigram_floor = run_corpus.bigram_floor;
      cfg.max_candidates = run_corpus.max_candidates;
      cfg.synsets = run_tax.synsets;
      cfg.edges = run_tax.edges;
      cfg.counts = run_tax.counts_path();
      cfg.ic_max = run_tax.ic_max;
      cfg.users = run_users;
      cfg.out_dir = run_out_dir;
      cfg.init = hashrec::parse_medoid_init(run_init);
      cfg.swap = !run_no_swap;
      if (run_top > 0) cfg.top_k = run_top;
      hashrec::run_all(cfg, &std::cerr);
    }
  } catch (const hashrec::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_FAILURE;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
