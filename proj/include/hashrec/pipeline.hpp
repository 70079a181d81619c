#pragma once

// End-to-end stages: profiles -> simmatrix -> cluster -> recommend. Each stage
// writes its TSV artifact atomically plus a `<artifact>.meta.json` sidecar,
// and is skipped when its inputs and parameters hash to the recorded key.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <openssl/evp.h>

#include <json.hpp>

#include "hashrec/cluster.hpp"
#include "hashrec/corpus.hpp"
#include "hashrec/error.hpp"
#include "hashrec/matcher.hpp"
#include "hashrec/profile.hpp"
#include "hashrec/recommend.hpp"
#include "hashrec/segmenter.hpp"
#include "hashrec/taxonomy.hpp"
#include "hashrec/text.hpp"

namespace hashrec {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// Failure inside a named pipeline stage (corpus, taxonomy, profiles, ...).
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what) : Error("stage " + stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

inline std::string sha256_hex(std::istream& in) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

inline std::string sha256_file(const fs::path& path) {
  auto in = text::open_input(path);
  return sha256_hex(in);
}

inline std::string sha256_string(const std::string& s) {
  std::istringstream in(s);
  return sha256_hex(in);
}

struct StageReport {
  std::string stage;
  fs::path artifact;
  bool cached = false;
  double seconds = 0.0;
  json stats;
};

struct StageInput {
  std::string label;
  fs::path path;
  std::string owner;  // stage named in diagnostics when the input is missing
};

namespace detail {

/// Shared cache / sidecar / atomic-write protocol of every stage. produce
/// receives the output stream and returns the stage statistics.
template <class Produce>
StageReport execute_stage(const std::string& stage, const fs::path& out, const std::vector<StageInput>& inputs,
                          const json& params, bool use_cache, Produce&& produce) {
  const auto start = std::chrono::steady_clock::now();
  json input_meta = json::object();
  for (const auto& in : inputs) {
    if (!fs::is_regular_file(in.path))
      throw StageError(in.owner, "missing " + in.label + " file '" + in.path.string() + "'");
    input_meta[in.label] = {{"path", in.path.string()}, {"sha256", sha256_file(in.path)}};
  }
  json key_doc = {{"stage", stage}, {"params", params}, {"inputs", json::object()}};
  for (const auto& [label, meta] : input_meta.items()) key_doc["inputs"][label] = meta["sha256"];
  const std::string key = sha256_string(key_doc.dump());

  fs::path sidecar = out;
  sidecar += ".meta.json";
  if (use_cache && fs::is_regular_file(sidecar) && fs::is_regular_file(out)) {
    try {
      const json previous = json::parse(text::read_file(sidecar));
      if (previous.at("cache_key") == key && previous.at("output").at("sha256") == sha256_file(out)) {
        return StageReport{stage, out, true, 0.0, previous.value("stats", json::object())};
      }
    } catch (const json::exception&) {
      // Unreadable sidecar: recompute.
    }
  }

  json stats;
  try {
    text::write_atomic_with(out, [&](std::ostream& os) { stats = produce(os); });
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e.what());
  } catch (const fs::filesystem_error& e) {
    throw StageError(stage, e.what());
  }

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json meta = {
      {"stage", stage},
      {"cache_key", key},
      {"inputs", input_meta},
      {"params", params},
      {"output", {{"path", out.string()}, {"sha256", sha256_file(out)}, {"bytes", fs::file_size(out)}}},
      {"stats", stats},
      {"seconds", seconds},
  };
  text::write_atomic(sidecar, meta.dump(2) + "\n");
  return StageReport{stage, out, false, seconds, stats};
}

template <class Fn>
auto in_stage(const std::string& stage, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace detail

struct StageOptions {
  bool use_cache = false;
  std::size_t workers = 1;
};

struct ProfilesStage {
  fs::path users;
  fs::path lexicon;
  fs::path bigrams;
  fs::path out;
  double bigram_floor = kDefaultBigramFloor;
  std::size_t max_candidates = kDefaultMaxCandidates;
};

inline StageReport run_stage(const ProfilesStage& s, const StageOptions& opts = {}) {
  const json params = {{"bigram_floor", s.bigram_floor}, {"max_candidates", s.max_candidates}};
  const std::vector<StageInput> inputs = {
      {"lexicon", s.lexicon, "corpus"}, {"bigrams", s.bigrams, "corpus"}, {"users", s.users, "profiles"}};
  return detail::execute_stage("profiles", s.out, inputs, params, opts.use_cache, [&](std::ostream& os) {
    const auto lex = detail::in_stage("corpus", [&] { return load_lexicon(s.lexicon); });
    const auto bm = detail::in_stage("corpus", [&] { return load_bigrams(s.bigrams, s.bigram_floor); });
    const auto users = ingest_profiles(s.users);
    const auto profiles = build_profiles(users, lex.lexicon, bm, SegmenterOptions{s.max_candidates}, opts.workers);
    write_profiles(os, profiles);

    std::size_t hashtags = 0, unsegmentable = 0, invalid = 0, empty = 0;
    for (const auto& p : profiles) {
      hashtags += p.hashtags.size();
      unsegmentable += p.unsegmentable;
      invalid += p.invalid;
      empty += p.words.empty();
    }
    return json{{"profiles", profiles.size()}, {"hashtags", hashtags}, {"unsegmentable", unsegmentable},
                {"invalid", invalid}, {"empty_profiles", empty}, {"lexicon_words", lex.lexicon.size()},
                {"lexicon_skipped", lex.skipped}, {"bigrams", bm.size()}};
  });
}

struct SimMatrixStage {
  fs::path profiles;
  fs::path synsets;
  fs::path edges;
  std::optional<fs::path> counts;
  fs::path out;
  double ic_max = TaxonomyOptions{}.ic_max;
};

inline StageReport run_stage(const SimMatrixStage& s, const StageOptions& opts = {}) {
  const json params = {{"ic_max", s.ic_max}};
  std::vector<StageInput> inputs = {
      {"profiles", s.profiles, "simmatrix"}, {"synsets", s.synsets, "taxonomy"}, {"edges", s.edges, "taxonomy"}};
  if (s.counts) inputs.push_back({"counts", *s.counts, "taxonomy"});
  return detail::execute_stage("simmatrix", s.out, inputs, params, opts.use_cache, [&](std::ostream& os) {
    const auto taxonomy = detail::in_stage(
        "taxonomy", [&] { return load_taxonomy(s.synsets, s.edges, s.counts, TaxonomyOptions{s.ic_max}); });
    const auto profiles = load_profiles(s.profiles);
    const auto matrix = build_similarity_matrix(profiles, CachedWordSimilarity(taxonomy), MatrixOptions{opts.workers, {}});
    write_similarity_tsv(os, matrix);
    return json{{"profiles", matrix.size()},
                {"pairs", matrix.size() * (matrix.size() - (matrix.size() > 0)) / 2},
                {"synsets", taxonomy.size()}};
  });
}

struct ClusterStage {
  fs::path sims;
  fs::path out;
  KMedoidsOptions kmedoids;
};

inline StageReport run_stage(const ClusterStage& s, const StageOptions& opts = {}) {
  const json params = {{"k", s.kmedoids.k},
                       {"seed", s.kmedoids.seed},
                       {"max_iter", s.kmedoids.max_iter},
                       {"init", std::string(to_string(s.kmedoids.init))},
                       {"swap", s.kmedoids.swap}};
  return detail::execute_stage("cluster", s.out, {{"sims", s.sims, "cluster"}}, params, opts.use_cache,
                               [&](std::ostream& os) {
                                 const auto matrix = load_similarity_tsv(s.sims);
                                 const auto c = k_medoids(matrix, s.kmedoids);
                                 write_clusters(os, c);
                                 json sizes = json::array();
                                 for (const auto& [cluster, size] : cluster_histogram(c)) sizes.push_back(size);
                                 return json{{"profiles", c.ids.size()}, {"iterations", c.iterations},
                                             {"converged", c.converged}, {"cost", c.cost},
                                             {"cost_trace", c.cost_trace}, {"cluster_sizes", sizes}};
                               });
}

struct RecommendStage {
  fs::path clusters;
  fs::path sims;
  fs::path out;
  std::size_t top_k = 10;
  std::optional<std::string> target;  // nullopt: every profile
};

inline StageReport run_stage(const RecommendStage& s, const StageOptions& opts = {}) {
  const json params = {{"top_k", s.top_k}, {"target", s.target ? json(*s.target) : json(nullptr)}};
  const std::vector<StageInput> inputs = {{"clusters", s.clusters, "recommend"}, {"sims", s.sims, "recommend"}};
  return detail::execute_stage("recommend", s.out, inputs, params, opts.use_cache, [&](std::ostream& os) {
    const auto matrix = load_similarity_tsv(s.sims);
    const auto clustering = load_clusters(s.clusters);
    const ClusterIndex index(clustering);
    std::size_t rows = 0, targets = 0;
    auto emit = [&](const std::string& id) {
      const auto rec = recommend(id, index, matrix, s.top_k);
      write_recommendations(os, rec);
      rows += rec.ranked.size();
      ++targets;
    };
    if (s.target) {
      emit(*s.target);
    } else {
      for (const auto& id : clustering.ids) emit(id);
    }
    return json{{"targets", targets}, {"rows", rows}};
  });
}

/// Cluster-size histogram TSV: `cluster_index<TAB>size`.
inline void write_histogram(std::ostream& out, const Clustering& c) {
  for (const auto& [cluster, size] : cluster_histogram(c)) out << cluster << '\t' << size << '\n';
}

struct PipelineConfig {
  fs::path lexicon;
  fs::path bigrams;
  fs::path synsets;
  fs::path edges;
  std::optional<fs::path> counts;
  fs::path users;
  fs::path out_dir = "hashrec-out";
  std::size_t k = 30;
  std::uint64_t seed = 42;
  std::size_t max_iter = 100;
  MedoidInit init = MedoidInit::uniform;
  bool swap = true;
  std::optional<std::size_t> top_k;  // recommend stage runs only when set
  std::size_t workers = 1;
  double bigram_floor = kDefaultBigramFloor;
  std::size_t max_candidates = kDefaultMaxCandidates;
  double ic_max = TaxonomyOptions{}.ic_max;

  /// Numeric preconditions; file existence is checked by each stage.
  void validate() const {
    auto need = [](const fs::path& p, const char* stage, const char* what) {
      if (p.empty()) throw StageError(stage, std::string("no ") + what + " path configured");
    };
    need(lexicon, "corpus", "lexicon");
    need(bigrams, "corpus", "bigrams");
    need(synsets, "taxonomy", "synsets");
    need(edges, "taxonomy", "edges");
    need(users, "profiles", "users");
    if (k < 1) throw StageError("cluster", "k must be positive");
    if (max_iter < 1) throw StageError("cluster", "max_iter must be positive");
    if (top_k && *top_k < 1) throw StageError("recommend", "top_k must be positive");
    if (workers < 1) throw InputError("workers must be positive");
    if (!(bigram_floor >= 0.0 && bigram_floor < 1.0)) throw StageError("corpus", "bigram floor must be in [0, 1)");
    if (max_candidates < 1) throw StageError("profiles", "max_candidates must be positive");
  }

  fs::path profiles_path() const { return out_dir / "profiles.tsv"; }
  fs::path sims_path() const { return out_dir / "sims.tsv"; }
  fs::path clusters_path() const { return out_dir / "clusters.tsv"; }
  fs::path recommendations_path() const { return out_dir / "recommendations.tsv"; }
};

/// Runs every stage in order through the persisted artifacts under out_dir.
/// Throws StageError naming the failing stage.
inline std::vector<StageReport> run_all(const PipelineConfig& cfg, std::ostream* log = nullptr) {
  cfg.validate();
  const StageOptions opts{true, cfg.workers};
  std::vector<StageReport> reports;
  auto record = [&](StageReport r) {
    if (log) *log << fmt::format("[{}] {} -> {} ({:.2f}s)\n", r.stage, r.cached ? "cached" : "done", r.artifact.string(), r.seconds);
    reports.push_back(std::move(r));
  };

  record(run_stage(ProfilesStage{cfg.users, cfg.lexicon, cfg.bigrams, cfg.profiles_path(), cfg.bigram_floor,
                                 cfg.max_candidates},
                   opts));
  record(run_stage(SimMatrixStage{cfg.profiles_path(), cfg.synsets, cfg.edges, cfg.counts, cfg.sims_path(), cfg.ic_max},
                   opts));
  record(run_stage(ClusterStage{cfg.sims_path(), cfg.clusters_path(), {cfg.k, cfg.seed, cfg.max_iter, cfg.init, cfg.swap}}, opts));
  if (cfg.top_k) {
    record(run_stage(RecommendStage{cfg.clusters_path(), cfg.sims_path(), cfg.recommendations_path(), *cfg.top_k, {}},
                     opts));
  }
  return reports;
}

}  // namespace hashrec
