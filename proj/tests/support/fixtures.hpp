#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <utility>
#include <vector>

#include <unistd.h>

#include "hashrec/corpus.hpp"
#include "hashrec/matcher.hpp"
#include "hashrec/taxonomy.hpp"

namespace hashrec::testing {

namespace fs = std::filesystem;

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("hashrec-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ignored;
    fs::remove_all(path_, ignored);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const noexcept { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

/// Lexicon and bigram counts whose joint probabilities are exactly
/// P(worldwide, festival) = 0.0022, P(world, wide) = 0.05 and
/// P(wide, festival) = 0.0099 (total 10000).
inline Lexicon festival_lexicon() { return Lexicon{"worldwide", "world", "wide", "festival"}; }

inline BigramModel festival_bigrams(double floor_prob = kDefaultBigramFloor) {
  BigramModel bm(floor_prob);
  bm.add("worldwide", "festival", 22);
  bm.add("world", "wide", 500);
  bm.add("wide", "festival", 99);
  bm.add("other", "pair", 10000 - 22 - 500 - 99);
  return bm;
}

/// root <- animal <- {dog, cat}.
inline Taxonomy toy_taxonomy(double root_own, double animal_own, double dog_own, double cat_own) {
  std::vector<Synset> synsets = {
      {"root", "n", {"entity"}},
      {"animal", "n", {"animal"}},
      {"dog", "n", {"dog"}},
      {"cat", "n", {"cat"}},
  };
  const std::vector<Taxonomy::Edge> edges = {{"animal", "root"}, {"dog", "animal"}, {"cat", "animal"}};
  const std::unordered_map<std::string, double> counts = {
      {"root", root_own}, {"animal", animal_own}, {"dog", dog_own}, {"cat", cat_own}};
  return Taxonomy::build(std::move(synsets), edges, counts);
}

/// Word-similarity table from the worked matching example.
struct TableWordSim {
  std::unordered_map<std::string, double> values;

  double operator()(std::string_view a, std::string_view b) const {
    if (a == b) return 1.0;
    if (auto it = values.find(std::string(a) + "|" + std::string(b)); it != values.end()) return it->second;
    if (auto it = values.find(std::string(b) + "|" + std::string(a)); it != values.end()) return it->second;
    return 0.0;
  }
};

inline TableWordSim worked_example_table() {
  return TableWordSim{{
      {"salary|information", 0.127},
      {"salary|office", 0.109},
      {"work|information", 0.411},
      {"work|office", 0.781},
      {"company|information", 0.388},
      {"company|office", 0.615},
  }};
}

/// Six points in two blocks {a0,a1,a2} and {b0,b1,b2}: 0.9 inside a block,
/// 0.1 across.
inline SimilarityMatrix two_blob_matrix(double scale = 1.0) {
  SimilarityMatrix m({"a0", "a1", "a2", "b0", "b1", "b2"});
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) {
      const bool same = (i < 3) == (j < 3);
      m.set(i, j, static_cast<float>((same ? 0.9 : 0.1) * scale));
    }
  }
  return m;
}

inline SimilarityMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("p" + std::to_string(i));
  SimilarityMatrix m(std::move(ids));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) m.set(i, j, static_cast<float>(u(rng)));
  }
  return m;
}

}  // namespace hashrec::testing
