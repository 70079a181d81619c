#pragma once

// Profile-to-profile similarity by greedy best matching of their words, and
// the pairwise similarity matrix over a set of profiles.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "hashrec/corpus.hpp"
#include "hashrec/error.hpp"
#include "hashrec/profile.hpp"
#include "hashrec/text.hpp"

namespace hashrec {

struct MatchResult {
  double similarity = 0.0;  // sum / counter, or 0 when either side is empty
  double sum = 0.0;
  std::size_t counter = 0;
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (row, col) in selection order
};

/// Greedy best matching over a row-major rows x cols matrix of similarities
/// in [0, 1]. Repeatedly takes the largest remaining cell (ties: smallest
/// row, then smallest column), adds it to the sum and retires its row and
/// column, until one side is exhausted.
inline MatchResult greedy_match(std::size_t rows, std::size_t cols, std::span<const double> cells) {
  if (cells.size() != rows * cols) throw InputError("matrix has " + std::to_string(cells.size()) + " cells, expected " +
                                                    std::to_string(rows * cols));
  MatchResult result;
  if (rows == 0 || cols == 0) return result;

  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Row-major index order already encodes the (row, col) tie-break.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cells[a] > cells[b]; });

  const std::size_t limit = std::min(rows, cols);
  std::vector<bool> row_used(rows, false);
  std::vector<bool> col_used(cols, false);
  for (const std::size_t cell : order) {
    const std::size_t r = cell / cols;
    const std::size_t c = cell % cols;
    if (row_used[r] || col_used[c]) continue;
    row_used[r] = col_used[c] = true;
    result.sum += cells[cell];
    ++result.counter;
    result.matches.emplace_back(r, c);
    if (result.counter == limit) break;
  }
  result.similarity = result.sum / static_cast<double>(result.counter);
  return result;
}

/// Fills the word-pair matrix with sw (rows: row_words, columns: col_words)
/// and runs the greedy matching on it. sw must return values in [0, 1].
template <class WordSim>
MatchResult match_words(std::span<const std::string> row_words, std::span<const std::string> col_words, WordSim&& sw) {
  std::vector<double> cells;
  cells.reserve(row_words.size() * col_words.size());
  for (const auto& r : row_words) {
    for (const auto& c : col_words) {
      const double v = sw(std::string_view(r), std::string_view(c));
      if (!(v >= 0.0 && v <= 1.0)) throw InputError("word similarity out of [0, 1] for (" + r + ", " + c + ")");
      cells.push_back(v);
    }
  }
  return greedy_match(row_words.size(), col_words.size(), cells);
}

/// Similarity of two word sets. The lexicographically smaller list is used as
/// the row side, which makes the result exactly symmetric even under ties.
template <class WordSim>
double sim_profiles(std::span<const std::string> a, std::span<const std::string> b, WordSim&& sw) {
  if (a.empty() || b.empty()) return 0.0;
  const bool swap = std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
  return swap ? match_words(b, a, sw).similarity : match_words(a, b, sw).similarity;
}

template <class WordSim>
double sim_profiles(const Profile& a, const Profile& b, WordSim&& sw) {
  return sim_profiles(std::span<const std::string>(a.words), std::span<const std::string>(b.words), sw);
}

/// Symmetric N x N profile similarities with unit diagonal, stored as the
/// strict upper triangle in 32-bit floats.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;

  explicit SimilarityMatrix(std::vector<std::string> ids) : ids_(std::move(ids)) {
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (!index_.emplace(ids_[i], i).second) throw InputError("duplicate profile id '" + ids_[i] + "'");
    }
    const std::size_t n = ids_.size();
    upper_.assign(n * (n - (n > 0)) / 2, 0.0f);
  }

  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::string& id(std::size_t i) const { return ids_.at(i); }

  std::optional<std::size_t> find(std::string_view id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(std::string_view id) const {
    auto i = find(id);
    if (!i) throw ReferenceError("unknown profile id '" + std::string(id) + "'");
    return *i;
  }

  float at(std::size_t i, std::size_t j) const {
    if (i == j) return 1.0f;
    return upper_[offset(i, j)];
  }

  void set(std::size_t i, std::size_t j, float value) {
    if (i == j) throw InputError("diagonal of a similarity matrix is fixed at 1");
    if (!(value >= 0.0f && value <= 1.0f)) throw InputError("similarity out of [0, 1]");
    upper_[offset(i, j)] = value;
  }

 private:
  std::size_t offset(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    const std::size_t n = ids_.size();
    if (j >= n) throw ReferenceError("matrix index out of range");
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  }

  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> index_;
  std::vector<float> upper_;
};

struct MatrixOptions {
  std::size_t workers = 1;
  /// Called with (pairs done, pairs total) after each completed row; calls are serialized.
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Computes each unordered pair once. Every worker uses its own copy of sw.
template <class WordSim>
SimilarityMatrix build_similarity_matrix(std::span<const Profile> profiles, const WordSim& sw,
                                         const MatrixOptions& opts = {}) {
  std::vector<std::string> ids;
  ids.reserve(profiles.size());
  for (const auto& p : profiles) ids.push_back(p.id);
  SimilarityMatrix matrix(std::move(ids));

  const std::size_t n = profiles.size();
  const std::size_t total = n * (n - (n > 0)) / 2;
  std::atomic<std::size_t> next_row{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  auto work = [&] {
    WordSim local = sw;
    for (std::size_t i = next_row++; i < n; i = next_row++) {
      for (std::size_t j = i + 1; j < n; ++j) {
        matrix.set(i, j, static_cast<float>(sim_profiles(profiles[i], profiles[j], local)));
      }
      const std::size_t now = done += n - 1 - i;
      if (opts.progress) {
        std::lock_guard lock(progress_mutex);
        opts.progress(now, total);
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < std::max<std::size_t>(opts.workers, 1); ++w) pool.emplace_back(work);
    work();
  }
  return matrix;
}

/// Sims TSV: `id_i<TAB>id_j<TAB>sim` for i < j, six decimals.
inline void write_similarity_tsv(std::ostream& out, const SimilarityMatrix& m) {
  fmt::memory_buffer buf;
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      fmt::format_to(std::back_inserter(buf), "{}\t{}\t{:.6f}\n", m.id(i), m.id(j), static_cast<double>(m.at(i, j)));
    }
    if (buf.size() > (1u << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

/// Reads a sims TSV. Profile order is first appearance; every unordered pair
/// must occur exactly once. The stream must be seekable (two passes).
inline SimilarityMatrix read_similarity_tsv(std::istream& in, const std::string& source = "<sims>") {
  std::vector<std::string> ids;
  std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> seen;
  auto note = [&](std::string_view id) {
    if (seen.find(id) == seen.end()) {
      seen.emplace(std::string(id), ids.size());
      ids.emplace_back(id);
    }
  };
  text::for_each_line(in, [&](std::string_view line, std::size_t number) {
    if (text::trim(line).empty()) return;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 3) throw ParseError(source, number, "expected id_i<TAB>id_j<TAB>sim");
    note(fields[0]);
    note(fields[1]);
  });
  if (ids.empty()) throw EmptyResourceError(source + ": no similarity rows");

  SimilarityMatrix m(ids);
  const std::size_t n = ids.size();
  std::vector<bool> filled(n * (n - 1) / 2, false);
  std::size_t count = 0;
  in.clear();
  in.seekg(0);
  text::for_each_line(in, [&](std::string_view line, std::size_t number) {
    if (text::trim(line).empty()) return;
    const auto fields = text::split(line, '\t');
    std::size_t i = m.index_of(fields[0]);
    std::size_t j = m.index_of(fields[1]);
    if (i == j) throw ParseError(source, number, "self-pair");
    const auto v = text::parse_double(text::trim(fields[2]));
    if (!v || *v < 0.0 || *v > 1.0) throw ParseError(source, number, "similarity must be a number in [0, 1]");
    if (i > j) std::swap(i, j);
    const std::size_t slot = i * n - i * (i + 1) / 2 + (j - i - 1);
    if (filled[slot]) throw ParseError(source, number, "duplicate pair");
    filled[slot] = true;
    ++count;
    m.set(i, j, static_cast<float>(*v));
  });
  if (count != filled.size())
    throw InputError(source + ": " + std::to_string(count) + " pairs for " + std::to_string(n) + " profiles, expected " +
                     std::to_string(filled.size()));
  return m;
}

inline SimilarityMatrix load_similarity_tsv(const std::filesystem::path& path) {
  auto in = text::open_input(path);
  return read_similarity_tsv(in, path.string());
}

}  // namespace hashrec
