#pragma once

// Is-a taxonomy with propagated frequency counts and information content,
// and the Resnik / Lin similarity measures built on it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hashrec/corpus.hpp"
#include "hashrec/error.hpp"
#include "hashrec/text.hpp"

namespace hashrec {

struct Synset {
  std::string id;
  std::string pos;
  std::vector<std::string> words;
};

struct TaxonomyOptions {
  // Upper bound on information content; concepts with zero propagated frequency get exactly this.
  double ic_max = 25.0;
};

class Taxonomy {
 public:
  using Index = std::uint32_t;
  using Edge = std::pair<std::string, std::string>;  // (child id, parent id)

  /// own_counts: per-synset own frequency; synsets absent from the map count 1.
  static Taxonomy build(std::vector<Synset> synsets, std::span<const Edge> edges,
                        const std::unordered_map<std::string, double>& own_counts = {},
                        const TaxonomyOptions& opts = {}) {
    Taxonomy t;
    t.ic_max_ = opts.ic_max;
    t.synsets_ = std::move(synsets);
    const auto n = t.synsets_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& s = t.synsets_[i];
      if (s.id.empty()) throw StructureError("synset with empty id");
      if (!t.id_index_.emplace(s.id, static_cast<Index>(i)).second)
        throw StructureError("duplicate synset id '" + s.id + "'");
      for (const auto& w : s.words) {
        auto& senses = t.word_index_[w];
        if (senses.empty() || senses.back() != i) senses.push_back(static_cast<Index>(i));
      }
    }

    t.parents_.assign(n, {});
    for (const auto& [child, parent] : edges) {
      const Index c = t.lookup(child);
      const Index p = t.lookup(parent);
      auto& ps = t.parents_[c];
      if (std::find(ps.begin(), ps.end(), p) == ps.end()) ps.push_back(p);
    }

    t.own_.assign(n, 1.0);
    for (const auto& [id, count] : own_counts) {
      if (!(count >= 0.0) || !std::isfinite(count)) throw InputError("negative or invalid count for '" + id + "'");
      t.own_[t.lookup(id)] = count;
    }

    t.compute_ancestors();
    t.propagate();
    return t;
  }

  std::size_t size() const noexcept { return synsets_.size(); }
  const Synset& synset(Index i) const { return synsets_.at(i); }
  std::span<const Index> parents(Index i) const { return parents_.at(i); }
  std::span<const Index> roots() const noexcept { return roots_; }
  /// Inclusive ancestor set of i, sorted ascending.
  std::span<const Index> ancestors(Index i) const { return ancestors_.at(i); }

  std::optional<Index> find(std::string_view id) const {
    const auto it = id_index_.find(id);
    if (it == id_index_.end()) return std::nullopt;
    return it->second;
  }

  /// Throws ReferenceError for an unknown id.
  Index lookup(std::string_view id) const {
    const auto it = id_index_.find(id);
    if (it == id_index_.end()) throw ReferenceError("unknown synset id '" + std::string(id) + "'");
    return it->second;
  }

  std::span<const Index> senses(std::string_view word) const {
    const auto it = word_index_.find(word);
    if (it == word_index_.end()) return {};
    return it->second;
  }

  double own_count(Index i) const { return own_.at(i); }
  double frequency(Index i) const { return freq_.at(i); }
  double frequency(std::string_view id) const { return frequency(lookup(id)); }
  /// Propagated frequency of the virtual root joining all roots (sum of every own count).
  double total_frequency() const noexcept { return total_; }

  double ic(Index i) const { return ic_.at(i); }
  double ic(std::string_view id) const { return ic(lookup(id)); }
  double ic_max() const noexcept { return ic_max_; }

  /// Information content of the most informative common ancestor; 0 when the
  /// two concepts only meet at the virtual root.
  double res(Index a, Index b) const {
    const auto& xa = ancestors_.at(a);
    const auto& xb = ancestors_.at(b);
    double best = 0.0;
    auto ia = xa.begin();
    auto ib = xb.begin();
    while (ia != xa.end() && ib != xb.end()) {
      if (*ia < *ib) {
        ++ia;
      } else if (*ib < *ia) {
        ++ib;
      } else {
        best = std::max(best, ic_[*ia]);
        ++ia;
        ++ib;
      }
    }
    return best;
  }
  double res(std::string_view a, std::string_view b) const { return res(lookup(a), lookup(b)); }

  /// 2 res(a, b) / (ic(a) + ic(b)), and 0 when both concepts carry no information.
  double lin(Index a, Index b) const {
    const double denom = ic_.at(a) + ic_.at(b);
    if (denom <= 0.0) return 0.0;
    return std::min(1.0, 2.0 * res(a, b) / denom);
  }
  double lin(std::string_view a, std::string_view b) const { return lin(lookup(a), lookup(b)); }

  /// Word similarity: 1 for identical strings, 0 when either word is out of
  /// the taxonomy, else the best Lin score over all sense pairs.
  double sim_words(std::string_view w1, std::string_view w2) const {
    if (w1 == w2) return 1.0;
    const auto s1 = senses(w1);
    const auto s2 = senses(w2);
    double best = 0.0;
    for (const Index a : s1) {
      for (const Index b : s2) best = std::max(best, lin(a, b));
    }
    return best;
  }

 private:
  void compute_ancestors() {
    const auto n = synsets_.size();
    std::vector<std::vector<Index>> children(n);
    std::vector<std::size_t> pending(n);
    std::vector<Index> ready;
    for (Index i = 0; i < n; ++i) {
      pending[i] = parents_[i].size();
      for (const Index p : parents_[i]) children[p].push_back(i);
      if (parents_[i].empty()) {
        roots_.push_back(i);
        ready.push_back(i);
      }
    }

    ancestors_.assign(n, {});
    std::size_t done = 0;
    while (!ready.empty()) {
      const Index c = ready.back();
      ready.pop_back();
      ++done;
      auto& anc = ancestors_[c];
      anc.push_back(c);
      for (const Index p : parents_[c]) anc.insert(anc.end(), ancestors_[p].begin(), ancestors_[p].end());
      std::sort(anc.begin(), anc.end());
      anc.erase(std::unique(anc.begin(), anc.end()), anc.end());
      for (const Index ch : children[c]) {
        if (--pending[ch] == 0) ready.push_back(ch);
      }
    }
    if (done != n) {
      for (Index i = 0; i < n; ++i) {
        if (pending[i] != 0) throw StructureError("is-a cycle through synset '" + synsets_[i].id + "'");
      }
    }
  }

  void propagate() {
    const auto n = synsets_.size();
    freq_.assign(n, 0.0);
    total_ = 0.0;
    for (Index d = 0; d < n; ++d) {
      total_ += own_[d];
      for (const Index a : ancestors_[d]) freq_[a] += own_[d];
    }
    if (n > 0 && !(total_ > 0.0)) throw EmptyResourceError("taxonomy has zero total frequency");
    ic_.assign(n, ic_max_);
    for (Index i = 0; i < n; ++i) {
      if (freq_[i] > 0.0) ic_[i] = std::clamp(-std::log(freq_[i] / total_), 0.0, ic_max_);
    }
  }

  std::vector<Synset> synsets_;
  std::unordered_map<std::string, Index, StringHash, std::equal_to<>> id_index_;
  std::unordered_map<std::string, std::vector<Index>, StringHash, std::equal_to<>> word_index_;
  std::vector<std::vector<Index>> parents_;
  std::vector<std::vector<Index>> ancestors_;
  std::vector<Index> roots_;
  std::vector<double> own_;
  std::vector<double> freq_;
  std::vector<double> ic_;
  double total_ = 0.0;
  double ic_max_ = 25.0;
};

// TSV readers.

inline std::vector<Synset> read_synsets(std::istream& in, const std::string& source = "<synsets>") {
  std::vector<Synset> out;
  text::for_each_line(in, [&](std::string_view line, std::size_t number) {
    if (text::trim(line).empty()) return;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 3) throw ParseError(source, number, "expected id<TAB>pos<TAB>word1,word2,...");
    Synset s{std::string(text::trim(fields[0])), std::string(text::trim(fields[1])), {}};
    if (s.id.empty()) throw ParseError(source, number, "empty synset id");
    for (auto w : text::split(text::trim(fields[2]), ',')) {
      w = text::trim(w);
      if (!w.empty()) s.words.push_back(text::to_lower_ascii(w));
    }
    out.push_back(std::move(s));
  });
  return out;
}

inline std::vector<Taxonomy::Edge> read_edges(std::istream& in, const std::string& source = "<edges>") {
  std::vector<Taxonomy::Edge> out;
  text::for_each_line(in, [&](std::string_view line, std::size_t number) {
    if (text::trim(line).empty()) return;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 2) throw ParseError(source, number, "expected child_id<TAB>parent_id");
    out.emplace_back(std::string(text::trim(fields[0])), std::string(text::trim(fields[1])));
  });
  return out;
}

inline std::unordered_map<std::string, double> read_counts(std::istream& in, const std::string& source = "<counts>") {
  std::unordered_map<std::string, double> out;
  text::for_each_line(in, [&](std::string_view line, std::size_t number) {
    if (text::trim(line).empty()) return;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 2) throw ParseError(source, number, "expected id<TAB>count");
    const auto count = text::parse_double(text::trim(fields[1]));
    if (!count || *count < 0.0) throw ParseError(source, number, "count must be a non-negative number");
    out[std::string(text::trim(fields[0]))] += *count;
  });
  return out;
}

/// counts_path is optional; without it every synset has own count 1.
inline Taxonomy load_taxonomy(const std::filesystem::path& synsets_path, const std::filesystem::path& edges_path,
                              const std::optional<std::filesystem::path>& counts_path = std::nullopt,
                              const TaxonomyOptions& opts = {}) {
  auto sin = text::open_input(synsets_path);
  auto synsets = read_synsets(sin, synsets_path.string());
  auto ein = text::open_input(edges_path);
  const auto edges = read_edges(ein, edges_path.string());
  std::unordered_map<std::string, double> counts;
  if (counts_path) {
    auto cin = text::open_input(*counts_path);
    counts = read_counts(cin, counts_path->string());
  }
  return Taxonomy::build(std::move(synsets), edges, counts, opts);
}

/// Memoizing word-similarity functor. Not thread-safe; give each worker its own copy.
class CachedWordSimilarity {
 public:
  explicit CachedWordSimilarity(const Taxonomy& taxonomy) : taxonomy_(&taxonomy) {}

  double operator()(std::string_view a, std::string_view b) {
    if (a == b) return 1.0;
    if (b < a) std::swap(a, b);
    key_.assign(a).push_back('\t');
    key_.append(b);
    if (const auto it = cache_.find(key_); it != cache_.end()) return it->second;
    const double value = taxonomy_->sim_words(a, b);
    cache_.emplace(key_, value);
    return value;
  }

  std::size_t cached() const noexcept { return cache_.size(); }

 private:
  const Taxonomy* taxonomy_;
  std::unordered_map<std::string, double> cache_;
  std::string key_;
};

}  // namespace hashrec
