#pragma once

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>

#include "hashrec/cluster.hpp"
#include "hashrec/error.hpp"
#include "hashrec/matcher.hpp"

namespace hashrec {

struct Candidate {
  std::string id;
  double similarity = 0.0;
};

struct Recommendation {
  std::string target;
  std::vector<Candidate> ranked;  // similarity descending, then id ascending
};

/// Index from profile id to cluster, built once for batch use.
class ClusterIndex {
 public:
  explicit ClusterIndex(Clustering&&) = delete;  // would dangle
  explicit ClusterIndex(const Clustering& c) : clustering_(&c), members_(c.k) {
    for (std::size_t i = 0; i < c.ids.size(); ++i) {
      cluster_of_.emplace(c.ids[i], c.assignment[i]);
      members_.at(c.assignment[i]).push_back(i);
    }
  }

  std::size_t cluster_of(std::string_view id) const {
    const auto it = cluster_of_.find(std::string(id));
    if (it == cluster_of_.end()) throw ReferenceError("profile '" + std::string(id) + "' is not in the clustering");
    return it->second;
  }

  const std::vector<std::size_t>& members(std::size_t cluster) const { return members_.at(cluster); }
  const Clustering& clustering() const noexcept { return *clustering_; }

 private:
  const Clustering* clustering_;
  std::unordered_map<std::string, std::size_t> cluster_of_;
  std::vector<std::vector<std::size_t>> members_;  // point indices into clustering ids
};

/// Most similar profiles sharing target's cluster, at most top_k of them.
inline Recommendation recommend(std::string_view target, const ClusterIndex& index, const SimilarityMatrix& m,
                                std::size_t top_k) {
  if (top_k == 0) throw InputError("top_k must be positive");
  const std::size_t t = m.index_of(target);
  const auto& ids = index.clustering().ids;
  Recommendation rec{std::string(target), {}};
  for (const std::size_t member : index.members(index.cluster_of(target))) {
    const std::string& id = ids[member];
    if (id == target) continue;
    rec.ranked.push_back(Candidate{id, static_cast<double>(m.at(t, m.index_of(id)))});
  }
  std::sort(rec.ranked.begin(), rec.ranked.end(), [](const Candidate& a, const Candidate& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.id < b.id;
  });
  if (rec.ranked.size() > top_k) rec.ranked.resize(top_k);
  return rec;
}

inline Recommendation recommend(std::string_view target, const Clustering& c, const SimilarityMatrix& m,
                                std::size_t top_k) {
  return recommend(target, ClusterIndex(c), m, top_k);
}

/// Recommendations TSV: `target<TAB>rank<TAB>candidate<TAB>sim`, rank starting at 1.
inline void write_recommendations(std::ostream& out, const Recommendation& rec) {
  for (std::size_t r = 0; r < rec.ranked.size(); ++r) {
    out << fmt::format("{}\t{}\t{}\t{:.6f}\n", rec.target, r + 1, rec.ranked[r].id, rec.ranked[r].similarity);
  }
}

}  // namespace hashrec
