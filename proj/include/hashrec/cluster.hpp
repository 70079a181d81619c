#pragma once

// k-medoids over distance 1 - similarity: alternating nearest-medoid
// assignment with in-cluster medoid re-selection, followed by swap moves
// (one medoid exchanged for one non-medoid) whenever the alternation stalls.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <iterator>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hashrec/error.hpp"
#include "hashrec/matcher.hpp"
#include "hashrec/text.hpp"

namespace hashrec {

enum class MedoidInit {
  uniform,    // k distinct points uniformly at random
  plus_plus,  // first point uniform, then each next with probability proportional to squared distance
};

inline std::string_view to_string(MedoidInit init) {
  return init == MedoidInit::uniform ? "uniform" : "plus_plus";
}

inline MedoidInit parse_medoid_init(std::string_view s) {
  if (s == "uniform") return MedoidInit::uniform;
  if (s == "plus_plus" || s == "plusplus" || s == "k-medoids++") return MedoidInit::plus_plus;
  throw InputError("unknown medoid init '" + std::string(s) + "' (expected uniform or plus_plus)");
}

struct KMedoidsOptions {
  std::size_t k = 30;
  std::uint64_t seed = 42;
  std::size_t max_iter = 100;
  MedoidInit init = MedoidInit::uniform;
  bool swap = true;  // try medoid/non-medoid swaps once the alternation stalls
};

struct Clustering {
  std::vector<std::string> ids;       // point order of the source matrix
  std::size_t k = 0;
  std::vector<std::size_t> medoids;   // point index of each cluster's medoid
  std::vector<std::size_t> assignment;  // cluster index of each point
  double cost = 0.0;                  // sum of distances to the assigned medoid
  std::vector<double> cost_trace;     // cost after each assignment step
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  bool converged = false;

  const std::string& medoid_id(std::size_t cluster) const { return ids.at(medoids.at(cluster)); }
};

namespace detail {

// Distances are summed in fixed point so cost comparisons are exact and the
// trace is monotone regardless of summation order.
inline constexpr double kDistanceScale = 4294967296.0;  // 2^32

inline std::int64_t distance_units(const SimilarityMatrix& m, std::size_t i, std::size_t j) {
  return std::llround((1.0 - static_cast<double>(m.at(i, j))) * kDistanceScale);
}

inline double from_units(std::int64_t units) { return static_cast<double>(units) / kDistanceScale; }

/// Medoids keep their own cluster; every other point goes to the nearest
/// medoid, ties to the lowest cluster index. Returns the total cost in units.
inline std::int64_t assign(const SimilarityMatrix& m, const std::vector<std::size_t>& medoids,
                           std::vector<std::size_t>& assignment) {
  const std::size_t n = m.size();
  std::vector<std::ptrdiff_t> medoid_cluster(n, -1);
  for (std::size_t c = 0; c < medoids.size(); ++c) medoid_cluster[medoids[c]] = static_cast<std::ptrdiff_t>(c);
  std::int64_t cost = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (medoid_cluster[i] >= 0) {
      assignment[i] = static_cast<std::size_t>(medoid_cluster[i]);
      continue;
    }
    std::size_t best = 0;
    std::int64_t best_d = distance_units(m, i, medoids[0]);
    for (std::size_t c = 1; c < medoids.size(); ++c) {
      const auto d = distance_units(m, i, medoids[c]);
      if (d < best_d) {
        best = c;
        best_d = d;
      }
    }
    assignment[i] = best;
    cost += best_d;
  }
  return cost;
}

inline std::vector<std::size_t> initial_medoids(const SimilarityMatrix& m, std::size_t k, MedoidInit init,
                                                std::mt19937_64& rng) {
  const std::size_t n = m.size();
  std::vector<std::size_t> medoids;
  if (init == MedoidInit::uniform) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::sample(all.begin(), all.end(), std::back_inserter(medoids), k, rng);
    std::shuffle(medoids.begin(), medoids.end(), rng);
    return medoids;
  }

  std::vector<bool> chosen(n, false);
  std::vector<double> nearest(n, 0.0);
  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  medoids.push_back(first(rng));
  chosen[medoids[0]] = true;
  for (std::size_t i = 0; i < n; ++i) nearest[i] = 1.0 - m.at(i, medoids[0]);
  while (medoids.size() < k) {
    std::vector<double> weights(n, 0.0);
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!chosen[i]) weights[i] = nearest[i] * nearest[i];
      mass += weights[i];
    }
    if (mass <= 0.0) {
      // Remaining points coincide with medoids: fall back to a uniform pick.
      for (std::size_t i = 0; i < n; ++i) weights[i] = chosen[i] ? 0.0 : 1.0;
    }
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    const std::size_t next = pick(rng);
    medoids.push_back(next);
    chosen[next] = true;
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], 1.0 - static_cast<double>(m.at(i, next)));
  }
  return medoids;
}

struct Swap {
  std::size_t cluster = 0;  // medoid slot to replace
  std::size_t point = 0;    // non-medoid taking its place
  std::int64_t delta = 0;   // change in total cost
};

/// Best single swap by total-cost change, ties to the lowest cluster then the
/// lowest point; nullopt when no swap lowers the cost. O(N^2 + N k) per call:
/// for each candidate the change of every medoid slot is accumulated in one
/// pass using each point's nearest and second-nearest medoid distances.
inline std::optional<Swap> best_swap(const SimilarityMatrix& m, const std::vector<std::size_t>& medoids) {
  const std::size_t n = m.size();
  const std::size_t k = medoids.size();
  constexpr auto kFar = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<bool> is_medoid(n, false);
  for (const auto med : medoids) is_medoid[med] = true;

  std::vector<std::size_t> nearest(n, 0);
  std::vector<std::int64_t> d_near(n, kFar), d_second(n, kFar);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t c = 0; c < k; ++c) {
      const auto d = medoids[c] == j ? 0 : distance_units(m, j, medoids[c]);
      if (d < d_near[j]) {
        d_second[j] = d_near[j];
        d_near[j] = d;
        nearest[j] = c;
      } else if (d < d_second[j]) {
        d_second[j] = d;
      }
    }
  }

  std::optional<Swap> best;
  std::vector<std::int64_t> delta(k);
  for (std::size_t h = 0; h < n; ++h) {
    if (is_medoid[h]) continue;
    std::fill(delta.begin(), delta.end(), 0);
    std::int64_t shared = 0;  // points that move to h whichever medoid leaves
    for (std::size_t j = 0; j < n; ++j) {
      const auto d = j == h ? 0 : distance_units(m, j, h);
      if (d < d_near[j]) {
        shared += d - d_near[j];
      } else {
        delta[nearest[j]] += std::min(d, d_second[j]) - d_near[j];
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      const auto total = shared + delta[c];
      if (total < 0 && (!best || total < best->delta || (total == best->delta && c < best->cluster)))
        best = Swap{c, h, total};
    }
  }
  return best;
}

}  // namespace detail

/// Partitions the matrix points into k clusters. Deterministic for a given
/// (matrix, options) pair.
inline Clustering k_medoids(const SimilarityMatrix& m, const KMedoidsOptions& opts) {
  const std::size_t n = m.size();
  if (opts.k < 1 || opts.k > n)
    throw InputError("k must be in [1, " + std::to_string(n) + "], got " + std::to_string(opts.k));
  if (opts.max_iter < 1) throw InputError("max_iter must be positive");

  Clustering c;
  c.ids = m.ids();
  c.k = opts.k;
  c.seed = opts.seed;
  c.assignment.assign(n, 0);

  std::mt19937_64 rng(opts.seed);
  c.medoids = detail::initial_medoids(m, opts.k, opts.init, rng);

  std::vector<std::vector<std::size_t>> members(opts.k);
  std::int64_t cost = 0;
  while (true) {
    cost = detail::assign(m, c.medoids, c.assignment);
    c.cost_trace.push_back(detail::from_units(cost));
    if (c.converged || c.iterations == opts.max_iter) break;
    ++c.iterations;

    for (auto& list : members) list.clear();
    for (std::size_t i = 0; i < n; ++i) members[c.assignment[i]].push_back(i);

    bool changed = false;
    for (std::size_t cl = 0; cl < opts.k; ++cl) {
      const auto& list = members[cl];
      auto total_from = [&](std::size_t candidate) {
        std::int64_t t = 0;
        for (const std::size_t j : list) t += (j == candidate) ? 0 : detail::distance_units(m, candidate, j);
        return t;
      };
      // Move only on strict improvement; among equal improvements the lowest index wins.
      std::size_t best = c.medoids[cl];
      std::int64_t best_total = total_from(best);
      for (const std::size_t candidate : list) {
        const auto t = total_from(candidate);
        if (t < best_total) {
          best = candidate;
          best_total = t;
        }
      }
      if (best != c.medoids[cl]) {
        c.medoids[cl] = best;
        changed = true;
      }
    }
    if (!changed && opts.swap) {
      if (const auto sw = detail::best_swap(m, c.medoids)) {
        c.medoids[sw->cluster] = sw->point;
        changed = true;
      }
    }
    if (!changed) c.converged = true;
  }
  c.cost = detail::from_units(cost);
  return c;
}

/// (cluster index, size) for every cluster, in index order.
inline std::vector<std::pair<std::size_t, std::size_t>> cluster_histogram(const Clustering& c) {
  std::vector<std::pair<std::size_t, std::size_t>> out(c.k);
  for (std::size_t i = 0; i < c.k; ++i) out[i].first = i;
  for (const std::size_t a : c.assignment) ++out.at(a).second;
  return out;
}

/// Clusters TSV: `profile_id<TAB>cluster_index<TAB>medoid_id`.
inline void write_clusters(std::ostream& out, const Clustering& c) {
  for (std::size_t i = 0; i < c.ids.size(); ++i) {
    out << c.ids[i] << '\t' << c.assignment[i] << '\t' << c.medoid_id(c.assignment[i]) << '\n';
  }
}

/// Reads a clusters TSV back. Cost, trace and iteration fields are left empty.
inline Clustering read_clusters(std::istream& in, const std::string& source = "<clusters>") {
  Clustering c;
  std::vector<std::string> medoid_ids;
  std::unordered_map<std::string, std::size_t> index;
  text::for_each_line(in, [&](std::string_view line, std::size_t number) {
    if (text::trim(line).empty()) return;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 3) throw ParseError(source, number, "expected profile_id<TAB>cluster_index<TAB>medoid_id");
    const auto cluster = text::parse_uint(text::trim(fields[1]));
    if (!cluster) throw ParseError(source, number, "cluster index must be a non-negative integer");
    std::string id(text::trim(fields[0]));
    if (!index.emplace(id, c.ids.size()).second) throw ParseError(source, number, "duplicate profile id '" + id + "'");
    c.ids.push_back(std::move(id));
    c.assignment.push_back(static_cast<std::size_t>(*cluster));
    if (*cluster >= medoid_ids.size()) medoid_ids.resize(static_cast<std::size_t>(*cluster) + 1);
    auto& medoid = medoid_ids[static_cast<std::size_t>(*cluster)];
    const std::string_view m = text::trim(fields[2]);
    if (medoid.empty()) {
      medoid = std::string(m);
    } else if (medoid != m) {
      throw ParseError(source, number, "cluster " + std::to_string(*cluster) + " has two medoids");
    }
  });
  if (c.ids.empty()) throw EmptyResourceError(source + ": no cluster rows");
  c.k = medoid_ids.size();
  for (std::size_t cl = 0; cl < c.k; ++cl) {
    if (medoid_ids[cl].empty()) throw InputError(source + ": cluster " + std::to_string(cl) + " is empty");
    const auto it = index.find(medoid_ids[cl]);
    if (it == index.end()) throw ReferenceError(source + ": medoid '" + medoid_ids[cl] + "' is not a profile");
    if (c.assignment[it->second] != cl)
      throw InputError(source + ": medoid '" + medoid_ids[cl] + "' is not in its own cluster");
    c.medoids.push_back(it->second);
  }
  c.converged = true;
  return c;
}

inline Clustering load_clusters(const std::filesystem::path& path) {
  auto in = text::open_input(path);
  return read_clusters(in, path.string());
}

}  // namespace hashrec
