#pragma once

// Hand-rolled random inputs for property tests.

#include <algorithm>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hashrec/taxonomy.hpp"

namespace hashrec::testing {

/// Random symmetric word similarity over single-letter words 'a', 'b', ...;
/// half the values sit on a quarter grid so ties are common.
struct RandomWordSim {
  std::vector<std::vector<double>> table;

  static RandomWordSim make(std::size_t vocab, std::mt19937_64& rng) {
    RandomWordSim sw{std::vector<std::vector<double>>(vocab, std::vector<double>(vocab, 1.0))};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < vocab; ++i) {
      for (std::size_t j = i + 1; j < vocab; ++j) {
        const double v = u(rng) < 0.5 ? static_cast<double>(rng() % 5) / 4.0 : u(rng);
        sw.table[i][j] = sw.table[j][i] = v;
      }
    }
    return sw;
  }

  double operator()(std::string_view a, std::string_view b) const { return table[index(a)][index(b)]; }
  static std::size_t index(std::string_view w) { return static_cast<std::size_t>(w[0] - 'a'); }
};

/// Sorted distinct words from the first `vocab` letters, 0..max_size of them.
inline std::vector<std::string> random_words(std::size_t vocab, std::size_t max_size, std::mt19937_64& rng) {
  std::vector<std::string> all;
  for (std::size_t i = 0; i < vocab; ++i) all.emplace_back(1, static_cast<char>('a' + i));
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(rng() % (max_size + 1));
  std::sort(all.begin(), all.end());
  return all;
}

template <class WordSim>
std::vector<std::vector<double>> materialize(const std::vector<std::string>& rows, const std::vector<std::string>& cols,
                                             const WordSim& sw) {
  std::vector<std::vector<double>> m(rows.size(), std::vector<double>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) m[r][c] = sw(rows[r], cols[c]);
  }
  return m;
}

struct RandomDag {
  std::vector<Synset> synsets;
  std::vector<Taxonomy::Edge> edges;
  std::vector<std::pair<std::size_t, std::size_t>> index_edges;  // (child, parent)
  std::unordered_map<std::string, double> counts;
  std::vector<double> own;
};

/// 1..max_nodes synsets with integer own counts (zeros included) and edges
/// only from higher to lower index, so the graph is acyclic. Each synset
/// holds one word from "wa".."wh".
inline RandomDag random_dag(std::mt19937_64& rng, std::size_t max_nodes = 20) {
  RandomDag d;
  const std::size_t n = 1 + rng() % max_nodes;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    d.synsets.push_back({"s" + std::to_string(i), "n", {"w" + std::string(1, static_cast<char>('a' + rng() % 8))}});
    d.own.push_back(static_cast<double>(rng() % 10));
  }
  d.own[0] += 1.0;  // keeps the total positive
  for (std::size_t i = 0; i < n; ++i) d.counts["s" + std::to_string(i)] = d.own[i];
  for (std::size_t child = 1; child < n; ++child) {
    for (std::size_t parent = 0; parent < child; ++parent) {
      if (coin(rng) < 0.2) {
        d.edges.emplace_back("s" + std::to_string(child), "s" + std::to_string(parent));
        d.index_edges.emplace_back(child, parent);
      }
    }
  }
  return d;
}

}  // namespace hashrec::testing
