#pragma once

// Hashtag segmentation: lexical enumeration of every dictionary-word split,
// then bigram path scoring to pick the most probable one.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hashrec/corpus.hpp"
#include "hashrec/error.hpp"
#include "hashrec/text.hpp"

namespace hashrec {

inline constexpr std::size_t kDefaultMaxCandidates = 256;

struct Hashtag {
  std::string raw;
  std::string normalized;  // [a-z]+, leading '#' stripped

  /// Strips one leading '#' and lowercases. Returns nullopt when the body is
  /// empty or holds anything but ASCII letters (digits, '_', non-ASCII).
  static std::optional<Hashtag> try_parse(std::string_view raw) {
    std::string_view body = text::trim(raw);
    if (!body.empty() && body.front() == '#') body.remove_prefix(1);
    auto normalized = text::to_lower_ascii(body);
    if (!text::is_lower_alpha(normalized)) return std::nullopt;
    return Hashtag{std::string(raw), std::move(normalized)};
  }

  static Hashtag parse(std::string_view raw) {
    auto h = try_parse(raw);
    if (!h) throw InputError("invalid hashtag '" + std::string(raw) + "': body must be ASCII letters only");
    return *std::move(h);
  }
};

struct Segmentation {
  std::vector<std::string> tokens;
  double log_score = 0.0;  // sum of ln P(bigram) along the path

  friend bool operator==(const Segmentation&, const Segmentation&) = default;
};

struct Enumeration {
  std::vector<Segmentation> candidates;  // fewest tokens first, then lexicographic
  bool truncated = false;
};

/// Every split of h into lexicon words, up to max_candidates of them.
inline Enumeration enumerate_segmentations(const Hashtag& h, const Lexicon& lex,
                                           std::size_t max_candidates = kDefaultMaxCandidates) {
  const std::string& s = h.normalized;
  const std::size_t n = s.size();
  const std::size_t max_len = lex.max_word_length();
  constexpr auto kSat = std::numeric_limits<std::uint64_t>::max();

  // word_ends[i]: every j > i such that s[i, j) is a word, ascending.
  std::vector<std::vector<std::size_t>> word_ends(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j <= n && j - i <= max_len; ++j) {
      if (lex.contains(std::string_view(s).substr(i, j - i))) word_ends[i].push_back(j);
    }
  }

  // paths[i][t]: number of splits of s[i, n) into exactly t words (saturating).
  std::vector<std::vector<std::uint64_t>> paths(n + 1, std::vector<std::uint64_t>(n + 1, 0));
  paths[n][0] = 1;
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j : word_ends[i]) {
      for (std::size_t t = 1; t <= n - i; ++t) {
        const auto add = paths[j][t - 1];
        auto& cell = paths[i][t];
        cell = (kSat - cell < add) ? kSat : cell + add;
      }
    }
  }

  std::uint64_t total = 0;
  for (std::size_t t = 1; t <= n; ++t) total = (kSat - total < paths[0][t]) ? kSat : total + paths[0][t];

  Enumeration out;
  out.truncated = total > max_candidates;
  std::vector<std::string> current;

  // Shorter words first at each position yields lexicographic token order,
  // since all words starting at one position are prefixes of each other.
  auto walk = [&](auto&& self, std::size_t pos, std::size_t remaining) -> void {
    if (out.candidates.size() >= max_candidates) return;
    if (remaining == 0) {
      out.candidates.push_back(Segmentation{current, 0.0});
      return;
    }
    for (std::size_t j : word_ends[pos]) {
      if (paths[j][remaining - 1] == 0) continue;
      current.emplace_back(s.substr(pos, j - pos));
      self(self, j, remaining - 1);
      current.pop_back();
      if (out.candidates.size() >= max_candidates) return;
    }
  };
  for (std::size_t t = 1; t <= n && out.candidates.size() < max_candidates; ++t) {
    if (paths[0][t] > 0) walk(walk, 0, t);
  }
  return out;
}

/// Log-probability of a token path; 0 for a single token. A zero-probability
/// bigram (floor 0) yields -infinity.
inline double score_segmentation(std::span<const std::string> tokens, const BigramModel& bm) {
  double score = 0.0;
  for (std::size_t i = 1; i < tokens.size(); ++i) score += std::log(bm.probability(tokens[i - 1], tokens[i]));
  return score;
}

enum class SegmentStatus { exact_word, disambiguated, unique, unsegmentable };

inline std::string_view to_string(SegmentStatus s) {
  switch (s) {
    case SegmentStatus::exact_word: return "exact_word";
    case SegmentStatus::disambiguated: return "disambiguated";
    case SegmentStatus::unique: return "unique";
    case SegmentStatus::unsegmentable: return "unsegmentable";
  }
  return "unknown";
}

struct SegmentResult {
  std::vector<std::string> tokens;
  SegmentStatus status = SegmentStatus::unsegmentable;
  double log_score = 0.0;
  std::size_t candidates = 0;  // scoreable candidates considered
  bool truncated = false;
};

struct SegmenterOptions {
  std::size_t max_candidates = kDefaultMaxCandidates;
};

inline SegmentResult segment(const Hashtag& h, const Lexicon& lex, const BigramModel& bm,
                             const SegmenterOptions& opts = {}) {
  SegmentResult result;
  if (lex.contains(h.normalized)) {
    result.tokens = {h.normalized};
    result.status = SegmentStatus::exact_word;
    result.candidates = 1;
    return result;
  }

  auto enumeration = enumerate_segmentations(h, lex, opts.max_candidates);
  result.truncated = enumeration.truncated;

  std::vector<Segmentation> viable;
  viable.reserve(enumeration.candidates.size());
  for (auto& c : enumeration.candidates) {
    c.log_score = score_segmentation(c.tokens, bm);
    if (c.log_score != -std::numeric_limits<double>::infinity()) viable.push_back(std::move(c));
  }
  result.candidates = viable.size();
  if (viable.empty()) return result;

  // Candidates arrive ordered by (token count, lexicographic), so keeping the
  // first strict maximum implements the tie-break.
  const Segmentation* best = &viable.front();
  for (const auto& c : viable) {
    if (c.log_score > best->log_score) best = &c;
  }
  result.tokens = best->tokens;
  result.log_score = best->log_score;
  result.status = viable.size() == 1 ? SegmentStatus::unique : SegmentStatus::disambiguated;
  return result;
}

/// Throws InputError when raw does not normalize to a valid hashtag.
inline SegmentResult segment(std::string_view raw, const Lexicon& lex, const BigramModel& bm,
                             const SegmenterOptions& opts = {}) {
  return segment(Hashtag::parse(raw), lex, bm, opts);
}

// Evaluation against a golden set.

struct GoldenItem {
  std::string hashtag;
  std::vector<std::string> expected;
};

struct EvaluationFailure {
  std::string hashtag;
  std::vector<std::string> expected;
  std::vector<std::string> produced;
  std::optional<SegmentStatus> status;  // nullopt: hashtag failed normalization
  bool lexicon_miss = false;            // some expected token is not a lexicon word
  bool unseen_bigram = false;           // some expected adjacent pair is absent from the bigram list
};

struct EvaluationReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  double success_rate = 0.0;
  std::vector<EvaluationFailure> failures;
};

inline EvaluationReport evaluate_segmenter(std::span<const GoldenItem> golden, const Lexicon& lex,
                                           const BigramModel& bm, const SegmenterOptions& opts = {}) {
  if (golden.empty()) throw InputError("golden set is empty");
  EvaluationReport report;
  report.total = golden.size();
  for (const auto& item : golden) {
    EvaluationFailure failure{item.hashtag, item.expected, {}, std::nullopt, false, false};
    if (auto h = Hashtag::try_parse(item.hashtag)) {
      auto result = segment(*h, lex, bm, opts);
      if (result.tokens == item.expected) {
        ++report.correct;
        continue;
      }
      failure.produced = std::move(result.tokens);
      failure.status = result.status;
    }
    failure.lexicon_miss = std::any_of(item.expected.begin(), item.expected.end(),
                                       [&](const std::string& w) { return !lex.contains(w); });
    for (std::size_t i = 1; i < item.expected.size(); ++i) {
      if (!bm.contains(item.expected[i - 1], item.expected[i])) failure.unseen_bigram = true;
    }
    report.failures.push_back(std::move(failure));
  }
  report.success_rate = static_cast<double>(report.correct) / static_cast<double>(report.total);
  return report;
}

/// Golden TSV: `hashtag<TAB>expected tokens`, tokens space-separated.
inline std::vector<GoldenItem> read_golden(std::istream& in, const std::string& source = "<golden>") {
  std::vector<GoldenItem> items;
  text::for_each_line(in, [&](std::string_view line, std::size_t number) {
    if (text::trim(line).empty()) return;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 2) throw ParseError(source, number, "expected hashtag<TAB>expected tokens");
    GoldenItem item{std::string(text::trim(fields[0])), {}};
    for (auto tok : text::split(text::trim(fields[1]), ' ')) {
      if (!tok.empty()) item.expected.push_back(text::to_lower_ascii(tok));
    }
    items.push_back(std::move(item));
  });
  return items;
}

inline std::vector<GoldenItem> load_golden(const std::filesystem::path& path) {
  auto in = text::open_input(path);
  return read_golden(in, path.string());
}

}  // namespace hashrec
