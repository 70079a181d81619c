#pragma once

// External knowledge resources for segmentation: the word lexicon and the
// bigram frequency list.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <initializer_list>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "hashrec/error.hpp"
#include "hashrec/text.hpp"

namespace hashrec {

inline constexpr double kDefaultBigramFloor = 1e-9;

/// Hash usable for heterogeneous string_view lookups in unordered containers.
struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

/// Set of valid lowercase a-z words.
class Lexicon {
 public:
  Lexicon() = default;

  /// Throws InputError for any entry that is not lowercase a-z.
  Lexicon(std::initializer_list<std::string_view> words) {
    for (auto w : words) insert(w);
  }

  void insert(std::string_view word) {
    if (!text::is_lower_alpha(word)) throw InputError("lexicon word must match [a-z]+: '" + std::string(word) + "'");
    words_.emplace(word);
    if (word.size() > max_length_) max_length_ = word.size();
  }

  bool contains(std::string_view word) const { return words_.find(word) != words_.end(); }
  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }
  std::size_t max_word_length() const noexcept { return max_length_; }

 private:
  std::unordered_set<std::string, StringHash, std::equal_to<>> words_;
  std::size_t max_length_ = 0;
};

struct LexiconLoad {
  Lexicon lexicon;
  std::size_t skipped = 0;  // non-blank lines rejected for non-letter characters
};

inline LexiconLoad read_lexicon(std::istream& in, const std::string& source = "<lexicon>") {
  LexiconLoad result;
  text::for_each_line(in, [&](std::string_view line, std::size_t) {
    const auto word = text::trim(line);
    if (word.empty()) return;
    auto lower = text::to_lower_ascii(word);
    if (!text::is_lower_alpha(lower)) {
      ++result.skipped;
      return;
    }
    result.lexicon.insert(lower);
  });
  if (result.lexicon.empty()) throw EmptyResourceError(source + ": no valid words");
  return result;
}

inline LexiconLoad load_lexicon(const std::filesystem::path& path) {
  auto in = text::open_input(path);
  return read_lexicon(in, path.string());
}

/// Joint bigram probabilities: count(w1, w2) / total over all bigrams, with a
/// floor for pairs never seen.
class BigramModel {
 public:
  explicit BigramModel(double floor_prob = kDefaultBigramFloor) : floor_(floor_prob) {
    if (!(floor_prob >= 0.0 && floor_prob < 1.0))
      throw InputError("bigram floor must be in [0, 1), got " + std::to_string(floor_prob));
  }

  void add(std::string_view w1, std::string_view w2, std::uint64_t count) {
    counts_[key(w1, w2)] += count;
    total_ += count;
  }

  double probability(std::string_view w1, std::string_view w2) const {
    const auto it = counts_.find(key(w1, w2));
    if (it == counts_.end() || total_ == 0) return floor_;
    return static_cast<double>(it->second) / static_cast<double>(total_);
  }

  bool contains(std::string_view w1, std::string_view w2) const { return counts_.count(key(w1, w2)) != 0; }

  std::uint64_t count(std::string_view w1, std::string_view w2) const {
    const auto it = counts_.find(key(w1, w2));
    return it == counts_.end() ? 0 : it->second;
  }

  std::uint64_t total() const noexcept { return total_; }
  double floor_probability() const noexcept { return floor_; }
  std::size_t size() const noexcept { return counts_.size(); }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (const auto& [k, c] : counts_) {
      const auto sep = k.find(' ');
      fn(std::string_view(k).substr(0, sep), std::string_view(k).substr(sep + 1), c);
    }
  }

 private:
  // Words are letters-only, so a space is an unambiguous separator.
  static std::string key(std::string_view w1, std::string_view w2) {
    std::string k;
    k.reserve(w1.size() + w2.size() + 1);
    k.append(w1).push_back(' ');
    k.append(w2);
    return k;
  }

  std::unordered_map<std::string, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  double floor_;
};

/// Reads `w1<TAB>w2<TAB>count` rows; duplicate pairs are summed.
inline BigramModel read_bigrams(std::istream& in, double floor_prob = kDefaultBigramFloor,
                                const std::string& source = "<bigrams>") {
  BigramModel model(floor_prob);
  text::for_each_line(in, [&](std::string_view line, std::size_t number) {
    if (text::trim(line).empty()) return;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 3) throw ParseError(source, number, "expected w1<TAB>w2<TAB>count");
    const auto w1 = text::to_lower_ascii(text::trim(fields[0]));
    const auto w2 = text::to_lower_ascii(text::trim(fields[1]));
    if (w1.empty() || w2.empty()) throw ParseError(source, number, "empty word");
    const auto count = text::parse_uint(text::trim(fields[2]));
    if (!count || *count == 0) throw ParseError(source, number, "count must be a positive integer");
    model.add(w1, w2, *count);
  });
  if (model.total() == 0) throw EmptyResourceError(source + ": no bigrams");
  return model;
}

inline BigramModel load_bigrams(const std::filesystem::path& path, double floor_prob = kDefaultBigramFloor) {
  auto in = text::open_input(path);
  return read_bigrams(in, floor_prob, path.string());
}

}  // namespace hashrec
