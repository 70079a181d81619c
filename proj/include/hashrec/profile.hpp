#pragma once

// Hashtag-derived user profiles: ingest users, segment their hashtags and
// keep the set of resulting words.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "hashrec/corpus.hpp"
#include "hashrec/error.hpp"
#include "hashrec/segmenter.hpp"
#include "hashrec/text.hpp"

namespace hashrec {

struct UserHashtags {
  std::string id;
  std::vector<std::string> hashtags;
};

struct Profile {
  std::string id;
  std::vector<std::string> hashtags;
  std::vector<std::string> words;  // sorted, unique
  std::size_t unsegmentable = 0;   // hashtags with no dictionary split
  std::size_t invalid = 0;         // hashtags rejected by normalization
};

/// Users TSV: `id<TAB>tag1,tag2,...`. Repeated ids are merged in first-seen order.
inline std::vector<UserHashtags> read_users(std::istream& in, const std::string& source = "<users>") {
  std::vector<UserHashtags> users;
  std::unordered_map<std::string, std::size_t> position;
  text::for_each_line(in, [&](std::string_view line, std::size_t number) {
    if (text::trim(line).empty()) return;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 2) throw ParseError(source, number, "expected id<TAB>tag1,tag2,...");
    const std::string id(text::trim(fields[0]));
    if (id.empty()) throw ParseError(source, number, "empty user id");
    auto [it, inserted] = position.emplace(id, users.size());
    if (inserted) users.push_back(UserHashtags{id, {}});
    auto& tags = users[it->second].hashtags;
    for (auto tag : text::split(fields[1], ',')) {
      tag = text::trim(tag);
      if (!tag.empty()) tags.emplace_back(tag);
    }
  });
  return users;
}

inline std::vector<UserHashtags> ingest_profiles(const std::filesystem::path& path) {
  auto in = text::open_input(path);
  return read_users(in, path.string());
}

namespace detail {

inline void add_segmentation(Profile& p, const std::optional<SegmentResult>& seg) {
  if (!seg) {
    ++p.invalid;
  } else if (seg->status == SegmentStatus::unsegmentable) {
    ++p.unsegmentable;
  } else {
    p.words.insert(p.words.end(), seg->tokens.begin(), seg->tokens.end());
  }
}

inline void finish_words(Profile& p) {
  std::sort(p.words.begin(), p.words.end());
  p.words.erase(std::unique(p.words.begin(), p.words.end()), p.words.end());
}

}  // namespace detail

inline Profile build_profile(std::string id, std::vector<std::string> hashtags, const Lexicon& lex,
                             const BigramModel& bm, const SegmenterOptions& opts = {}) {
  Profile p{std::move(id), std::move(hashtags), {}, 0, 0};
  for (const auto& raw : p.hashtags) {
    std::optional<SegmentResult> seg;
    if (auto h = Hashtag::try_parse(raw)) seg = segment(*h, lex, bm, opts);
    detail::add_segmentation(p, seg);
  }
  detail::finish_words(p);
  return p;
}

/// Builds every profile, segmenting each distinct hashtag once across `workers` threads.
inline std::vector<Profile> build_profiles(std::span<const UserHashtags> users, const Lexicon& lex,
                                           const BigramModel& bm, const SegmenterOptions& opts = {},
                                           std::size_t workers = 1) {
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<std::string> distinct;
  for (const auto& u : users) {
    for (const auto& tag : u.hashtags) {
      auto h = Hashtag::try_parse(tag);
      if (h && slot.emplace(h->normalized, distinct.size()).second) distinct.push_back(h->normalized);
    }
  }

  std::vector<SegmentResult> segments(distinct.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < distinct.size(); i = next++) {
      segments[i] = segment(Hashtag{distinct[i], distinct[i]}, lex, bm, opts);
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < std::max<std::size_t>(workers, 1); ++w) pool.emplace_back(work);
    work();
  }

  std::vector<Profile> profiles;
  profiles.reserve(users.size());
  for (const auto& u : users) {
    Profile p{u.id, u.hashtags, {}, 0, 0};
    for (const auto& tag : u.hashtags) {
      std::optional<SegmentResult> seg;
      if (auto h = Hashtag::try_parse(tag)) seg = segments[slot.at(h->normalized)];
      detail::add_segmentation(p, seg);
    }
    detail::finish_words(p);
    profiles.push_back(std::move(p));
  }
  return profiles;
}

/// Profiles TSV: `id<TAB>word1 word2 ...`, words sorted.
inline void write_profiles(std::ostream& out, std::span<const Profile> profiles) {
  for (const auto& p : profiles) out << p.id << '\t' << text::join(p.words, " ") << '\n';
}

inline std::vector<Profile> read_profiles(std::istream& in, const std::string& source = "<profiles>") {
  std::vector<Profile> out;
  text::for_each_line(in, [&](std::string_view line, std::size_t number) {
    if (text::trim(line).empty()) return;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 2) throw ParseError(source, number, "expected id<TAB>word1 word2 ...");
    Profile p;
    p.id = std::string(text::trim(fields[0]));
    if (p.id.empty()) throw ParseError(source, number, "empty profile id");
    for (auto w : text::split(text::trim(fields[1]), ' ')) {
      if (!w.empty()) p.words.emplace_back(w);
    }
    detail::finish_words(p);
    out.push_back(std::move(p));
  });
  return out;
}

inline std::vector<Profile> load_profiles(const std::filesystem::path& path) {
  auto in = text::open_input(path);
  return read_profiles(in, path.string());
}

}  // namespace hashrec
