#pragma once

// Topic packs (trees, schemas, lexicons, advice, persona) and the
// ten-session curriculum.

#include "gistline/feedback.hpp"
#include "gistline/schema.hpp"
#include "gistline/transduction.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace gistline::content {

using schema::Intensity;

struct Topic {
  std::string id;
  std::string title;
  Intensity tier = Intensity::Easy;
  std::string schema;

  bool operator==(const Topic&) const = default;
};

struct Persona {
  std::vector<std::string> facts;
  std::vector<std::string> closings;
  std::string redirect = "That is interesting. Let us get back to what we were talking about.";

  bool operator==(const Persona&) const = default;
};

struct ContentPack {
  transduction::TreeSet trees;
  std::map<std::string, schema::DialogueSchema, std::less<>> schemas;
  transduction::FeatureLexicon lexicon;
  std::vector<Topic> topics;
  feedback::ValenceLexicon valence;
  feedback::AdviceTemplates advice;
  Persona persona;

  const Topic* find_topic(std::string_view id) const;
  const schema::DialogueSchema* find_schema(std::string_view name) const;

  /// Gist and reaction trees the topic's schema uses.
  std::vector<std::string> topic_trees(const Topic& topic) const;

  bool operator==(const ContentPack&) const = default;
};

/// Layout: topics.txt, trees/*.tree, schemas/*.schema, lexicon.txt, and
/// optionally valence.txt, advice.txt, persona.txt. Throws ContentError with
/// file:line on syntax errors and on duplicate names.
ContentPack load_pack(const std::filesystem::path& dir);

/// Writes a pack that load_pack reads back identically.
void write_pack(const ContentPack& pack, const std::filesystem::path& dir);

/// Cross-reference and structure violations; empty means valid.
std::vector<std::string> validate(const ContentPack& pack);

inline constexpr std::size_t kSessions = 10;
inline constexpr std::size_t kTopicsPerSession = 3;

struct Curriculum {
  std::uint64_t seed = 0;
  std::vector<std::array<std::string, kTopicsPerSession>> sessions;

  bool operator==(const Curriculum&) const = default;
};

/// Seeded shuffle within tiers, then tiers in ascending order, three topics
/// per session. With 9/15/6 topics this puts the easy tier in sessions 1-3,
/// medium in 4-8 and hard in 9-10; for other tier mixes the per-session mean
/// is still nondecreasing. Throws PreconditionError unless there are exactly
/// 30 distinct topics.
Curriculum compose_curriculum(std::span<const Topic> topics, std::uint64_t seed);

std::vector<double> session_means(const Curriculum& curriculum, std::span<const Topic> topics);

std::string curriculum_to_json(const Curriculum& curriculum, std::span<const Topic> topics);

/// Deterministic Fisher-Yates driven by mt19937_64, identical on every
/// standard library.
template <typename T>
void seeded_shuffle(std::vector<T>& items, std::uint64_t seed);

}  // namespace gistline::content

#include <random>

template <typename T>
void gistline::content::seeded_shuffle(std::vector<T>& items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}
