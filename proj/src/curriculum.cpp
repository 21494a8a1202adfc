#include "gistline/content.hpp"
#include "gistline/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <set>

namespace gistline::content {

Curriculum compose_curriculum(std::span<const Topic> topics, std::uint64_t seed) {
  const std::size_t slots = kSessions * kTopicsPerSession;
  if (topics.size() != slots) {
    throw PreconditionError("curriculum needs exactly " + std::to_string(slots) + " topics, got " +
                            std::to_string(topics.size()));
  }
  std::set<std::string> ids;
  for (const auto& t : topics) {
    if (!ids.insert(t.id).second) throw PreconditionError("duplicate topic id '" + t.id + "'");
  }

  std::vector<const Topic*> order;
  for (const auto& t : topics) order.push_back(&t);
  seeded_shuffle(order, seed);
  std::stable_sort(order.begin(), order.end(),
                   [](const Topic* a, const Topic* b) { return a->tier < b->tier; });

  Curriculum c;
  c.seed = seed;
  c.sessions.resize(kSessions);
  for (std::size_t i = 0; i < slots; ++i) {
    c.sessions[i / kTopicsPerSession][i % kTopicsPerSession] = order[i]->id;
  }
  return c;
}

std::vector<double> session_means(const Curriculum& curriculum, std::span<const Topic> topics) {
  std::vector<double> means;
  for (const auto& session : curriculum.sessions) {
    double sum = 0.0;
    for (const auto& id : session) {
      auto it = std::find_if(topics.begin(), topics.end(), [&](const Topic& t) { return t.id == id; });
      if (it == topics.end()) throw PreconditionError("unknown topic '" + id + "'");
      sum += static_cast<double>(static_cast<int>(it->tier));
    }
    means.push_back(sum / static_cast<double>(session.size()));
  }
  return means;
}

std::string curriculum_to_json(const Curriculum& curriculum, std::span<const Topic> topics) {
  const auto means = session_means(curriculum, topics);
  nlohmann::json doc;
  doc["seed"] = curriculum.seed;
  doc["sessions"] = nlohmann::json::array();
  for (std::size_t s = 0; s < curriculum.sessions.size(); ++s) {
    nlohmann::json session;
    session["index"] = s + 1;
    session["mean_intensity"] = means[s];
    session["topics"] = nlohmann::json::array();
    for (const auto& id : curriculum.sessions[s]) {
      auto it = std::find_if(topics.begin(), topics.end(), [&](const Topic& t) { return t.id == id; });
      session["topics"].push_back({{"id", id},
                                   {"title", it->title},
                                   {"tier", static_cast<int>(it->tier)},
                                   {"intensity", schema::intensity_name(it->tier)}});
    }
    doc["sessions"].push_back(std::move(session));
  }
  return doc.dump(2) + "\n";
}

}  // namespace gistline::content
