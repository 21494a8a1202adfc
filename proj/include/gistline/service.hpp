#pragma once

// Multi-user, multi-session host for the dialogue engine. Every user has an
// append-only event log; the in-memory state is always what replaying that
// log produces.

#include "gistline/content.hpp"
#include "gistline/dialogue.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace gistline::service {

/// Environment variable that overrides the store directory.
inline constexpr const char* kStoreEnv = "GISTLINE_STORE";

struct UserRecord {
  std::string id;
  std::string name;
  std::uint64_t seed = 0;  // curriculum seed
  int sessions_completed = 0;
  std::vector<std::uint64_t> session_seeds;

  /// sessions_completed + 1, or nullopt once all ten are done.
  std::optional<int> next_session() const;
};

struct Progress {
  std::string user_id;
  int sessions_completed = 0;
  std::optional<int> next_session;
  std::vector<content::Topic> next_topics;
};

struct SessionStart {
  std::string session_id;
  int session_index = 0;
  dialogue::AgentOutput output;
  bool resumed = false;
};

struct ServiceOptions {
  /// Fixes user seeds; unset draws them from std::random_device.
  std::optional<std::uint64_t> base_seed;
  /// ISO-8601 timestamp source; defaults to the UTC wall clock.
  std::function<std::string()> clock;
  /// Runs after a user turn is durably logged and before it is processed.
  std::function<void(const std::string& session_id)> after_turn_logged;
};

std::string iso_now();

class Service {
 public:
  /// Replays every log in `store`. A turn that was logged but never answered
  /// is answered now and its output appended.
  Service(const content::ContentPack& pack, std::filesystem::path store, ServiceOptions options = {});
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// PreconditionError for an empty name.
  std::string create_user(const std::string& name);

  /// Opens the user's next session, or returns the open one with its most
  /// recent output. PreconditionError once all ten sessions are done.
  SessionStart open_session(const std::string& user_id);

  /// NotFoundError for an unknown session, SessionOverError after it ended.
  dialogue::AgentOutput post_turn(const std::string& session_id, const std::string& text,
                                  const std::map<std::string, double>& channels = {});

  /// Transcript exchange format.
  std::string transcript(const std::string& session_id) const;

  std::optional<dialogue::AgentOutput> last_output(const std::string& session_id) const;
  bool session_over(const std::string& session_id) const;

  Progress progress(const std::string& user_id) const;
  UserRecord user(const std::string& user_id) const;
  content::Curriculum curriculum_for(const std::string& user_id) const;

  const std::filesystem::path& store() const { return store_; }

 private:
  struct UserSlot;
  struct SessionSlot;

  std::shared_ptr<UserSlot> find_user(const std::string& id) const;
  std::shared_ptr<SessionSlot> find_session(const std::string& id) const;
  void replay(const std::filesystem::path& log);
  void append(UserSlot& user, const std::string& line);
  std::string now() const;
  content::Curriculum curriculum_for_record(const UserRecord& record) const;

  const content::ContentPack& pack_;
  dialogue::Engine engine_;
  std::filesystem::path store_;
  ServiceOptions options_;

  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<UserSlot>> users_;
  std::map<std::string, std::shared_ptr<SessionSlot>> sessions_;
};

/// Installs the JSON routes:
///   POST /users {name}                 -> {user_id}
///   POST /sessions {user_id}           -> {session_id, session_index, resumed, outputs, session_over}
///   POST /sessions/{id}/turns {text}   -> {gists, outputs, session_over}
///   GET  /sessions/{id}                -> {session_id, outputs, session_over}
///   GET  /sessions/{id}/transcript     -> transcript exchange text
///   GET  /users/{id}/progress          -> {user_id, sessions_completed, next_session, next_topics}
void mount_routes(httplib::Server& server, Service& service);

}  // namespace gistline::service
