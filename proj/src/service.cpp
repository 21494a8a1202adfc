#include "gistline/service.hpp"

#include "gistline/error.hpp"
#include "gistline/evalkit.hpp"
#include "gistline/serialize.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>

namespace gistline::service {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string user_id_for(std::size_t n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "u%05zu", n);
  return buf;
}

std::string session_id_for(const std::string& user, int index) {
  return user + "-s" + std::to_string(index);
}

evalkit::Speaker speaker_for(dialogue::OutputKind kind) {
  switch (kind) {
    case dialogue::OutputKind::FeedbackText:
    case dialogue::OutputKind::SessionSummary: return evalkit::Speaker::Feedback;
    default: return evalkit::Speaker::Agent;
  }
}

}  // namespace

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

std::optional<int> UserRecord::next_session() const {
  if (sessions_completed >= dialogue::kLastSession) return std::nullopt;
  return sessions_completed + 1;
}

struct Service::UserSlot {
  std::mutex mutex;
  UserRecord record;
  fs::path log;
  std::optional<std::string> open_session;
  std::vector<transduction::GistClause> gists;  // from completed sessions
};

struct Service::SessionSlot {
  std::mutex mutex;
  std::string id;
  std::string user_id;
  dialogue::SessionState state;
  evalkit::Transcript transcript;
  std::optional<dialogue::AgentOutput> last_output;
  bool awaiting_output = false;  // replay saw a user turn without its answer

  void record(const dialogue::AgentOutput& out, const std::string& ts) {
    for (const auto& item : out.items) {
      if (item.kind == dialogue::OutputKind::SessionOver) continue;
      transcript.turns.push_back(evalkit::Turn{transcript.turns.size(), speaker_for(item.kind), item.text, ts});
    }
    last_output = out;
  }
  void record_user(const std::string& text, const std::string& ts) {
    transcript.turns.push_back(evalkit::Turn{transcript.turns.size(), evalkit::Speaker::User, text, ts});
  }
};

Service::Service(const content::ContentPack& pack, fs::path store, ServiceOptions options)
    : pack_(pack), engine_(pack), store_(std::move(store)), options_(std::move(options)) {
  if (!options_.clock) options_.clock = iso_now;
  fs::create_directories(store_);
  std::vector<fs::path> logs;
  for (const auto& entry : fs::directory_iterator(store_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") logs.push_back(entry.path());
  }
  std::sort(logs.begin(), logs.end());
  for (const auto& log : logs) replay(log);
}

Service::~Service() = default;

std::string Service::now() const { return options_.clock(); }

void Service::append(UserSlot& user, const std::string& line) {
  std::ofstream out(user.log, std::ios::app | std::ios::binary);
  out << line << '\n';
  out.flush();
  if (!out) throw Error("failed to append to event log '" + user.log.string() + "'");
}

void Service::replay(const fs::path& log) {
  std::ifstream in(log);
  std::string line;
  std::shared_ptr<UserSlot> user;
  std::shared_ptr<SessionSlot> session;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json ev;
    try {
      ev = json::parse(line);
    } catch (const json::exception&) {
      // A torn final write is dropped; anything earlier is corruption.
      if (in.peek() == EOF) break;
      throw Error(log.string() + ":" + std::to_string(line_no) + ": unreadable event");
    }
    const auto type = ev.at("type").get<std::string>();
    const auto ts = ev.value("ts", "");
    if (type == "user-created") {
      user = std::make_shared<UserSlot>();
      user->log = log;
      user->record.id = ev.at("user_id").get<std::string>();
      user->record.name = ev.at("name").get<std::string>();
      user->record.seed = ev.at("seed").get<std::uint64_t>();
      users_[user->record.id] = user;
      continue;
    }
    if (!user) throw Error(log.string() + ": events before user-created");
    if (type == "session-started") {
      session = std::make_shared<SessionSlot>();
      session->id = ev.at("session_id").get<std::string>();
      session->user_id = user->record.id;
      const int index = ev.at("session_index").get<int>();
      const auto seed = ev.at("seed").get<std::uint64_t>();
      auto [state, out] = engine_.start_session(user->record.id, curriculum_for_record(user->record), index,
                                                seed, user->gists);
      session->state = std::move(state);
      session->transcript.id = session->id;
      session->transcript.condition = evalkit::Condition::Auto;
      session->record(out, ts);
      user->record.session_seeds.push_back(seed);
      user->open_session = session->id;
      sessions_[session->id] = session;
    } else if (type == "user-turn") {
      if (!session || session->id != ev.at("session_id").get<std::string>()) {
        throw Error(log.string() + ":" + std::to_string(line_no) + ": turn for a session that is not open");
      }
      for (const auto& [channel, score] : ev.value("channels", json::object()).items()) {
        engine_.record_channel_score(session->state, channel, score.get<double>());
      }
      const auto text = ev.at("text").get<std::string>();
      session->record_user(text, ts);
      session->last_output = engine_.handle_turn(session->state, text);
      session->awaiting_output = true;
    } else if (type == "agent-output") {
      if (!session || !session->awaiting_output) {
        throw Error(log.string() + ":" + std::to_string(line_no) + ": output without a turn");
      }
      const auto logged = ev.at("output").get<dialogue::AgentOutput>();
      if (!(logged == *session->last_output)) {
        throw Error(log.string() + ":" + std::to_string(line_no) + ": replay diverges from the log");
      }
      session->record(*session->last_output, ts);
      session->awaiting_output = false;
    } else if (type == "session-ended") {
      user->record.sessions_completed += 1;
      for (const auto& g : ev.at("gists")) user->gists.push_back(g.get<transduction::GistClause>());
      user->open_session.reset();
    } else {
      throw Error(log.string() + ":" + std::to_string(line_no) + ": unknown event '" + type + "'");
    }
  }

  // Crash recovery: answer a logged turn that never got its output.
  if (user && session && session->awaiting_output) {
    const std::string ts = now();
    append(*user, json{{"type", "agent-output"}, {"ts", ts}, {"session_id", session->id},
                       {"output", *session->last_output}}.dump());
    session->record(*session->last_output, ts);
    session->awaiting_output = false;
  }
  if (user && session && session->state.over && user->open_session == session->id) {
    json gists = json::array();
    for (const auto& g : session->state.gist_memory) gists.push_back(g.gist);
    append(*user, json{{"type", "session-ended"}, {"ts", now()}, {"session_id", session->id},
                       {"gists", gists}}.dump());
    user->record.sessions_completed += 1;
    for (const auto& g : session->state.gist_memory) user->gists.push_back(g.gist);
    user->open_session.reset();
  }
}

std::shared_ptr<Service::UserSlot> Service::find_user(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = users_.find(id);
  if (it == users_.end()) throw NotFoundError("unknown user '" + id + "'");
  return it->second;
}

std::shared_ptr<Service::SessionSlot> Service::find_session(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError("unknown session '" + id + "'");
  return it->second;
}

std::string Service::create_user(const std::string& name) {
  if (name.empty()) throw PreconditionError("user name must not be empty");
  auto slot = std::make_shared<UserSlot>();
  {
    std::lock_guard lock(mutex_);
    std::size_t n = users_.size() + 1;
    while (users_.contains(user_id_for(n)) || fs::exists(store_ / (user_id_for(n) + ".jsonl"))) ++n;
    slot->record.id = user_id_for(n);
    slot->record.name = name;
    slot->record.seed = options_.base_seed ? splitmix64(*options_.base_seed + n)
                                           : (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^
                                                 std::random_device{}();
    slot->log = store_ / (slot->record.id + ".jsonl");
    append(*slot, json{{"type", "user-created"},
                       {"ts", now()},
                       {"user_id", slot->record.id},
                       {"name", name},
                       {"seed", slot->record.seed}}
                      .dump());
    users_[slot->record.id] = slot;
  }
  return slot->record.id;
}

content::Curriculum Service::curriculum_for_record(const UserRecord& record) const {
  return content::compose_curriculum(pack_.topics, record.seed);
}

content::Curriculum Service::curriculum_for(const std::string& user_id) const {
  auto user = find_user(user_id);
  std::lock_guard lock(user->mutex);
  return curriculum_for_record(user->record);
}

SessionStart Service::open_session(const std::string& user_id) {
  auto user = find_user(user_id);
  std::unique_lock user_lock(user->mutex);
  if (user->open_session) {
    // Session locks are always taken before user locks.
    const std::string open = *user->open_session;
    user_lock.unlock();
    auto session = find_session(open);
    std::lock_guard session_lock(session->mutex);
    return SessionStart{session->id, session->state.session_index,
                        session->last_output.value_or(dialogue::AgentOutput{}), true};
  }
  const auto next = user->record.next_session();
  if (!next) throw PreconditionError("user '" + user_id + "' has completed all sessions");

  const std::uint64_t seed = splitmix64(user->record.seed ^ static_cast<std::uint64_t>(*next));
  auto [state, out] = engine_.start_session(user->record.id, curriculum_for_record(user->record), *next,
                                            seed, user->gists);
  auto session = std::make_shared<SessionSlot>();
  session->id = session_id_for(user->record.id, *next);
  session->user_id = user->record.id;
  session->state = std::move(state);
  session->transcript.id = session->id;
  session->transcript.condition = evalkit::Condition::Auto;

  const std::string ts = now();
  append(*user, json{{"type", "session-started"},
                     {"ts", ts},
                     {"session_id", session->id},
                     {"session_index", *next},
                     {"seed", seed},
                     {"output", out}}
                    .dump());
  session->record(out, ts);
  user->record.session_seeds.push_back(seed);
  user->open_session = session->id;
  {
    std::lock_guard lock(mutex_);
    sessions_[session->id] = session;
  }
  return SessionStart{session->id, *next, std::move(out), false};
}

dialogue::AgentOutput Service::post_turn(const std::string& session_id, const std::string& text,
                                         const std::map<std::string, double>& channels) {
  auto session = find_session(session_id);
  std::lock_guard session_lock(session->mutex);
  if (session->state.over) throw SessionOverError("session '" + session_id + "' is over");
  auto user = find_user(session->user_id);

  for (const auto& [channel, score] : channels) {
    if (!(score >= 0.0 && score <= 1.0)) throw PreconditionError("channel score outside [0, 1]");
  }
  const std::string turn_ts = now();
  {
    std::lock_guard user_lock(user->mutex);
    append(*user, json{{"type", "user-turn"},
                       {"ts", turn_ts},
                       {"session_id", session_id},
                       {"text", text},
                       {"channels", channels}}
                      .dump());
  }
  if (options_.after_turn_logged) options_.after_turn_logged(session_id);

  for (const auto& [channel, score] : channels) engine_.record_channel_score(session->state, channel, score);
  session->record_user(text, turn_ts);
  auto out = engine_.handle_turn(session->state, text);

  const std::string out_ts = now();
  std::lock_guard user_lock(user->mutex);
  append(*user, json{{"type", "agent-output"}, {"ts", out_ts}, {"session_id", session_id}, {"output", out}}.dump());
  session->record(out, out_ts);
  if (session->state.over) {
    json gists = json::array();
    for (const auto& g : session->state.gist_memory) gists.push_back(g.gist);
    append(*user, json{{"type", "session-ended"}, {"ts", out_ts}, {"session_id", session_id}, {"gists", gists}}.dump());
    user->record.sessions_completed += 1;
    for (const auto& g : session->state.gist_memory) user->gists.push_back(g.gist);
    user->open_session.reset();
  }
  return out;
}

std::string Service::transcript(const std::string& session_id) const {
  auto session = find_session(session_id);
  std::lock_guard lock(session->mutex);
  return evalkit::format_transcript(session->transcript);
}

std::optional<dialogue::AgentOutput> Service::last_output(const std::string& session_id) const {
  auto session = find_session(session_id);
  std::lock_guard lock(session->mutex);
  return session->last_output;
}

bool Service::session_over(const std::string& session_id) const {
  auto session = find_session(session_id);
  std::lock_guard lock(session->mutex);
  return session->state.over;
}

UserRecord Service::user(const std::string& user_id) const {
  auto user = find_user(user_id);
  std::lock_guard lock(user->mutex);
  return user->record;
}

Progress Service::progress(const std::string& user_id) const {
  auto user = find_user(user_id);
  std::lock_guard lock(user->mutex);
  Progress p;
  p.user_id = user_id;
  p.sessions_completed = user->record.sessions_completed;
  p.next_session = user->record.next_session();
  if (p.next_session) {
    const auto curriculum = curriculum_for_record(user->record);
    for (const auto& id : curriculum.sessions[static_cast<std::size_t>(*p.next_session - 1)]) {
      if (const auto* topic = pack_.find_topic(id)) p.next_topics.push_back(*topic);
    }
  }
  return p;
}

}  // namespace gistline::service
