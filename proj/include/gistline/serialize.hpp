#pragma once

// JSON forms of session state and agent output. Used by the service event
// log and HTTP API; a deserialized state continues exactly where the
// original left off.

#include "gistline/dialogue.hpp"

#include "json.hpp"

namespace gistline::dialogue {

void to_json(nlohmann::json& j, const OutputItem& item);
void from_json(const nlohmann::json& j, OutputItem& item);
void to_json(nlohmann::json& j, const AgentOutput& out);
void from_json(const nlohmann::json& j, AgentOutput& out);
void to_json(nlohmann::json& j, const SessionState& state);
void from_json(const nlohmann::json& j, SessionState& state);

}  // namespace gistline::dialogue

namespace gistline::transduction {

void to_json(nlohmann::json& j, const GistClause& gist);
void from_json(const nlohmann::json& j, GistClause& gist);

}  // namespace gistline::transduction
