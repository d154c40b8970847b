#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lgpl/experiment.hpp"

namespace lgpl {

enum class CandidateSource { kLlm, kUniform, kPerturbed };
enum class SessionState { kAwaitingRanking, kFitted, kError };

std::string_view source_name(CandidateSource source);
CandidateSource parse_source(std::string_view name);
std::string_view state_name(SessionState state);

/// Failure of a session operation, with the HTTP status it maps to.
class SessionError : public std::runtime_error {
 public:
  enum class Kind { kValidation, kNotFound, kConflict, kUnsupported, kUpstream };

  SessionError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }
  int http_status() const;
  std::string_view code() const;

 private:
  Kind kind_;
};

struct HistoryEntry {
  std::string kind;  // "created", "ranking", "feedback"
  nlohmann::json payload;
  std::string timestamp;  // ISO-8601 UTC
};

struct Session {
  std::string id;
  std::string instruction;
  CandidateSource source = CandidateSource::kUniform;
  std::size_t n = 0;
  std::vector<TaskVector> candidates;
  std::vector<Trajectory> trajectories;
  SessionState state = SessionState::kAwaitingRanking;
  std::optional<TaskVector> learned_omega;
  std::optional<TaskVector> projected_omega;
  std::optional<Trajectory> refined;
  std::vector<HistoryEntry> history;
  std::string error;
  std::uint64_t seed = 0;
};

nlohmann::json session_to_json(const Session& session);

struct CreateRequest {
  std::string instruction;
  std::size_t n = 4;
  CandidateSource source = CandidateSource::kUniform;
  std::optional<TaskVector> prior;  // centre for the perturbed source
  double sigma = 0.15;
};

CreateRequest create_request_from_json(const nlohmann::json& body);

struct ServiceConfig {
  PipelineParams params;
  std::shared_ptr<ChatProvider> provider;  // null: llm sessions are rejected
  std::optional<std::filesystem::path> snapshot_dir;
  std::uint64_t refined_seed = 7;
};

/// In-memory session store. Mutations of one session are serialized;
/// distinct sessions proceed concurrently.
class SessionManager {
 public:
  explicit SessionManager(ServiceConfig config);

  /// Validation failures throw. An LLM failure leaves the session stored in
  /// the error state and throws SessionError(kUpstream) naming its id.
  Session create_session(const CreateRequest& request);
  Session get(const std::string& id) const;
  Session submit_ranking(const std::string& id, const std::vector<std::size_t>& ranking);
  Session submit_feedback(const std::string& id, const std::string& feedback);
  std::size_t size() const;

 private:
  struct Entry {
    mutable std::shared_mutex mutex;
    Session session;
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  void snapshot(const Session& session) const;
  std::string next_id();
  void roll_out(Session& session) const;

  ServiceConfig config_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex id_mutex_;
  std::mt19937_64 id_rng_;
};

}  // namespace lgpl
