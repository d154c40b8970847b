#include "lgpl/session.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "lgpl/hash.hpp"

namespace lgpl {

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

SessionError validation(const std::string& what) {
  return SessionError(SessionError::Kind::kValidation, what);
}

}  // namespace

std::string_view source_name(CandidateSource source) {
  switch (source) {
    case CandidateSource::kLlm: return "llm";
    case CandidateSource::kUniform: return "uniform";
    case CandidateSource::kPerturbed: return "perturbed";
  }
  return "?";
}

CandidateSource parse_source(std::string_view name) {
  if (name == "llm") return CandidateSource::kLlm;
  if (name == "uniform") return CandidateSource::kUniform;
  if (name == "perturbed") return CandidateSource::kPerturbed;
  throw validation("unknown candidate source '" + std::string(name) + "'");
}

std::string_view state_name(SessionState state) {
  switch (state) {
    case SessionState::kAwaitingRanking: return "awaiting_ranking";
    case SessionState::kFitted: return "fitted";
    case SessionState::kError: return "error";
  }
  return "?";
}

int SessionError::http_status() const {
  switch (kind_) {
    case Kind::kValidation: return 400;
    case Kind::kNotFound: return 404;
    case Kind::kConflict: return 409;
    case Kind::kUnsupported: return 422;
    case Kind::kUpstream: return 502;
  }
  return 500;
}

std::string_view SessionError::code() const {
  switch (kind_) {
    case Kind::kValidation: return "validation_error";
    case Kind::kNotFound: return "not_found";
    case Kind::kConflict: return "conflict";
    case Kind::kUnsupported: return "unsupported_operation";
    case Kind::kUpstream: return "upstream_error";
  }
  return "internal_error";
}

nlohmann::json session_to_json(const Session& s) {
  nlohmann::json candidates = nlohmann::json::array();
  for (std::size_t i = 0; i < s.candidates.size(); ++i) {
    candidates.push_back({{"index", i},
                          {"omega", s.candidates[i]},
                          {"trajectory", i < s.trajectories.size() ? serialize_trajectory(s.trajectories[i])
                                                                    : nlohmann::json(nullptr)}});
  }
  nlohmann::json history = nlohmann::json::array();
  for (const auto& h : s.history) {
    history.push_back({{"kind", h.kind}, {"payload", h.payload}, {"timestamp", h.timestamp}});
  }
  nlohmann::json j = {{"id", s.id},
                      {"instruction", s.instruction},
                      {"source", source_name(s.source)},
                      {"n", s.n},
                      {"state", state_name(s.state)},
                      {"candidates", std::move(candidates)},
                      {"history", std::move(history)}};
  if (s.learned_omega) {
    j["result"] = {{"raw_omega", *s.learned_omega},
                   {"projected_omega", *s.projected_omega},
                   {"trajectory", serialize_trajectory(*s.refined)}};
  }
  if (!s.error.empty()) j["error"] = s.error;
  return j;
}

CreateRequest create_request_from_json(const nlohmann::json& body) {
  if (!body.is_object()) throw validation("request body must be a JSON object");
  CreateRequest r;
  try {
    r.instruction = body.value("instruction", std::string{});
    if (body.contains("n")) {
      if (!body.at("n").is_number_integer() || body.at("n").get<long long>() < 0) {
        throw validation("n must be a non-negative integer");
      }
      r.n = body.at("n").get<std::size_t>();
    }
    r.source = parse_source(body.value("source", std::string("uniform")));
    if (body.contains("prior")) r.prior = body.at("prior").get<TaskVector>();
    r.sigma = body.value("sigma", r.sigma);
  } catch (const nlohmann::json::exception& e) {
    throw validation(std::string("malformed create request: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw validation(e.what());
  }
  return r;
}

SessionManager::SessionManager(ServiceConfig config)
    : config_(std::move(config)), id_rng_(std::random_device{}()) {
  if (config_.snapshot_dir) std::filesystem::create_directories(*config_.snapshot_dir);
}

std::string SessionManager::next_id() {
  std::lock_guard lock(id_mutex_);
  return "s-" + to_hex(id_rng_());
}

std::shared_ptr<SessionManager::Entry> SessionManager::find(const std::string& id) const {
  std::shared_lock lock(map_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionError(SessionError::Kind::kNotFound, "no session '" + id + "'");
  return it->second;
}

void SessionManager::snapshot(const Session& session) const {
  if (!config_.snapshot_dir) return;
  const auto path = *config_.snapshot_dir / (session.id + ".json");
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << session_to_json(session).dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

void SessionManager::roll_out(Session& session) const {
  session.trajectories = rollout_candidates(session.candidates, config_.params.rollout, session.seed,
                                            config_.params.ranges);
}

std::size_t SessionManager::size() const {
  std::shared_lock lock(map_mutex_);
  return sessions_.size();
}

Session SessionManager::create_session(const CreateRequest& request) {
  if (request.n < 2 || request.n >= kMaxRankedTrajectories) {
    throw validation("n must lie in [2, 9], got " + std::to_string(request.n));
  }
  if (request.source == CandidateSource::kLlm && !config_.provider) {
    throw SessionError(SessionError::Kind::kUnsupported, "no LLM endpoint or mock fixture configured");
  }
  if (request.source == CandidateSource::kLlm && request.instruction.empty()) {
    throw validation("llm sessions need an instruction");
  }
  if (request.source == CandidateSource::kPerturbed && !request.prior) {
    throw validation("perturbed sessions need a prior task vector");
  }
  if (!(request.sigma >= 0.0)) throw validation("sigma must be non-negative");

  auto entry = std::make_shared<Entry>();
  Session& s = entry->session;
  s.id = next_id();
  s.instruction = request.instruction;
  s.source = request.source;
  s.n = request.n;
  s.seed = stable_hash(s.id);
  s.history.push_back({"created",
                       {{"source", source_name(s.source)}, {"n", s.n}, {"instruction", s.instruction}},
                       utc_timestamp()});

  std::optional<SessionError> upstream;
  switch (request.source) {
    case CandidateSource::kUniform:
      s.candidates = sample_uniform(request.n, config_.params.ranges, s.seed);
      break;
    case CandidateSource::kPerturbed:
      s.candidates = sample_perturbed(*request.prior, request.sigma, request.n, s.seed, config_.params.ranges);
      break;
    case CandidateSource::kLlm: {
      CandidateRequest cr;
      cr.instruction = request.instruction;
      cr.n = request.n;
      cr.examples = config_.params.examples;
      try {
        s.candidates = llm_candidates(cr, *config_.provider, config_.params.max_retries, config_.params.ranges);
      } catch (const std::exception& e) {
        s.state = SessionState::kError;
        s.error = e.what();
        upstream.emplace(SessionError::Kind::kUpstream,
                         "session " + s.id + " failed to generate candidates: " + e.what());
      }
      break;
    }
  }
  if (!upstream) roll_out(s);

  Session copy = s;
  {
    std::unique_lock lock(map_mutex_);
    sessions_.emplace(s.id, entry);
  }
  snapshot(copy);
  if (upstream) throw *upstream;
  return copy;
}

Session SessionManager::get(const std::string& id) const {
  auto entry = find(id);
  std::shared_lock lock(entry->mutex);
  return entry->session;
}

Session SessionManager::submit_ranking(const std::string& id, const std::vector<std::size_t>& ranking) {
  auto entry = find(id);
  std::unique_lock lock(entry->mutex);
  Session& s = entry->session;
  if (s.state != SessionState::kAwaitingRanking) {
    throw SessionError(SessionError::Kind::kConflict,
                       "session " + id + " is " + std::string(state_name(s.state)) + ", not awaiting_ranking");
  }
  if (ranking.size() != s.candidates.size()) {
    throw validation("ranking must list all " + std::to_string(s.candidates.size()) + " candidates");
  }
  std::vector<bool> seen(s.candidates.size(), false);
  for (std::size_t idx : ranking) {
    if (idx >= seen.size() || seen[idx]) throw validation("ranking is not a permutation of the candidate indices");
    seen[idx] = true;
  }

  try {
    const FitResult result = learn_from_ranking(s.candidates, s.trajectories, ranking, config_.params, s.seed);
    s.learned_omega = result.omega;
    s.projected_omega = project_for_deployment(result.omega, config_.params.ranges);
    s.refined = rollout(*s.projected_omega, config_.params.rollout, config_.refined_seed, s.id + "-refined");
    s.state = SessionState::kFitted;
  } catch (const FitDivergence& e) {
    s.state = SessionState::kError;
    s.error = e.what();
  }
  s.history.push_back({"ranking", {{"ranking", ranking}}, utc_timestamp()});
  snapshot(s);
  if (s.state == SessionState::kError) {
    throw SessionError(SessionError::Kind::kUpstream, "fit failed for session " + id + ": " + s.error);
  }
  return s;
}

Session SessionManager::submit_feedback(const std::string& id, const std::string& feedback) {
  auto entry = find(id);
  std::unique_lock lock(entry->mutex);
  Session& s = entry->session;
  if (s.source != CandidateSource::kLlm) {
    throw SessionError(SessionError::Kind::kUnsupported,
                       "feedback needs an llm session; this one uses " + std::string(source_name(s.source)));
  }
  if (s.state != SessionState::kAwaitingRanking) {
    throw SessionError(SessionError::Kind::kConflict,
                       "session " + id + " is " + std::string(state_name(s.state)) + ", not awaiting_ranking");
  }
  if (feedback.empty()) throw validation("feedback text is empty");
  if (!config_.provider) throw SessionError(SessionError::Kind::kUnsupported, "no LLM endpoint configured");

  CandidateRequest cr;
  cr.instruction = s.instruction;
  cr.n = s.n;
  cr.examples = config_.params.examples;
  std::vector<TaskVector> fresh;
  try {
    fresh = refine_candidates(cr, s.candidates, feedback, *config_.provider, config_.params.max_retries,
                              config_.params.ranges);
  } catch (const std::exception& e) {
    throw SessionError(SessionError::Kind::kUpstream, std::string("feedback regeneration failed: ") + e.what());
  }
  s.candidates = std::move(fresh);
  s.seed = StableHash().add(s.seed).add(feedback).value();
  roll_out(s);
  s.history.push_back({"feedback", {{"text", feedback}}, utc_timestamp()});
  snapshot(s);
  return s;
}

}  // namespace lgpl
