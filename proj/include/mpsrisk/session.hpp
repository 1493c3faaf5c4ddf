#pragma once

// Two-part elicitation sessions. Every state change is an event appended to
// a per-session JSONL log; SessionState is a pure fold over those events.

#include "mpsrisk/lottery.hpp"
#include "mpsrisk/records.hpp"
#include "mpsrisk/tasks.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpsrisk {

// Protocol and request errors. `code` is stable and machine-readable:
// invalid_config, invalid_request, invalid_choice, bad_token, unknown_session,
// unknown_subject, duplicate_session, duplicate_subject, out_of_order,
// duplicate_choice, single_switch_violation, session_closed, incomplete,
// already_finalized, corrupt_log.
class SessionError : public std::runtime_error {
 public:
  SessionError(std::string code, const std::string& message) : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

struct SessionConfig {
  std::string session_id;
  std::uint64_t seed = 0;
  // Four-prize base lotteries replacing the six standard cases.
  std::optional<std::vector<Lottery>> custom_bases;
};

// {"session_id": "...", "seed": 7, "battery": [{"prizes": [...], "probs": [...]}, ...]}
// Missing fields fall back to the given defaults. Throws SessionError(invalid_config).
SessionConfig session_config_from_json(const nlohmann::json& j, const std::string& default_id,
                                       std::uint64_t default_seed);

bool valid_identifier(const std::string& id);

struct ChoiceSubmission {
  int part = 0;
  std::string screen;  // HL row "1".."10" or case id
  std::string pair;    // "" in part 1, "AB" | "AC" in part 2
  std::string chosen;  // "safe" | "risky" or "A" | "B" | "C"
};

ChoiceSubmission choice_from_json(const nlohmann::json& j);

struct Part2Answer {
  std::string case_id;
  std::string pair;
  std::string chosen;

  friend bool operator==(const Part2Answer&, const Part2Answer&) = default;
};

struct TranscriptEntry {
  std::string label;
  std::uint64_t value = 0;  // raw 64-bit draw

  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

struct PrizePick {
  std::string screen;  // HL row index or case id
  std::string pair;
  std::string chosen;
  Lottery lottery;
  Rational prize;

  friend bool operator==(const PrizePick&, const PrizePick&) = default;
};

struct PayoutDraw {
  std::string subject_id;
  std::uint64_t rng_seed = 0;
  PrizePick part1;
  PrizePick part2;
  std::vector<TranscriptEntry> transcript;

  Rational total() const { return part1.prize + part2.prize; }
  friend bool operator==(const PayoutDraw&, const PayoutDraw&) = default;
};

// Index of the realized prize: the first k with draw / 2^64 < P(X <= x_k),
// compared exactly.
std::size_t realize_prize(const Lottery& lottery, std::uint64_t draw);

struct SubjectState {
  std::string subject_id;
  std::string token;
  std::uint64_t display_seed = 0;
  DisplayPlan plan;
  std::vector<std::string> hl;  // "safe" / "risky" for rows 1..hl.size()
  std::vector<Part2Answer> part2;
  std::optional<PayoutDraw> payout;

  bool part1_complete() const { return hl.size() == 10; }
  bool part2_complete() const { return part2.size() == 2 * plan.screens.size(); }
  bool complete() const { return part1_complete() && part2_complete(); }
  int safe_count() const;
  bool dominated() const { return part1_complete() && safe_count() == 10; }

  friend bool operator==(const SubjectState&, const SubjectState&) = default;
};

struct SessionState {
  std::string session_id;
  std::uint64_t seed = 0;
  bool closed = false;
  std::optional<std::vector<Lottery>> custom_bases;
  std::vector<MpsCase> battery;
  std::vector<HLRow> hl_rows;
  std::vector<SubjectState> subjects;  // registration order
  std::vector<ChoiceRecord> records;   // log order
  std::uint64_t events = 0;

  const SubjectState* find(const std::string& subject_id) const;
  const MpsCase& find_case(const std::string& case_id) const;

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

// ----- Events and the fold -----

nlohmann::json created_event(const SessionConfig& config);
nlohmann::json registered_event(const std::string& subject_id, const std::string& token);
nlohmann::json choice_event(const std::string& subject_id, const ChoiceSubmission& choice, std::int64_t timestamp);
nlohmann::json finalized_event(const PayoutDraw& draw);
nlohmann::json closed_event();

// Validates the event against the state it applies to; throws SessionError
// with the protocol code when it would break an invariant.
SessionState apply_event(SessionState state, const nlohmann::json& event);
SessionState replay(const std::vector<nlohmann::json>& events);

// Throws SessionError unless `choice` is acceptable for the subject now.
void check_choice(const SessionState& state, const std::string& subject_id, const ChoiceSubmission& choice);

std::string subject_token(std::uint64_t seed, const std::string& session_id, const std::string& subject_id);
// Accepted by finalize for any subject, and required to close the session.
std::string experimenter_token(const SessionState& state);

// Payout for a complete subject, a pure function of (state, subject, rng_seed).
PayoutDraw draw_payout(const SessionState& state, const std::string& subject_id, std::uint64_t rng_seed);
// Recomputes the picks from the transcript's raw draws alone.
PayoutDraw payout_from_transcript(const SessionState& state, const std::string& subject_id,
                                  std::uint64_t rng_seed, const std::vector<TranscriptEntry>& transcript);
std::uint64_t default_payout_seed(const SessionState& state, const std::string& subject_id);

nlohmann::json payout_json(const PayoutDraw& draw);
PayoutDraw payout_from_json(const nlohmann::json& j);

// ----- Log file -----

class EventLog {
 public:
  // Reads existing events; a torn trailing line (no newline, unparsable) is
  // dropped and truncated away. Any other bad line throws SessionError(corrupt_log).
  EventLog(std::filesystem::path path, bool fsync);

  const std::vector<nlohmann::json>& loaded() const { return loaded_; }
  void append(const nlohmann::json& event);
  const std::filesystem::path& path() const { return path_; }

  static std::vector<nlohmann::json> read(const std::filesystem::path& path, std::uintmax_t* good_bytes = nullptr);

 private:
  std::filesystem::path path_;
  bool fsync_;
  std::vector<nlohmann::json> loaded_;
};

// ----- Live sessions -----

using Clock = std::function<std::int64_t()>;
std::int64_t wall_clock_ms();

class Session {
 public:
  // In-memory when `log` is null.
  Session(SessionState state, std::unique_ptr<EventLog> log, Clock clock);

  SessionState snapshot() const;

  nlohmann::json register_subject(const std::optional<std::string>& requested_id);
  nlohmann::json next(const std::string& subject_id, const std::string& token) const;
  nlohmann::json submit(const std::string& subject_id, const std::string& token, const ChoiceSubmission& choice);
  // `token` is the subject's or the experimenter's.
  PayoutDraw finalize(const std::string& subject_id, const std::string& token,
                      std::optional<std::uint64_t> rng_seed = std::nullopt);
  void close(const std::string& experimenter_token);

  std::vector<ChoiceRecord> export_records() const;
  std::string export_text(const std::string& format) const;  // "csv" | "jsonl"
  nlohmann::json dashboard() const;
  nlohmann::json describe() const;

 private:
  void commit(const nlohmann::json& event);
  const SubjectState& authorize(const std::string& subject_id, const std::string& token) const;

  mutable std::mutex mutex_;
  SessionState state_;
  std::unique_ptr<EventLog> log_;
  Clock clock_;
};

struct StoreOptions {
  std::filesystem::path data_dir;  // empty: nothing persisted
  std::uint64_t default_seed = 0;
  bool fsync = false;
  Clock clock = wall_clock_ms;
};

class SessionStore {
 public:
  // Replays every "<id>.jsonl" in data_dir.
  explicit SessionStore(StoreOptions options);

  std::shared_ptr<Session> create(const nlohmann::json& config);
  std::shared_ptr<Session> get(const std::string& session_id) const;
  std::vector<std::string> ids() const;

 private:
  StoreOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace mpsrisk
