#include "mpsrisk/analysis.hpp"
#include "mpsrisk/json_io.hpp"
#include "mpsrisk/session.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mpsrisk {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& code, const std::string& message) { throw SessionError(code, message); }

void write_all(const std::filesystem::path& path, const std::string& data, bool sync) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw std::runtime_error("cannot open " + path.string() + ": " + std::strerror(errno));
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int err = errno;
      ::close(fd);
      throw std::runtime_error("write to " + path.string() + " failed: " + std::strerror(err));
    }
    done += static_cast<std::size_t>(n);
  }
  if (sync && ::fsync(fd) != 0) {
    const int err = errno;
    ::close(fd);
    throw std::runtime_error("fsync of " + path.string() + " failed: " + std::strerror(err));
  }
  ::close(fd);
}

}  // namespace

std::string experimenter_token(const SessionState& state) {
  return subject_token(state.seed, state.session_id, "#experimenter");
}

std::int64_t wall_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

// ----- EventLog -----

std::vector<json> EventLog::read(const std::filesystem::path& path, std::uintmax_t* good_bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::vector<json> events;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    const std::size_t end = text.find('\n', start);
    if (end == std::string::npos) break;  // torn tail: never acknowledged
    ++line_no;
    const std::string line = text.substr(start, end - start);
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      try {
        events.push_back(json::parse(line));
      } catch (const json::parse_error& e) {
        fail("corrupt_log", path.string() + " line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    start = end + 1;
  }
  if (good_bytes) *good_bytes = start;
  return events;
}

EventLog::EventLog(std::filesystem::path path, bool fsync) : path_(std::move(path)), fsync_(fsync) {
  if (std::filesystem::exists(path_)) {
    std::uintmax_t good = 0;
    loaded_ = read(path_, &good);
    if (std::filesystem::file_size(path_) > good) std::filesystem::resize_file(path_, good);
  }
}

void EventLog::append(const json& event) { write_all(path_, event.dump() + "\n", fsync_); }

// ----- Session -----

Session::Session(SessionState state, std::unique_ptr<EventLog> log, Clock clock)
    : state_(std::move(state)), log_(std::move(log)), clock_(std::move(clock)) {}

SessionState Session::snapshot() const {
  std::lock_guard lock(mutex_);
  return state_;
}

void Session::commit(const json& event) {
  SessionState next = apply_event(state_, event);
  if (log_) log_->append(event);
  state_ = std::move(next);
}

const SubjectState& Session::authorize(const std::string& subject_id, const std::string& token) const {
  const SubjectState* s = state_.find(subject_id);
  if (!s) fail("unknown_subject", "no subject '" + subject_id + "' in session " + state_.session_id);
  if (token != s->token) fail("bad_token", "token does not match subject '" + subject_id + "'");
  return *s;
}

json Session::register_subject(const std::optional<std::string>& requested_id) {
  std::lock_guard lock(mutex_);
  std::string id;
  if (requested_id) {
    id = *requested_id;
  } else {
    for (std::size_t n = state_.subjects.size() + 1;; ++n) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "S%03zu", n);
      if (!state_.find(buf)) {
        id = buf;
        break;
      }
    }
  }
  if (!valid_identifier(id)) fail("invalid_request", "subject id must be 1-64 characters of [A-Za-z0-9_-]");
  commit(registered_event(id, subject_token(state_.seed, state_.session_id, id)));
  const SubjectState& s = *state_.find(id);
  return json{{"session_id", state_.session_id},
              {"subject_id", s.subject_id},
              {"token", s.token},
              {"display_seed", s.display_seed},
              {"display_plan", display_plan_json(s.plan)}};
}

namespace {

json next_json(const SessionState& state, const SubjectState& s) {
  json out{{"session_id", state.session_id},
           {"subject_id", s.subject_id},
           {"progress",
            {{"part1_answered", s.hl.size()},
             {"part1_total", state.hl_rows.size()},
             {"part2_answered", s.part2.size()},
             {"part2_total", 2 * s.plan.screens.size()}}}};
  if (s.payout) {
    out["status"] = "finalized";
    out["payout"] = payout_json(*s.payout);
    return out;
  }
  if (s.complete()) {
    out["status"] = "complete";
    return out;
  }
  if (state.closed) {
    out["status"] = "closed";
    return out;
  }
  if (!s.part1_complete()) {
    const HLRow& row = state.hl_rows[s.hl.size()];
    json rows = json::array();
    for (const auto& r : state.hl_rows) rows.push_back(hl_row_json(r));
    out["status"] = "part1";
    out["part"] = 1;
    out["screen"] = std::to_string(row.index);
    out["hl_row"] = hl_row_json(row);
    out["hl_rows"] = rows;
    out["answered"] = s.hl;
    out["switched"] = std::find(s.hl.begin(), s.hl.end(), "risky") != s.hl.end();
    return out;
  }
  const std::size_t current = s.part2.size() / 2;
  const ScreenLayout& layout = s.plan.screens[current];
  const MpsCase& c = state.find_case(layout.case_id);
  json answered = json::object();
  for (std::size_t i = 2 * current; i < s.part2.size(); ++i) answered[s.part2[i].pair] = s.part2[i].chosen;
  out["status"] = "part2";
  out["part"] = 2;
  out["screen"] = layout.case_id;
  out["screen_number"] = current + 1;
  out["case"] = json{{"case_id", c.id},
                     {"lotteries", {{"A", lottery_json(c.base())}, {"B", lottery_json(c.spread_b())}, {"C", lottery_json(c.spread_c())}}},
                     {"lottery_order", std::string(layout.lottery_order.begin(), layout.lottery_order.end())},
                     {"decision_order", layout.decision_order},
                     {"button_order",
                      {{"AB", std::string(layout.button_order[0].begin(), layout.button_order[0].end())},
                       {"AC", std::string(layout.button_order[1].begin(), layout.button_order[1].end())}}},
                     {"answered", answered}};
  return out;
}

}  // namespace

json Session::next(const std::string& subject_id, const std::string& token) const {
  std::lock_guard lock(mutex_);
  return next_json(state_, authorize(subject_id, token));
}

json Session::submit(const std::string& subject_id, const std::string& token, const ChoiceSubmission& choice) {
  std::lock_guard lock(mutex_);
  authorize(subject_id, token);
  commit(choice_event(subject_id, choice, clock_()));
  return json{{"accepted", true},
              {"record", json::parse(to_jsonl_line(state_.records.back()))},
              {"next", next_json(state_, *state_.find(subject_id))}};
}

PayoutDraw Session::finalize(const std::string& subject_id, const std::string& token,
                             std::optional<std::uint64_t> rng_seed) {
  std::lock_guard lock(mutex_);
  if (token != experimenter_token(state_)) authorize(subject_id, token);
  const SubjectState* s = state_.find(subject_id);
  if (!s) fail("unknown_subject", "no subject '" + subject_id + "' in session " + state_.session_id);
  if (s->payout) fail("already_finalized", "subject '" + subject_id + "' already has a payout");
  PayoutDraw draw = draw_payout(state_, subject_id, rng_seed.value_or(default_payout_seed(state_, subject_id)));
  commit(finalized_event(draw));
  return draw;
}

void Session::close(const std::string& token) {
  std::lock_guard lock(mutex_);
  if (token != experimenter_token(state_)) fail("bad_token", "closing a session needs the experimenter token");
  commit(closed_event());
}

std::vector<ChoiceRecord> Session::export_records() const {
  std::lock_guard lock(mutex_);
  return state_.records;
}

std::string Session::export_text(const std::string& format) const {
  const auto records = export_records();
  std::ostringstream out;
  if (format == "csv") {
    write_csv(out, records);
  } else if (format == "jsonl") {
    write_jsonl(out, records);
  } else {
    fail("invalid_request", "export format must be csv or jsonl");
  }
  return out.str();
}

json Session::dashboard() const {
  const SessionState state = snapshot();
  const SummarySet summaries = summarize(state.records);

  std::array<long long, 4> totals{};
  json by_case = json::object();
  for (const auto& c : state.battery) {
    std::array<long long, 4> counts{};
    for (const auto& s : summaries.subjects) {
      auto it = s.patterns.find(c.id);
      if (it != s.patterns.end()) ++counts[static_cast<int>(pattern_to_region(it->second))];
    }
    json row = json::object();
    for (Region r : kAllRegions) {
      row[to_string(r)] = counts[static_cast<int>(r)];
      totals[static_cast<int>(r)] += counts[static_cast<int>(r)];
    }
    by_case[c.id] = row;
  }
  json region_counts = json::object();
  for (Region r : kAllRegions) region_counts[to_string(r)] = totals[static_cast<int>(r)];

  std::array<long long, 11> histogram{};
  long long part1_done = 0, complete = 0, finalized = 0;
  for (const auto& s : state.subjects) {
    if (s.part1_complete()) {
      ++part1_done;
      ++histogram[static_cast<std::size_t>(s.safe_count())];
    }
    if (s.complete()) ++complete;
    if (s.payout) ++finalized;
  }

  json patterns = json::object();
  for (Region r : kAllRegions) patterns[to_string(r)] = to_string(region_to_pattern(r));

  return json{{"session_id", state.session_id},
              {"status", state.closed ? "closed" : "open"},
              {"subjects", state.subjects.size()},
              {"part1_complete", part1_done},
              {"complete", complete},
              {"finalized", finalized},
              {"records", state.records.size()},
              {"region_patterns", patterns},
              {"region_counts", region_counts},
              {"region_counts_by_case", by_case},
              {"hl_histogram", histogram},
              {"regions", geometry_json()["regions"]}};
}

json Session::describe() const {
  const SessionState state = snapshot();
  json subjects = json::array();
  for (const auto& s : state.subjects) {
    subjects.push_back(json{{"subject_id", s.subject_id},
                            {"part1_answered", s.hl.size()},
                            {"part2_answered", s.part2.size()},
                            {"complete", s.complete()},
                            {"dominated_hl", s.dominated()},
                            {"finalized", s.payout.has_value()}});
  }
  json cases = json::array();
  for (const auto& c : state.battery) cases.push_back(mps_case_json(c));
  json rows = json::array();
  for (const auto& r : state.hl_rows) rows.push_back(hl_row_json(r));
  return json{{"session_id", state.session_id},
              {"seed", state.seed},
              {"status", state.closed ? "closed" : "open"},
              {"subjects", subjects},
              {"battery", {{"mps_cases", cases}, {"hl_rows", rows}}}};
}

// ----- SessionStore -----

SessionStore::SessionStore(StoreOptions options) : options_(std::move(options)) {
  if (options_.data_dir.empty()) return;
  std::filesystem::create_directories(options_.data_dir);
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(options_.data_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    auto log = std::make_unique<EventLog>(path, options_.fsync);
    if (log->loaded().empty()) continue;
    SessionState state = replay(log->loaded());
    if (state.session_id != path.stem().string()) {
      fail("corrupt_log", path.string() + " holds session '" + state.session_id + "'");
    }
    const std::string id = state.session_id;
    sessions_[id] = std::make_shared<Session>(std::move(state), std::move(log), options_.clock);
  }
}

std::shared_ptr<Session> SessionStore::create(const json& config_json) {
  std::lock_guard lock(mutex_);
  std::string default_id;
  for (std::size_t n = sessions_.size() + 1;; ++n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "session-%03zu", n);
    if (!sessions_.count(buf)) {
      default_id = buf;
      break;
    }
  }
  const SessionConfig config = session_config_from_json(config_json, default_id, options_.default_seed);
  if (sessions_.count(config.session_id)) fail("duplicate_session", "session '" + config.session_id + "' already exists");

  const json event = created_event(config);
  SessionState state = apply_event(SessionState{}, event);
  std::unique_ptr<EventLog> log;
  if (!options_.data_dir.empty()) {
    const auto path = options_.data_dir / (config.session_id + ".jsonl");
    if (std::filesystem::exists(path) && std::filesystem::file_size(path) > 0) {
      fail("duplicate_session", "a log for session '" + config.session_id + "' already exists");
    }
    log = std::make_unique<EventLog>(path, options_.fsync);
    log->append(event);
  }
  auto session = std::make_shared<Session>(std::move(state), std::move(log), options_.clock);
  sessions_[config.session_id] = session;
  return session;
}

std::shared_ptr<Session> SessionStore::get(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) fail("unknown_session", "no session '" + session_id + "'");
  return it->second;
}

std::vector<std::string> SessionStore::ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

}  // namespace mpsrisk
