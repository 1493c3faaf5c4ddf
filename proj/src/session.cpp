#include "mpsrisk/session.hpp"

#include "mpsrisk/json_io.hpp"
#include "mpsrisk/prf.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

namespace mpsrisk {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& code, const std::string& message) { throw SessionError(code, message); }

std::uint64_t parse_u64(const json& j, const std::string& what) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0) return static_cast<std::uint64_t>(j.get<long long>());
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && !s.empty()) return v;
  }
  fail("invalid_config", what + " must be a non-negative 64-bit integer");
}

std::optional<int> parse_row(const std::string& screen) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(screen.data(), screen.data() + screen.size(), v);
  if (ec != std::errc() || ptr != screen.data() + screen.size() || screen.empty()) return std::nullopt;
  return v;
}

const Lottery& case_lottery(const MpsCase& c, const std::string& letter) {
  if (letter == "A") return c.base();
  if (letter == "B") return c.spread_b();
  if (letter == "C") return c.spread_c();
  fail("invalid_choice", "unknown lottery '" + letter + "'");
}

SubjectState& find_mut(SessionState& state, const std::string& subject_id) {
  for (auto& s : state.subjects) {
    if (s.subject_id == subject_id) return s;
  }
  fail("unknown_subject", "no subject '" + subject_id + "' in session " + state.session_id);
}

// Raw draw accepted by the same rejection rule as CounterRng::below.
std::uint64_t accepted_draw(CounterRng& rng, std::uint64_t bound) {
  const std::uint64_t max = CounterRng::max();
  const std::uint64_t limit = max - (max % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x > limit);
  return x;
}

bool acceptable(std::uint64_t x, std::uint64_t bound) {
  const std::uint64_t max = CounterRng::max();
  return x <= max - (max % bound + 1) % bound;
}

json pick_json(const PrizePick& p) {
  return json{{"screen", p.screen},
              {"pair", p.pair},
              {"chosen", p.chosen},
              {"lottery", lottery_json(p.lottery)},
              {"prize", rational_json(p.prize)}};
}

PrizePick pick_from_json(const json& j) {
  return PrizePick{j.at("screen").get<std::string>(), j.at("pair").get<std::string>(), j.at("chosen").get<std::string>(),
                   lottery_from_json(j.at("lottery")), rational_from_json(j.at("prize"))};
}

}  // namespace

bool valid_identifier(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
  });
}

SessionConfig session_config_from_json(const json& j, const std::string& default_id, std::uint64_t default_seed) {
  if (!j.is_object()) fail("invalid_config", "session config must be a JSON object");
  SessionConfig config;
  config.session_id = default_id;
  config.seed = default_seed;
  if (j.contains("session_id")) {
    if (!j["session_id"].is_string()) fail("invalid_config", "session_id must be a string");
    config.session_id = j["session_id"].get<std::string>();
  }
  if (!valid_identifier(config.session_id)) {
    fail("invalid_config", "session_id must be 1-64 characters of [A-Za-z0-9_-]");
  }
  if (j.contains("seed")) config.seed = parse_u64(j["seed"], "seed");
  if (j.contains("battery") && !j["battery"].is_null()) {
    if (!j["battery"].is_array() || j["battery"].empty()) fail("invalid_config", "battery must be a non-empty array");
    std::vector<Lottery> bases;
    for (std::size_t i = 0; i < j["battery"].size(); ++i) {
      const std::string where = "battery[" + std::to_string(i) + "]";
      try {
        const json& entry = j["battery"][i];
        Lottery base = lottery_from_json(entry.contains("base") ? entry.at("base") : entry);
        if (base.size() != 4) fail("invalid_config", where + ": base lotteries need exactly four prizes");
        const MpsFamily family = mps_family(base);
        if (family.partial()) {
          fail("invalid_config", where + ": both middle prizes need positive probability to build L_B and L_C");
        }
        bases.push_back(std::move(base));
      } catch (const SessionError&) {
        throw;
      } catch (const std::exception& e) {
        fail("invalid_config", where + ": " + e.what());
      }
    }
    config.custom_bases = std::move(bases);
  }
  return config;
}

ChoiceSubmission choice_from_json(const json& j) {
  try {
    ChoiceSubmission c;
    c.part = j.at("part").get<int>();
    c.screen = j.at("screen").is_number_integer() ? std::to_string(j.at("screen").get<int>())
                                                  : j.at("screen").get<std::string>();
    c.pair = j.value("pair", std::string());
    c.chosen = j.at("chosen").get<std::string>();
    return c;
  } catch (const json::exception& e) {
    fail("invalid_request", std::string("choice needs part, screen, chosen (and pair in part 2): ") + e.what());
  }
}

int SubjectState::safe_count() const {
  return static_cast<int>(std::count(hl.begin(), hl.end(), "safe"));
}

const SubjectState* SessionState::find(const std::string& subject_id) const {
  for (const auto& s : subjects) {
    if (s.subject_id == subject_id) return &s;
  }
  return nullptr;
}

const MpsCase& SessionState::find_case(const std::string& case_id) const {
  for (const auto& c : battery) {
    if (c.id == case_id) return c;
  }
  fail("invalid_choice", "no case '" + case_id + "' in this session's battery");
}

std::size_t realize_prize(const Lottery& lottery, std::uint64_t draw) {
  // draw / 2^64 < cum  <=>  draw < cum * 2^64
  const Rational scaled_draw(draw);
  const Rational two64 = Rational(boost::multiprecision::cpp_int(1) << 64);
  Rational cum = 0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < lottery.size(); ++k) {
    if (lottery.prob(k) == 0) continue;
    cum += lottery.prob(k);
    last = k;
    if (scaled_draw < cum * two64) return k;
  }
  return last;
}

std::string subject_token(std::uint64_t seed, const std::string& session_id, const std::string& subject_id) {
  const std::uint64_t t = prf(derive_key(seed, "token"), hash_string(session_id + "/" + subject_id));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(t));
  return buf;
}

json created_event(const SessionConfig& config) {
  json battery = nullptr;
  if (config.custom_bases) {
    battery = json::array();
    for (const auto& b : *config.custom_bases) battery.push_back(lottery_json(b));
  }
  return json{{"type", "session_created"}, {"session_id", config.session_id}, {"seed", config.seed}, {"battery", battery}};
}

json registered_event(const std::string& subject_id, const std::string& token) {
  return json{{"type", "subject_registered"}, {"subject_id", subject_id}, {"token", token}};
}

json choice_event(const std::string& subject_id, const ChoiceSubmission& choice, std::int64_t timestamp) {
  return json{{"type", "choice"},     {"subject_id", subject_id}, {"part", choice.part},        {"screen", choice.screen},
              {"pair", choice.pair}, {"chosen", choice.chosen},  {"timestamp", timestamp}};
}

json finalized_event(const PayoutDraw& draw) {
  return json{{"type", "finalized"}, {"subject_id", draw.subject_id}, {"payout", payout_json(draw)}};
}

json closed_event() { return json{{"type", "session_closed"}}; }

void check_choice(const SessionState& state, const std::string& subject_id, const ChoiceSubmission& choice) {
  if (state.closed) fail("session_closed", "session " + state.session_id + " is closed");
  const SubjectState* subject = state.find(subject_id);
  if (!subject) fail("unknown_subject", "no subject '" + subject_id + "' in session " + state.session_id);

  if (choice.part == 1) {
    const auto row = parse_row(choice.screen);
    if (!row || *row < 1 || *row > 10) fail("invalid_choice", "part-one screen must be a row number 1..10");
    if (!choice.pair.empty()) fail("invalid_choice", "part-one choices have no pair");
    if (choice.chosen != "safe" && choice.chosen != "risky") {
      fail("invalid_choice", "part-one choice must be \"safe\" or \"risky\"");
    }
    const int answered = static_cast<int>(subject->hl.size());
    if (*row <= answered) fail("duplicate_choice", "row " + choice.screen + " is already answered");
    if (*row != answered + 1) {
      fail("out_of_order", "row " + choice.screen + " submitted but the current row is " + std::to_string(answered + 1));
    }
    if (choice.chosen == "safe") {
      const auto risky = std::find(subject->hl.begin(), subject->hl.end(), "risky");
      if (risky != subject->hl.end()) {
        fail("single_switch_violation",
             "only one switch is allowed: risky was chosen at row " +
                 std::to_string(risky - subject->hl.begin() + 1) + ", so every later row must be risky");
      }
    }
    return;
  }

  if (choice.part != 2) fail("invalid_choice", "part must be 1 or 2");
  if (choice.pair != "AB" && choice.pair != "AC") fail("invalid_choice", "pair must be \"AB\" or \"AC\"");
  if (choice.chosen != "A" && choice.chosen != std::string(1, choice.pair[1])) {
    fail("invalid_choice", "choice in pair " + choice.pair + " must be \"A\" or \"" + choice.pair.substr(1) + "\"");
  }
  state.find_case(choice.screen);
  if (!subject->part1_complete()) fail("out_of_order", "part two opens after all ten part-one rows are answered");

  const auto& screens = subject->plan.screens;
  const auto it = std::find_if(screens.begin(), screens.end(), [&](const ScreenLayout& s) { return s.case_id == choice.screen; });
  const auto index = static_cast<std::size_t>(it - screens.begin());
  const std::size_t current = subject->part2.size() / 2;
  if (index < current) fail("duplicate_choice", "case " + choice.screen + " is already answered");
  if (index > current) {
    fail("out_of_order", "case " + choice.screen + " submitted but the current screen is " + screens[current].case_id);
  }
  for (std::size_t i = 2 * current; i < subject->part2.size(); ++i) {
    if (subject->part2[i].pair == choice.pair) {
      fail("duplicate_choice", "pair " + choice.pair + " of case " + choice.screen + " is already answered");
    }
  }
}

SessionState apply_event(SessionState state, const json& event) {
  const std::string type = event.value("type", std::string());
  if (type == "session_created") {
    if (state.events != 0) fail("corrupt_log", "session_created must be the first event");
    SessionConfig config;
    config.session_id = event.at("session_id").get<std::string>();
    config.seed = event.at("seed").get<std::uint64_t>();
    if (!event.at("battery").is_null()) {
      std::vector<Lottery> bases;
      for (const auto& b : event.at("battery")) bases.push_back(lottery_from_json(b));
      config.custom_bases = std::move(bases);
    }
    state.session_id = config.session_id;
    state.seed = config.seed;
    state.custom_bases = config.custom_bases;
    state.battery = config.custom_bases ? custom_battery(*config.custom_bases) : paper_battery();
    state.hl_rows = hl_battery();
  } else {
    if (state.events == 0) fail("corrupt_log", "first event must be session_created");
    if (type == "subject_registered") {
      if (state.closed) fail("session_closed", "session " + state.session_id + " is closed");
      const auto id = event.at("subject_id").get<std::string>();
      if (!valid_identifier(id)) fail("invalid_request", "subject id must be 1-64 characters of [A-Za-z0-9_-]");
      if (state.find(id)) fail("duplicate_subject", "subject '" + id + "' is already registered");
      SubjectState s;
      s.subject_id = id;
      s.token = event.at("token").get<std::string>();
      s.display_seed = display_seed(state.seed, id);
      s.plan = display_plan(state.seed, id, case_ids(state.battery));
      state.subjects.push_back(std::move(s));
    } else if (type == "choice") {
      const auto id = event.at("subject_id").get<std::string>();
      ChoiceSubmission c;
      c.part = event.at("part").get<int>();
      c.screen = event.at("screen").get<std::string>();
      c.pair = event.at("pair").get<std::string>();
      c.chosen = event.at("chosen").get<std::string>();
      check_choice(state, id, c);
      SubjectState& s = find_mut(state, id);
      if (c.part == 1) {
        s.hl.push_back(c.chosen);
      } else {
        s.part2.push_back(Part2Answer{c.screen, c.pair, c.chosen});
      }
      state.records.push_back(ChoiceRecord{state.session_id, id, c.part, c.screen, c.pair, c.chosen, s.display_seed,
                                           event.at("timestamp").get<std::int64_t>()});
    } else if (type == "finalized") {
      const auto id = event.at("subject_id").get<std::string>();
      const SubjectState& s = find_mut(state, id);
      if (s.payout) fail("already_finalized", "subject '" + id + "' already has a payout");
      if (!s.complete()) fail("incomplete", "subject '" + id + "' has not finished both parts");
      PayoutDraw draw = payout_from_json(event.at("payout"));
      if (draw.subject_id != id ||
          payout_from_transcript(state, id, draw.rng_seed, draw.transcript) != draw) {
        fail("corrupt_log", "payout for '" + id + "' does not match its transcript");
      }
      find_mut(state, id).payout = std::move(draw);
    } else if (type == "session_closed") {
      if (state.closed) fail("session_closed", "session " + state.session_id + " is already closed");
      state.closed = true;
    } else {
      fail("corrupt_log", "unknown event type '" + type + "'");
    }
  }
  ++state.events;
  return state;
}

SessionState replay(const std::vector<json>& events) {
  SessionState state;
  for (std::size_t i = 0; i < events.size(); ++i) {
    try {
      state = apply_event(std::move(state), events[i]);
    } catch (const SessionError& e) {
      throw SessionError("corrupt_log", "event " + std::to_string(i + 1) + ": " + e.what());
    } catch (const std::exception& e) {
      throw SessionError("corrupt_log", "event " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return state;
}

std::uint64_t default_payout_seed(const SessionState& state, const std::string& subject_id) {
  return derive_key(state.seed, "payout:" + subject_id);
}

PayoutDraw payout_from_transcript(const SessionState& state, const std::string& subject_id, std::uint64_t rng_seed,
                                  const std::vector<TranscriptEntry>& transcript) {
  const SubjectState* s = state.find(subject_id);
  if (!s) fail("unknown_subject", "no subject '" + subject_id + "' in session " + state.session_id);
  if (!s->complete()) fail("incomplete", "subject '" + subject_id + "' has not finished both parts");
  const std::array<const char*, 4> labels{"hl_row", "hl_prize", "part2_decision", "part2_prize"};
  if (transcript.size() != labels.size()) fail("corrupt_log", "payout transcript needs four draws");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (transcript[i].label != labels[i]) fail("corrupt_log", "unexpected transcript label " + transcript[i].label);
  }
  const std::uint64_t decisions = s->part2.size();
  if (!acceptable(transcript[0].value, 10) || !acceptable(transcript[2].value, decisions)) {
    fail("corrupt_log", "transcript draw outside the acceptance range");
  }

  const auto row_index = static_cast<std::size_t>(transcript[0].value % 10);
  const HLRow& row = state.hl_rows.at(row_index);
  const std::string& hl_choice = s->hl[row_index];
  const Lottery& hl_lottery = hl_choice == "safe" ? row.safe : row.risky;
  const Rational hl_prize = hl_lottery.prizes()[realize_prize(hl_lottery, transcript[1].value)];

  const Part2Answer& answer = s->part2[static_cast<std::size_t>(transcript[2].value % decisions)];
  const Lottery& p2_lottery = case_lottery(state.find_case(answer.case_id), answer.chosen);
  const Rational p2_prize = p2_lottery.prizes()[realize_prize(p2_lottery, transcript[3].value)];

  return PayoutDraw{subject_id,
                    rng_seed,
                    PrizePick{std::to_string(row.index), "", hl_choice, hl_lottery, hl_prize},
                    PrizePick{answer.case_id, answer.pair, answer.chosen, p2_lottery, p2_prize},
                    transcript};
}

PayoutDraw draw_payout(const SessionState& state, const std::string& subject_id, std::uint64_t rng_seed) {
  const SubjectState* s = state.find(subject_id);
  if (!s) fail("unknown_subject", "no subject '" + subject_id + "' in session " + state.session_id);
  if (!s->complete()) fail("incomplete", "subject '" + subject_id + "' has not finished both parts");
  CounterRng rng(rng_seed);
  std::vector<TranscriptEntry> transcript;
  transcript.push_back({"hl_row", accepted_draw(rng, 10)});
  transcript.push_back({"hl_prize", rng()});
  transcript.push_back({"part2_decision", accepted_draw(rng, s->part2.size())});
  transcript.push_back({"part2_prize", rng()});
  return payout_from_transcript(state, subject_id, rng_seed, transcript);
}

json payout_json(const PayoutDraw& d) {
  json transcript = json::array();
  for (const auto& t : d.transcript) transcript.push_back(json{{"label", t.label}, {"value", t.value}});
  return json{{"subject_id", d.subject_id},
              {"rng_seed", d.rng_seed},
              {"part1", pick_json(d.part1)},
              {"part2", pick_json(d.part2)},
              {"total", rational_json(d.total())},
              {"transcript", transcript}};
}

PayoutDraw payout_from_json(const json& j) {
  std::vector<TranscriptEntry> transcript;
  for (const auto& t : j.at("transcript")) {
    transcript.push_back({t.at("label").get<std::string>(), t.at("value").get<std::uint64_t>()});
  }
  return PayoutDraw{j.at("subject_id").get<std::string>(), j.at("rng_seed").get<std::uint64_t>(),
                    pick_from_json(j.at("part1")), pick_from_json(j.at("part2")), std::move(transcript)};
}

}  // namespace mpsrisk
