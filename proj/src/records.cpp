#include "mpsrisk/records.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mpsrisk {

using nlohmann::json;

namespace {

json to_json_object(const ChoiceRecord& r) {
  // nlohmann::json keeps keys sorted, so dump() is byte-stable.
  return json{{"session_id", r.session_id}, {"subject_id", r.subject_id}, {"part", r.part},
              {"screen", r.screen},         {"pair", r.pair},             {"chosen", r.chosen},
              {"display_seed", r.display_seed}, {"timestamp", r.timestamp}};
}

ChoiceRecord from_json_object(const json& j) {
  ChoiceRecord r;
  r.session_id = j.at("session_id").get<std::string>();
  r.subject_id = j.at("subject_id").get<std::string>();
  r.part = j.at("part").get<int>();
  r.screen = j.at("screen").get<std::string>();
  r.pair = j.value("pair", std::string{});
  r.chosen = j.at("chosen").get<std::string>();
  r.display_seed = j.value("display_seed", std::uint64_t{0});
  r.timestamp = j.value("timestamp", std::int64_t{0});
  validate_record(r);
  return r;
}

bool needs_quoting(const std::string& field) {
  return field.find_first_of(",\"\n\r") != std::string::npos;
}

std::string csv_field(const std::string& field) {
  if (!needs_quoting(field)) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

template <typename Int>
Int parse_int(const std::string& text, const char* what) {
  std::size_t used = 0;
  long long value = 0;
  try {
    if constexpr (std::is_unsigned_v<Int>) {
      if (text.empty() || text[0] == '-' || text[0] == '+') throw std::invalid_argument(what);
      const auto v = std::stoull(text, &used);
      if (used != text.size()) throw std::invalid_argument(what);
      return static_cast<Int>(v);
    } else {
      value = std::stoll(text, &used);
    }
  } catch (const std::logic_error&) {
    throw std::invalid_argument(std::string("bad ") + what + " '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument(std::string("bad ") + what + " '" + text + "'");
  return static_cast<Int>(value);
}

}  // namespace

void validate_record(const ChoiceRecord& r) {
  if (r.subject_id.empty()) throw std::invalid_argument("record without subject_id");
  if (r.part == 1) {
    const int row = parse_int<int>(r.screen, "HL row");
    if (row < 1 || row > 10) throw std::invalid_argument("HL row out of range: " + r.screen);
    if (!r.pair.empty()) throw std::invalid_argument("part-1 record must not carry a pair tag");
    if (r.chosen != "safe" && r.chosen != "risky") throw std::invalid_argument("part-1 choice must be safe|risky");
  } else if (r.part == 2) {
    if (r.screen.empty()) throw std::invalid_argument("part-2 record without case id");
    if (r.pair == "AB") {
      if (r.chosen != "A" && r.chosen != "B") throw std::invalid_argument("AB decision must choose A or B");
    } else if (r.pair == "AC") {
      if (r.chosen != "A" && r.chosen != "C") throw std::invalid_argument("AC decision must choose A or C");
    } else {
      throw std::invalid_argument("part-2 pair must be AB or AC, got '" + r.pair + "'");
    }
  } else {
    throw std::invalid_argument("part must be 1 or 2");
  }
}

std::string to_jsonl_line(const ChoiceRecord& record) { return to_json_object(record).dump(); }

void write_jsonl(std::ostream& out, const std::vector<ChoiceRecord>& records) {
  for (const auto& r : records) out << to_jsonl_line(r) << '\n';
}

void write_csv(std::ostream& out, const std::vector<ChoiceRecord>& records) {
  out << kRecordCsvHeader << '\n';
  for (const auto& r : records) {
    out << csv_field(r.session_id) << ',' << csv_field(r.subject_id) << ',' << r.part << ',' << csv_field(r.screen)
        << ',' << csv_field(r.pair) << ',' << csv_field(r.chosen) << ',' << r.display_seed << ',' << r.timestamp
        << '\n';
  }
}

std::vector<ChoiceRecord> read_jsonl(std::istream& in) {
  std::vector<ChoiceRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(from_json_object(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::invalid_argument("records line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ChoiceRecord> read_csv(std::istream& in) {
  std::vector<ChoiceRecord> out;
  std::string line;
  if (!std::getline(in, line)) return out;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordCsvHeader) throw std::invalid_argument("unexpected CSV header: " + line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      const auto f = split_csv_line(line);
      if (f.size() != 8) throw std::invalid_argument("expected 8 fields, got " + std::to_string(f.size()));
      ChoiceRecord r;
      r.session_id = f[0];
      r.subject_id = f[1];
      r.part = parse_int<int>(f[2], "part");
      r.screen = f[3];
      r.pair = f[4];
      r.chosen = f[5];
      r.display_seed = parse_int<std::uint64_t>(f[6], "display_seed");
      r.timestamp = parse_int<std::int64_t>(f[7], "timestamp");
      validate_record(r);
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

namespace {
bool is_csv_path(const std::string& path) { return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0; }
}  // namespace

std::vector<ChoiceRecord> read_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return is_csv_path(path) ? read_csv(in) : read_jsonl(in);
}

void write_records_file(const std::string& path, const std::vector<ChoiceRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (is_csv_path(path)) {
    write_csv(out, records);
  } else {
    write_jsonl(out, records);
  }
}

}  // namespace mpsrisk
