#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mpsrisk {

// One decision, live or simulated.
//   part 1: screen = HL row "1".."10", pair = "", chosen = "safe" | "risky"
//   part 2: screen = case id,  pair = "AB" | "AC", chosen = "A" | "B" | "C"
struct ChoiceRecord {
  std::string session_id;
  std::string subject_id;
  int part = 0;
  std::string screen;
  std::string pair;
  std::string chosen;
  std::uint64_t display_seed = 0;
  std::int64_t timestamp = 0;

  friend bool operator==(const ChoiceRecord&, const ChoiceRecord&) = default;
};

inline constexpr std::string_view kRecordCsvHeader =
    "session_id,subject_id,part,screen,pair,chosen,display_seed,timestamp";

// Throws std::invalid_argument when fields are inconsistent with the part.
void validate_record(const ChoiceRecord& record);

void write_jsonl(std::ostream& out, const std::vector<ChoiceRecord>& records);
void write_csv(std::ostream& out, const std::vector<ChoiceRecord>& records);
std::string to_jsonl_line(const ChoiceRecord& record);

// Blank lines are skipped; malformed lines throw with the line number.
std::vector<ChoiceRecord> read_jsonl(std::istream& in);
std::vector<ChoiceRecord> read_csv(std::istream& in);

// Picks the reader from the extension (.csv, otherwise JSONL).
std::vector<ChoiceRecord> read_records_file(const std::string& path);
void write_records_file(const std::string& path, const std::vector<ChoiceRecord>& records);

}  // namespace mpsrisk
