#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "aag/provider.hpp"

namespace aag {

/// A survey row that could not be turned into a valid record.
struct RowError {
  std::size_t row = 0;  // 1-based data row (header excluded) or JSONL line
  std::string id;
  std::string code;
  std::string message;
  std::string path;
};

struct SurveyData {
  std::vector<UserAccountRecord> records;
  std::vector<std::size_t> rows;  // source row of each record
  std::vector<RowError> errors;
};

/// RFC 4180 fields: quoted fields may contain commas, quotes ("") and
/// newlines. Accepts LF or CRLF line ends.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Survey CSV with a header row. Device ids are the <n> of the
/// device_<n>_* columns. Optional columns: id, pw_manager_devices.
/// Header problems throw ParseError; row problems are collected.
SurveyData parse_survey_csv(std::string_view text);

/// One UserAccountRecord JSON object per line; blank lines are skipped.
SurveyData parse_survey_jsonl(std::string_view text);

/// Reads a survey file, choosing JSONL when the first non-blank character
/// is '{' and CSV otherwise. Throws IoError when unreadable.
SurveyData load_survey(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace aag
