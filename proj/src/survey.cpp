#include "aag/survey.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "aag/error.hpp"

namespace aag {

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    bool blank = row.size() == 1 && row.front().empty();
    if (!blank) rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) {
          throw Error(ErrorCode::ParseError, "stray quote inside an unquoted CSV field");
        }
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, "unterminated quoted CSV field");
  if (field_started || !row.empty()) end_row();
  return rows;
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ids(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

const std::set<std::string, std::less<>> kFixedColumns{
    "id",          "provider",          "pw_memory",        "pw_manager",        "pw_browser_devices",
    "pw_paper",    "pw_manager_devices", "mfa_enabled",      "prompts_devices",   "authapp_devices",
    "backup_codes", "voicetext_devices", "key_devices",      "signin_phone_devices",
    "recovery_phone_device", "recovery_email", "trusted_devices", "trusted_number_devices", "recovery_key"};

const std::set<std::string, std::less<>> kGoogleColumns{
    "mfa_enabled", "prompts_devices", "authapp_devices", "backup_codes", "voicetext_devices",
    "key_devices", "signin_phone_devices", "recovery_phone_device", "recovery_email"};

const std::set<std::string, std::less<>> kAppleColumns{"trusted_devices", "trusted_number_devices",
                                                        "recovery_key"};

class RowReader {
 public:
  RowReader(const std::map<std::string, std::size_t>& columns, const std::vector<std::string>& cells)
      : columns_(columns), cells_(cells) {}

  std::string get(const std::string& column) const {
    auto it = columns_.find(column);
    if (it == columns_.end() || it->second >= cells_.size()) return {};
    return trim(cells_[it->second]);
  }

  bool flag(const std::string& column) const {
    auto v = get(column);
    if (v.empty() || v == "0") return false;
    if (v == "1") return true;
    throw Error(ErrorCode::InvalidRecord, column + ": expected 0 or 1, got '" + v + "'", column);
  }

  std::vector<std::string> ids(const std::string& column) const { return split_ids(get(column)); }

 private:
  const std::map<std::string, std::size_t>& columns_;
  const std::vector<std::string>& cells_;
};

}  // namespace

SurveyData parse_survey_csv(std::string_view text) {
  auto table = parse_csv(text);
  SurveyData data;
  if (table.empty()) return data;

  std::map<std::string, std::size_t> columns;
  std::vector<std::string> device_numbers;
  static const std::regex device_column(R"(device_([0-9]+)_(category|label))");
  for (std::size_t i = 0; i < table.front().size(); ++i) {
    auto name = trim(table.front()[i]);
    if (i == 0 && name.starts_with("\xEF\xBB\xBF")) name = name.substr(3);
    std::smatch m;
    if (std::regex_match(name, m, device_column)) {
      if (std::ranges::find(device_numbers, m[1].str()) == device_numbers.end()) {
        device_numbers.push_back(m[1].str());
      }
    } else if (!kFixedColumns.contains(name)) {
      throw Error(ErrorCode::ParseError, "unknown survey column '" + name + "'", name);
    }
    if (!columns.emplace(name, i).second) {
      throw Error(ErrorCode::ParseError, "duplicate survey column '" + name + "'", name);
    }
  }
  if (!columns.contains("provider")) {
    throw Error(ErrorCode::ParseError, "survey CSV needs a 'provider' column", "provider");
  }

  for (std::size_t r = 1; r < table.size(); ++r) {
    RowReader row(columns, table[r]);
    auto id = row.get("id");
    if (id.empty()) id = "row-" + std::to_string(r);
    try {
      UserAccountRecord rec;
      rec.id = id;
      auto provider = parse_provider(row.get("provider"));
      if (!provider) {
        throw Error(ErrorCode::InvalidRecord, "provider: expected google or apple", "provider");
      }
      rec.provider = *provider;

      for (const auto& n : device_numbers) {
        auto cat_text = row.get("device_" + n + "_category");
        auto label = row.get("device_" + n + "_label");
        if (cat_text.empty()) {
          if (!label.empty()) {
            throw Error(ErrorCode::InvalidRecord, "device_" + n + "_category: missing for a labelled device",
                        "device_" + n + "_category");
          }
          continue;
        }
        auto cat = parse_device_category(cat_text);
        if (!cat) {
          throw Error(ErrorCode::InvalidRecord, "device_" + n + "_category: unknown category '" + cat_text + "'",
                      "device_" + n + "_category");
        }
        rec.inventory.devices.push_back({n, *cat, label});
      }

      rec.password.memory = row.flag("pw_memory");
      rec.password.password_manager = row.flag("pw_manager");
      rec.password.browser_devices = row.ids("pw_browser_devices");
      rec.password.browser_device = !rec.password.browser_devices.empty();
      rec.password.paper = row.flag("pw_paper");
      rec.password.manager_devices = row.ids("pw_manager_devices");

      const auto& own = rec.provider == Provider::Google ? kGoogleColumns : kAppleColumns;
      const auto& other = rec.provider == Provider::Google ? kAppleColumns : kGoogleColumns;
      for (const auto& col : other) {
        if (!own.contains(col) && !row.get(col).empty() && row.get(col) != "0") {
          throw Error(ErrorCode::InvalidRecord,
                      col + ": not applicable to " + std::string(to_string(rec.provider)) + " records", col);
        }
      }

      if (rec.provider == Provider::Google) {
        GoogleSettings g;
        g.mfa_enabled = row.flag("mfa_enabled");
        g.prompts = row.ids("prompts_devices");
        g.authenticator_app = row.ids("authapp_devices");
        g.backup_codes = row.flag("backup_codes");
        g.voice_text = row.ids("voicetext_devices");
        g.security_key = row.ids("key_devices");
        g.sign_in_by_phone = row.ids("signin_phone_devices");
        if (auto rp = row.get("recovery_phone_device"); !rp.empty()) g.recovery_phone = rp;
        g.recovery_email = row.flag("recovery_email");
        rec.google = std::move(g);
      } else {
        AppleSettings a;
        a.trusted_devices = row.ids("trusted_devices");
        a.trusted_phone_numbers = row.ids("trusted_number_devices");
        a.recovery_key = row.flag("recovery_key");
        rec.apple = std::move(a);
      }
      validate_record(rec);
      data.records.push_back(std::move(rec));
      data.rows.push_back(r);
    } catch (const Error& e) {
      data.errors.push_back({r, id, std::string(to_string(e.code())), e.what(), e.path()});
    }
  }
  return data;
}

SurveyData parse_survey_jsonl(std::string_view text) {
  SurveyData data;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::string id = "line-" + std::to_string(line_no);
    try {
      Json j;
      try {
        j = Json::parse(line);
      } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
      }
      if (j.is_object() && j.contains("id") && j["id"].is_string()) id = j["id"].get<std::string>();
      auto rec = record_from_json(j);
      if (rec.id.empty()) rec.id = id;
      data.records.push_back(std::move(rec));
      data.rows.push_back(line_no);
    } catch (const Error& e) {
      data.errors.push_back({line_no, id, std::string(to_string(e.code())), e.what(), e.path()});
    }
  }
  return data;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SurveyData load_survey(const std::filesystem::path& path) {
  auto text = read_file(path);
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_survey_jsonl(text);
  return parse_survey_csv(text);
}

}  // namespace aag
