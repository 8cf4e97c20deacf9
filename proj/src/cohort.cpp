#include "aag/cohort.hpp"

#include <algorithm>
#include <optional>
#include <thread>
#include <variant>

#include "aag/error.hpp"

namespace aag {

namespace {

using Outcome = std::variant<UserResult, RowError>;

Outcome analyze_record(const UserAccountRecord& record, std::size_t row, const BatchOptions& options) {
  try {
    auto graph = instantiate_user_graph(record, options.instantiate);
    auto a = analyze_account(graph, graph.roots().front(), options.analysis);
    UserResult u;
    u.id = record.id.empty() ? "row-" + std::to_string(row) : record.id;
    u.provider = record.provider;
    u.security = a.security;
    u.score = a.accessibility.score;
    u.legacy = a.legacy;
    u.lockout_sets = a.accessibility.lockout_sets;
    u.key_access_methods = a.key_access_methods;
    for (const auto& id : a.key_access_methods) u.key_access_labels.push_back(a.labels.at(id));
    u.narrative = a.narrative;
    return u;
  } catch (const Error& e) {
    return RowError{row, record.id, std::string(to_string(e.code())), e.what(), e.path()};
  }
}

void count_adoption(const UserAccountRecord& r, ProviderAggregate& agg) {
  auto bump = [&](const char* key, bool on) {
    if (on) ++agg.adoption[key];
  };
  if (r.google) {
    const auto& g = *r.google;
    bump("password_only", !g.mfa_enabled && g.sign_in_by_phone.empty());
    bump("sign_in_by_phone", !g.mfa_enabled && !g.sign_in_by_phone.empty());
    bump("prompts", g.mfa_enabled && !g.prompts.empty());
    bump("authenticator_app", g.mfa_enabled && !g.authenticator_app.empty());
    bump("backup_codes", g.mfa_enabled && g.backup_codes);
    bump("voice_text", g.mfa_enabled && !g.voice_text.empty());
    bump("security_key", g.mfa_enabled && !g.security_key.empty());
    bump("recovery_phone", g.recovery_phone.has_value());
    bump("recovery_email", g.recovery_email);
  }
  if (r.apple) {
    const auto& a = *r.apple;
    bump("trusted_device", !a.trusted_devices.empty());
    bump("trusted_phone_number", !a.trusted_phone_numbers.empty());
    bump("recovery_key", a.recovery_key);
  }
  const auto& pw = r.password;
  auto access = [&](const char* key, bool on) {
    if (on) ++agg.password_access[key];
  };
  access("memory", pw.memory);
  access("password_manager", pw.password_manager);
  access("browser_device", pw.browser_device || !pw.browser_devices.empty());
  access("paper", pw.paper);
}

ProviderAggregate empty_aggregate(Provider provider) {
  ProviderAggregate agg;
  for (auto l : {SecurityLevel::Low, SecurityLevel::Medium, SecurityLevel::High}) agg.security[l] = 0;
  for (auto b : {RiskBand::Red, RiskBand::Yellow, RiskBand::Green}) agg.bands[b] = 0;
  const auto keys = provider == Provider::Google
                        ? std::vector<const char*>{"password_only", "sign_in_by_phone", "prompts",
                                                   "authenticator_app", "backup_codes", "voice_text",
                                                   "security_key", "recovery_phone", "recovery_email"}
                        : std::vector<const char*>{"trusted_device", "trusted_phone_number", "recovery_key"};
  for (auto k : keys) agg.adoption[k] = 0;
  for (auto k : {"memory", "password_manager", "browser_device", "paper"}) agg.password_access[k] = 0;
  return agg;
}

long long floor_of(const Rational& value) {
  boost::multiprecision::cpp_int q = boost::multiprecision::numerator(value) /
                                     boost::multiprecision::denominator(value);
  return q.convert_to<long long>();
}

}  // namespace

CohortReport batch_analyze(const std::vector<UserAccountRecord>& records, const BatchOptions& options) {
  std::vector<std::optional<Outcome>> outcomes(records.size());

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(records.size(), 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < records.size(); i += threads) {
          outcomes[i] = analyze_record(records[i], i + 1, options);
        }
      });
    }
  }

  CohortReport report;
  report.aggregates[Provider::Google] = empty_aggregate(Provider::Google);
  report.aggregates[Provider::Apple] = empty_aggregate(Provider::Apple);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (auto* err = std::get_if<RowError>(&*outcomes[i])) {
      report.errors.push_back(std::move(*err));
      continue;
    }
    auto& u = std::get<UserResult>(*outcomes[i]);
    auto& agg = report.aggregates[u.provider];
    ++agg.users;
    ++agg.security[u.security];
    ++agg.accessibility[floor_of(u.score)];
    ++agg.bands[accessibility_band(u.score)];
    count_adoption(records[i], agg);
    report.users.push_back(std::move(u));
  }
  return report;
}

Json to_json(const CohortReport& report) {
  Json users = Json::array();
  Json low = Json::array();
  for (const auto& u : report.users) {
    Json ju;
    ju["id"] = u.id;
    ju["provider"] = to_string(u.provider);
    ju["security"] = to_string(u.security);
    ju["score"] = format_rational(u.score);
    ju["score_decimal"] = to_double(u.score);
    ju["band"] = to_string(accessibility_band(u.score));
    ju["legacy_score"] = format_rational(u.legacy);
    ju["lockout_sets"] = to_json(u.lockout_sets);
    ju["key_access_methods"] = to_json(u.key_access_methods);
    ju["narrative"] = u.narrative;
    users.push_back(std::move(ju));
    if (u.score <= 1) {
      Json jl;
      jl["id"] = u.id;
      jl["provider"] = to_string(u.provider);
      jl["score"] = format_rational(u.score);
      jl["key_access_methods"] = to_json(u.key_access_methods);
      jl["key_access_labels"] = to_json(u.key_access_labels);
      low.push_back(std::move(jl));
    }
  }

  Json aggregates = Json::object();
  for (const auto& [provider, agg] : report.aggregates) {
    Json ja;
    ja["users"] = agg.users;
    Json sec = Json::object();
    for (const auto& [level, n] : agg.security) sec[std::string(to_string(level))] = n;
    ja["security_histogram"] = std::move(sec);
    Json acc = Json::object();
    for (const auto& [bin, n] : agg.accessibility) acc[std::to_string(bin)] = n;
    ja["accessibility_histogram"] = std::move(acc);
    Json bands = Json::object();
    for (const auto& [band, n] : agg.bands) bands[std::string(to_string(band))] = n;
    ja["bands"] = std::move(bands);
    Json adoption = Json::object();
    for (const auto& [k, n] : agg.adoption) adoption[k] = n;
    ja["method_adoption"] = std::move(adoption);
    Json pw = Json::object();
    for (const auto& [k, n] : agg.password_access) pw[k] = n;
    ja["password_access"] = std::move(pw);
    aggregates[std::string(to_string(provider))] = std::move(ja);
  }

  Json errors = Json::array();
  for (const auto& e : report.errors) {
    Json je;
    je["row"] = e.row;
    je["id"] = e.id;
    je["code"] = e.code;
    je["message"] = e.message;
    je["path"] = e.path;
    errors.push_back(std::move(je));
  }

  Json out;
  out["users"] = std::move(users);
  out["aggregates"] = std::move(aggregates);
  out["low_accessibility_users"] = std::move(low);
  out["errors"] = std::move(errors);
  return out;
}

}  // namespace aag
