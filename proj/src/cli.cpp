#include "aag/cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <pthread.h>
#include <sstream>
#include <thread>

#include "aag/analysis.hpp"
#include "aag/cohort.hpp"
#include "aag/error.hpp"
#include "aag/service.hpp"
#include "aag/survey.hpp"

namespace aag {

namespace {

struct Settings {
  bool json = false;
  bool strict = false;
  std::string unmapped = "abstract";
  std::string policy_path;
  unsigned threads = 0;
};

void print_error(std::ostream& err, const Error& e) {
  err << "error: " << to_string(e.code()) << ": " << e.what();
  if (!e.path().empty()) err << " (at " << e.path() << ")";
  err << '\n';
}

Json error_json(const Error& e) {
  Json j;
  j["code"] = to_string(e.code());
  j["message"] = e.what();
  j["path"] = e.path();
  return j;
}

AnalysisOptions analysis_options(const Settings& s) {
  AnalysisOptions options;
  options.unmapped = *parse_unmapped_leaf_policy(s.unmapped);
  if (!s.policy_path.empty()) {
    auto text = read_file(s.policy_path);
    try {
      options.scoring = parse_scoring_policy(Json::parse(text));
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::ParseError, std::string("policy file is not JSON: ") + e.what(), s.policy_path);
    }
  }
  return options;
}

AccountAccessGraph load_graph(const std::string& path, const Settings& s) {
  auto text = read_file(path);
  return parse_graph(text, ParseOptions{s.strict});
}

void print_warnings(std::ostream& err, const AccountAccessGraph& g) {
  for (const auto& w : g.warnings()) err << "warning: " << w << '\n';
}

std::string pick_account(const AccountAccessGraph& g, const std::string& requested) {
  return requested.empty() ? g.roots().front() : requested;
}

std::string render_set(const VarSet& set, const std::map<NodeId, std::string>& labels) {
  std::string out = "{";
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) out += ", ";
    auto it = labels.find(set[i]);
    out += it == labels.end() ? set[i] : it->second;
  }
  return out + "}";
}

std::set<NodeId> split_list(const std::string& text) {
  std::set<NodeId> ids;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) ids.insert(item);
  }
  return ids;
}

std::string file_stem_for(const std::string& id) {
  std::string out;
  for (char c : id) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  if (out.empty() || out.front() == '.') out.insert(out.begin(), '_');
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'", path.string());
}

int cmd_validate(const std::string& path, const Settings& s, std::ostream& out, std::ostream& err) {
  try {
    auto g = load_graph(path, s);
    if (s.json) {
      Json j;
      j["valid"] = true;
      j["nodes"] = g.nodes().size();
      j["edges"] = g.edges().size();
      j["roots"] = g.roots();
      j["warnings"] = g.warnings();
      out << j.dump(2) << '\n';
    } else {
      print_warnings(err, g);
      out << "valid: " << g.nodes().size() << " nodes, " << g.edges().size() << " edges, "
          << g.roots().size() << (g.roots().size() == 1 ? " root\n" : " roots\n");
    }
    return 0;
  } catch (const Error& e) {
    if (s.json) {
      Json j;
      j["valid"] = false;
      j["error"] = error_json(e);
      out << j.dump(2) << '\n';
    }
    print_error(err, e);
    return 1;
  }
}

struct ScoreFlags {
  bool security = false;
  bool accessibility = false;
  bool legacy = false;
};

int cmd_score(const std::string& path, const std::string& account, ScoreFlags flags, const Settings& s,
              std::ostream& out, std::ostream& err) {
  auto options = analysis_options(s);
  auto g = load_graph(path, s);
  validate_policy(options.scoring, g);
  auto a = analyze_account(g, pick_account(g, account), options);
  if (!flags.security && !flags.accessibility && !flags.legacy) flags = {true, true, true};

  if (s.json) {
    auto full = to_json(a);
    Json j;
    j["account"] = a.account;
    j["label"] = a.label;
    if (flags.security) {
      j["security"] = full["security"];
      j["security_band"] = full["security_band"];
    }
    if (flags.accessibility) j["accessibility"] = full["accessibility"];
    if (flags.legacy) j["legacy"] = full["legacy"];
    out << j.dump(2) << '\n';
    return 0;
  }

  print_warnings(err, g);
  int selected = flags.security + flags.accessibility + flags.legacy;
  if (selected == 1) {
    if (flags.security) out << to_string(a.security) << '\n';
    if (flags.accessibility) out << format_score(a.accessibility.score) << '\n';
    if (flags.legacy) out << format_score(a.legacy) << '\n';
    return 0;
  }
  out << "account: " << a.label << " (" << a.account << ")\n";
  if (flags.security) {
    out << "security: " << to_string(a.security) << " [" << to_string(security_band(a.security)) << "]\n";
  }
  if (flags.accessibility) {
    out << "accessibility: " << format_score(a.accessibility.score) << " ["
        << to_string(accessibility_band(a.accessibility.score)) << "]\n";
  }
  if (flags.legacy) out << "legacy (reconstructed): " << format_score(a.legacy) << '\n';
  return 0;
}

int cmd_explain(const std::string& path, const std::string& account, const Settings& s, std::ostream& out,
                std::ostream& err) {
  auto options = analysis_options(s);
  auto g = load_graph(path, s);
  validate_policy(options.scoring, g);
  auto a = analyze_account(g, pick_account(g, account), options);
  if (s.json) {
    Json j;
    j["account"] = a.account;
    j.update(to_json(a));
    out << j.dump(2) << '\n';
    return 0;
  }
  print_warnings(err, g);
  const auto& acc = a.accessibility;
  out << "term: " << render(acc.reduced, a.labels) << '\n';
  out << "accessibility: " << format_score(acc.score) << " [" << to_string(accessibility_band(acc.score))
      << "]\n";
  out << "lockout sets:\n";
  for (const auto& set : acc.lockout_sets) out << "  " << render_set(set, a.labels) << '\n';
  out << a.narrative << '\n';
  return 0;
}

int cmd_what_if(const std::string& path, const std::string& account, const std::string& lose,
                const Settings& s, std::ostream& out, std::ostream& err) {
  auto options = analysis_options(s);
  auto g = load_graph(path, s);
  auto acct = pick_account(g, account);
  auto lost = split_list(lose);
  auto result = what_if(g, acct, lost, options.unmapped, options.limits);
  if (s.json) {
    out << to_json(result, acct, lost, variable_labels(g)).dump(2) << '\n';
    return 0;
  }
  print_warnings(err, g);
  out << (result.accessible ? "accessible" : "inaccessible") << '\n';
  if (result.accessible) {
    out << "accessibility: " << format_score(result.result.score) << " ["
        << to_string(accessibility_band(result.result.score)) << "]\n";
  }
  return 0;
}

void report_row_errors(std::ostream& err, const std::vector<RowError>& errors) {
  for (const auto& e : errors) {
    err << "error: row " << e.row << " (" << e.id << "): " << e.code << ": " << e.message;
    if (!e.path.empty()) err << " (at " << e.path << ")";
    err << '\n';
  }
}

int cmd_convert(const std::string& survey, const std::string& dir, bool manager_devices, const Settings& s,
                std::ostream& out, std::ostream& err) {
  auto data = load_survey(survey);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + dir + "': " + ec.message(), dir);

  InstantiateOptions inst{manager_devices};
  std::set<std::string> used;
  std::vector<RowError> errors = data.errors;
  Json written = Json::array();
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    const auto& rec = data.records[i];
    try {
      auto g = instantiate_user_graph(rec, inst);
      auto stem = file_stem_for(rec.id);
      if (!used.insert(stem).second) {
        stem += "-row" + std::to_string(data.rows[i]);
        used.insert(stem);
      }
      auto file = std::filesystem::path(dir) / (stem + ".json");
      write_file(file, serialize(g) + "\n");
      written.push_back(file.string());
    } catch (const Error& e) {
      errors.push_back({data.rows[i], rec.id, std::string(to_string(e.code())), e.what(), e.path()});
    }
  }
  std::ranges::sort(errors, {}, &RowError::row);
  if (s.json) {
    Json j;
    j["written"] = std::move(written);
    Json je = Json::array();
    for (const auto& e : errors) je.push_back({{"row", e.row}, {"id", e.id}, {"code", e.code}, {"message", e.message}, {"path", e.path}});
    j["errors"] = std::move(je);
    out << j.dump(2) << '\n';
  } else {
    report_row_errors(err, errors);
    out << "wrote " << written.size() << " graph file" << (written.size() == 1 ? "" : "s") << " to " << dir
        << '\n';
  }
  return 0;
}

int cmd_batch(const std::string& survey, const std::string& report_path, bool manager_devices,
              const Settings& s, std::ostream& out, std::ostream& err) {
  BatchOptions options;
  options.analysis = analysis_options(s);
  options.instantiate.map_manager_to_devices = manager_devices;
  options.threads = s.threads;
  auto data = load_survey(survey);
  auto report = batch_analyze(data.records, options);
  // batch_analyze numbers rows by record position; map back to file rows.
  for (auto& e : report.errors) e.row = data.rows[e.row - 1];
  report.errors.insert(report.errors.end(), data.errors.begin(), data.errors.end());
  std::ranges::stable_sort(report.errors, {}, &RowError::row);

  auto text = to_json(report).dump(2) + "\n";
  if (!report_path.empty()) write_file(report_path, text);
  if (s.json && report_path.empty()) {
    out << text;
    return 0;
  }
  report_row_errors(err, report.errors);
  out << "users analysed: " << report.users.size() << ", rows rejected: " << report.errors.size() << '\n';
  for (const auto& [provider, agg] : report.aggregates) {
    out << to_string(provider) << ": " << agg.users << " users; security";
    for (const auto& [level, n] : agg.security) out << ' ' << to_string(level) << '=' << n;
    out << "; accessibility bands";
    for (const auto& [band, n] : agg.bands) out << ' ' << to_string(band) << '=' << n;
    out << '\n';
  }
  if (!report_path.empty()) out << "report written to " << report_path << '\n';
  return 0;
}

int cmd_serve(ServiceConfig config, const Settings& s, std::ostream& out, std::ostream& err) {
  config.parse.strict = s.strict;
  config.analysis = analysis_options(s);

  // Route SIGINT/SIGTERM to a waiter thread so shutdown runs outside a
  // signal handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  HttpService service(config);
  int port = service.bind();
  if (port < 0) {
    err << "error: IoError: cannot listen on " << config.host << ':' << config.port << '\n';
    return 1;
  }
  out << "listening on http://" << config.host << ':' << port << std::endl;
  std::jthread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
  });
  service.run();
  if (waiter.joinable()) {
    // run() may also end on its own; wake the waiter.
    pthread_kill(waiter.native_handle(), SIGTERM);
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Account access graph analysis", "aag"};
  app.require_subcommand(1);
  app.fallthrough();

  Settings s;
  app.add_flag("--json", s.json, "Emit machine-readable JSON");
  app.add_flag("--strict", s.strict, "Reject unknown fields in graph documents");
  app.add_option("--unmapped", s.unmapped, "Treatment of leaves with no access method")
      ->check(CLI::IsMember({"abstract", "unsatisfiable"}));
  app.add_option("--policy", s.policy_path, "Scoring policy JSON file")->envname("AAG_SCORING_POLICY");
  app.add_option("--threads", s.threads, "Worker threads for batch (0 = all cores)");

  std::string graph_path, account, lose, survey, out_dir, report_path;
  bool manager_devices = false;
  ScoreFlags flags;
  ServiceConfig service_config;
  long idle_minutes = 30;

  auto* validate = app.add_subcommand("validate", "Check a graph document");
  validate->add_option("graph", graph_path, "Graph JSON file")->required();

  auto* score = app.add_subcommand("score", "Security and accessibility scores");
  score->add_option("graph", graph_path, "Graph JSON file")->required();
  score->add_option("--account", account, "Root account id (default: first root)");
  score->add_flag("--security", flags.security, "Report the security level");
  score->add_flag("--accessibility", flags.accessibility, "Report the accessibility score");
  score->add_flag("--legacy", flags.legacy, "Report the reconstructed legacy score");

  auto* explain = app.add_subcommand("explain", "Lockout sets and narrative");
  explain->add_option("graph", graph_path, "Graph JSON file")->required();
  explain->add_option("--account", account, "Root account id (default: first root)");

  auto* whatif = app.add_subcommand("what-if", "Accessibility after losing access methods");
  whatif->add_option("graph", graph_path, "Graph JSON file")->required();
  whatif->add_option("--account", account, "Root account id (default: first root)");
  whatif->add_option("--lose", lose, "Comma-separated access method ids")->required();

  auto* convert = app.add_subcommand("convert", "Survey rows to graph documents");
  convert->add_option("--survey", survey, "Survey CSV or JSONL file")->required();
  convert->add_option("--out", out_dir, "Output directory")->required();
  convert->add_flag("--manager-devices", manager_devices, "Map the password manager to its devices");

  auto* batch = app.add_subcommand("batch", "Cohort report over a survey");
  batch->add_option("--survey", survey, "Survey CSV or JSONL file")->required();
  batch->add_option("--report", report_path, "Write the JSON report here");
  batch->add_flag("--manager-devices", manager_devices, "Map the password manager to its devices");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--port", service_config.port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", service_config.host, "Bind address");
  serve->add_option("--idle-timeout", idle_minutes, "Session idle timeout in minutes")
      ->check(CLI::PositiveNumber);
  serve->add_option("--max-body", service_config.max_body_bytes, "Request body cap in bytes")
      ->check(CLI::PositiveNumber);
  serve->add_option("--cors-origin", service_config.cors_origin, "Allowed CORS origin");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(graph_path, s, out, err);
    if (score->parsed()) return cmd_score(graph_path, account, flags, s, out, err);
    if (explain->parsed()) return cmd_explain(graph_path, account, s, out, err);
    if (whatif->parsed()) return cmd_what_if(graph_path, account, lose, s, out, err);
    if (convert->parsed()) return cmd_convert(survey, out_dir, manager_devices, s, out, err);
    if (batch->parsed()) return cmd_batch(survey, report_path, manager_devices, s, out, err);
    service_config.idle_timeout = std::chrono::minutes(idle_minutes);
    return cmd_serve(service_config, s, out, err);
  } catch (const Error& e) {
    if (s.json) out << Json{{"error", error_json(e)}}.dump(2) << '\n';
    print_error(err, e);
    return 1;
  }
}

}  // namespace aag
