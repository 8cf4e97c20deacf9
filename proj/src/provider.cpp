#include "aag/provider.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "aag/error.hpp"

namespace aag {

std::string_view to_string(Provider provider) {
  return provider == Provider::Google ? "google" : "apple";
}

std::optional<Provider> parse_provider(std::string_view text) {
  if (text == "google") return Provider::Google;
  if (text == "apple") return Provider::Apple;
  return std::nullopt;
}

std::string_view to_string(DeviceCategory category) {
  switch (category) {
    case DeviceCategory::Phone: return "phone";
    case DeviceCategory::ComputerLaptop: return "computer_laptop";
    case DeviceCategory::Tablet: return "tablet";
    case DeviceCategory::SmartWatch: return "smart_watch";
    case DeviceCategory::SecurityKey: return "security_key";
  }
  return "phone";
}

std::optional<DeviceCategory> parse_device_category(std::string_view text) {
  for (auto c : {DeviceCategory::Phone, DeviceCategory::ComputerLaptop, DeviceCategory::Tablet,
                 DeviceCategory::SmartWatch, DeviceCategory::SecurityKey}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

const Device* DeviceInventory::find(std::string_view id) const {
  auto it = std::ranges::find(devices, id, &Device::id);
  return it == devices.end() ? nullptr : &*it;
}

std::string device_node_id(std::string_view device_id) { return "device:" + std::string(device_id); }

namespace {

using Categories = std::initializer_list<DeviceCategory>;

constexpr auto kAnyButKey = {DeviceCategory::Phone, DeviceCategory::ComputerLaptop, DeviceCategory::Tablet,
                             DeviceCategory::SmartWatch};

[[noreturn]] void invalid(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::InvalidRecord, path + ": " + message, path);
}

void check_devices(const DeviceInventory& inv, const std::vector<std::string>& ids, const std::string& path,
                   Categories allowed) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto item = path + "[" + std::to_string(i) + "]";
    const auto* d = inv.find(ids[i]);
    if (!d) invalid(item, "unknown device '" + ids[i] + "'");
    if (std::ranges::find(allowed, d->category) == allowed.end()) {
      invalid(item, "device '" + ids[i] + "' is a " + std::string(to_string(d->category)) +
                        ", not allowed here");
    }
    if (!seen.insert(ids[i]).second) invalid(item, "device '" + ids[i] + "' listed twice");
  }
}

}  // namespace

void validate_record(const UserAccountRecord& r) {
  std::set<std::string> ids;
  for (std::size_t i = 0; i < r.inventory.devices.size(); ++i) {
    const auto& d = r.inventory.devices[i];
    auto path = "devices[" + std::to_string(i) + "].id";
    if (d.id.empty()) invalid(path, "empty device id");
    if (!ids.insert(d.id).second) invalid(path, "duplicate device id '" + d.id + "'");
  }

  const auto& pw = r.password;
  if (!pw.memory && !pw.password_manager && !pw.browser_device && pw.browser_devices.empty() && !pw.paper) {
    invalid("password_access", "at least one means of accessing the password is required");
  }
  check_devices(r.inventory, pw.browser_devices, "password_access.browser_devices", kAnyButKey);
  check_devices(r.inventory, pw.manager_devices, "password_access.manager_devices", kAnyButKey);

  if (r.provider == Provider::Google) {
    if (!r.google) invalid("google", "missing settings for a Google record");
    if (r.apple) invalid("apple", "Apple settings on a Google record");
    const auto& g = *r.google;
    const auto phone = {DeviceCategory::Phone};
    check_devices(r.inventory, g.prompts, "google.prompts", {DeviceCategory::Phone, DeviceCategory::Tablet});
    check_devices(r.inventory, g.authenticator_app, "google.authenticator_app", kAnyButKey);
    check_devices(r.inventory, g.voice_text, "google.voice_text", phone);
    check_devices(r.inventory, g.security_key, "google.security_key", {DeviceCategory::SecurityKey});
    check_devices(r.inventory, g.sign_in_by_phone, "google.sign_in_by_phone", phone);
    if (g.recovery_phone) {
      check_devices(r.inventory, {*g.recovery_phone}, "google.recovery_phone", phone);
    }
    bool any_factor = !g.prompts.empty() || !g.authenticator_app.empty() || g.backup_codes ||
                      !g.voice_text.empty() || !g.security_key.empty();
    if (g.mfa_enabled && !any_factor) invalid("google.mfa_enabled", "MFA enabled without any second factor");
    if (!g.mfa_enabled && any_factor) invalid("google.mfa_enabled", "second factors listed while MFA is disabled");
  } else {
    if (!r.apple) invalid("apple", "missing settings for an Apple record");
    if (r.google) invalid("google", "Google settings on an Apple record");
    const auto& a = *r.apple;
    check_devices(r.inventory, a.trusted_devices, "apple.trusted_devices", kAnyButKey);
    check_devices(r.inventory, a.trusted_phone_numbers, "apple.trusted_phone_numbers", {DeviceCategory::Phone});
  }
}

namespace {

std::vector<std::string> string_list(const Json& j, const std::string& path) {
  std::vector<std::string> out;
  if (j.is_null()) return out;
  if (!j.is_array()) invalid(path, "expected an array of device ids");
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) invalid(path + "[" + std::to_string(i) + "]", "expected a string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

bool flag(const Json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return false;
  if (!it->is_boolean()) invalid(path + "." + key, "expected a boolean");
  return it->get<bool>();
}

std::vector<std::string> list(const Json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  return it == obj.end() ? std::vector<std::string>{} : string_list(*it, path + "." + key);
}

void reject_unknown(const Json& obj, std::initializer_list<std::string_view> allowed, const std::string& path) {
  for (const auto& [key, _] : obj.items()) {
    if (std::ranges::find(allowed, key) == allowed.end()) invalid(path + "." + key, "unknown field");
  }
}

Json id_array(const std::vector<std::string>& ids) {
  Json out = Json::array();
  for (const auto& id : ids) out.push_back(id);
  return out;
}

}  // namespace

UserAccountRecord record_from_json(const Json& j) {
  if (!j.is_object()) invalid("record", "expected a JSON object");
  reject_unknown(j, {"id", "provider", "devices", "password_access", "google", "apple"}, "record");

  UserAccountRecord r;
  if (auto it = j.find("id"); it != j.end()) {
    if (!it->is_string()) invalid("id", "expected a string");
    r.id = it->get<std::string>();
  }
  auto provider = j.contains("provider") && j["provider"].is_string()
                      ? parse_provider(j["provider"].get<std::string>())
                      : std::nullopt;
  if (!provider) invalid("provider", "expected \"google\" or \"apple\"");
  r.provider = *provider;

  if (auto it = j.find("devices"); it != j.end()) {
    if (!it->is_array()) invalid("devices", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& jd = (*it)[i];
      auto path = "devices[" + std::to_string(i) + "]";
      if (!jd.is_object()) invalid(path, "expected an object");
      reject_unknown(jd, {"id", "category", "label"}, path);
      Device d;
      if (!jd.contains("id") || !jd["id"].is_string()) invalid(path + ".id", "expected a string");
      d.id = jd["id"].get<std::string>();
      auto cat = jd.contains("category") && jd["category"].is_string()
                     ? parse_device_category(jd["category"].get<std::string>())
                     : std::nullopt;
      if (!cat) invalid(path + ".category", "expected one of phone, computer_laptop, tablet, smart_watch, security_key");
      d.category = *cat;
      d.label = jd.value("label", "");
      r.inventory.devices.push_back(std::move(d));
    }
  }

  if (auto it = j.find("password_access"); it != j.end()) {
    const auto& p = *it;
    if (!p.is_object()) invalid("password_access", "expected an object");
    reject_unknown(p, {"memory", "password_manager", "browser_device", "browser_devices", "paper", "manager_devices"},
                   "password_access");
    r.password.memory = flag(p, "memory", "password_access");
    r.password.password_manager = flag(p, "password_manager", "password_access");
    r.password.browser_devices = list(p, "browser_devices", "password_access");
    r.password.browser_device = flag(p, "browser_device", "password_access") || !r.password.browser_devices.empty();
    r.password.paper = flag(p, "paper", "password_access");
    r.password.manager_devices = list(p, "manager_devices", "password_access");
  }

  if (auto it = j.find("google"); it != j.end() && !it->is_null()) {
    const auto& g = *it;
    if (!g.is_object()) invalid("google", "expected an object");
    reject_unknown(g, {"mfa_enabled", "prompts", "authenticator_app", "backup_codes", "voice_text", "security_key",
                       "sign_in_by_phone", "recovery_phone", "recovery_email"},
                   "google");
    GoogleSettings s;
    s.mfa_enabled = flag(g, "mfa_enabled", "google");
    s.prompts = list(g, "prompts", "google");
    s.authenticator_app = list(g, "authenticator_app", "google");
    s.backup_codes = flag(g, "backup_codes", "google");
    s.voice_text = list(g, "voice_text", "google");
    s.security_key = list(g, "security_key", "google");
    s.sign_in_by_phone = list(g, "sign_in_by_phone", "google");
    if (auto rp = g.find("recovery_phone"); rp != g.end() && !rp->is_null()) {
      if (!rp->is_string()) invalid("google.recovery_phone", "expected a device id");
      s.recovery_phone = rp->get<std::string>();
    }
    s.recovery_email = flag(g, "recovery_email", "google");
    r.google = std::move(s);
  }

  if (auto it = j.find("apple"); it != j.end() && !it->is_null()) {
    const auto& a = *it;
    if (!a.is_object()) invalid("apple", "expected an object");
    reject_unknown(a, {"trusted_devices", "trusted_phone_numbers", "recovery_key"}, "apple");
    AppleSettings s;
    s.trusted_devices = list(a, "trusted_devices", "apple");
    s.trusted_phone_numbers = list(a, "trusted_phone_numbers", "apple");
    s.recovery_key = flag(a, "recovery_key", "apple");
    r.apple = std::move(s);
  }

  validate_record(r);
  return r;
}

Json to_json(const UserAccountRecord& r) {
  Json j;
  if (!r.id.empty()) j["id"] = r.id;
  j["provider"] = to_string(r.provider);
  Json devices = Json::array();
  for (const auto& d : r.inventory.devices) {
    Json jd;
    jd["id"] = d.id;
    jd["category"] = to_string(d.category);
    jd["label"] = d.label;
    devices.push_back(std::move(jd));
  }
  j["devices"] = std::move(devices);

  Json pw;
  pw["memory"] = r.password.memory;
  pw["password_manager"] = r.password.password_manager;
  pw["browser_device"] = r.password.browser_device;
  pw["browser_devices"] = id_array(r.password.browser_devices);
  pw["paper"] = r.password.paper;
  pw["manager_devices"] = id_array(r.password.manager_devices);
  j["password_access"] = std::move(pw);

  if (r.google) {
    const auto& s = *r.google;
    Json g;
    g["mfa_enabled"] = s.mfa_enabled;
    g["prompts"] = id_array(s.prompts);
    g["authenticator_app"] = id_array(s.authenticator_app);
    g["backup_codes"] = s.backup_codes;
    g["voice_text"] = id_array(s.voice_text);
    g["security_key"] = id_array(s.security_key);
    g["sign_in_by_phone"] = id_array(s.sign_in_by_phone);
    g["recovery_phone"] = s.recovery_phone ? Json(*s.recovery_phone) : Json(nullptr);
    g["recovery_email"] = s.recovery_email;
    j["google"] = std::move(g);
  }
  if (r.apple) {
    const auto& s = *r.apple;
    Json a;
    a["trusted_devices"] = id_array(s.trusted_devices);
    a["trusted_phone_numbers"] = id_array(s.trusted_phone_numbers);
    a["recovery_key"] = s.recovery_key;
    j["apple"] = std::move(a);
  }
  return j;
}

namespace {

// Collects structural nodes in creation order and access methods in a
// fixed order (inventory devices first, then non-device means).
class GraphBuilder {
 public:
  explicit GraphBuilder(const DeviceInventory& inventory) : inventory_(inventory) {}

  void account(const std::string& id, const std::string& label) {
    nodes_.push_back({id, NodeKind::Account, label});
  }
  void op(const std::string& id, OperatorKind kind, const std::string& label) {
    Node n{id, NodeKind::Operator, label};
    n.op = kind;
    nodes_.push_back(std::move(n));
  }
  void method(const std::string& id, MethodCategory category, const std::string& label) {
    Node n{id, NodeKind::AuthMethod, label};
    n.category = category;
    nodes_.push_back(std::move(n));
  }
  void edge(const std::string& parent, const std::string& child) { edges_.push_back({parent, child}); }

  void devices(const std::string& method, const std::vector<std::string>& ids) {
    for (const auto& id : ids) {
      used_devices_.insert(id);
      edge(method, device_node_id(id));
    }
  }
  void means(const std::string& method, const std::string& id, const std::string& label) {
    if (std::ranges::find(means_, id, &Node::id) == means_.end()) {
      means_.push_back({id, NodeKind::AccessMethod, label});
    }
    edge(method, id);
  }

  AccountAccessGraph build(const std::string& root) {
    auto nodes = nodes_;
    for (const auto& d : inventory_.devices) {
      if (!used_devices_.contains(d.id)) continue;
      auto label = d.label.empty() ? std::string(to_string(d.category)) + " " + d.id : d.label;
      nodes.push_back({device_node_id(d.id), NodeKind::AccessMethod, label});
    }
    nodes.insert(nodes.end(), means_.begin(), means_.end());
    return assemble_graph(std::move(nodes), edges_, {root});
  }

 private:
  const DeviceInventory& inventory_;
  std::vector<Node> nodes_;
  std::vector<Node> means_;
  std::vector<Edge> edges_;
  std::set<std::string> used_devices_;
};

void password_node(GraphBuilder& b) { b.method("password", MethodCategory::KnowledgeBased, "Password"); }

void password_access(GraphBuilder& b, const PasswordAccess& pw, const InstantiateOptions& options) {
  if (pw.memory) b.means("password", "memory", "Memory");
  if (pw.password_manager) {
    if (options.map_manager_to_devices && !pw.manager_devices.empty()) {
      b.devices("password", pw.manager_devices);
    } else {
      b.means("password", "password_manager", "Password manager");
    }
  }
  if (!pw.browser_devices.empty()) {
    b.devices("password", pw.browser_devices);
  } else if (pw.browser_device) {
    b.means("password", "browser_storage", "Browser storage");
  }
  if (pw.paper) b.means("password", "paper_note", "Paper note");
}

AccountAccessGraph google_graph(const UserAccountRecord& r, const InstantiateOptions& options) {
  const auto& g = *r.google;
  GraphBuilder b(r.inventory);
  b.account("account", "Google account");
  b.op("ways_in", OperatorKind::Or, "|");
  b.edge("account", "ways_in");

  if (g.mfa_enabled) {
    b.op("mfa", OperatorKind::And, "&");
    b.edge("ways_in", "mfa");
    password_node(b);
    b.edge("mfa", "password");
    b.op("second_factor", OperatorKind::Or, "|");
    b.edge("mfa", "second_factor");
    auto factor = [&](const char* id, MethodCategory cat, const char* label) {
      b.method(id, cat, label);
      b.edge("second_factor", id);
    };
    if (!g.prompts.empty()) factor("prompts", MethodCategory::SoftwareBased, "Google prompts");
    if (!g.authenticator_app.empty()) {
      factor("authenticator_app", MethodCategory::SoftwareBased, "Authenticator app");
    }
    if (g.backup_codes) factor("backup_codes", MethodCategory::SoftwareBased, "Backup codes");
    if (!g.voice_text.empty()) factor("voice_text", MethodCategory::SoftwareBased, "Voice or text message");
    if (!g.security_key.empty()) factor("security_key", MethodCategory::HardwareBased, "Security key");
  } else {
    password_node(b);
    b.edge("ways_in", "password");
    if (!g.sign_in_by_phone.empty()) {
      b.method("sign_in_by_phone", MethodCategory::SoftwareBased, "Sign-in by phone");
      b.edge("ways_in", "sign_in_by_phone");
    }
  }
  if (g.recovery_phone) {
    b.method("recovery_phone", MethodCategory::SoftwareBased, "Recovery phone");
    b.edge("ways_in", "recovery_phone");
  }
  if (g.recovery_email) {
    b.account("recovery_email", "Recovery email");
    b.edge("ways_in", "recovery_email");
  }

  // Access-method edges after the structure so children stay grouped.
  password_access(b, r.password, options);
  if (g.mfa_enabled) {
    b.devices("prompts", g.prompts);
    b.devices("authenticator_app", g.authenticator_app);
    if (g.backup_codes) b.means("backup_codes", "backup_codes_copy", "Backup codes printout");
    b.devices("voice_text", g.voice_text);
    b.devices("security_key", g.security_key);
  } else {
    b.devices("sign_in_by_phone", g.sign_in_by_phone);
  }
  if (g.recovery_phone) b.devices("recovery_phone", {*g.recovery_phone});
  return b.build("account");
}

AccountAccessGraph apple_graph(const UserAccountRecord& r, const InstantiateOptions& options) {
  const auto& a = *r.apple;
  GraphBuilder b(r.inventory);
  b.account("account", "Apple ID");
  b.op("ways_in", OperatorKind::Or, "|");
  b.edge("account", "ways_in");

  bool two_factor = !a.trusted_devices.empty() || !a.trusted_phone_numbers.empty();
  if (two_factor) {
    b.op("mfa", OperatorKind::And, "&");
    b.edge("ways_in", "mfa");
    password_node(b);
    b.edge("mfa", "password");
    b.op("second_factor", OperatorKind::Or, "|");
    b.edge("mfa", "second_factor");
    if (!a.trusted_devices.empty()) {
      b.method("trusted_device", MethodCategory::HardwareBased, "Trusted device");
      b.edge("second_factor", "trusted_device");
    }
    if (!a.trusted_phone_numbers.empty()) {
      b.method("trusted_phone_number", MethodCategory::SoftwareBased, "Trusted phone number");
      b.edge("second_factor", "trusted_phone_number");
    }
  } else {
    password_node(b);
    b.edge("ways_in", "password");
  }

  if (a.recovery_key) {
    b.method("recovery_key", MethodCategory::SoftwareBased, "Recovery key");
    b.edge("ways_in", "recovery_key");
  } else if (!a.trusted_devices.empty()) {
    b.method("recovery_trusted_device", MethodCategory::HardwareBased, "Recovery via trusted device");
    b.edge("ways_in", "recovery_trusted_device");
  }

  password_access(b, r.password, options);
  b.devices("trusted_device", a.trusted_devices);
  b.devices("trusted_phone_number", a.trusted_phone_numbers);
  if (a.recovery_key) {
    b.means("recovery_key", "recovery_key_copy", "Recovery key printout");
  } else {
    b.devices("recovery_trusted_device", a.trusted_devices);
  }
  return b.build("account");
}

}  // namespace

AccountAccessGraph instantiate_user_graph(const UserAccountRecord& record, const InstantiateOptions& options) {
  validate_record(record);
  return record.provider == Provider::Google ? google_graph(record, options) : apple_graph(record, options);
}

namespace {

Json field(const char* name, const char* type, const char* description, Categories devices = {}) {
  Json f;
  f["field"] = name;
  f["type"] = type;
  f["description"] = description;
  if (devices.size()) {
    Json cats = Json::array();
    for (auto c : devices) cats.push_back(to_string(c));
    f["device_categories"] = std::move(cats);
  }
  return f;
}

}  // namespace

Json provider_template(Provider provider) {
  UserAccountRecord sample;
  sample.id = "template";
  sample.provider = provider;
  sample.inventory.devices = {
      {"phone", DeviceCategory::Phone, "Phone"},
      {"computer", DeviceCategory::ComputerLaptop, "Computer"},
      {"tablet", DeviceCategory::Tablet, "Tablet"},
      {"key", DeviceCategory::SecurityKey, "Security key"},
  };
  sample.password = {.memory = true, .password_manager = true, .browser_device = true,
                     .browser_devices = {"computer"}, .paper = true, .manager_devices = {}};

  Json fields = Json::array();
  fields.push_back(field("devices", "device list", "Devices in active use"));
  fields.push_back(field("password_access.memory", "bool", "Password is remembered"));
  fields.push_back(field("password_access.password_manager", "bool", "Password is kept in a password manager"));
  fields.push_back(field("password_access.browser_devices", "device ids",
                         "Devices whose browser or keychain stores the password", kAnyButKey));
  fields.push_back(field("password_access.paper", "bool", "Password is written down"));

  if (provider == Provider::Google) {
    GoogleSettings g;
    g.mfa_enabled = true;
    g.prompts = {"phone", "tablet"};
    g.authenticator_app = {"phone"};
    g.backup_codes = true;
    g.voice_text = {"phone"};
    g.security_key = {"key"};
    g.recovery_phone = "phone";
    g.recovery_email = true;
    sample.google = g;
    fields.push_back(field("google.mfa_enabled", "bool", "2-step verification is on"));
    fields.push_back(field("google.prompts", "device ids", "Devices receiving Google prompts",
                           {DeviceCategory::Phone, DeviceCategory::Tablet}));
    fields.push_back(field("google.authenticator_app", "device ids", "Devices with an authenticator app", kAnyButKey));
    fields.push_back(field("google.backup_codes", "bool", "Backup codes were generated"));
    fields.push_back(field("google.voice_text", "device ids", "Phones receiving voice or text codes",
                           {DeviceCategory::Phone}));
    fields.push_back(field("google.security_key", "device ids", "Registered security keys",
                           {DeviceCategory::SecurityKey}));
    fields.push_back(field("google.sign_in_by_phone", "device ids", "Phones for sign-in by phone (MFA off only)",
                           {DeviceCategory::Phone}));
    fields.push_back(field("google.recovery_phone", "device id", "Recovery phone", {DeviceCategory::Phone}));
    fields.push_back(field("google.recovery_email", "bool", "A recovery email address is set"));
  } else {
    AppleSettings a;
    a.trusted_devices = {"phone", "computer", "tablet"};
    a.trusted_phone_numbers = {"phone"};
    sample.apple = a;
    fields.push_back(field("apple.trusted_devices", "device ids", "Devices signed in to the Apple ID", kAnyButKey));
    fields.push_back(field("apple.trusted_phone_numbers", "device ids", "Phones with a trusted number",
                           {DeviceCategory::Phone}));
    fields.push_back(field("apple.recovery_key", "bool", "A recovery key replaces other recovery options"));
  }

  Json out;
  out["provider"] = to_string(provider);
  out["record"] = to_json(sample);
  out["document"] = to_json(instantiate_user_graph(sample));
  out["fields"] = std::move(fields);
  return out;
}

}  // namespace aag
