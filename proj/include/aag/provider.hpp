#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aag/graph.hpp"

namespace aag {

enum class Provider { Google, Apple };
std::string_view to_string(Provider provider);
std::optional<Provider> parse_provider(std::string_view text);

enum class DeviceCategory { Phone, ComputerLaptop, Tablet, SmartWatch, SecurityKey };
std::string_view to_string(DeviceCategory category);
std::optional<DeviceCategory> parse_device_category(std::string_view text);

struct Device {
  std::string id;
  DeviceCategory category = DeviceCategory::Phone;
  std::string label;
};

struct DeviceInventory {
  std::vector<Device> devices;

  const Device* find(std::string_view id) const;
};

struct PasswordAccess {
  bool memory = false;
  bool password_manager = false;
  // Stored in a browser or on a device; the device list may be empty when
  // the respondent did not name one.
  bool browser_device = false;
  std::vector<std::string> browser_devices;
  bool paper = false;
  // Only used when InstantiateOptions::map_manager_to_devices is set.
  std::vector<std::string> manager_devices;
};

struct GoogleSettings {
  bool mfa_enabled = false;
  std::vector<std::string> prompts;
  std::vector<std::string> authenticator_app;
  bool backup_codes = false;
  std::vector<std::string> voice_text;
  std::vector<std::string> security_key;
  // Only asked for (and modelled) when MFA is disabled.
  std::vector<std::string> sign_in_by_phone;
  std::optional<std::string> recovery_phone;
  bool recovery_email = false;
};

struct AppleSettings {
  std::vector<std::string> trusted_devices;
  std::vector<std::string> trusted_phone_numbers;
  bool recovery_key = false;
};

/// One survey respondent's account configuration.
struct UserAccountRecord {
  std::string id;
  Provider provider = Provider::Google;
  DeviceInventory inventory;
  PasswordAccess password;
  std::optional<GoogleSettings> google;
  std::optional<AppleSettings> apple;
};

/// Throws InvalidRecord naming the offending field path.
void validate_record(const UserAccountRecord& record);

UserAccountRecord record_from_json(const Json& json);
Json to_json(const UserAccountRecord& record);

struct InstantiateOptions {
  // Map the password manager to `manager_devices` instead of an abstract
  // "Password manager" access method.
  bool map_manager_to_devices = false;
};

/// Builds the per-user graph from the provider template.
///
/// Google: the account is reachable through the password (AND an OR of
/// the enabled second factors when MFA is on), sign-in by phone (MFA off
/// only), the recovery phone and the recovery email account. Apple: the
/// password AND an OR of trusted devices and trusted numbers, plus the
/// recovery key if configured, otherwise recovery through a trusted device.
AccountAccessGraph instantiate_user_graph(const UserAccountRecord& record,
                                          const InstantiateOptions& options = {});

/// Node id of a device's access method inside instantiated graphs.
std::string device_node_id(std::string_view device_id);

/// A template with every method enabled on placeholder devices, plus a
/// manifest of the record fields a client has to fill in.
Json provider_template(Provider provider);

}  // namespace aag
