#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "conflictfuzz/campaign.hpp"

namespace conflictfuzz {

inline constexpr int kConfigSchemaVersion = 1;

/// Invalid run configuration. `key()` is the dotted path of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what) : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Parses a run configuration. Unknown keys at any level are rejected;
/// `schema_version` and `rng_seed` are required, everything else has a default.
CampaignConfig parse_config(std::string_view text);
CampaignConfig load_config(const std::filesystem::path& path);

/// Canonical document for a configuration (all keys, defaults filled in).
std::string config_to_document(const CampaignConfig& cfg);

}  // namespace conflictfuzz
