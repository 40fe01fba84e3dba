#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpcollapse/experiments.hpp"
#include "dpcollapse/materials.hpp"

namespace dpcollapse {

/// Flat `key.path = value unit` text. Keeps line numbers for diagnostics and
/// supports overrides for sweeps.
struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;   // 0 for overrides
};

class ConfigText {
public:
    static ConfigText parse(std::string_view text, std::string origin = "<text>");
    static ConfigText load(const std::string& path);

    /// Replace or add a key. Setting solid.area drops solid.diameter and vice versa.
    void set(const std::string& key, const std::string& value);
    const ConfigEntry* find(std::string_view key) const;

    const std::vector<ConfigEntry>& entries() const { return entries_; }
    const std::string& origin() const { return origin_; }

private:
    std::vector<ConfigEntry> entries_;
    std::string origin_;
};

enum class KeyKind { quantity, number, text, flag };

struct KeyInfo {
    KeyKind kind;
    Dimension dimension = Dimension::dimensionless;
};

/// Schema lookup; budget.<name> keys are times. Nothing for unknown keys.
std::optional<KeyInfo> key_info(std::string_view key);
std::vector<std::string> known_keys();

ExperimentConfig build_config(const ConfigText& text,
                              const MaterialDatabase& db = MaterialDatabase::standard());
ExperimentConfig parse_config(std::string_view text, std::string origin = "<text>");
ExperimentConfig load_config(const std::string& path);

}  // namespace dpcollapse
