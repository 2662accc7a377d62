#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mesinar/mcstudy.hpp"

namespace mesinar::cli {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& key, const std::string& what)
        : std::runtime_error("config key '" + key + "': " + what), key_(key) {}
    [[nodiscard]] const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Flat `key = value` (or `key: value`) document, in file order.
struct KeyValueDoc {
    std::vector<std::pair<std::string, std::string>> entries;

    [[nodiscard]] const std::string* find(const std::string& key) const;
};

/// Rejects duplicate keys and lines without a separator.
KeyValueDoc parse_key_values(std::istream& in);
KeyValueDoc read_key_values_file(const std::string& path);

void write_key_values(std::ostream& out, const KeyValueDoc& doc);

/**
 * Strict MCConfig reader. Keys: phi p beta theta1 theta2 delta sample_sizes
 * replications seed methods burn_in max_iterations gradient_tolerance n_starts
 * threads. Unknown keys and invalid values raise ConfigError naming the key.
 */
MCConfig parse_mc_config(const KeyValueDoc& doc);

}  // namespace mesinar::cli
