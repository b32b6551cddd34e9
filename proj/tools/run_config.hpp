#pragma once

// Flat INI-style run configuration shared by every command. Values are read from an
// optional file and then overridden by command-line assignments.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "canex/expansion.hpp"
#include "canex/oracle.hpp"

namespace canex::cli {

/// Raised for malformed or out-of-range configuration entries; the message names the field.
class UsageError : public Error {
public:
    using Error::Error;
};

class RunConfig {
public:
    /// Reads an INI file (sections of key = value lines).
    void load_file(const std::string& path);
    /// Applies "section.key=value".
    void assign(const std::string& assignment);
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
    [[nodiscard]] std::string text(const std::string& key, const std::string& fallback) const;
    [[nodiscard]] double number(const std::string& key, double fallback) const;
    [[nodiscard]] std::int64_t integer(const std::string& key, std::int64_t fallback) const;
    [[nodiscard]] std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;

    /// Every entry as "key=value", sorted by key.
    [[nodiscard]] std::vector<std::string> echo() const;

    /// Keys of the form "potential.<name>" other than "potential.kind".
    [[nodiscard]] PairPotential potential() const;
    [[nodiscard]] BoxGeometry box() const;
    [[nodiscard]] IntegrationOptions integration() const;
    [[nodiscard]] OracleOptions oracle() const;
    /// Expansion parameters, validated. Monte Carlo settings require an explicit seed.
    [[nodiscard]] ExpansionParams expansion() const;

    /// True when a seed was given in the file, through --set or through --seed.
    [[nodiscard]] bool seeded() const { return has("integration.seed"); }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace canex::cli
