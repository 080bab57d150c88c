#pragma once

// Sectioned key = value run configuration:
//
//   command = classify
//   [params]
//   N = 3
//   s = 0.5
//   ...
//
// Keys are typed by a fixed schema; unknown sections or keys, duplicates and type
// mismatches are errors naming the line.

#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fracdrift {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class FieldType { integer, real, real_list, word };

struct FieldSpec {
    std::string section;  // "" for top-level keys
    std::string key;
    FieldType type;
    /// Allowed words for FieldType::word.
    std::vector<std::string> choices;
    /// Default as it would be written in a document; empty when there is none.
    std::string default_text;
    std::string help;
};

/// The full schema in serialization order.
const std::vector<FieldSpec>& config_schema();

/// The commands accepted by `command =`.
const std::vector<std::string>& config_commands();

using FieldValue = std::variant<long, double, std::vector<double>, std::string>;

struct RunConfig {
    /// Keyed by "section.key" ("command" for the top-level key).
    std::map<std::string, FieldValue> values;

    bool has(const std::string& name) const { return values.count(name) > 0; }
    const std::string& command() const;
    /// Typed access with the schema default; throws ConfigError if absent with no default.
    long get_int(const std::string& name) const;
    double get_real(const std::string& name) const;
    std::vector<double> get_list(const std::string& name) const;
    std::string get_word(const std::string& name) const;

    bool operator==(const RunConfig& other) const { return values == other.values; }
};

/// Parses a document and checks the required keys of its command.
RunConfig parse_config(const std::string& text);

/// A document that parses back to the same RunConfig (doubles with 17 significant digits).
std::string serialize_config(const RunConfig& config);

/// One line per key with type, default and description, for --help.
std::string config_reference();

}  // namespace fracdrift
