#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace pwcli {

using Json = nlohmann::ordered_json;

// Raised for malformed or out-of-range configuration; maps to exit code 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reads one config object, records the resolved value of every key it is
// asked for and rejects keys nobody asked for.
class Section {
public:
    Section(const Json& in, std::string path);

    int integer(const std::string& key, std::optional<int> def = std::nullopt);
    double number(const std::string& key, std::optional<double> def = std::nullopt);
    bool boolean(const std::string& key, std::optional<bool> def = std::nullopt);
    std::string string(const std::string& key, std::optional<std::string> def = std::nullopt);
    std::vector<int> integers(const std::string& key, std::optional<std::vector<int>> def = std::nullopt);
    std::vector<std::string> strings(const std::string& key,
                                     std::optional<std::vector<std::string>> def = std::nullopt);
    // Absent or null yields nullopt and resolves to null.
    std::optional<double> optional_number(const std::string& key);
    std::optional<int> optional_integer(const std::string& key);
    bool has(const std::string& key) const;
    // Raw value, recorded as given; null when absent.
    Json raw(const std::string& key);
    // Nested object (empty when absent). Store its resolution with put().
    Section child(const std::string& key);
    void put(const std::string& key, Json value) { out_[key] = std::move(value); }
    const Json& resolved() const { return out_; }

    // Throws on any key that was never read.
    void finish() const;
    [[noreturn]] void fail(const std::string& key, const std::string& message) const;

private:
    const Json* lookup(const std::string& key);
    std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    Json in_;
    Json out_ = Json::object();
    std::string path_;
    std::vector<std::string> seen_;
};

struct Artifact {
    std::string name;
    std::string content;
};

struct CommandOutput {
    Json report;  // command, status, config, assertions, results
    std::vector<Artifact> artifacts;
    bool passed = true;
};

const std::vector<std::string>& command_names();

// Validates `config`, runs the command and returns its report. Throws
// ValidationError (or std::invalid_argument from the library) on bad input.
CommandOutput run_command(const std::string& command, const Json& config);

// Pretty JSON with every floating-point value printed to 17 significant digits.
std::string dump_json(const Json& j);

// Sets a dotted key path (e.g. "system.M") to a value parsed as JSON when
// possible, otherwise kept as a string.
void apply_override(Json& config, const std::string& assignment);

}  // namespace pwcli
