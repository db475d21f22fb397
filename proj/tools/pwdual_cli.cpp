// Command-line driver. Configuration precedence, lowest to highest: built-in
// defaults, the --config file, --set key.path=value overrides, then the
// dedicated flags (--out, --seed).

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace fs = std::filesystem;
using pwcli::Json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitValidation = 2;

struct Options {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir;
    std::optional<int> seed;
    bool quiet = false;
};

Json load_config(const Options& o) {
    if (o.config_path.empty()) return Json::object();
    std::ifstream in(o.config_path);
    if (!in) throw pwcli::ValidationError("cannot open config file '" + o.config_path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw pwcli::ValidationError("config file '" + o.config_path + "' is not valid JSON: " + e.what());
    }
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

int failure(const std::string& command, const std::string& status, const std::string& message, int code) {
    const Json record{{"command", command}, {"status", status}, {"error", message}, {"exit_code", code}};
    std::cout << pwcli::dump_json(record);
    std::cerr << "error: " << message << "\n";
    return code;
}

int run(const std::string& command, const Options& o) {
    Json config;
    pwcli::CommandOutput out;
    try {
        config = load_config(o);
        if (!config.is_object()) throw pwcli::ValidationError("the config document must be a JSON object");
        for (const auto& s : o.sets) pwcli::apply_override(config, s);
        if (!o.out_dir.empty()) pwcli::apply_override(config, "output.dir=" + Json(o.out_dir).dump());
        if (o.seed) pwcli::apply_override(config, "seed=" + std::to_string(*o.seed));
        out = pwcli::run_command(command, config);
    } catch (const pwcli::ValidationError& e) {
        return failure(command, "validation_error", e.what(), kExitValidation);
    } catch (const std::invalid_argument& e) {
        return failure(command, "validation_error", e.what(), kExitValidation);
    } catch (const std::exception& e) {
        return failure(command, "error", e.what(), kExitAssertion);
    }

    const std::string report = pwcli::dump_json(out.report);
    try {
        const fs::path dir = out.report["config"]["output"]["dir"].get<std::string>();
        fs::create_directories(dir);
        for (const auto& a : out.artifacts) write_file(dir / a.name, a.content);
        write_file(dir / (command + ".json"), report);
    } catch (const std::exception& e) {
        return failure(command, "error", e.what(), kExitAssertion);
    }
    std::cout << report;
    if (!o.quiet)
        for (const auto& a : out.report["assertions"])
            std::cerr << (a["passed"].get<bool>() ? "PASS " : "FAIL ") << a["name"].get<std::string>() << ": "
                      << a["value"].dump().substr(0, 80) << "  (" << a["requirement"].get<std::string>()
                      << ")\n";
    return out.passed ? kExitPass : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Plane-wave dual basis simulation toolkit"};
    app.require_subcommand(1);
    Options opts;
    std::string chosen;
    for (const auto& name : pwcli::command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("-c,--config", opts.config_path, "JSON config document");
        sub->add_option("-s,--set", opts.sets, "override a config value: key.path=value (repeatable)");
        sub->add_option("-o,--out", opts.out_dir, "output directory (overrides output.dir)");
        sub->add_option("--seed", opts.seed, "master seed (overrides seed)");
        sub->add_flag("-q,--quiet", opts.quiet, "suppress the assertion summary on stderr");
        sub->callback([&chosen, name] { chosen = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }
    return run(chosen, opts);
}
