// semictrl: batch driver for the semilinear controllability toolkit.
//
//   semictrl run <config-or-shipped-name> [--out DIR] [--format F] [--seed N]
//   semictrl list-scenarios
//   semictrl validate <config>
//
// Exit codes: 0 success, 2 config error, 3 solver error, 4 hypothesis
// failure. SEMICTRL_THREADS controls the probe worker count (default 1).

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "semictrl/scenario.hpp"

namespace {

int thread_count_from_env() {
    const char* env = std::getenv("SEMICTRL_THREADS");
    if (!env) return 1;
    const int n = std::atoi(env);
    return n >= 1 ? n : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical toolkit for linearized controllability analysis of "
                 "semilinear evolution equations"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir = ".";
    std::string format_name = "table";
    std::optional<std::uint64_t> seed_override;
    std::uint64_t seed_value = 0;

    CLI::App* run = app.add_subcommand("run", "run a scenario and write its result files");
    run->add_option("config", config, "config file path or shipped scenario name")->required();
    run->add_option("--out", out_dir, "output directory (default: .)");
    run->add_option("--format", format_name, "stdout view: table, csv or json");
    CLI::Option* seed_opt = run->add_option("--seed", seed_value, "override the scenario seed");

    CLI::App* list = app.add_subcommand("list-scenarios", "list the shipped scenarios");

    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate", "parse and validate a config file");
    validate->add_option("config", validate_path, "config file path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& s : semictrl::shipped_scenarios())
                std::cout << s.name << "\n    " << s.description << "\n";
            return 0;
        }

        if (validate->parsed()) {
            const semictrl::Scenario s = semictrl::Scenario::parse_file(validate_path);
            std::cout << "ok: " << s.name << " (" << s.experiment << ")\n";
            return 0;
        }

        if (*seed_opt) seed_override = seed_value;
        const semictrl::ReportFormat format = semictrl::parse_format(format_name);
        const semictrl::RunRecord record =
            semictrl::run_scenario(config, out_dir, format, seed_override,
                                   thread_count_from_env());

        switch (format) {
            case semictrl::ReportFormat::json:
                std::cout << record.result_json().dump() << "\n";
                break;
            case semictrl::ReportFormat::csv:
                for (const auto& [key, value] : record.summary)
                    std::cout << key << "," << value << "\n";
                break;
            case semictrl::ReportFormat::table:
                std::cout << record.scenario.name << ": " << record.status;
                if (record.status != "success")
                    std::cout << " [" << record.error_category << "] "
                              << record.error_message;
                std::cout << "\n";
                for (const auto& [key, value] : record.summary)
                    std::cout << "  " << key << " = " << value << "\n";
                break;
        }
        return record.exit_code;
    } catch (const semictrl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const semictrl::SingularGramianError& e) {
        std::cerr << "hypothesis failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
