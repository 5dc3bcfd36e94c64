// Command-line front end: reads a JSON config, dispatches one command, and
// writes the report (stdout by default, file via --out, atomically).  Exit
// codes: 0 success, 2 validation failure, 3 numeric failure.

#include <gammaspace/cli.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

const char* command_help(const std::string& name) {
    if (name == "validate") return "admissibility flags for a weight and exponent";
    if (name == "dual-weight") return "sample the associate-space weight on a log grid";
    if (name == "norm") return "space norm of a step function";
    if (name == "dual-check") return "associate norm against the brute-force oracle";
    if (name == "embed") return "inclusion norm between two spaces";
    if (name == "hardy") return "least constants for the averaging operators";
    if (name == "stieltjes") return "least constant for the combined operator";
    if (name == "indices") return "dilation function, growth indices, contraction test";
    if (name == "cz-check") return "largest contraction halving the bracket";
    if (name == "report-all") return "every applicable section in one report";
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"piecewise-power weighted Lorentz space toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path, csv_path;
    double p = 0.0, q = 0.0, tol = 0.0;
    std::int64_t seed = 0;
    int budget = 0;

    for (const std::string& name : gammaspace::command_names()) {
        CLI::App* sub = app.add_subcommand(name, command_help(name));
        sub->add_option("--config", config_path, "config JSON path")->required();
        sub->add_option("--out", out_path, "write the report here instead of stdout");
        sub->add_option("--csv", csv_path, "export the sampled series as CSV");
        sub->add_option("--p", p, "override config.p");
        sub->add_option("--q", q, "override config.q");
        sub->add_option("--tol", tol, "override config.tol");
        sub->add_option("--seed", seed, "override config.seed");
        sub->add_option("--budget", budget, "override config.budget");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    CLI::App* sub = app.get_subcommands().front();

    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "config error: cannot open " << config_path << "\n";
        return 2;
    }
    gammaspace::json raw;
    try {
        raw = gammaspace::json::parse(in);
    } catch (const gammaspace::json::parse_error& e) {
        std::cerr << "config error: " << config_path << " is not valid JSON: " << e.what()
                  << "\n";
        return 2;
    }

    // the subcommand is authoritative; flags override config fields
    raw["command"] = sub->get_name();
    if (sub->count("--p")) raw["p"] = p;
    if (sub->count("--q")) raw["q"] = q;
    if (sub->count("--tol")) raw["tol"] = tol;
    if (sub->count("--seed")) raw["seed"] = seed;
    if (sub->count("--budget")) raw["budget"] = budget;

    gammaspace::RunConfig cfg;
    try {
        cfg = gammaspace::parse_config(raw);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    gammaspace::RunOutcome outcome = gammaspace::run(cfg);

    auto errors = gammaspace::schema_validate(gammaspace::report_schema(), outcome.report);
    if (!errors.empty()) {
        for (const std::string& err : errors) std::cerr << "report schema error: " << err << "\n";
        return 3;
    }

    std::string text = outcome.report.dump(2) + "\n";
    try {
        if (out_path.empty())
            std::cout << text;
        else
            gammaspace::write_file_atomic(out_path, text);
        if (!csv_path.empty()) gammaspace::export_csv(outcome.report, csv_path);
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return 2;
    }
    return outcome.exit_code;
}
