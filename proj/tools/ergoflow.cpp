#include "ergoflow/cli/commands.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char** argv)
{
    using namespace ergoflow::cli;

    CLI::App app{"Work extraction and entanglement along population transpositions"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string format;
    std::string out;
    int samples = 0;
    int grid = 0;

    const std::pair<const char*, const char*> commands[] = {
        {"maxwork", "optimal work of the scenario state"},
        {"path", "time series along a transposition plan"},
        {"figure1", "entanglement classes over the population grid of four three-level systems"},
        {"passive", "tensor powers of a passive spectrum: bound, thresholds, typical sets"},
        {"microcanonical", "exchanges that empty an energy shell"},
    };
    for (const auto& [name, description] : commands) {
        auto* command = app.add_subcommand(name, description);
        command->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        command->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
        command->add_option("--out", out, "output file (default: stdout)");
        command->add_option("--samples", samples, "time samples per step")->check(CLI::PositiveNumber);
        command->add_option("--grid", grid, "grid resolution")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        const int code = app.exit(error);
        return code == 0 ? kExitSuccess : kExitValidation;
    }

    CommandOptions options;
    const auto* chosen = app.get_subcommands().front();
    if (chosen->count("--format") > 0) {
        options.format = parse_format(format);
    }
    if (chosen->count("--out") > 0) {
        options.out = out;
    }
    if (chosen->count("--samples") > 0) {
        options.samples = samples;
    }
    if (chosen->count("--grid") > 0) {
        options.grid = grid;
    }

    std::ifstream file(scenario_path);
    if (!file) {
        std::cerr << "error: cannot read scenario file " << scenario_path << '\n';
        return kExitValidation;
    }
    std::ostringstream text;
    text << file.rdbuf();

    try {
        options.threads = threads_from_environment();
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return kExitValidation;
    }
    return run_command(chosen->get_name(), text.str(), options, std::cout, std::cerr);
}
