#include "doctest.h"

#include "ergoflow/cli/commands.hpp"
#include "ergoflow/cli/scenario_file.hpp"
#include "ergoflow/errors.hpp"

#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace ergoflow;
using namespace ergoflow::cli;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string scenario_text(const std::string& name) { return slurp(std::string(SCENARIO_DIR) + "/" + name); }

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::string_view command, const std::string& text, CommandOptions options = {})
{
    std::ostringstream out, err;
    const int code = run_command(command, text, options, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> result;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        result.push_back(line);
    }
    return result;
}

int shell(const std::string& command)
{
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("scenario parsing")
{
    const auto scenario = parse_scenario(scenario_text("path_hybrid.json"));
    CHECK(scenario.sites == 4);
    CHECK(scenario.protocol.kind == "hybrid");
    CHECK(scenario.protocol.level == 2);
    REQUIRE(scenario.pair);
    CHECK(scenario.pair->first == "1111");
    CHECK(scenario.state_kind == StateKind::kProduct);

    CHECK_THROWS_AS(parse_scenario("{"), ValidationError);
    CHECK_THROWS_AS(parse_scenario(R"({"hamiltonian": {"levels": [0, 1]}, "ensemble": {"N": 2},
        "state": {"product": [0.5, 0.5]}, "extra": 1})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_scenario(R"({"hamiltonian": {"levels": [0, 1]}, "ensemble": {"N": 2},
        "state": {"product": [0.5, 0.5]}, "protocol": {"kind": "hybrid"}})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_scenario(R"({"hamiltonian": {"levels": [0, 1]}, "ensemble": {"N": 2},
        "state": {"product": [0.7, 0.5]}})"),
                    ValidationError);
}

TEST_CASE("maxwork table")
{
    const auto result = run("maxwork", scenario_text("maxwork_two_qubits.json"));
    REQUIRE(result.code == kExitSuccess);
    const auto rows = lines(result.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "sites,dimension,initial_energy,final_energy,work,initial_passive,final_passive");
    CHECK(rows[1].rfind("2,4,", 0) == 0);
    const auto table = cmd_maxwork(parse_scenario(scenario_text("maxwork_two_qubits.json")), {});
    CHECK(std::get<double>(table.rows()[0][4]) == doctest::Approx(0.6).epsilon(1e-14));
}

TEST_CASE("microcanonical table")
{
    const auto table = cmd_microcanonical(parse_scenario(scenario_text("microcanonical_n3.json")), {});
    REQUIRE(table.rows().size() == 3);
    CHECK(std::get<double>(table.rows()[2][5]) == doctest::Approx(4.0 / 3).epsilon(1e-14));
    CHECK(std::get<bool>(table.rows()[0][7]));
}

TEST_CASE("path tables")
{
    const auto indirect = run("path", scenario_text("path_indirect.json"));
    REQUIRE(indirect.code == kExitSuccess);
    const auto rows = lines(indirect.out);
    // 2n - 1 = 7 transpositions, 11 samples each.
    CHECK(rows.size() == 1 + 7 * 11);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].substr(rows[i].rfind(',', rows[i].rfind(',') - 1) + 1, 3) == "SEP");
    }
    const auto hybrid = run("path", scenario_text("path_hybrid.json"));
    CHECK(hybrid.code == kExitSuccess);
    const auto ladder = run("path", scenario_text("path_ladder.json"));
    CHECK(ladder.code == kExitSuccess);
    // Two rungs with positive work.
    const auto rungs = lines(ladder.out);
    REQUIRE(rungs.size() == 1 + 2 * 11);
    CHECK(std::stod(rungs[11].substr(rungs[11].rfind(',') + 1)) > 0.0);
    CHECK(std::stod(rungs.back().substr(rungs.back().rfind(',') + 1)) > 0.0);

    CommandOptions jsonl;
    jsonl.format = OutputFormat::kJsonl;
    jsonl.samples = 3;
    const auto records = run("path", scenario_text("path_hybrid.json"), jsonl);
    REQUIRE(records.code == kExitSuccess);
    for (const auto& line : lines(records.out)) {
        const auto record = nlohmann::json::parse(line);
        CHECK(record.contains("lambda_1"));
        CHECK(record.contains("class"));
    }
}

TEST_CASE("figure1 and passive tables")
{
    CommandOptions coarse;
    coarse.grid = 11;
    const auto grid = run("figure1", scenario_text("figure1.json"), coarse);
    REQUIRE(grid.code == kExitSuccess);
    CHECK(lines(grid.out)[0] == "p0,p1,p2,work,lambda_1,lambda_5,lambda_7,class");

    CommandOptions few;
    few.samples = 11;
    const auto slice = run("figure1", scenario_text("figure1_slice.json"), few);
    REQUIRE(slice.code == kExitSuccess);
    CHECK(lines(slice.out)[0] == "p0,p1,p2,work,gme");

    const auto passive = run("passive", scenario_text("passive_qutrit.json"));
    REQUIRE(passive.code == kExitSuccess);
    for (const char* section : {"spectrum,", "match,", "sweep,", "threshold,", "typical,", "exchange_total,"}) {
        CHECK(passive.out.find(std::string("\n") + section) != std::string::npos);
    }
}

TEST_CASE("exit codes")
{
    CHECK(run("bogus", scenario_text("maxwork_two_qubits.json")).code == kExitValidation);
    CHECK(run("maxwork", "{}").code == kExitValidation);
    const auto capped = run("maxwork", scenario_text("cap_exceeded.json"));
    CHECK(capped.code == kExitCapExceeded);
    CHECK_FALSE(capped.err.empty());
    CHECK(run("microcanonical", scenario_text("maxwork_two_qubits.json")).code == kExitValidation);
}

TEST_CASE("executable")
{
    const std::string exe = ERGOFLOW_EXECUTABLE;
    const std::string dir = SCENARIO_DIR;
    const auto tmp = std::filesystem::temp_directory_path() / "ergoflow_cli_test";
    std::filesystem::create_directories(tmp);
    const std::string a = (tmp / "a.csv").string();
    const std::string b = (tmp / "b.csv").string();

    CHECK(shell(exe + " figure1 --scenario " + dir + "/figure1.json --grid 41 --out " + a) == 0);
    CHECK(shell("ERGOFLOW_THREADS=3 " + exe + " figure1 --scenario " + dir + "/figure1.json --grid 41 --out " + b) ==
          0);
    CHECK(slurp(a) == slurp(b));
    CHECK_FALSE(slurp(a).empty());

    CHECK(shell(exe + " passive --scenario " + dir + "/passive_qutrit.json --format jsonl --out " + a) == 0);
    CHECK(shell(exe + " passive --scenario " + dir + "/passive_qutrit.json --format jsonl --out " + b) == 0);
    CHECK(slurp(a) == slurp(b));

    CHECK(shell(exe + " maxwork --scenario " + dir + "/missing.json 2>/dev/null") == 2);
    CHECK(shell(exe + " maxwork 2>/dev/null") == 2);
    CHECK(shell(exe + " maxwork --scenario " + dir + "/cap_exceeded.json 2>/dev/null") == 3);
    CHECK(shell(exe + " maxwork --scenario " + dir + "/maxwork_two_qubits.json --format xml 2>/dev/null") == 2);
    std::filesystem::remove_all(tmp);
}
