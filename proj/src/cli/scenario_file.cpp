#include "ergoflow/cli/scenario_file.hpp"

#include "ergoflow/errors.hpp"

#include "json.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace ergoflow::cli {

namespace {

using nlohmann::json;

void require_object(const json& node, std::string_view where)
{
    if (!node.is_object()) {
        throw ValidationError(std::string(where) + " must be an object");
    }
}

void allow_keys(const json& node, std::string_view where, std::initializer_list<std::string_view> keys)
{
    require_object(node, where);
    for (const auto& [key, value] : node.items()) {
        bool known = false;
        for (auto allowed : keys) {
            known = known || key == allowed;
        }
        if (!known) {
            throw ValidationError("unknown key '" + key + "' in " + std::string(where));
        }
    }
}

const json& member(const json& node, const std::string& key, std::string_view where)
{
    const auto it = node.find(key);
    if (it == node.end()) {
        throw ValidationError("missing key '" + key + "' in " + std::string(where));
    }
    return *it;
}

double number(const json& node, std::string_view what)
{
    if (!node.is_number()) {
        throw ValidationError(std::string(what) + " must be a number");
    }
    return node.get<double>();
}

int integer(const json& node, std::string_view what)
{
    if (!node.is_number_integer()) {
        throw ValidationError(std::string(what) + " must be an integer");
    }
    return node.get<int>();
}

std::vector<double> numbers(const json& node, std::string_view what)
{
    if (!node.is_array() || node.empty()) {
        throw ValidationError(std::string(what) + " must be a non-empty array of numbers");
    }
    std::vector<double> values;
    for (const auto& item : node) {
        values.push_back(number(item, what));
    }
    return values;
}

void parse_state(const json& node, ScenarioFile& scenario)
{
    allow_keys(node, "state", {"product", "microcanonical", "populations", "normalize"});
    const int kinds = static_cast<int>(node.contains("product")) +
                      static_cast<int>(node.contains("microcanonical")) +
                      static_cast<int>(node.contains("populations"));
    if (kinds != 1) {
        throw ValidationError("state needs exactly one of product, microcanonical, populations");
    }
    if (node.contains("normalize")) {
        if (!node["normalize"].is_boolean()) {
            throw ValidationError("state.normalize must be a boolean");
        }
        if (!node.contains("populations")) {
            throw ValidationError("state.normalize applies to explicit populations only");
        }
        scenario.normalize = node["normalize"].get<bool>();
    }
    if (node.contains("product")) {
        scenario.state_kind = StateKind::kProduct;
        scenario.spectrum = numbers(node["product"], "state.product");
        if (scenario.spectrum.size() != scenario.levels.size()) {
            throw ValidationError("state.product must have one entry per level");
        }
        validate_spectrum(scenario.spectrum, "state.product");
    } else if (node.contains("microcanonical")) {
        const auto& mc = node["microcanonical"];
        allow_keys(mc, "state.microcanonical", {"E0", "width"});
        scenario.state_kind = StateKind::kMicrocanonical;
        scenario.center = number(member(mc, "E0", "state.microcanonical"), "E0");
        scenario.width = number(member(mc, "width", "state.microcanonical"), "width");
        if (scenario.width < 0.0) {
            throw ValidationError("microcanonical width must be non-negative");
        }
    } else {
        scenario.state_kind = StateKind::kPopulations;
        scenario.populations = numbers(node["populations"], "state.populations");
    }
}

void parse_protocol(const json& node, ScenarioFile& scenario)
{
    allow_keys(node, "protocol", {"kind", "l", "K"});
    const auto& kind = member(node, "kind", "protocol");
    if (!kind.is_string()) {
        throw ValidationError("protocol.kind must be a string");
    }
    scenario.protocol.kind = kind.get<std::string>();
    const auto& name = scenario.protocol.kind;
    if (name != "direct" && name != "indirect" && name != "hybrid" && name != "ladder") {
        throw ValidationError("protocol.kind must be direct, indirect, hybrid or ladder");
    }
    if (node.contains("l") != (name == "hybrid")) {
        throw ValidationError("protocol.l is required for hybrid plans and only for them");
    }
    if (node.contains("K") != (name == "ladder")) {
        throw ValidationError("protocol.K is required for ladder plans and only for them");
    }
    if (name == "hybrid") {
        scenario.protocol.level = integer(node["l"], "protocol.l");
    }
    if (name == "ladder") {
        scenario.protocol.rounds = integer(node["K"], "protocol.K");
        if (scenario.protocol.rounds < 1) {
            throw ValidationError("protocol.K must be at least 1");
        }
    }
}

void parse_sampling(const json& node, SamplingSpec& sampling)
{
    allow_keys(node, "sampling",
               {"time_samples", "grid", "delta", "sweep_min", "sweep_max", "typical_N", "slice_p0",
                "slice_samples"});
    if (node.contains("time_samples")) {
        sampling.time_samples = integer(node["time_samples"], "sampling.time_samples");
    }
    if (node.contains("grid")) {
        sampling.grid = integer(node["grid"], "sampling.grid");
    }
    if (node.contains("delta")) {
        sampling.delta = number(node["delta"], "sampling.delta");
    }
    if (node.contains("sweep_min")) {
        sampling.sweep_min = integer(node["sweep_min"], "sampling.sweep_min");
    }
    if (node.contains("sweep_max")) {
        sampling.sweep_max = integer(node["sweep_max"], "sampling.sweep_max");
    }
    if (node.contains("typical_N")) {
        sampling.typical_sites = integer(node["typical_N"], "sampling.typical_N");
    }
    if (node.contains("slice_p0")) {
        sampling.slice_p0 = number(node["slice_p0"], "sampling.slice_p0");
    }
    if (node.contains("slice_samples")) {
        sampling.slice_samples = integer(node["slice_samples"], "sampling.slice_samples");
    }
    if (sampling.time_samples < 2) {
        throw ValidationError("sampling.time_samples must be at least 2");
    }
    if (sampling.grid < 2) {
        throw ValidationError("sampling.grid must be at least 2");
    }
    if (!(sampling.delta > 0.0)) {
        throw ValidationError("sampling.delta must be positive");
    }
    if (sampling.sweep_min < 1 || sampling.sweep_max < sampling.sweep_min) {
        throw ValidationError("sampling needs 1 <= sweep_min <= sweep_max");
    }
    if (sampling.typical_sites && *sampling.typical_sites < 1) {
        throw ValidationError("sampling.typical_N must be at least 1");
    }
    if (sampling.slice_p0 && !(*sampling.slice_p0 >= 0.0 && *sampling.slice_p0 <= 1.0)) {
        throw ValidationError("sampling.slice_p0 must lie in [0, 1]");
    }
    if (sampling.slice_samples < 2) {
        throw ValidationError("sampling.slice_samples must be at least 2");
    }
}

void parse_output(const json& node, OutputSpec& output)
{
    allow_keys(node, "output", {"format", "path"});
    if (node.contains("format")) {
        if (!node["format"].is_string()) {
            throw ValidationError("output.format must be a string");
        }
        output.format = parse_format(node["format"].get<std::string>());
    }
    if (node.contains("path")) {
        if (!node["path"].is_string()) {
            throw ValidationError("output.path must be a string");
        }
        output.path = node["path"].get<std::string>();
    }
}

} // namespace

OutputFormat parse_format(std::string_view name)
{
    if (name == "csv") {
        return OutputFormat::kCsv;
    }
    if (name == "jsonl") {
        return OutputFormat::kJsonl;
    }
    throw ValidationError("output format must be csv or jsonl");
}

ScenarioFile parse_scenario(std::string_view text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& error) {
        throw ValidationError(std::string("scenario is not valid JSON: ") + error.what());
    }
    allow_keys(root, "scenario",
               {"hamiltonian", "ensemble", "state", "protocol", "pair", "sampling", "output", "limits"});

    ScenarioFile scenario;
    const auto& hamiltonian = member(root, "hamiltonian", "scenario");
    allow_keys(hamiltonian, "hamiltonian", {"levels"});
    scenario.levels = numbers(member(hamiltonian, "levels", "hamiltonian"), "hamiltonian.levels");
    const QuditHamiltonian checked(scenario.levels);

    const auto& ensemble = member(root, "ensemble", "scenario");
    allow_keys(ensemble, "ensemble", {"N"});
    scenario.sites = integer(member(ensemble, "N", "ensemble"), "ensemble.N");
    const EnsembleShape shape(scenario.sites, checked.dimension());

    if (root.contains("limits")) {
        allow_keys(root["limits"], "limits", {"dense_cap"});
        if (root["limits"].contains("dense_cap")) {
            const auto& cap = root["limits"]["dense_cap"];
            if (!cap.is_number_unsigned() || cap.get<std::uint64_t>() == 0) {
                throw ValidationError("limits.dense_cap must be a positive integer");
            }
            scenario.dense_cap = cap.get<std::uint64_t>();
        }
    }

    parse_state(member(root, "state", "scenario"), scenario);
    if (scenario.state_kind == StateKind::kPopulations &&
        scenario.populations.size() != shape.dimension()) {
        throw ValidationError("state.populations must have d^N = " +
                              std::to_string(shape.dimension()) + " entries");
    }
    if (root.contains("protocol")) {
        parse_protocol(root["protocol"], scenario);
    }
    if (root.contains("pair")) {
        const auto& pair = root["pair"];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
            throw ValidationError("pair must be an array of two digit strings");
        }
        const auto alpha = pair[0].get<std::string>();
        const auto beta = pair[1].get<std::string>();
        const auto a = BasisLabel::parse(alpha, checked.dimension());
        const auto b = BasisLabel::parse(beta, checked.dimension());
        if (static_cast<int>(a.size()) != scenario.sites || static_cast<int>(b.size()) != scenario.sites) {
            throw ValidationError("pair labels must have N digits");
        }
        if (a == b) {
            throw ValidationError("pair labels must differ");
        }
        scenario.pair.emplace(alpha, beta);
    }
    if (root.contains("sampling")) {
        parse_sampling(root["sampling"], scenario.sampling);
    }
    if (root.contains("output")) {
        parse_output(root["output"], scenario.output);
    }
    return scenario;
}

ScenarioFile load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot read scenario file " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str());
}

} // namespace ergoflow::cli
