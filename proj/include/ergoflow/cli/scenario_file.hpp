#pragma once

#include "ergoflow/ensemble.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ergoflow::cli {

enum class StateKind { kProduct, kMicrocanonical, kPopulations };
enum class OutputFormat { kCsv, kJsonl };

struct ProtocolSpec {
    std::string kind = "direct"; // direct | indirect | hybrid | ladder
    int level = 0;               // hybrid l
    int rounds = 1;              // ladder K
};

struct SamplingSpec {
    int time_samples = 11;
    int grid = 201;
    double delta = 0.05;
    int sweep_min = 2;
    int sweep_max = 12;
    std::optional<int> typical_sites;
    std::optional<double> slice_p0;
    int slice_samples = 201;
};

struct OutputSpec {
    OutputFormat format = OutputFormat::kCsv;
    std::string path;
};

struct ScenarioFile {
    std::vector<double> levels;
    int sites = 0;

    StateKind state_kind = StateKind::kProduct;
    std::vector<double> spectrum;    // product
    double center = 0.0;             // microcanonical E0
    double width = 0.0;              // microcanonical width
    std::vector<double> populations; // explicit
    bool normalize = false;

    ProtocolSpec protocol;
    std::optional<std::pair<std::string, std::string>> pair;
    SamplingSpec sampling;
    OutputSpec output;
    FlatIndex dense_cap = FlatIndex{1} << 20;
};

/// Parses and validates a JSON scenario. Unknown keys are errors.
ScenarioFile parse_scenario(std::string_view text);

ScenarioFile load_scenario(const std::filesystem::path& path);

OutputFormat parse_format(std::string_view name);

} // namespace ergoflow::cli
