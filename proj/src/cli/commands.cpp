#include "ergoflow/cli/commands.hpp"

#include "ergoflow/errors.hpp"
#include "ergoflow/protocol.hpp"
#include "ergoflow/scenarios.hpp"
#include "ergoflow/spectra.hpp"
#include "ergoflow/work.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ergoflow::cli {

namespace {

using Row = std::vector<std::pair<std::string, Cell>>;

Cell integer_cell(std::size_t value)
{
    return static_cast<std::int64_t>(value);
}

std::string composition_text(const std::vector<int>& composition)
{
    std::string text;
    for (std::size_t k = 0; k < composition.size(); ++k) {
        if (k > 0) {
            text += '/';
        }
        text += std::to_string(composition[k]);
    }
    return text;
}

DiagonalState build_state(const ScenarioFile& scenario, const QuditHamiltonian& hamiltonian)
{
    const EnsembleShape shape(scenario.sites, hamiltonian.dimension());
    switch (scenario.state_kind) {
    case StateKind::kProduct:
        return product_state(scenario.spectrum, scenario.sites, scenario.dense_cap);
    case StateKind::kMicrocanonical:
        return MicrocanonicalScenario(hamiltonian, scenario.sites, scenario.center, scenario.width,
                                      scenario.dense_cap)
            .state();
    case StateKind::kPopulations:
        return DiagonalState(shape, scenario.populations,
                             scenario.normalize ? Normalization::kRenormalize : Normalization::kReject,
                             scenario.dense_cap);
    }
    throw ValidationError("unknown state kind");
}

std::pair<BasisLabel, BasisLabel> scenario_pair(const ScenarioFile& scenario, int levels)
{
    if (!scenario.pair) {
        throw ValidationError("this command needs a pair");
    }
    return {BasisLabel::parse(scenario.pair->first, levels),
            BasisLabel::parse(scenario.pair->second, levels)};
}

PassiveEnsembleScenario passive_scenario(const ScenarioFile& scenario, int sites)
{
    if (scenario.state_kind != StateKind::kProduct) {
        throw ValidationError("this command needs a product state");
    }
    return PassiveEnsembleScenario(QuditHamiltonian(scenario.levels), scenario.spectrum, sites);
}

} // namespace

Table cmd_maxwork(const ScenarioFile& scenario, const CommandOptions&)
{
    const QuditHamiltonian hamiltonian(scenario.levels);
    const DiagonalState state = build_state(scenario, hamiltonian);
    const WorkReport report = optimal_permutation(state, hamiltonian, scenario.dense_cap);
    Table table({"sites", "dimension", "initial_energy", "final_energy", "work", "initial_passive",
                 "final_passive"});
    table.add_row({static_cast<std::int64_t>(scenario.sites), integer_cell(state.size()),
                   report.initial_energy, report.final_energy, report.work,
                   is_passive(state, hamiltonian), is_passive(report.final_state, hamiltonian)});
    return table;
}

Table cmd_path(const ScenarioFile& scenario, const CommandOptions& options)
{
    const QuditHamiltonian hamiltonian(scenario.levels);
    const int samples = options.samples.value_or(scenario.sampling.time_samples);
    if (samples < 2) {
        throw ValidationError("path needs at least 2 time samples per step");
    }
    const DiagonalState initial = build_state(scenario, hamiltonian);

    PathPlan plan;
    const auto& kind = scenario.protocol.kind;
    if (kind == "ladder") {
        const auto passive = passive_scenario(scenario, scenario.sites);
        plan = ladder_plan(passive.spectrum(), passive.thermal(), scenario.protocol.rounds,
                           scenario.sites)
                   .plan;
    } else {
        const auto [alpha, beta] = scenario_pair(scenario, hamiltonian.dimension());
        if (kind == "direct") {
            plan = direct_plan(alpha, beta);
        } else if (kind == "indirect") {
            plan = indirect_plan(alpha, beta);
        } else {
            plan = hybrid_plan(alpha, beta, scenario.protocol.level);
        }
    }

    Table table({"step_index", "alpha", "beta", "s", "pop_alpha", "pop_beta", "abs_coherence",
                 "lambda_1", "lambda_last", "class", "cumulative_work"});
    const double start_energy = total_energy(initial, hamiltonian);
    DiagonalState current = initial;
    double current_energy = start_energy;
    for (std::size_t index = 0; index < plan.steps.size(); ++index) {
        const auto& step = plan.steps[index];
        const double e_alpha = hamiltonian.energy_of_label(step.alpha);
        const double e_beta = hamiltonian.energy_of_label(step.beta);
        const double p_alpha = current.population(step.alpha);
        const double p_beta = current.population(step.beta);
        for (int j = 0; j < samples; ++j) {
            const double s = static_cast<double>(j) / (samples - 1);
            const CoherentPairState snapshot = evolve_step(current, step, s);
            const LambdaVector lambda = lambda_at(snapshot);
            const SeparabilityReport report = classify(lambda);
            const double shift = (snapshot.pop_alpha() - p_alpha) * e_alpha +
                                 (snapshot.pop_beta() - p_beta) * e_beta;
            table.add_row({integer_cell(index), step.alpha.to_string(), step.beta.to_string(), s,
                           snapshot.pop_alpha(), snapshot.pop_beta(), std::abs(snapshot.coherence()),
                           lambda.empty() ? 0.0 : lambda.first(), lambda.empty() ? 0.0 : lambda.last(),
                           report.label(), start_energy - (current_energy + shift)});
        }
        current = apply_swap(current, step.alpha, step.beta);
        current_energy = total_energy(current, hamiltonian);
    }
    return table;
}

Table cmd_figure1(const ScenarioFile& scenario, const CommandOptions& options)
{
    GridConfig config;
    config.hamiltonian = QuditHamiltonian(scenario.levels);
    config.sites = scenario.sites;
    config.threads = options.threads;
    if (scenario.pair) {
        std::tie(config.alpha, config.beta) = scenario_pair(scenario, config.hamiltonian.dimension());
    } else if (scenario.sites != 4) {
        throw ValidationError("figure1 without a pair needs N = 4");
    }

    if (scenario.sampling.slice_p0) {
        const int samples = options.samples.value_or(scenario.sampling.slice_samples);
        Table table({"p0", "p1", "p2", "work", "gme"});
        for (const auto& row : figure1_slice(*scenario.sampling.slice_p0, samples, config)) {
            const double last = row.lambda.empty() ? 0.0 : row.lambda.last();
            table.add_row({row.p0, row.p1, row.p2, row.work, std::max(0.0, last)});
        }
        return table;
    }

    const int n1 = static_cast<int>(differing_sites(config.alpha, config.beta).size());
    std::vector<std::string> columns{"p0", "p1", "p2", "work"};
    std::vector<std::size_t> indices;
    for (int l = n1; l >= 2; --l) {
        indices.push_back(boundary_index(n1, l));
        columns.push_back("lambda_" + std::to_string(indices.back()));
    }
    columns.emplace_back("class");
    Table table(columns);
    for (const auto& row : figure1_scan(options.grid.value_or(scenario.sampling.grid), config)) {
        std::vector<Cell> cells{row.p0, row.p1, row.p2, row.work};
        for (std::size_t k : indices) {
            cells.emplace_back(row.lambda.at(k));
        }
        cells.emplace_back(row.report.label());
        table.add_row(std::move(cells));
    }
    return table;
}

Table cmd_passive(const ScenarioFile& scenario, const CommandOptions&)
{
    const auto passive = passive_scenario(scenario, scenario.sites);
    const auto& p = passive.spectrum();
    const auto& q = passive.thermal();
    const int n = passive.sites();

    Table table({"section", "index", "sites", "p", "q", "temperature", "entropy", "exact_work",
                 "bound", "relative_gap", "level", "gamma", "lhs", "ratio_gamma", "ratio_exact",
                 "rhs_gamma", "rhs_exact", "holds_gamma", "holds_exact", "delta",
                 "log_cardinality_rate", "captured_probability", "from", "to", "count",
                 "log_ratio", "work", "energy", "floor"});
    const std::string spectrum = "spectrum";
    for (std::size_t k = 0; k < p.size(); ++k) {
        table.add_sparse_row({{"section", spectrum}, {"index", integer_cell(k)}, {"p", p[k]}, {"q", q[k]}});
    }
    table.add_sparse_row({{"section", std::string("match")},
                          {"sites", static_cast<std::int64_t>(n)},
                          {"temperature", passive.temperature()},
                          {"entropy", shannon_entropy(p)},
                          {"bound", asymptotic_work_bound(passive)},
                          {"lhs", relative_entropy(q, p)},
                          {"energy", n * passive.energy_gap_per_site()}});

    const QuditHamiltonian& hamiltonian = passive.hamiltonian();
    const auto d = static_cast<double>(hamiltonian.dimension());
    for (int m = scenario.sampling.sweep_min; m <= scenario.sampling.sweep_max; ++m) {
        if (m * std::log(d) > std::log(static_cast<double>(scenario.dense_cap)) + 1e-9) {
            break;
        }
        const auto rows = work_sweep(passive, m, m, scenario.dense_cap);
        const auto& row = rows.front();
        table.add_sparse_row({{"section", std::string("sweep")},
                              {"sites", static_cast<std::int64_t>(row.sites)},
                              {"exact_work", row.exact_work},
                              {"bound", row.bound},
                              {"relative_gap", row.relative_gap}});
    }

    if (n <= 62) {
        for (int l = 1; l <= n; ++l) {
            const auto condition = entanglement_condition(passive, l);
            Row cells{{"section", std::string("threshold")},
                      {"sites", static_cast<std::int64_t>(n)},
                      {"level", static_cast<std::int64_t>(l)},
                      {"gamma", condition.gamma},
                      {"lhs", condition.lhs},
                      {"holds_gamma", condition.holds_gamma},
                      {"holds_exact", condition.holds_exact}};
            if (condition.gamma >= 1.0) {
                cells.emplace_back("ratio_gamma", condition.ratio_gamma);
                cells.emplace_back("ratio_exact", condition.ratio_exact);
                cells.emplace_back("rhs_gamma", std::log(condition.ratio_gamma) / n);
                cells.emplace_back("rhs_exact", std::log(condition.ratio_exact) / n);
            }
            table.add_sparse_row(cells);
        }
    }

    const int typical_sites = scenario.sampling.typical_sites.value_or(n);
    const auto typical = typical_summary(p, typical_sites, scenario.sampling.delta);
    table.add_sparse_row({{"section", std::string("typical")},
                          {"sites", static_cast<std::int64_t>(typical_sites)},
                          {"entropy", typical.entropy},
                          {"delta", typical.delta},
                          {"log_cardinality_rate", typical.log_cardinality / typical_sites},
                          {"captured_probability", typical.captured_probability}});

    const auto plan = typical_exchange_plan(passive, scenario.dense_cap);
    for (std::size_t i = 0; i < plan.exchanges.size(); ++i) {
        const auto& exchange = plan.exchanges[i];
        table.add_sparse_row({{"section", std::string("exchange")},
                              {"index", integer_cell(i)},
                              {"sites", static_cast<std::int64_t>(n)},
                              {"from", composition_text(exchange.from_composition)},
                              {"to", composition_text(exchange.to_composition)},
                              {"count", exchange.count},
                              {"log_ratio", exchange.log_ratio},
                              {"work", exchange.work}});
    }
    table.add_sparse_row({{"section", std::string("exchange_total")},
                          {"sites", static_cast<std::int64_t>(n)},
                          {"from", composition_text(plan.p_composition)},
                          {"to", composition_text(plan.q_composition)},
                          {"count", static_cast<double>(plan.exchanges.size())},
                          {"bound", asymptotic_work_bound(passive)},
                          {"work", plan.work},
                          {"energy", plan.final_energy},
                          {"floor", plan.thermal_floor}});
    return table;
}

Table cmd_microcanonical(const ScenarioFile& scenario, const CommandOptions& options)
{
    if (scenario.state_kind != StateKind::kMicrocanonical) {
        throw ValidationError("microcanonical needs a microcanonical state");
    }
    const MicrocanonicalScenario mc(QuditHamiltonian(scenario.levels), scenario.sites, scenario.center,
                                    scenario.width, scenario.dense_cap);
    const auto plan = microcanonical_plan(mc, options.samples.value_or(scenario.sampling.time_samples));
    Table table({"step_index", "target", "source", "n1", "work", "cumulative_work", "min_lambda_last",
                 "gme"});
    double cumulative = 0.0;
    for (std::size_t i = 0; i < plan.exchanges.size(); ++i) {
        const auto& exchange = plan.exchanges[i];
        cumulative += exchange.work;
        Cell lowest;
        if (exchange.n1 >= 2) {
            lowest = exchange.min_last_lambda;
        }
        table.add_row({integer_cell(i), exchange.target.to_string(), exchange.source.to_string(),
                       static_cast<std::int64_t>(exchange.n1), exchange.work, cumulative, lowest,
                       exchange.gme_throughout});
    }
    return table;
}

int threads_from_environment()
{
    const char* value = std::getenv("ERGOFLOW_THREADS");
    if (value == nullptr || *value == '\0') {
        return 1;
    }
    int threads = -1;
    const std::string_view text(value);
    const auto [end, error] = std::from_chars(text.data(), text.data() + text.size(), threads);
    if (error != std::errc() || end != text.data() + text.size() || threads < 0) {
        throw ValidationError("ERGOFLOW_THREADS must be a non-negative integer");
    }
    return threads;
}

int run_command(std::string_view command, std::string_view scenario_text,
                const CommandOptions& options, std::ostream& out, std::ostream& err)
{
    try {
        const ScenarioFile scenario = parse_scenario(scenario_text);
        Table table({});
        if (command == "maxwork") {
            table = cmd_maxwork(scenario, options);
        } else if (command == "path") {
            table = cmd_path(scenario, options);
        } else if (command == "figure1") {
            table = cmd_figure1(scenario, options);
        } else if (command == "passive") {
            table = cmd_passive(scenario, options);
        } else if (command == "microcanonical") {
            table = cmd_microcanonical(scenario, options);
        } else {
            throw ValidationError("unknown command '" + std::string(command) + "'");
        }
        const OutputFormat format = options.format.value_or(scenario.output.format);
        const std::string path = options.out.value_or(scenario.output.path);
        if (path.empty()) {
            write_table(out, table, format);
        } else {
            std::ofstream file(path, std::ios::binary);
            if (!file) {
                throw ValidationError("cannot open output file " + path);
            }
            write_table(file, table, format);
        }
        return kExitSuccess;
    } catch (const CapExceededError& error) {
        err << "error: " << error.what() << '\n';
        return kExitCapExceeded;
    } catch (const ValidationError& error) {
        err << "error: " << error.what() << '\n';
        return kExitValidation;
    } catch (const CertificateNotApplicable& error) {
        err << "error: " << error.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& error) {
        err << "error: " << error.what() << '\n';
        return kExitFailure;
    }
}

} // namespace ergoflow::cli
