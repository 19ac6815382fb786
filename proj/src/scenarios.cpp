#include "ergoflow/scenarios.hpp"

#include "ergoflow/errors.hpp"
#include "ergoflow/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <thread>

namespace ergoflow {

namespace {

constexpr double kEntropyTolerance = 1e-10;
constexpr double kShellSlack = 1e-12;

double gibbs_entropy(const QuditHamiltonian& hamiltonian, double beta)
{
    return shannon_entropy(gibbs_spectrum_beta(hamiltonian, beta));
}

double dot(std::span<const double> a, std::span<const double> b)
{
    std::vector<double> terms(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        terms[k] = a[k] * b[k];
    }
    return stable_sum(terms);
}

double log_sum_exp(std::span<const double> values)
{
    if (values.empty()) {
        return -std::numeric_limits<double>::infinity();
    }
    const double top = *std::max_element(values.begin(), values.end());
    if (std::isinf(top)) {
        return top;
    }
    std::vector<double> shifted(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        shifted[i] = std::exp(values[i] - top);
    }
    return top + std::log(stable_sum(shifted));
}

bool spectrum_is_passive(const QuditHamiltonian& hamiltonian, std::span<const double> p)
{
    const DiagonalState single(EnsembleShape(1, hamiltonian.dimension()),
                               std::vector<double>(p.begin(), p.end()));
    return is_passive(single, hamiltonian);
}

int resolve_threads(int requested)
{
    if (requested > 0) {
        return requested;
    }
    return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

void check_grid_config(const GridConfig& config)
{
    if (config.hamiltonian.dimension() != 3) {
        throw ValidationError("the population grid needs three-level systems");
    }
    const EnsembleShape shape(config.sites, 3);
    if (static_cast<int>(config.alpha.size()) != config.sites ||
        static_cast<int>(config.beta.size()) != config.sites) {
        throw ValidationError("pair labels must have N digits");
    }
    flat_of_label(shape, config.alpha);
    flat_of_label(shape, config.beta);
    if (config.alpha == config.beta) {
        throw ValidationError("pair labels must differ");
    }
}

std::optional<GridRow> grid_point(const GridConfig& config, std::array<double, 3> p)
{
    if (!spectrum_is_passive(config.hamiltonian, p)) {
        return std::nullopt;
    }
    const DiagonalState state = product_state(p, config.sites);
    GridRow row;
    row.p0 = p[0];
    row.p1 = p[1];
    row.p2 = p[2];
    const double gap = state.population(config.alpha) - state.population(config.beta);
    row.work = gap * (config.hamiltonian.energy_of_label(config.alpha) -
                      config.hamiltonian.energy_of_label(config.beta));
    row.lambda = lambda_peak(state, config.alpha, config.beta);
    row.report = classify(row.lambda);
    return row;
}

} // namespace

ThermalMatch thermal_match(const QuditHamiltonian& hamiltonian, std::span<const double> p)
{
    validate_spectrum(p);
    if (p.size() != static_cast<std::size_t>(hamiltonian.dimension())) {
        throw ValidationError("spectrum length does not match the Hamiltonian");
    }
    const double target = shannon_entropy(p);
    const double ceiling = std::log(static_cast<double>(p.size()));
    if (target <= 0.0) {
        throw ValidationError("thermal match undefined for a pure spectrum (S(p) = 0, T -> 0)");
    }
    if (target >= ceiling - kEntropyTolerance) {
        throw ValidationError("thermal match undefined for S(p) = ln d (T -> infinity)");
    }
    const auto& levels = hamiltonian.levels();
    const auto ground = std::count_if(levels.begin(), levels.end(), [&](double e) {
        return e - levels.front() <= kShellSlack * std::max(1.0, std::abs(levels.front()));
    });
    if (target <= std::log(static_cast<double>(ground)) + kEntropyTolerance) {
        throw ValidationError("spectrum entropy is at or below the ground-degeneracy floor");
    }

    // Gibbs entropy falls monotonically in beta from ln d to ln(ground).
    double low = 0.0;
    double high = 1.0 / std::max(1e-300, levels.back() - levels.front());
    while (gibbs_entropy(hamiltonian, high) > target) {
        low = high;
        high *= 2.0;
        if (!std::isfinite(high)) {
            throw ValidationError("thermal match failed to bracket the inverse temperature");
        }
    }
    double beta = 0.5 * (low + high);
    for (int iteration = 0; iteration < 400; ++iteration) {
        beta = 0.5 * (low + high);
        const double entropy = gibbs_entropy(hamiltonian, beta);
        if (std::abs(entropy - target) <= 0.01 * kEntropyTolerance) {
            break;
        }
        if (entropy > target) {
            low = beta;
        } else {
            high = beta;
        }
        if (high - low <= std::numeric_limits<double>::epsilon() * high) {
            break;
        }
    }
    ThermalMatch match;
    match.spectrum = gibbs_spectrum_beta(hamiltonian, beta);
    match.temperature = 1.0 / beta;
    match.entropy_error = std::abs(shannon_entropy(match.spectrum) - target);
    if (match.entropy_error > kEntropyTolerance) {
        throw ValidationError("thermal match did not converge");
    }
    return match;
}

PassiveEnsembleScenario::PassiveEnsembleScenario(QuditHamiltonian hamiltonian,
                                                 std::vector<double> spectrum, int sites)
    : hamiltonian_(std::move(hamiltonian)), spectrum_(std::move(spectrum)), sites_(sites)
{
    if (sites_ < 1) {
        throw ValidationError("ensemble needs N >= 1");
    }
    validate_spectrum(spectrum_);
    if (spectrum_.size() != static_cast<std::size_t>(hamiltonian_.dimension())) {
        throw ValidationError("spectrum length does not match the Hamiltonian");
    }
    if (!spectrum_is_passive(hamiltonian_, spectrum_)) {
        throw ValidationError("spectrum is not passive: populations must not increase with energy");
    }
    match_ = thermal_match(hamiltonian_, spectrum_);
    thermal_input_ = true;
    for (std::size_t k = 0; k < spectrum_.size(); ++k) {
        if (std::abs(spectrum_[k] - match_.spectrum[k]) > 1e-9) {
            thermal_input_ = false;
        }
    }
}

double PassiveEnsembleScenario::energy_gap_per_site() const
{
    std::vector<double> difference(spectrum_.size());
    for (std::size_t k = 0; k < spectrum_.size(); ++k) {
        difference[k] = spectrum_[k] - match_.spectrum[k];
    }
    return dot(hamiltonian_.levels(), difference);
}

double asymptotic_work_bound(const PassiveEnsembleScenario& scenario)
{
    if (scenario.is_thermal()) {
        return 0.0;
    }
    return scenario.sites() * scenario.temperature() *
           relative_entropy(scenario.spectrum(), scenario.thermal());
}

std::vector<WorkSweepRow> work_sweep(const PassiveEnsembleScenario& scenario, int first, int last,
                                     FlatIndex dense_cap)
{
    if (first < 1 || last < first) {
        throw ValidationError("sweep needs 1 <= first <= last");
    }
    const double per_site = asymptotic_work_bound(scenario) / scenario.sites();
    std::vector<WorkSweepRow> rows;
    for (int n = first; n <= last; ++n) {
        const DiagonalState state = product_state(scenario.spectrum(), n, dense_cap);
        const WorkReport report = optimal_permutation(state, scenario.hamiltonian(), dense_cap);
        WorkSweepRow row;
        row.sites = n;
        row.exact_work = report.work;
        row.bound = n * per_site;
        row.relative_gap = row.bound > 0.0 ? (row.bound - row.exact_work) / row.bound
                                           : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
    }
    return rows;
}

TypicalSetSummary typical_summary(std::span<const double> p, int sites, double delta,
                                  std::size_t label_limit)
{
    validate_spectrum(p);
    if (sites < 1) {
        throw ValidationError("typical set needs N >= 1");
    }
    if (!(delta > 0.0)) {
        throw ValidationError("typicality tolerance must be positive");
    }
    TypicalSetSummary summary;
    summary.delta = delta;
    summary.sites = sites;
    summary.entropy = shannon_entropy(p);

    std::vector<double> log_sizes;
    std::vector<double> log_masses;
    for_each_composition(sites, static_cast<int>(p.size()), [&](std::span<const int> composition) {
        const double log_probability = log_label_probability(composition, p);
        if (std::isinf(log_probability)) {
            return;
        }
        if (std::abs(-log_probability / sites - summary.entropy) > delta) {
            return;
        }
        TypeClass type;
        type.composition.assign(composition.begin(), composition.end());
        type.log_size = log_type_class_size(composition);
        type.log_probability = log_probability;
        log_sizes.push_back(type.log_size);
        log_masses.push_back(type.log_size + type.log_probability);
        summary.classes.push_back(std::move(type));
    });
    summary.log_cardinality = log_sum_exp(log_sizes);
    summary.captured_probability = std::exp(log_sum_exp(log_masses));

    if (!summary.classes.empty() &&
        summary.log_cardinality <= std::log(static_cast<double>(label_limit)) + 1e-9) {
        const EnsembleShape shape(sites, static_cast<int>(p.size()));
        for (const auto& type : summary.classes) {
            for (FlatIndex index : type_class_members(shape, type.composition)) {
                summary.labels.push_back(label_of_flat(shape, index));
            }
        }
        std::sort(summary.labels.begin(), summary.labels.end(),
                  [&](const BasisLabel& a, const BasisLabel& b) {
                      return flat_of_label(shape, a) < flat_of_label(shape, b);
                  });
    }
    return summary;
}

TypicalExchangePlan typical_exchange_plan(const PassiveEnsembleScenario& scenario,
                                          FlatIndex dense_cap)
{
    const auto& p = scenario.spectrum();
    const auto& q = scenario.thermal();
    const auto& levels = scenario.hamiltonian().levels();
    const int n = scenario.sites();
    const int d = scenario.hamiltonian().dimension();

    TypicalExchangePlan result;
    result.plan = PathPlan{PlanKind::kDirect, 0, {}};
    result.p_composition = rounded_composition(p, n);
    result.q_composition = rounded_composition(q, n);
    result.initial_energy = n * dot(levels, p);
    result.thermal_floor = n * dot(levels, q);

    FlatIndex dimension = 1;
    result.dense = true;
    for (int k = 0; k < n && result.dense; ++k) {
        result.dense = dimension <= dense_cap / static_cast<FlatIndex>(d);
        dimension *= static_cast<FlatIndex>(d);
    }

    std::vector<int> shift(static_cast<std::size_t>(d));
    bool moves = false;
    for (std::size_t k = 0; k < shift.size(); ++k) {
        shift[k] = result.q_composition[k] - result.p_composition[k];
        moves = moves || shift[k] != 0;
    }

    if (moves) {
        std::vector<TypeClass> classes;
        for_each_composition(n, d, [&](std::span<const int> composition) {
            TypeClass type;
            type.composition.assign(composition.begin(), composition.end());
            type.log_size = log_type_class_size(composition);
            type.log_probability = log_label_probability(composition, p);
            classes.push_back(std::move(type));
        });
        std::stable_sort(classes.begin(), classes.end(), [](const TypeClass& a, const TypeClass& b) {
            return a.log_size + a.log_probability > b.log_size + b.log_probability;
        });
        std::map<std::vector<int>, std::size_t> index_of;
        for (std::size_t i = 0; i < classes.size(); ++i) {
            index_of.emplace(classes[i].composition, i);
        }
        std::vector<bool> used(classes.size(), false);
        auto class_energy = [&](const std::vector<int>& composition) {
            double energy = 0.0;
            for (std::size_t k = 0; k < composition.size(); ++k) {
                energy += composition[k] * levels[k];
            }
            return energy;
        };
        for (std::size_t i = 0; i < classes.size(); ++i) {
            if (used[i] || std::isinf(classes[i].log_probability)) {
                continue;
            }
            std::vector<int> partner = classes[i].composition;
            bool valid = true;
            for (std::size_t k = 0; k < partner.size(); ++k) {
                partner[k] += shift[k];
                valid = valid && partner[k] >= 0;
            }
            if (!valid) {
                continue;
            }
            const std::size_t j = index_of.at(partner);
            if (used[j]) {
                continue;
            }
            const auto& from = classes[i];
            const auto& to = classes[j];
            const double p_from = std::exp(from.log_probability);
            const double p_to = std::exp(to.log_probability);
            const double pair_work =
                (p_from - p_to) * (class_energy(from.composition) - class_energy(to.composition));
            if (!(pair_work > 0.0) || std::abs(from.log_probability - to.log_probability) <= 1e-9) {
                continue;
            }
            used[i] = true;
            used[j] = true;
            ClassExchange exchange;
            exchange.from_composition = from.composition;
            exchange.to_composition = to.composition;
            exchange.count = std::round(std::exp(std::min(from.log_size, to.log_size)));
            exchange.log_ratio = from.log_probability - to.log_probability;
            exchange.work = exchange.count * pair_work;
            result.exchanges.push_back(std::move(exchange));
        }
    }

    if (result.dense) {
        const EnsembleShape shape(n, d);
        DiagonalState state = product_state(p, n, dense_cap);
        const double before = total_energy(state, scenario.hamiltonian());
        for (auto& exchange : result.exchanges) {
            const auto from = type_class_members(shape, exchange.from_composition);
            const auto to = type_class_members(shape, exchange.to_composition);
            const std::size_t pairs = std::min(from.size(), to.size());
            exchange.count = static_cast<double>(pairs);
            for (std::size_t m = 0; m < pairs; ++m) {
                const BasisLabel alpha = label_of_flat(shape, from[m]);
                const BasisLabel beta = label_of_flat(shape, to[m]);
                result.plan.steps.push_back({alpha, beta, Schedule()});
            }
        }
        state = apply_plan(state, result.plan);
        result.initial_energy = before;
        result.final_energy = total_energy(state, scenario.hamiltonian());
        result.work = before - result.final_energy;
    } else {
        std::vector<double> works;
        for (const auto& exchange : result.exchanges) {
            works.push_back(exchange.work);
        }
        result.work = stable_sum(works);
        result.final_energy = result.initial_energy - result.work;
    }
    return result;
}

EntanglementCondition entanglement_condition(const PassiveEnsembleScenario& scenario, int level)
{
    const int n = scenario.sites();
    if (level < 1 || level > n) {
        throw ValidationError("separability level must satisfy 1 <= l <= N");
    }
    if (n > 62) {
        throw ValidationError("entanglement condition supports N <= 62");
    }
    EntanglementCondition condition;
    condition.level = level;
    condition.lhs = relative_entropy(scenario.thermal(), scenario.spectrum());
    condition.gamma = std::ldexp(1.0, n - 1) - std::ldexp(1.0, level) + 1.0;
    if (condition.gamma < 1.0) {
        condition.holds_gamma = true;
        condition.holds_exact = true;
        return condition;
    }
    condition.ratio_gamma = threshold_ratio_gamma(condition.gamma);
    condition.ratio_exact = threshold_ratio_exact(condition.gamma);
    condition.holds_gamma = condition.lhs >= std::log(condition.ratio_gamma) / n;
    condition.holds_exact = condition.lhs >= std::log(condition.ratio_exact) / n;
    return condition;
}

MicrocanonicalScenario::MicrocanonicalScenario(QuditHamiltonian hamiltonian, int sites,
                                               double center, double width, FlatIndex dense_cap)
    : hamiltonian_(std::move(hamiltonian)),
      shape_(sites, hamiltonian_.dimension()),
      center_(center),
      width_(width),
      state_(EnsembleShape(1, 2), {1.0, 0.0})
{
    if (!(width_ >= 0.0) || !std::isfinite(center_)) {
        throw ValidationError("microcanonical window needs a finite center and width >= 0");
    }
    if (shape_.dimension() > dense_cap) {
        throw CapExceededError("d^N = " + std::to_string(shape_.dimension()) +
                               " exceeds the dense cap " + std::to_string(dense_cap));
    }
    energies_ = hamiltonian_.label_energies(shape_);
    const double scale = std::max({1.0, std::abs(center_ - 0.5 * width_), std::abs(center_ + 0.5 * width_)});
    const double lower = center_ - 0.5 * width_ - kShellSlack * scale;
    const double upper = center_ + 0.5 * width_ + kShellSlack * scale;
    for (FlatIndex i = 0; i < shape_.dimension(); ++i) {
        if (energies_[i] >= lower && energies_[i] <= upper) {
            shell_.push_back(i);
        }
    }
    if (shell_.empty()) {
        throw ValidationError("microcanonical shell is empty");
    }
    std::stable_sort(shell_.begin(), shell_.end(),
                     [&](FlatIndex a, FlatIndex b) { return energies_[a] < energies_[b]; });
    std::vector<double> populations(shape_.dimension(), 0.0);
    const double weight = 1.0 / static_cast<double>(shell_.size());
    for (FlatIndex i : shell_) {
        populations[i] = weight;
    }
    state_ = DiagonalState(shape_, std::move(populations), Normalization::kReject, dense_cap);
}

MicrocanonicalPlan microcanonical_plan(const MicrocanonicalScenario& scenario, int samples)
{
    if (samples < 1) {
        throw ValidationError("need at least one interior sample");
    }
    const auto& shape = scenario.shape();
    const auto& energies = scenario.energies();
    const auto& shell = scenario.shell();

    std::vector<FlatIndex> by_energy(shape.dimension());
    std::iota(by_energy.begin(), by_energy.end(), FlatIndex{0});
    std::stable_sort(by_energy.begin(), by_energy.end(),
                     [&](FlatIndex a, FlatIndex b) { return energies[a] < energies[b]; });
    by_energy.resize(shell.size());

    std::vector<bool> in_shell(shape.dimension(), false);
    for (FlatIndex i : shell) {
        in_shell[i] = true;
    }
    std::vector<bool> is_target(shape.dimension(), false);
    for (FlatIndex i : by_energy) {
        is_target[i] = true;
    }
    std::vector<FlatIndex> targets;
    for (FlatIndex i : by_energy) {
        if (!in_shell[i]) {
            targets.push_back(i);
        }
    }
    std::vector<FlatIndex> sources;
    for (FlatIndex i : shell) {
        if (!is_target[i]) {
            sources.push_back(i);
        }
    }

    PathPlan plan{PlanKind::kDirect, 0, {}};
    std::vector<MicrocanonicalExchange> exchanges;
    const DiagonalState& initial = scenario.state();
    DiagonalState current = initial;
    std::vector<FlatIndex> location(shape.dimension());
    std::iota(location.begin(), location.end(), FlatIndex{0});
    std::vector<FlatIndex> occupant = location;

    for (std::size_t i = 0; i < targets.size(); ++i) {
        MicrocanonicalExchange exchange;
        exchange.target = label_of_flat(shape, targets[i]);
        exchange.source = label_of_flat(shape, sources[i]);
        exchange.n1 = static_cast<int>(differing_sites(exchange.target, exchange.source).size());
        const TranspositionStep step{exchange.source, exchange.target, Schedule()};
        if (exchange.n1 >= 2) {
            exchange.min_last_lambda = std::numeric_limits<double>::infinity();
            for (int j = 1; j <= samples; ++j) {
                const double s = static_cast<double>(j) / (samples + 1);
                const LambdaVector lambda = lambda_at(evolve_step(current, step, s));
                exchange.min_last_lambda = std::min(exchange.min_last_lambda, lambda.last());
            }
            exchange.gme_throughout = exchange.min_last_lambda > 0.0;
        } else {
            exchange.min_last_lambda = std::numeric_limits<double>::quiet_NaN();
        }
        exchange.work = work_of_swap(current, exchange.source, exchange.target, scenario.hamiltonian());
        current = apply_swap(current, sources[i], targets[i]);
        std::swap(occupant[sources[i]], occupant[targets[i]]);
        location[occupant[sources[i]]] = sources[i];
        location[occupant[targets[i]]] = targets[i];
        plan.steps.push_back(step);
        exchanges.push_back(std::move(exchange));
    }

    const double before = total_energy(initial, scenario.hamiltonian());
    const double after = total_energy(current, scenario.hamiltonian());
    return MicrocanonicalPlan{
        std::move(plan), std::move(exchanges),
        WorkReport{before, after, before - after, std::move(location), std::move(current)}};
}

std::vector<GridRow> figure1_scan(int resolution, const GridConfig& config)
{
    if (resolution < 2) {
        throw ValidationError("grid resolution must be at least 2");
    }
    check_grid_config(config);
    const int last = resolution - 1;
    std::vector<std::vector<GridRow>> by_row(static_cast<std::size_t>(resolution));
    const int threads = std::min(resolve_threads(config.threads), resolution);
    auto work_on = [&](int first_row) {
        for (int i = first_row; i <= last; i += threads) {
            auto& rows = by_row[static_cast<std::size_t>(i)];
            for (int j = 0; i + j <= last; ++j) {
                const std::array<double, 3> p{static_cast<double>(i) / last,
                                              static_cast<double>(j) / last,
                                              static_cast<double>(last - i - j) / last};
                if (auto row = grid_point(config, p)) {
                    rows.push_back(std::move(*row));
                }
            }
        }
    };
    if (threads == 1) {
        work_on(0);
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back(work_on, t);
        }
    }
    std::vector<GridRow> rows;
    for (auto& chunk : by_row) {
        std::move(chunk.begin(), chunk.end(), std::back_inserter(rows));
    }
    return rows;
}

std::vector<GridRow> figure1_slice(double p0, int samples, const GridConfig& config)
{
    if (!(p0 >= 0.0 && p0 <= 1.0)) {
        throw ValidationError("slice p0 must lie in [0, 1]");
    }
    if (samples < 2) {
        throw ValidationError("slice needs at least 2 samples");
    }
    check_grid_config(config);
    std::vector<GridRow> rows;
    const double rest = 1.0 - p0;
    for (int j = 0; j < samples; ++j) {
        const double p1 = rest * j / (samples - 1);
        const double p2 = j == samples - 1 ? 0.0 : rest - p1;
        if (auto row = grid_point(config, {p0, p1, std::max(0.0, p2)})) {
            rows.push_back(std::move(*row));
        }
    }
    return rows;
}

} // namespace ergoflow
