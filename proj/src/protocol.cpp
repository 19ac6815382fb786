#include "ergoflow/protocol.hpp"

#include "ergoflow/errors.hpp"
#include "ergoflow/spectra.hpp"
#include "ergoflow/work.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace ergoflow {

namespace {

std::vector<int> checked_differing_sites(const BasisLabel& alpha, const BasisLabel& beta)
{
    auto sites = differing_sites(alpha, beta);
    if (sites.empty()) {
        throw ValidationError("a transposition needs two distinct labels");
    }
    return sites;
}

// Shuttle alpha along `sites` one digit at a time; returns the visited
// labels, starting with alpha.
std::vector<BasisLabel> shuttle_chain(const BasisLabel& alpha, const BasisLabel& beta,
                                      std::span<const int> sites)
{
    std::vector<BasisLabel> chain{alpha};
    for (int site : sites) {
        const auto k = static_cast<std::size_t>(site);
        chain.push_back(chain.back().with_digit(k, beta[k]));
    }
    return chain;
}

double min_eigenvalue_2x2(double a, double b, std::complex<double> c)
{
    const double mean = 0.5 * (a + b);
    const double half_gap = 0.5 * (a - b);
    return mean - std::sqrt(half_gap * half_gap + std::norm(c));
}

} // namespace

Schedule::Schedule() : Schedule(linear()) {}

Schedule::Schedule(std::function<double(double)> mixing, std::string name)
    : mixing_(std::move(mixing)), name_(std::move(name))
{
    if (!mixing_) {
        throw ValidationError("schedule needs a mixing function");
    }
    if (std::abs(mixing_(0.0)) > 1e-12 || std::abs(mixing_(1.0) - 1.0) > 1e-12) {
        throw ValidationError("schedule must satisfy m(0) = 0 and m(1) = 1");
    }
}

Schedule Schedule::linear()
{
    return Schedule([](double s) { return s; }, "linear");
}

Schedule Schedule::smoothstep()
{
    return Schedule([](double s) { return s * s * (3.0 - 2.0 * s); }, "smoothstep");
}

double Schedule::operator()(double s) const
{
    if (!(s >= 0.0 && s <= 1.0)) {
        throw ValidationError("normalised time must lie in [0, 1]");
    }
    return mixing_(s);
}

std::array<double, 2> rotation_moduli(double mixing)
{
    constexpr double kQuarterTurn = std::numbers::pi / 2.0;
    // cos t written as sin(pi/2 - t) so that m = 1 gives exactly 0.
    return {std::sin(kQuarterTurn * (1.0 - mixing)), std::sin(kQuarterTurn * mixing)};
}

std::string to_string(PlanKind kind)
{
    switch (kind) {
    case PlanKind::kDirect:
        return "direct";
    case PlanKind::kIndirect:
        return "indirect";
    case PlanKind::kHybrid:
        return "hybrid";
    case PlanKind::kLadder:
        return "ladder";
    }
    return "unknown";
}

PathPlan direct_plan(const BasisLabel& alpha, const BasisLabel& beta, const Schedule& schedule)
{
    checked_differing_sites(alpha, beta);
    return PathPlan{PlanKind::kDirect, 0, {TranspositionStep{alpha, beta, schedule}}};
}

PathPlan indirect_plan(const BasisLabel& alpha, const BasisLabel& beta, const Schedule& schedule)
{
    const auto sites = checked_differing_sites(alpha, beta);
    const auto chain = shuttle_chain(alpha, beta, sites);
    PathPlan plan{PlanKind::kIndirect, 0, {}};
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        plan.steps.push_back({chain[i], chain[i + 1], schedule});
    }
    // Back from the label next to beta down to alpha.
    for (std::size_t i = chain.size() - 2; i >= 1; --i) {
        plan.steps.push_back({chain[i], chain[i - 1], schedule});
    }
    return plan;
}

PathPlan hybrid_plan(const BasisLabel& alpha, const BasisLabel& beta, int level,
                     const Schedule& schedule)
{
    const auto sites = checked_differing_sites(alpha, beta);
    const int n = static_cast<int>(sites.size());
    if (level < 1 || level > n) {
        throw ValidationError("hybrid level must satisfy 1 <= l <= " + std::to_string(n));
    }
    const auto shuttle = std::span<const int>(sites).first(static_cast<std::size_t>(n - level));
    const auto chain = shuttle_chain(alpha, beta, shuttle);
    PathPlan plan{PlanKind::kHybrid, level, {}};
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        plan.steps.push_back({chain[i], chain[i + 1], schedule});
    }
    plan.steps.push_back({chain.back(), beta, schedule});
    for (std::size_t i = chain.size() - 1; i >= 1; --i) {
        plan.steps.push_back({chain[i], chain[i - 1], schedule});
    }
    return plan;
}

DiagonalState apply_plan(const DiagonalState& state, const PathPlan& plan)
{
    DiagonalState current = state;
    for (const auto& step : plan.steps) {
        current = apply_swap(current, step.alpha, step.beta);
    }
    return current;
}

CoherentPairState evolve_step(const DiagonalState& pre_state, const TranspositionStep& step,
                              double s)
{
    const auto [c, sn] = rotation_moduli(step.schedule(s));
    const double p_alpha = pre_state.population(step.alpha);
    const double p_beta = pre_state.population(step.beta);
    // u = [[c, -i sn], [-i sn, c]] acting on span{|alpha>, |beta>}.
    const std::complex<double> u11{c, 0.0};
    const std::complex<double> u12{0.0, -sn};
    const std::complex<double> u21{0.0, -sn};
    const std::complex<double> u22{c, 0.0};
    const double pop_alpha = c * c * p_alpha + sn * sn * p_beta;
    const double pop_beta = sn * sn * p_alpha + c * c * p_beta;
    const std::complex<double> coherence = u11 * p_alpha * std::conj(u21) + u12 * p_beta * std::conj(u22);
    return CoherentPairState(pre_state, step.alpha, step.beta, pop_alpha, pop_beta, coherence);
}

double SeparableDecomposition::total_weight() const
{
    double total = stable_sum(residual);
    for (const auto& component : components) {
        total += component.weight;
    }
    return total;
}

double SeparableDecomposition::min_factor_eigenvalue() const
{
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& component : components) {
        const auto& f = component.factor;
        lowest = std::min(lowest, min_eigenvalue_2x2(f[0].real(), f[3].real(), f[1]));
    }
    return lowest;
}

double SeparableDecomposition::max_trace_error() const
{
    double worst = 0.0;
    for (const auto& component : components) {
        worst = std::max(worst, std::abs(component.factor[0].real() + component.factor[3].real() - 1.0));
    }
    return worst;
}

double SeparableDecomposition::reassembly_error(const CoherentPairState& snapshot) const
{
    if (!(snapshot.shape() == shape)) {
        throw ValidationError("decomposition and snapshot have different shapes");
    }
    std::vector<double> diagonal = residual;
    std::complex<double> coherence{0.0, 0.0};
    FlatIndex alpha_index = 0;
    FlatIndex beta_index = 0;
    for (const auto& component : components) {
        const auto k = static_cast<std::size_t>(component.site);
        alpha_index = flat_of_label(shape, component.spectators.with_digit(k, component.digit_alpha));
        beta_index = flat_of_label(shape, component.spectators.with_digit(k, component.digit_beta));
        diagonal[alpha_index] += component.weight * component.factor[0].real();
        diagonal[beta_index] += component.weight * component.factor[3].real();
        coherence += component.weight * component.factor[1];
    }
    double worst = 0.0;
    for (FlatIndex i = 0; i < shape.dimension(); ++i) {
        worst = std::max(worst, std::abs(diagonal[i] - snapshot.population(i)));
    }
    if (!components.empty()) {
        worst = std::max(worst, std::abs(coherence - snapshot.entry(alpha_index, beta_index)));
    } else {
        worst = std::max(worst, std::abs(snapshot.coherence()));
    }
    return worst;
}

SeparableDecomposition separability_certificate(const CoherentPairState& snapshot)
{
    const auto sites = differing_sites(snapshot.alpha(), snapshot.beta());
    if (sites.size() != 1) {
        throw CertificateNotApplicable("separable form needs a pair differing at exactly one site, got " +
                                       std::to_string(sites.size()));
    }
    SeparableDecomposition decomposition{snapshot.shape(), {}, {}};
    const auto base = snapshot.base().populations();
    decomposition.residual.assign(base.begin(), base.end());
    decomposition.residual[snapshot.alpha_index()] = 0.0;
    decomposition.residual[snapshot.beta_index()] = 0.0;

    const double weight = snapshot.pop_alpha() + snapshot.pop_beta();
    if (weight == 0.0) {
        return decomposition;
    }
    const auto site = static_cast<std::size_t>(sites.front());
    SeparableDecomposition::Component component;
    component.weight = weight;
    component.site = sites.front();
    component.digit_alpha = snapshot.alpha()[site];
    component.digit_beta = snapshot.beta()[site];
    component.spectators = snapshot.alpha();
    component.factor = {snapshot.pop_alpha() / weight, snapshot.coherence() / weight,
                        std::conj(snapshot.coherence()) / weight, snapshot.pop_beta() / weight};
    decomposition.components.push_back(std::move(component));

    if (decomposition.min_factor_eigenvalue() < -1e-12 || decomposition.max_trace_error() > 1e-12) {
        throw ValidationError("single-site factor is not a density matrix");
    }
    return decomposition;
}

PowerReport plan_power_report(const PathPlan& plan, const DiagonalState& state,
                              const QuditHamiltonian& hamiltonian)
{
    const DiagonalState after = apply_plan(state, plan);
    PowerReport report;
    report.work = total_energy(state, hamiltonian) - total_energy(after, hamiltonian);
    report.steps = plan.cost();
    report.work_per_step = report.steps == 0 ? 0.0 : report.work / static_cast<double>(report.steps);
    return report;
}

LadderPlan ladder_plan(std::span<const double> start, std::span<const double> end, int rounds,
                       int sites)
{
    validate_spectrum(start, "start spectrum");
    validate_spectrum(end, "end spectrum");
    if (start.size() != end.size()) {
        throw ValidationError("ladder spectra have different lengths");
    }
    if (rounds < 1) {
        throw ValidationError("ladder needs K >= 1");
    }
    for (std::size_t k = 0; k < start.size(); ++k) {
        if ((start[k] > 0.0) != (end[k] > 0.0)) {
            throw ValidationError("ladder spectra must share their support");
        }
    }

    LadderPlan ladder;
    ladder.plan = PathPlan{PlanKind::kLadder, rounds, {}};
    ladder.spectra.emplace_back(start.begin(), start.end());
    for (int j = 1; j < rounds; ++j) {
        const double t = static_cast<double>(j) / rounds;
        std::vector<double> rho(start.size(), 0.0);
        for (std::size_t k = 0; k < start.size(); ++k) {
            if (start[k] > 0.0) {
                rho[k] = std::exp((1.0 - t) * std::log(start[k]) + t * std::log(end[k]));
            }
        }
        const double z = stable_sum(rho);
        for (auto& x : rho) {
            x /= z;
        }
        ladder.spectra.push_back(std::move(rho));
    }
    ladder.spectra.emplace_back(end.begin(), end.end());

    for (int j = 1; j <= rounds; ++j) {
        LadderRound round;
        round.from_spectrum = ladder.spectra[static_cast<std::size_t>(j - 1)];
        round.to_spectrum = ladder.spectra[static_cast<std::size_t>(j)];
        round.relative_entropy_to_start = relative_entropy(round.to_spectrum, start);
        round.from_composition = rounded_composition(round.from_spectrum, sites);
        round.to_composition = rounded_composition(round.to_spectrum, sites);
        round.alpha = representative_label(round.from_composition);
        round.beta = representative_label(round.to_composition);
        round.exchanges = !(round.alpha == round.beta);
        if (round.exchanges) {
            const double log_alpha = log_label_probability(round.from_composition, start);
            const double log_beta = log_label_probability(round.to_composition, start);
            round.log_population_ratio = log_alpha - log_beta;
            const double p_alpha = std::exp(log_alpha);
            const double p_beta = std::exp(log_beta);
            round.lambda1_peak = std::abs(p_alpha - p_beta) - 2.0 * std::sqrt(p_alpha * p_beta);
            round.lambda1_relative = 2.0 * std::abs(std::sinh(0.5 * round.log_population_ratio)) - 2.0;
            ladder.plan.steps.push_back({round.alpha, round.beta, Schedule()});
        }
        ladder.rounds.push_back(std::move(round));
    }
    return ladder;
}

} // namespace ergoflow
