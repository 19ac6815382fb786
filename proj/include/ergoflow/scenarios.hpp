#pragma once

// Worked settings: a microcanonical shell, tensor powers of a passive
// spectrum (thermal match, typical sets, entanglement thresholds), and the
// population-grid scan for four three-level systems.

#include "ergoflow/ensemble.hpp"
#include "ergoflow/entanglement.hpp"
#include "ergoflow/protocol.hpp"
#include "ergoflow/work.hpp"

#include <optional>
#include <span>
#include <vector>

namespace ergoflow {

struct ThermalMatch {
    std::vector<double> spectrum;
    double temperature = 0.0;
    double entropy_error = 0.0;
};

/// Gibbs spectrum with the Shannon entropy of `p`, found by bisection in
/// inverse temperature. Rejects S(p) = 0, S(p) >= ln d and targets at or
/// below the ground-degeneracy floor.
ThermalMatch thermal_match(const QuditHamiltonian& hamiltonian, std::span<const double> p);

class PassiveEnsembleScenario {
public:
    PassiveEnsembleScenario(QuditHamiltonian hamiltonian, std::vector<double> spectrum, int sites);

    const QuditHamiltonian& hamiltonian() const noexcept { return hamiltonian_; }
    const std::vector<double>& spectrum() const noexcept { return spectrum_; }
    const std::vector<double>& thermal() const noexcept { return match_.spectrum; }
    double temperature() const noexcept { return match_.temperature; }
    int sites() const noexcept { return sites_; }
    /// True when the spectrum is already Gibbs (within 1e-9 entrywise).
    bool is_thermal() const noexcept { return thermal_input_; }

    /// sum_k eps_k (p_k - q_k).
    double energy_gap_per_site() const;

private:
    QuditHamiltonian hamiltonian_;
    std::vector<double> spectrum_;
    ThermalMatch match_;
    int sites_;
    bool thermal_input_ = false;
};

/// N T S(p || q).
double asymptotic_work_bound(const PassiveEnsembleScenario& scenario);

struct WorkSweepRow {
    int sites = 0;
    double exact_work = 0.0;
    double bound = 0.0;
    /// (bound - exact) / bound; NaN when the bound is zero.
    double relative_gap = 0.0;
};

/// Exact optimal work of p^{(x)N} against the asymptotic bound for
/// N = first..last (each d^N within `dense_cap`).
std::vector<WorkSweepRow> work_sweep(const PassiveEnsembleScenario& scenario, int first, int last,
                                     FlatIndex dense_cap = FlatIndex{1} << 20);

struct TypeClass {
    std::vector<int> composition;
    double log_size = 0.0;
    /// ln of the population of each member.
    double log_probability = 0.0;
};

struct TypicalSetSummary {
    double delta = 0.0;
    int sites = 0;
    double entropy = 0.0;
    double log_cardinality = 0.0;
    double captured_probability = 0.0;
    std::vector<TypeClass> classes;
    /// Filled only when the set has at most `label_limit` members.
    std::vector<BasisLabel> labels;
};

/// Labels with |-(1/N) ln P - S(p)| <= delta, counted by type class.
TypicalSetSummary typical_summary(std::span<const double> p, int sites, double delta,
                                  std::size_t label_limit = 4096);

struct ClassExchange {
    std::vector<int> from_composition;
    std::vector<int> to_composition;
    /// Exchanged label pairs, min(|T(from)|, |T(to)|).
    double count = 0.0;
    /// ln(P_from / P_to) for one exchanged pair.
    double log_ratio = 0.0;
    double work = 0.0;
};

struct TypicalExchangePlan {
    std::vector<int> p_composition;
    std::vector<int> q_composition;
    std::vector<ClassExchange> exchanges;
    /// Label-level transpositions; filled in dense mode only.
    PathPlan plan;
    bool dense = false;
    double initial_energy = 0.0;
    double final_energy = 0.0;
    double work = 0.0;
    /// N tr[H q].
    double thermal_floor = 0.0;
};

/// Exchanges whole type classes T(n) <-> T(n + delta), delta the difference
/// of the rounded q and p compositions, in order of class probability.
TypicalExchangePlan typical_exchange_plan(const PassiveEnsembleScenario& scenario,
                                          FlatIndex dense_cap = FlatIndex{1} << 20);

struct EntanglementCondition {
    int level = 0;
    double gamma = 0.0;
    /// S(q || p).
    double lhs = 0.0;
    double ratio_gamma = 0.0;
    double ratio_exact = 0.0;
    bool holds_gamma = false;
    bool holds_exact = false;
};

/// S(q||p) >= (1/N) ln ratio with gamma = 2^{N-1} - 2^l + 1, for both
/// threshold formulas. l = N is vacuous and holds.
EntanglementCondition entanglement_condition(const PassiveEnsembleScenario& scenario, int level);

class MicrocanonicalScenario {
public:
    MicrocanonicalScenario(QuditHamiltonian hamiltonian, int sites, double center, double width,
                           FlatIndex dense_cap = FlatIndex{1} << 20);

    const QuditHamiltonian& hamiltonian() const noexcept { return hamiltonian_; }
    const EnsembleShape& shape() const noexcept { return shape_; }
    double center() const noexcept { return center_; }
    double width() const noexcept { return width_; }
    /// Shell labels ordered by (energy, flat index).
    const std::vector<FlatIndex>& shell() const noexcept { return shell_; }
    const DiagonalState& state() const noexcept { return state_; }
    const std::vector<double>& energies() const noexcept { return energies_; }

private:
    QuditHamiltonian hamiltonian_;
    EnsembleShape shape_;
    double center_;
    double width_;
    std::vector<double> energies_;
    std::vector<FlatIndex> shell_;
    DiagonalState state_;
};

struct MicrocanonicalExchange {
    BasisLabel target;
    BasisLabel source;
    int n1 = 0;
    double work = 0.0;
    /// Smallest last-entry Lambda over the interior samples; NaN when n1 < 2.
    double min_last_lambda = 0.0;
    bool gme_throughout = false;
};

struct MicrocanonicalPlan {
    PathPlan plan;
    std::vector<MicrocanonicalExchange> exchanges;
    WorkReport report;
};

/// Moves the shell populations onto the N_Delta lowest labels, one direct
/// exchange each, sampling every step at `samples` interior instants.
MicrocanonicalPlan microcanonical_plan(const MicrocanonicalScenario& scenario, int samples = 99);

struct GridConfig {
    QuditHamiltonian hamiltonian{std::vector<double>{0.0, 1.0, 1.0}};
    int sites = 4;
    BasisLabel alpha{std::vector<int>{1, 1, 1, 1}};
    BasisLabel beta{std::vector<int>{0, 2, 2, 2}};
    /// 0 picks std::thread::hardware_concurrency().
    int threads = 1;
};

struct GridRow {
    double p0 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double work = 0.0;
    LambdaVector lambda;
    SeparabilityReport report;
};

/// Passive points of the grid p = (i, j, R-1-i-j) / (R-1), in (i, j) order.
std::vector<GridRow> figure1_scan(int resolution, const GridConfig& config = {});

/// Passive points with p0 fixed and p1 = j (1 - p0) / (samples - 1).
std::vector<GridRow> figure1_slice(double p0, int samples, const GridConfig& config = {});

} // namespace ergoflow
