#pragma once

// Transposition protocols: direct exchanges, single-site shuttles that never
// entangle, hybrids between the two, and ladders of typical exchanges.
//
// Time is normalised: a step runs over s in [0, 1] and its two-level unitary
// is u(s) = [[cos t, -i sin t], [-i sin t, cos t]] with t = (pi/2) m(s).

#include "ergoflow/ensemble.hpp"
#include "ergoflow/entanglement.hpp"

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace ergoflow {

/// Monotone mixing function m on [0, 1] with m(0) = 0 and m(1) = 1.
class Schedule {
public:
    /// m(s) = s, the constant-Hamiltonian path.
    Schedule();
    Schedule(std::function<double(double)> mixing, std::string name);

    static Schedule linear();
    /// m(s) = 3s^2 - 2s^3.
    static Schedule smoothstep();

    double operator()(double s) const;
    const std::string& name() const noexcept { return name_; }

private:
    std::function<double(double)> mixing_;
    std::string name_;
};

/// |u11| = cos t and |u12| = sin t for mixing value m; exact at m = 0, 1.
std::array<double, 2> rotation_moduli(double mixing);

struct TranspositionStep {
    BasisLabel alpha;
    BasisLabel beta;
    Schedule schedule;
};

enum class PlanKind { kDirect, kIndirect, kHybrid, kLadder };

std::string to_string(PlanKind kind);

struct PathPlan {
    PlanKind kind = PlanKind::kDirect;
    /// l for hybrid plans, K for ladders, 0 otherwise.
    int parameter = 0;
    std::vector<TranspositionStep> steps;

    /// Every step is assumed to take the same time.
    std::size_t cost() const noexcept { return steps.size(); }
};

PathPlan direct_plan(const BasisLabel& alpha, const BasisLabel& beta,
                     const Schedule& schedule = Schedule());

/// 2n - 1 single-site steps: the forward chain replaces differing digits in
/// ascending site order until beta is reached, then walks back.
PathPlan indirect_plan(const BasisLabel& alpha, const BasisLabel& beta,
                       const Schedule& schedule = Schedule());

/// Shuttle over the n - l lowest differing sites, one direct step over the
/// remaining l sites, shuttle back: 2(n - l) + 1 steps.
PathPlan hybrid_plan(const BasisLabel& alpha, const BasisLabel& beta, int level,
                     const Schedule& schedule = Schedule());

/// Applies every step as a full population exchange.
DiagonalState apply_plan(const DiagonalState& state, const PathPlan& plan);

/// State at normalised time s inside `step`, starting from `pre_state`.
CoherentPairState evolve_step(const DiagonalState& pre_state, const TranspositionStep& step,
                              double s);

/// (P_alpha + P_alpha') rho_1 (x) |spectators><spectators| + residual
/// diagonal, available when the pair differs at exactly one site.
struct SeparableDecomposition {
    struct Component {
        double weight = 0.0;
        /// Row-major 2x2 block on (digit_alpha, digit_beta) of `site`.
        std::array<std::complex<double>, 4> factor{};
        int site = 0;
        int digit_alpha = 0;
        int digit_beta = 0;
        /// Spectator digits; the entry at `site` is unused.
        BasisLabel spectators;
    };

    EnsembleShape shape;
    std::vector<Component> components;
    /// Diagonal populations outside the factored pair (zeros on the pair).
    std::vector<double> residual;

    double total_weight() const;
    /// Smallest eigenvalue over all factors (+inf with no factors).
    double min_factor_eigenvalue() const;
    /// max |tr factor - 1|.
    double max_trace_error() const;
    /// Largest entrywise deviation from `snapshot` after reassembly.
    double reassembly_error(const CoherentPairState& snapshot) const;
};

/// Throws CertificateNotApplicable unless the pair differs at one site.
SeparableDecomposition separability_certificate(const CoherentPairState& snapshot);

struct PowerReport {
    double work = 0.0;
    std::size_t steps = 0;
    double work_per_step = 0.0;
};

PowerReport plan_power_report(const PathPlan& plan, const DiagonalState& state,
                              const QuditHamiltonian& hamiltonian);

struct LadderRound {
    std::vector<double> from_spectrum;
    std::vector<double> to_spectrum;
    /// S(to || p) of the round's end point.
    double relative_entropy_to_start = 0.0;
    std::vector<int> from_composition;
    std::vector<int> to_composition;
    BasisLabel alpha;
    BasisLabel beta;
    /// ln(P_alpha / P_beta) under sigma_p^{(x)N}.
    double log_population_ratio = 0.0;
    /// Peak Lambda_1 with equal flip terms; 0 when the round exchanges nothing.
    double lambda1_peak = 0.0;
    /// lambda1_peak / sqrt(P_alpha P_beta) = 2|sinh(ratio/2)| - 2, free of
    /// underflow for large N.
    double lambda1_relative = 0.0;
    bool exchanges = false;
};

struct LadderPlan {
    std::vector<std::vector<double>> spectra; // rho_0 = p, ..., rho_K = q
    std::vector<LadderRound> rounds;
    PathPlan plan;
};

/// K rounds along rho_j proportional to p^{1 - j/K} q^{j/K}; round j
/// exchanges the type-class representatives of rho_{j-1} and rho_j for
/// N systems. Spectra must share their support.
LadderPlan ladder_plan(std::span<const double> start, std::span<const double> end, int rounds,
                       int sites);

} // namespace ergoflow
