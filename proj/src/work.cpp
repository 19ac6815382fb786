#include "ergoflow/work.hpp"

#include "ergoflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ergoflow {

namespace {

void check_shapes(const DiagonalState& state, const QuditHamiltonian& hamiltonian)
{
    if (state.shape().levels() != hamiltonian.dimension()) {
        throw ValidationError("state has d=" + std::to_string(state.shape().levels()) +
                              " but the Hamiltonian has " + std::to_string(hamiltonian.dimension()) +
                              " levels");
    }
}

bool same_shell(double lower, double upper)
{
    const double scale = std::max({1.0, std::abs(lower), std::abs(upper)});
    return upper - lower <= 1e-12 * scale;
}

std::vector<FlatIndex> iota_indices(FlatIndex n)
{
    std::vector<FlatIndex> order(n);
    std::iota(order.begin(), order.end(), FlatIndex{0});
    return order;
}

} // namespace

double total_energy(const DiagonalState& state, const QuditHamiltonian& hamiltonian)
{
    check_shapes(state, hamiltonian);
    const auto energies = hamiltonian.label_energies(state.shape());
    std::vector<double> terms(energies.size());
    for (std::size_t i = 0; i < energies.size(); ++i) {
        terms[i] = state.population(i) * energies[i];
    }
    return stable_sum(terms);
}

std::vector<std::vector<FlatIndex>> energy_shells(std::span<const double> energies)
{
    auto order = iota_indices(energies.size());
    std::stable_sort(order.begin(), order.end(),
                     [&](FlatIndex a, FlatIndex b) { return energies[a] < energies[b]; });
    std::vector<std::vector<FlatIndex>> shells;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i == 0 || !same_shell(energies[order[i - 1]], energies[order[i]])) {
            shells.emplace_back();
        }
        shells.back().push_back(order[i]);
    }
    return shells;
}

bool is_passive(const DiagonalState& state, const QuditHamiltonian& hamiltonian)
{
    check_shapes(state, hamiltonian);
    const auto energies = hamiltonian.label_energies(state.shape());
    double lowest_below = std::numeric_limits<double>::infinity();
    for (const auto& shell : energy_shells(energies)) {
        double shell_max = -std::numeric_limits<double>::infinity();
        double shell_min = std::numeric_limits<double>::infinity();
        for (FlatIndex index : shell) {
            shell_max = std::max(shell_max, state.population(index));
            shell_min = std::min(shell_min, state.population(index));
        }
        if (shell_max > lowest_below) {
            return false;
        }
        lowest_below = std::min(lowest_below, shell_min);
    }
    return true;
}

WorkReport optimal_permutation(const DiagonalState& state, const QuditHamiltonian& hamiltonian,
                               FlatIndex dense_cap)
{
    check_shapes(state, hamiltonian);
    if (state.size() > dense_cap) {
        throw CapExceededError("state too large for the dense work solve");
    }
    const auto energies = hamiltonian.label_energies(state.shape());
    const auto populations = state.populations();

    auto by_population = iota_indices(state.size());
    std::stable_sort(by_population.begin(), by_population.end(), [&](FlatIndex a, FlatIndex b) {
        return populations[a] > populations[b];
    });

    std::vector<FlatIndex> permutation(state.size());
    std::size_t rank = 0;
    for (auto shell : energy_shells(energies)) {
        // The shell receives the next |shell| largest populations. Inside the
        // shell they are handed out in the shell's own population order so
        // that an already passive shell keeps its entries in place.
        std::stable_sort(shell.begin(), shell.end(), [&](FlatIndex a, FlatIndex b) {
            return populations[a] > populations[b];
        });
        for (FlatIndex slot : shell) {
            permutation[by_population[rank++]] = slot;
        }
    }

    DiagonalState final_state = apply_permutation(state, permutation);
    std::vector<double> before(state.size());
    std::vector<double> after(state.size());
    std::vector<double> released(state.size());
    for (FlatIndex i = 0; i < state.size(); ++i) {
        before[i] = populations[i] * energies[i];
        after[i] = final_state.population(i) * energies[i];
        released[i] = (populations[i] - final_state.population(i)) * energies[i];
    }
    return WorkReport{stable_sum(before), stable_sum(after), stable_sum(released),
                      std::move(permutation), std::move(final_state)};
}

DiagonalState apply_swap(const DiagonalState& state, FlatIndex alpha, FlatIndex beta)
{
    if (alpha >= state.size() || beta >= state.size()) {
        throw ValidationError("swap index out of range");
    }
    auto populations = state.populations_;
    std::swap(populations[alpha], populations[beta]);
    return DiagonalState(DiagonalState::Trusted{}, state.shape(), std::move(populations));
}

DiagonalState apply_swap(const DiagonalState& state, const BasisLabel& alpha, const BasisLabel& beta)
{
    return apply_swap(state, flat_of_label(state.shape(), alpha), flat_of_label(state.shape(), beta));
}

DiagonalState apply_permutation(const DiagonalState& state, std::span<const FlatIndex> permutation)
{
    if (permutation.size() != state.size()) {
        throw ValidationError("permutation length does not match the state");
    }
    std::vector<double> populations(state.size());
    std::vector<bool> hit(state.size(), false);
    for (FlatIndex source = 0; source < state.size(); ++source) {
        const FlatIndex target = permutation[source];
        if (target >= state.size() || hit[target]) {
            throw ValidationError("permutation is not a bijection");
        }
        hit[target] = true;
        populations[target] = state.populations_[source];
    }
    return DiagonalState(DiagonalState::Trusted{}, state.shape(), std::move(populations));
}

double work_of_swap(const DiagonalState& state, const BasisLabel& alpha, const BasisLabel& beta,
                    const QuditHamiltonian& hamiltonian)
{
    return total_energy(state, hamiltonian) - total_energy(apply_swap(state, alpha, beta), hamiltonian);
}

} // namespace ergoflow
