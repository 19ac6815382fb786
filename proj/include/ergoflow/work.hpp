#pragma once

// Energy accounting and maximal work extraction by population permutation.

#include "ergoflow/ensemble.hpp"

#include <span>
#include <vector>

namespace ergoflow {

struct WorkReport {
    double initial_energy;
    double final_energy;
    double work;
    /// permutation[mu] is the flat index that receives P_mu.
    std::vector<FlatIndex> permutation;
    DiagonalState final_state;
};

/// tr(Omega h_0).
double total_energy(const DiagonalState& state, const QuditHamiltonian& hamiltonian);

/// True iff populations are non-increasing in energy. Labels whose total
/// energies agree within a relative 1e-12 form one degenerate shell, inside
/// which any ordering is accepted.
bool is_passive(const DiagonalState& state, const QuditHamiltonian& hamiltonian);

/// Largest population goes to the lowest energy, and so on (stable in the
/// flat index on ties). A passive input is returned unchanged and W == 0.
WorkReport optimal_permutation(const DiagonalState& state, const QuditHamiltonian& hamiltonian,
                               FlatIndex dense_cap = kDefaultDenseCap);

/// Exchanges P_alpha and P_beta; every other entry is copied bit for bit.
DiagonalState apply_swap(const DiagonalState& state, FlatIndex alpha, FlatIndex beta);
DiagonalState apply_swap(const DiagonalState& state, const BasisLabel& alpha, const BasisLabel& beta);

/// Moves P_mu to permutation[mu]. Throws if `permutation` is not a bijection.
DiagonalState apply_permutation(const DiagonalState& state, std::span<const FlatIndex> permutation);

/// Energy released by the exchange of P_alpha and P_beta, evaluated as
/// total_energy(state) - total_energy(apply_swap(state, alpha, beta)).
double work_of_swap(const DiagonalState& state, const BasisLabel& alpha, const BasisLabel& beta,
                    const QuditHamiltonian& hamiltonian);

/// Groups flat indices into degenerate energy shells, ascending in energy;
/// inside a shell indices are ascending.
std::vector<std::vector<FlatIndex>> energy_shells(std::span<const double> energies);

} // namespace ergoflow
