#pragma once

// Single-system spectra: entropies, Gibbs states and type classes of
// N-fold products.

#include "ergoflow/ensemble.hpp"

#include <functional>
#include <span>
#include <vector>

namespace ergoflow {

/// -sum p ln p (natural log, 0 ln 0 = 0).
double shannon_entropy(std::span<const double> p);

/// sum p ln(p/q). Throws ValidationError when supp(p) is not inside supp(q).
double relative_entropy(std::span<const double> p, std::span<const double> q);

/// q_k proportional to exp(-eps_k / T).
std::vector<double> gibbs_spectrum(const QuditHamiltonian& hamiltonian, double temperature);

/// Same, parametrised by inverse temperature (beta = 0 is uniform).
std::vector<double> gibbs_spectrum_beta(const QuditHamiltonian& hamiltonian, double beta);

/// Occupation numbers n_k (sum N) nearest to N p_k: floors plus one unit to
/// the largest remainders, ties to the lower level.
std::vector<int> rounded_composition(std::span<const double> p, int sites);

/// |0>^{n_0} |1>^{n_1} ... in site order.
BasisLabel representative_label(std::span<const int> composition);

/// Occupation numbers of a label.
std::vector<int> composition_of(const BasisLabel& label, int levels);

/// ln( N! / prod n_k! ), the log size of the type class.
double log_type_class_size(std::span<const int> composition);

/// sum n_k ln p_k, the log population of any member under sigma_p^{(x)N};
/// -inf if a zero-probability level is occupied.
double log_label_probability(std::span<const int> composition, std::span<const double> p);

/// Visits every composition of `sites` into `levels` parts in lexicographic
/// order of (n_0, n_1, ...), descending in n_0 first.
void for_each_composition(int sites, int levels,
                          const std::function<void(std::span<const int>)>& visit);

/// Flat indices of all members of a type class, ascending.
std::vector<FlatIndex> type_class_members(const EnsembleShape& shape,
                                          std::span<const int> composition);

} // namespace ergoflow
