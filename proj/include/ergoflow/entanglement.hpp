#pragma once

// Lower bounds on the entropy-vector entries of states with a single
// coherent pair, l-separability classification, and small dense oracles
// (pure-state entropy vectors, partial transposes).

#include "ergoflow/ensemble.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ergoflow {

struct Bipartition {
    std::vector<int> part;       // gamma_a, sites in ascending order
    std::vector<int> complement; // the remaining sites of the split set
};

/// The 2^{n-1} - 1 unordered nontrivial bipartitions of a site set. The
/// i-th cut (1-based) puts the sites selected by the bits of i, taken over
/// the first n-1 sites, in `part`; the last site is always in `complement`.
class BipartitionSet {
public:
    explicit BipartitionSet(std::vector<int> sites);

    const std::vector<int>& sites() const noexcept { return sites_; }
    const std::vector<Bipartition>& cuts() const noexcept { return cuts_; }
    std::size_t size() const noexcept { return cuts_.size(); }

private:
    std::vector<int> sites_;
    std::vector<Bipartition> cuts_;
};

/// Lambda_1 >= Lambda_2 >= ... for one coherent pair. Indices are 1-based
/// through `at`.
struct LambdaVector {
    int n1 = 0;
    std::vector<double> entries;

    bool empty() const noexcept { return entries.empty(); }
    std::size_t size() const noexcept { return entries.size(); }
    double at(std::size_t k) const { return entries.at(k - 1); }
    double first() const { return entries.front(); }
    double last() const { return entries.back(); }
};

struct SeparabilityReport {
    bool entangled = false;
    bool gme = false;
    /// excluded_levels[l] is true when l-separability is ruled out (l in 2..n1).
    std::vector<bool> excluded_levels;
    /// Smallest ruled-out l, or 0 when nothing is ruled out.
    int strongest_excluded_level = 0;
    /// The state is at most this separable (n1 if nothing is ruled out, 1 for GME).
    int separability_upper_bound = 0;
    LambdaVector lambda;

    /// "SEP", "L<m>" (at most m-separable, 1 < m < n1) or "GME".
    std::string label() const;
};

/// Entry index whose positivity rules out l-separability of an n1-partite
/// pair: 2^{n1-1} - 2^{l-1} + 1, for 2 <= l <= n1.
std::size_t boundary_index(int n1, int l);

/// alpha with beta's digits on `part`, and beta with alpha's digits there.
/// Throws ValidationError unless `part` meets the differing set without
/// covering it.
std::pair<BasisLabel, BasisLabel> flip_states(const BasisLabel& alpha, const BasisLabel& beta,
                                              std::span<const int> part);

/// Instantaneous bound 2(|coherence| - S_k), S_k the sum of the k smallest
/// sqrt(P_{alpha_a} P_{beta_a}) over the bipartitions of the differing
/// sites. Empty when fewer than two sites differ.
LambdaVector lambda_at(const CoherentPairState& snapshot);

/// Same bound with the bipartitions taken over all N sites; cuts that do not
/// split the differing set use the pair's own entries.
LambdaVector lambda_at_all_cuts(const CoherentPairState& snapshot);

/// Peak over a transposition: |P_alpha - P_beta| - 2 S_k with pre-step
/// populations.
LambdaVector lambda_peak(const DiagonalState& pre_state, const BasisLabel& alpha,
                         const BasisLabel& beta);

SeparabilityReport classify(const LambdaVector& lambda);

/// Population ratio at which |x - 1| - 2k sqrt(x) changes sign:
/// 1 + 2k^2 + 2k sqrt(1 + k^2).
double threshold_ratio_exact(double k);

/// The closed form 1 + 2 gamma + 2 sqrt(gamma + gamma^2) used for the
/// l-separability condition on tensor powers. Agrees with the exact ratio
/// only at gamma = 1.
double threshold_ratio_gamma(double gamma);

/// Linear entropies sqrt(2(1 - tr rho_gamma^2)) over all 2^{N-1} - 1
/// bipartitions of the sites of a pure state, sorted non-increasing.
std::vector<double> entropy_vector_pure(std::span<const std::complex<double>> amplitudes,
                                        const EnsembleShape& shape);

inline constexpr FlatIndex kEntropyVectorCap = FlatIndex{1} << 12;
inline constexpr FlatIndex kPartialTransposeCap = FlatIndex{1} << 10;

/// Dense density matrix of a snapshot (d^N <= 2^10).
Eigen::MatrixXcd dense_density_matrix(const CoherentPairState& snapshot);

/// Smallest eigenvalue of the partial transpose over `sites`.
double ppt_min_eigenvalue(const Eigen::MatrixXcd& rho, const EnsembleShape& shape,
                          std::span<const int> sites);

} // namespace ergoflow
