#pragma once

// Index arithmetic, Hamiltonians and state containers for N identical
// d-level systems. Level digits are 0-based throughout: digit k of a label
// is the k-th lowest single-system level.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ergoflow {

using FlatIndex = std::uint64_t;

inline constexpr double kProbabilityTolerance = 1e-12;
inline constexpr FlatIndex kDefaultDenseCap = FlatIndex{1} << 24;

class EnsembleShape {
public:
    EnsembleShape(int sites, int levels);

    int sites() const noexcept { return sites_; }
    int levels() const noexcept { return levels_; }
    /// d^N.
    FlatIndex dimension() const noexcept { return dimension_; }

    friend bool operator==(const EnsembleShape&, const EnsembleShape&) = default;

private:
    int sites_;
    int levels_;
    FlatIndex dimension_;
};

/// Multi-index i_1 ... i_N of a product energy eigenstate.
class BasisLabel {
public:
    BasisLabel() = default;
    explicit BasisLabel(std::vector<int> digits) : digits_(std::move(digits)) {}

    /// Parses a digit string such as "0222" (one character per site, base
    /// up to 36). Throws ValidationError on characters outside [0, levels).
    static BasisLabel parse(std::string_view text, int levels);

    std::size_t size() const noexcept { return digits_.size(); }
    int operator[](std::size_t site) const { return digits_[site]; }
    const std::vector<int>& digits() const noexcept { return digits_; }

    BasisLabel with_digit(std::size_t site, int digit) const;
    std::string to_string() const;

    friend bool operator==(const BasisLabel&, const BasisLabel&) = default;

private:
    std::vector<int> digits_;
};

FlatIndex flat_of_label(const EnsembleShape& shape, const BasisLabel& label);
BasisLabel label_of_flat(const EnsembleShape& shape, FlatIndex index);

/// Sites (0-based, ascending) where the two labels disagree.
std::vector<int> differing_sites(const BasisLabel& alpha, const BasisLabel& beta);

/// Single-system Hamiltonian H = sum_k eps_k |k><k| with eps sorted.
class QuditHamiltonian {
public:
    explicit QuditHamiltonian(std::vector<double> levels);

    int dimension() const noexcept { return static_cast<int>(levels_.size()); }
    double level(int k) const { return levels_[static_cast<std::size_t>(k)]; }
    const std::vector<double>& levels() const noexcept { return levels_; }

    /// Energy of a product eigenstate under the non-interacting ensemble
    /// Hamiltonian: sum over sites of eps_{i_k}.
    double energy_of_label(const BasisLabel& label) const;

    /// Total energies of every flat index of `shape`, in flat order.
    std::vector<double> label_energies(const EnsembleShape& shape) const;

private:
    std::vector<double> levels_;
};

enum class Normalization { kReject, kRenormalize };

/// Checks a single-system spectrum: finite, non-negative, sums to one.
void validate_spectrum(std::span<const double> spectrum, std::string_view what = "spectrum");

/// Diagonal ensemble state Omega = diag(P_1, ..., P_{d^N}).
class DiagonalState {
public:
    DiagonalState(EnsembleShape shape, std::vector<double> populations,
                  Normalization normalization = Normalization::kReject,
                  FlatIndex dense_cap = kDefaultDenseCap);

    const EnsembleShape& shape() const noexcept { return shape_; }
    FlatIndex size() const noexcept { return shape_.dimension(); }
    double population(FlatIndex index) const { return populations_[index]; }
    double population(const BasisLabel& label) const
    {
        return populations_[flat_of_label(shape_, label)];
    }
    std::span<const double> populations() const noexcept { return populations_; }

    friend DiagonalState apply_swap(const DiagonalState&, FlatIndex, FlatIndex);
    friend DiagonalState apply_permutation(const DiagonalState&, std::span<const FlatIndex>);

private:
    struct Trusted {};
    DiagonalState(Trusted, EnsembleShape shape, std::vector<double> populations)
        : shape_(shape), populations_(std::move(populations))
    {
    }

    EnsembleShape shape_;
    std::vector<double> populations_;
};

/// sigma_p^{(x)N}: P_label = prod_k p_{i_k}.
DiagonalState product_state(std::span<const double> spectrum, int sites,
                            FlatIndex dense_cap = kDefaultDenseCap);

/// Ensemble state during a two-level step: the pre-step diagonal state with
/// the (alpha, beta) block replaced by a 2x2 positive block.
class CoherentPairState {
public:
    CoherentPairState(DiagonalState base, BasisLabel alpha, BasisLabel beta, double pop_alpha,
                      double pop_beta, std::complex<double> coherence);

    const DiagonalState& base() const noexcept { return base_; }
    const EnsembleShape& shape() const noexcept { return base_.shape(); }
    const BasisLabel& alpha() const noexcept { return alpha_; }
    const BasisLabel& beta() const noexcept { return beta_; }
    FlatIndex alpha_index() const noexcept { return alpha_index_; }
    FlatIndex beta_index() const noexcept { return beta_index_; }
    double pop_alpha() const noexcept { return pop_alpha_; }
    double pop_beta() const noexcept { return pop_beta_; }
    /// <alpha| rho |beta>.
    std::complex<double> coherence() const noexcept { return coherence_; }

    /// Instantaneous diagonal entry.
    double population(FlatIndex index) const;
    double population(const BasisLabel& label) const
    {
        return population(flat_of_label(shape(), label));
    }
    std::complex<double> entry(FlatIndex row, FlatIndex col) const;

private:
    DiagonalState base_;
    BasisLabel alpha_;
    BasisLabel beta_;
    FlatIndex alpha_index_;
    FlatIndex beta_index_;
    double pop_alpha_;
    double pop_beta_;
    std::complex<double> coherence_;
};

/// Compensated (Neumaier) sum.
double stable_sum(std::span<const double> values);

} // namespace ergoflow
