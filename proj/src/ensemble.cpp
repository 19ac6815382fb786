#include "ergoflow/ensemble.hpp"

#include "ergoflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ergoflow {

namespace {

constexpr FlatIndex kMaxRepresentable = FlatIndex{1} << 62;

} // namespace

double stable_sum(std::span<const double> values)
{
    double sum = 0.0;
    double compensation = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    return sum + compensation;
}

EnsembleShape::EnsembleShape(int sites, int levels) : sites_(sites), levels_(levels), dimension_(1)
{
    if (sites < 1) {
        throw ValidationError("ensemble needs at least one system, got N=" + std::to_string(sites));
    }
    if (levels < 2) {
        throw ValidationError("systems need at least two levels, got d=" + std::to_string(levels));
    }
    for (int k = 0; k < sites; ++k) {
        if (dimension_ > kMaxRepresentable / static_cast<FlatIndex>(levels)) {
            throw CapExceededError("d^N is not representable as a flat index");
        }
        dimension_ *= static_cast<FlatIndex>(levels);
    }
}

BasisLabel BasisLabel::parse(std::string_view text, int levels)
{
    std::vector<int> digits;
    digits.reserve(text.size());
    for (char c : text) {
        int v = -1;
        if (c >= '0' && c <= '9') {
            v = c - '0';
        } else if (c >= 'a' && c <= 'z') {
            v = 10 + (c - 'a');
        } else if (c >= 'A' && c <= 'Z') {
            v = 10 + (c - 'A');
        }
        if (v < 0 || v >= levels) {
            throw ValidationError("digit '" + std::string(1, c) + "' in label \"" + std::string(text) +
                                  "\" is outside [0, " + std::to_string(levels) + ")");
        }
        digits.push_back(v);
    }
    if (digits.empty()) {
        throw ValidationError("empty basis label");
    }
    return BasisLabel(std::move(digits));
}

BasisLabel BasisLabel::with_digit(std::size_t site, int digit) const
{
    auto digits = digits_;
    digits.at(site) = digit;
    return BasisLabel(std::move(digits));
}

std::string BasisLabel::to_string() const
{
    static constexpr char kAlphabet[] = "0123456789abcdefghijklmnopqrstuvwxyz";
    std::string out;
    out.reserve(digits_.size());
    for (int d : digits_) {
        out.push_back(d >= 0 && d < 36 ? kAlphabet[d] : '?');
    }
    return out;
}

FlatIndex flat_of_label(const EnsembleShape& shape, const BasisLabel& label)
{
    if (label.size() != static_cast<std::size_t>(shape.sites())) {
        throw ValidationError("label \"" + label.to_string() + "\" has " + std::to_string(label.size()) +
                              " sites, ensemble has " + std::to_string(shape.sites()));
    }
    FlatIndex index = 0;
    FlatIndex stride = 1;
    for (std::size_t k = 0; k < label.size(); ++k) {
        const int digit = label[k];
        if (digit < 0 || digit >= shape.levels()) {
            throw ValidationError("digit " + std::to_string(digit) + " at site " + std::to_string(k) +
                                  " is outside [0, " + std::to_string(shape.levels()) + ")");
        }
        index += static_cast<FlatIndex>(digit) * stride;
        stride *= static_cast<FlatIndex>(shape.levels());
    }
    return index;
}

BasisLabel label_of_flat(const EnsembleShape& shape, FlatIndex index)
{
    if (index >= shape.dimension()) {
        throw ValidationError("flat index " + std::to_string(index) + " out of range");
    }
    std::vector<int> digits(static_cast<std::size_t>(shape.sites()));
    const auto d = static_cast<FlatIndex>(shape.levels());
    for (auto& digit : digits) {
        digit = static_cast<int>(index % d);
        index /= d;
    }
    return BasisLabel(std::move(digits));
}

std::vector<int> differing_sites(const BasisLabel& alpha, const BasisLabel& beta)
{
    if (alpha.size() != beta.size()) {
        throw ValidationError("labels \"" + alpha.to_string() + "\" and \"" + beta.to_string() +
                              "\" have different lengths");
    }
    std::vector<int> sites;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        if (alpha[k] != beta[k]) {
            sites.push_back(static_cast<int>(k));
        }
    }
    return sites;
}

QuditHamiltonian::QuditHamiltonian(std::vector<double> levels) : levels_(std::move(levels))
{
    if (levels_.size() < 2) {
        throw ValidationError("a Hamiltonian needs d >= 2 levels");
    }
    for (std::size_t k = 0; k < levels_.size(); ++k) {
        if (!std::isfinite(levels_[k])) {
            throw ValidationError("non-finite level energy");
        }
        if (k > 0 && levels_[k] < levels_[k - 1]) {
            throw ValidationError("level energies must be sorted non-decreasing");
        }
    }
}

double QuditHamiltonian::energy_of_label(const BasisLabel& label) const
{
    double energy = 0.0;
    for (int digit : label.digits()) {
        if (digit < 0 || digit >= dimension()) {
            throw ValidationError("label digit outside the Hamiltonian's levels");
        }
        energy += levels_[static_cast<std::size_t>(digit)];
    }
    return energy;
}

std::vector<double> QuditHamiltonian::label_energies(const EnsembleShape& shape) const
{
    if (shape.levels() != dimension()) {
        throw ValidationError("Hamiltonian has " + std::to_string(dimension()) +
                              " levels, ensemble has d=" + std::to_string(shape.levels()));
    }
    // Energies are accumulated site by site in the same order as
    // energy_of_label so both routes agree bit for bit.
    std::vector<double> energies(shape.dimension());
    std::vector<int> digits(static_cast<std::size_t>(shape.sites()), 0);
    for (FlatIndex index = 0; index < shape.dimension(); ++index) {
        double energy = 0.0;
        for (int digit : digits) {
            energy += levels_[static_cast<std::size_t>(digit)];
        }
        energies[index] = energy;
        for (auto& digit : digits) {
            if (++digit < shape.levels()) {
                break;
            }
            digit = 0;
        }
    }
    return energies;
}

void validate_spectrum(std::span<const double> spectrum, std::string_view what)
{
    if (spectrum.empty()) {
        throw ValidationError(std::string(what) + " is empty");
    }
    for (double p : spectrum) {
        if (!std::isfinite(p) || p < 0.0) {
            throw ValidationError(std::string(what) + " has a negative or non-finite entry");
        }
    }
    const double total = stable_sum(spectrum);
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
        throw ValidationError(std::string(what) + " sums to " + std::to_string(total) + ", not 1");
    }
}

DiagonalState::DiagonalState(EnsembleShape shape, std::vector<double> populations,
                             Normalization normalization, FlatIndex dense_cap)
    : shape_(shape), populations_(std::move(populations))
{
    if (shape_.dimension() > dense_cap) {
        throw CapExceededError("dense state of size " + std::to_string(shape_.dimension()) +
                               " exceeds the cap " + std::to_string(dense_cap));
    }
    if (populations_.size() != shape_.dimension()) {
        throw ValidationError("expected " + std::to_string(shape_.dimension()) + " populations, got " +
                              std::to_string(populations_.size()));
    }
    if (normalization == Normalization::kRenormalize) {
        for (double p : populations_) {
            if (!std::isfinite(p) || p < 0.0) {
                throw ValidationError("populations must be finite and non-negative");
            }
        }
        const double total = stable_sum(populations_);
        if (!(total > 0.0)) {
            throw ValidationError("populations sum to zero; cannot renormalize");
        }
        for (auto& p : populations_) {
            p /= total;
        }
    }
    validate_spectrum(populations_, "populations");
}

DiagonalState product_state(std::span<const double> spectrum, int sites, FlatIndex dense_cap)
{
    validate_spectrum(spectrum);
    const EnsembleShape shape(sites, static_cast<int>(spectrum.size()));
    if (shape.dimension() > dense_cap) {
        throw CapExceededError("product state of size " + std::to_string(shape.dimension()) +
                               " exceeds the dense cap; use type-class routines");
    }
    // Built site by site: after k sites the vector holds the k-site product
    // in little-endian order.
    std::vector<double> populations{1.0};
    populations.reserve(shape.dimension());
    for (int site = 0; site < sites; ++site) {
        std::vector<double> next(populations.size() * spectrum.size());
        for (std::size_t digit = 0; digit < spectrum.size(); ++digit) {
            for (std::size_t i = 0; i < populations.size(); ++i) {
                next[digit * populations.size() + i] = populations[i] * spectrum[digit];
            }
        }
        populations = std::move(next);
    }
    return DiagonalState(shape, std::move(populations), Normalization::kReject, dense_cap);
}

CoherentPairState::CoherentPairState(DiagonalState base, BasisLabel alpha, BasisLabel beta,
                                     double pop_alpha, double pop_beta,
                                     std::complex<double> coherence)
    : base_(std::move(base)),
      alpha_(std::move(alpha)),
      beta_(std::move(beta)),
      alpha_index_(flat_of_label(base_.shape(), alpha_)),
      beta_index_(flat_of_label(base_.shape(), beta_)),
      pop_alpha_(pop_alpha),
      pop_beta_(pop_beta),
      coherence_(coherence)
{
    if (alpha_index_ == beta_index_) {
        throw ValidationError("coherent pair needs two distinct labels");
    }
    if (!(pop_alpha_ >= 0.0) || !(pop_beta_ >= 0.0)) {
        throw ValidationError("pair populations must be non-negative");
    }
    const double before = base_.population(alpha_index_) + base_.population(beta_index_);
    if (std::abs(pop_alpha_ + pop_beta_ - before) > kProbabilityTolerance) {
        throw ValidationError("pair populations do not preserve the pre-step trace");
    }
    if (std::norm(coherence_) > pop_alpha_ * pop_beta_ + 1e-14) {
        throw ValidationError("coherence violates positivity of the 2x2 block");
    }
}

double CoherentPairState::population(FlatIndex index) const
{
    if (index == alpha_index_) {
        return pop_alpha_;
    }
    if (index == beta_index_) {
        return pop_beta_;
    }
    return base_.population(index);
}

std::complex<double> CoherentPairState::entry(FlatIndex row, FlatIndex col) const
{
    if (row == col) {
        return population(row);
    }
    if (row == alpha_index_ && col == beta_index_) {
        return coherence_;
    }
    if (row == beta_index_ && col == alpha_index_) {
        return std::conj(coherence_);
    }
    return 0.0;
}

} // namespace ergoflow
