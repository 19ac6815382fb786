#include "ergoflow/spectra.hpp"

#include "ergoflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ergoflow {

double shannon_entropy(std::span<const double> p)
{
    std::vector<double> terms;
    terms.reserve(p.size());
    for (double x : p) {
        if (x > 0.0) {
            terms.push_back(-x * std::log(x));
        }
    }
    return stable_sum(terms);
}

double relative_entropy(std::span<const double> p, std::span<const double> q)
{
    if (p.size() != q.size()) {
        throw ValidationError("relative entropy of spectra with different lengths");
    }
    std::vector<double> terms;
    terms.reserve(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] == 0.0) {
            continue;
        }
        if (q[k] == 0.0) {
            throw ValidationError("relative entropy: supp(p) is not contained in supp(q)");
        }
        terms.push_back(p[k] * std::log(p[k] / q[k]));
    }
    return stable_sum(terms);
}

std::vector<double> gibbs_spectrum_beta(const QuditHamiltonian& hamiltonian, double beta)
{
    if (!(beta >= 0.0)) {
        throw ValidationError("inverse temperature must be non-negative");
    }
    const auto& levels = hamiltonian.levels();
    std::vector<double> weights(levels.size());
    for (std::size_t k = 0; k < levels.size(); ++k) {
        weights[k] = std::exp(-beta * (levels[k] - levels.front()));
    }
    const double z = stable_sum(weights);
    for (auto& w : weights) {
        w /= z;
    }
    return weights;
}

std::vector<double> gibbs_spectrum(const QuditHamiltonian& hamiltonian, double temperature)
{
    if (!(temperature > 0.0)) {
        throw ValidationError("temperature must be positive");
    }
    return gibbs_spectrum_beta(hamiltonian, 1.0 / temperature);
}

std::vector<int> rounded_composition(std::span<const double> p, int sites)
{
    validate_spectrum(p);
    if (sites < 1) {
        throw ValidationError("composition needs N >= 1");
    }
    std::vector<int> counts(p.size());
    std::vector<double> remainders(p.size());
    int assigned = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double exact = p[k] * sites;
        counts[k] = static_cast<int>(std::floor(exact));
        remainders[k] = exact - counts[k];
        assigned += counts[k];
    }
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
    for (std::size_t i = 0; assigned < sites; ++i) {
        ++counts[order[i % order.size()]];
        ++assigned;
    }
    return counts;
}

BasisLabel representative_label(std::span<const int> composition)
{
    std::vector<int> digits;
    for (std::size_t k = 0; k < composition.size(); ++k) {
        if (composition[k] < 0) {
            throw ValidationError("negative occupation number");
        }
        digits.insert(digits.end(), static_cast<std::size_t>(composition[k]), static_cast<int>(k));
    }
    return BasisLabel(std::move(digits));
}

std::vector<int> composition_of(const BasisLabel& label, int levels)
{
    std::vector<int> counts(static_cast<std::size_t>(levels), 0);
    for (int digit : label.digits()) {
        ++counts.at(static_cast<std::size_t>(digit));
    }
    return counts;
}

double log_type_class_size(std::span<const int> composition)
{
    int total = 0;
    double log_size = 0.0;
    for (int n : composition) {
        total += n;
        log_size -= std::lgamma(n + 1.0);
    }
    return log_size + std::lgamma(total + 1.0);
}

double log_label_probability(std::span<const int> composition, std::span<const double> p)
{
    double value = 0.0;
    for (std::size_t k = 0; k < composition.size(); ++k) {
        if (composition[k] == 0) {
            continue;
        }
        if (p[k] == 0.0) {
            return -std::numeric_limits<double>::infinity();
        }
        value += composition[k] * std::log(p[k]);
    }
    return value;
}

void for_each_composition(int sites, int levels,
                          const std::function<void(std::span<const int>)>& visit)
{
    if (levels < 1 || sites < 0) {
        throw ValidationError("bad composition request");
    }
    std::vector<int> counts(static_cast<std::size_t>(levels), 0);
    // Recursive fill: level k takes every value from the remaining mass
    // down to zero; the last level takes what is left.
    const std::function<void(int, int)> fill = [&](int level, int remaining) {
        if (level == levels - 1) {
            counts[static_cast<std::size_t>(level)] = remaining;
            visit(counts);
            return;
        }
        for (int n = remaining; n >= 0; --n) {
            counts[static_cast<std::size_t>(level)] = n;
            fill(level + 1, remaining - n);
        }
    };
    fill(0, sites);
}

std::vector<FlatIndex> type_class_members(const EnsembleShape& shape,
                                          std::span<const int> composition)
{
    if (composition.size() != static_cast<std::size_t>(shape.levels())) {
        throw ValidationError("composition length does not match d");
    }
    if (std::accumulate(composition.begin(), composition.end(), 0) != shape.sites()) {
        throw ValidationError("composition does not sum to N");
    }
    std::vector<FlatIndex> members;
    std::vector<int> digits(static_cast<std::size_t>(shape.sites()), 0);
    std::vector<int> counts(composition.size(), 0);
    counts[0] = shape.sites();
    for (FlatIndex index = 0; index < shape.dimension(); ++index) {
        if (std::equal(counts.begin(), counts.end(), composition.begin())) {
            members.push_back(index);
        }
        for (auto& digit : digits) {
            --counts[static_cast<std::size_t>(digit)];
            if (++digit < shape.levels()) {
                ++counts[static_cast<std::size_t>(digit)];
                break;
            }
            digit = 0;
            ++counts[0];
        }
    }
    return members;
}

} // namespace ergoflow
