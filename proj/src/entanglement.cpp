#include "ergoflow/entanglement.hpp"

#include "ergoflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ergoflow {

namespace {

std::pair<BasisLabel, BasisLabel> flip_unchecked(const BasisLabel& alpha, const BasisLabel& beta,
                                                 std::span<const int> part)
{
    auto a = alpha.digits();
    auto b = beta.digits();
    for (int site : part) {
        const auto k = static_cast<std::size_t>(site);
        std::swap(a[k], b[k]);
    }
    return {BasisLabel(std::move(a)), BasisLabel(std::move(b))};
}

// k-th entry uses the k smallest terms; ties keep enumeration order.
LambdaVector lambda_from_terms(int n1, double leading, std::vector<double> terms)
{
    std::stable_sort(terms.begin(), terms.end());
    LambdaVector out;
    out.n1 = n1;
    out.entries.reserve(terms.size());
    double partial = 0.0;
    for (double t : terms) {
        partial += t;
        out.entries.push_back(leading - 2.0 * partial);
    }
    return out;
}

std::vector<double> flip_terms(const CoherentPairState& snapshot, const BipartitionSet& cuts)
{
    std::vector<double> terms;
    terms.reserve(cuts.size());
    for (const auto& cut : cuts.cuts()) {
        const auto [alpha_a, beta_a] = flip_unchecked(snapshot.alpha(), snapshot.beta(), cut.part);
        terms.push_back(std::sqrt(snapshot.population(alpha_a) * snapshot.population(beta_a)));
    }
    return terms;
}

std::vector<int> all_sites(int n)
{
    std::vector<int> sites(static_cast<std::size_t>(n));
    std::iota(sites.begin(), sites.end(), 0);
    return sites;
}

} // namespace

BipartitionSet::BipartitionSet(std::vector<int> sites) : sites_(std::move(sites))
{
    if (sites_.size() >= 31) {
        throw CapExceededError("too many sites to enumerate bipartitions");
    }
    if (sites_.size() < 2) {
        return;
    }
    const std::size_t n = sites_.size();
    const std::uint32_t count = (std::uint32_t{1} << (n - 1)) - 1;
    cuts_.reserve(count);
    for (std::uint32_t mask = 1; mask <= count; ++mask) {
        Bipartition cut;
        for (std::size_t i = 0; i < n; ++i) {
            ((mask >> i) & 1U ? cut.part : cut.complement).push_back(sites_[i]);
        }
        cuts_.push_back(std::move(cut));
    }
}

std::size_t boundary_index(int n1, int l)
{
    if (n1 < 2 || l < 2 || l > n1) {
        throw ValidationError("boundary index needs 2 <= l <= n1");
    }
    return (std::size_t{1} << (n1 - 1)) - (std::size_t{1} << (l - 1)) + 1;
}

std::string SeparabilityReport::label() const
{
    if (!entangled) {
        return "SEP";
    }
    if (gme) {
        return "GME";
    }
    return "L" + std::to_string(separability_upper_bound);
}

std::pair<BasisLabel, BasisLabel> flip_states(const BasisLabel& alpha, const BasisLabel& beta,
                                              std::span<const int> part)
{
    const auto differing = differing_sites(alpha, beta);
    std::size_t inside = 0;
    for (int site : part) {
        if (site < 0 || static_cast<std::size_t>(site) >= alpha.size()) {
            throw ValidationError("bipartition site out of range");
        }
        if (std::find(differing.begin(), differing.end(), site) != differing.end()) {
            ++inside;
        }
    }
    if (inside == 0 || inside == differing.size()) {
        throw ValidationError("bipartition does not split the differing sites");
    }
    return flip_unchecked(alpha, beta, part);
}

LambdaVector lambda_at(const CoherentPairState& snapshot)
{
    const BipartitionSet cuts(differing_sites(snapshot.alpha(), snapshot.beta()));
    const int n1 = static_cast<int>(cuts.sites().size());
    if (cuts.size() == 0) {
        return LambdaVector{n1, {}};
    }
    return lambda_from_terms(n1, 2.0 * std::abs(snapshot.coherence()), flip_terms(snapshot, cuts));
}

LambdaVector lambda_at_all_cuts(const CoherentPairState& snapshot)
{
    const BipartitionSet cuts(all_sites(snapshot.shape().sites()));
    if (cuts.size() == 0) {
        return LambdaVector{snapshot.shape().sites(), {}};
    }
    return lambda_from_terms(snapshot.shape().sites(), 2.0 * std::abs(snapshot.coherence()),
                             flip_terms(snapshot, cuts));
}

LambdaVector lambda_peak(const DiagonalState& pre_state, const BasisLabel& alpha,
                         const BasisLabel& beta)
{
    const BipartitionSet cuts(differing_sites(alpha, beta));
    const int n1 = static_cast<int>(cuts.sites().size());
    if (n1 == 0) {
        throw ValidationError("lambda_peak needs two distinct labels");
    }
    if (cuts.size() == 0) {
        return LambdaVector{n1, {}};
    }
    std::vector<double> terms;
    terms.reserve(cuts.size());
    for (const auto& cut : cuts.cuts()) {
        const auto [alpha_a, beta_a] = flip_unchecked(alpha, beta, cut.part);
        terms.push_back(std::sqrt(pre_state.population(alpha_a) * pre_state.population(beta_a)));
    }
    const double gap = std::abs(pre_state.population(alpha) - pre_state.population(beta));
    return lambda_from_terms(n1, gap, std::move(terms));
}

SeparabilityReport classify(const LambdaVector& lambda)
{
    SeparabilityReport report;
    report.lambda = lambda;
    const int n1 = lambda.n1;
    report.separability_upper_bound = std::max(n1, 1);
    if (lambda.empty()) {
        return report;
    }
    if (lambda.size() != boundary_index(n1, 2)) {
        throw ValidationError("lambda vector length does not match n1");
    }
    report.excluded_levels.assign(static_cast<std::size_t>(n1) + 1, false);
    for (int l = n1; l >= 2; --l) {
        if (lambda.at(boundary_index(n1, l)) > 0.0) {
            report.excluded_levels[static_cast<std::size_t>(l)] = true;
            report.strongest_excluded_level = l;
        }
    }
    report.entangled = lambda.first() > 0.0;
    report.gme = lambda.last() > 0.0;
    if (report.strongest_excluded_level != 0) {
        report.separability_upper_bound = report.strongest_excluded_level - 1;
    }
    return report;
}

double threshold_ratio_exact(double k)
{
    if (!(k >= 1.0)) {
        throw ValidationError("threshold index must be >= 1");
    }
    return 1.0 + 2.0 * k * k + 2.0 * k * std::sqrt(1.0 + k * k);
}

double threshold_ratio_gamma(double gamma)
{
    if (!(gamma >= 1.0)) {
        throw ValidationError("gamma must be >= 1");
    }
    return 1.0 + 2.0 * gamma + 2.0 * std::sqrt(gamma + gamma * gamma);
}

std::vector<double> entropy_vector_pure(std::span<const std::complex<double>> amplitudes,
                                        const EnsembleShape& shape)
{
    if (shape.dimension() > kEntropyVectorCap) {
        throw CapExceededError("entropy vector oracle limited to d^N <= 4096");
    }
    if (amplitudes.size() != shape.dimension()) {
        throw ValidationError("amplitude vector length does not match d^N");
    }
    double norm = 0.0;
    for (const auto& a : amplitudes) {
        norm += std::norm(a);
    }
    if (std::abs(norm - 1.0) > 1e-10) {
        throw ValidationError("amplitudes are not normalised");
    }

    const int n = shape.sites();
    const auto d = static_cast<FlatIndex>(shape.levels());
    const BipartitionSet cuts(all_sites(n));
    std::vector<double> entropies;
    entropies.reserve(cuts.size());
    for (const auto& cut : cuts.cuts()) {
        // Reshape psi into M[kept][traced]; purity = ||M M^dagger||_F^2.
        FlatIndex kept_dim = 1;
        for (std::size_t i = 0; i < cut.part.size(); ++i) {
            kept_dim *= d;
        }
        const FlatIndex traced_dim = shape.dimension() / kept_dim;
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(kept_dim),
                                                    static_cast<Eigen::Index>(traced_dim));
        for (FlatIndex index = 0; index < shape.dimension(); ++index) {
            const auto label = label_of_flat(shape, index);
            FlatIndex row = 0;
            FlatIndex col = 0;
            FlatIndex row_stride = 1;
            FlatIndex col_stride = 1;
            for (int site = 0; site < n; ++site) {
                const auto digit = static_cast<FlatIndex>(label[static_cast<std::size_t>(site)]);
                if (std::find(cut.part.begin(), cut.part.end(), site) != cut.part.end()) {
                    row += digit * row_stride;
                    row_stride *= d;
                } else {
                    col += digit * col_stride;
                    col_stride *= d;
                }
            }
            m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = amplitudes[index];
        }
        const Eigen::MatrixXcd reduced = m * m.adjoint();
        const double purity = reduced.squaredNorm();
        entropies.push_back(std::sqrt(std::max(0.0, 2.0 * (1.0 - purity))));
    }
    std::sort(entropies.begin(), entropies.end(), std::greater<>());
    return entropies;
}

Eigen::MatrixXcd dense_density_matrix(const CoherentPairState& snapshot)
{
    const FlatIndex dim = snapshot.shape().dimension();
    if (dim > kPartialTransposeCap) {
        throw CapExceededError("dense density matrix limited to d^N <= 1024");
    }
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                  static_cast<Eigen::Index>(dim));
    for (FlatIndex i = 0; i < dim; ++i) {
        rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = snapshot.population(i);
    }
    const auto a = static_cast<Eigen::Index>(snapshot.alpha_index());
    const auto b = static_cast<Eigen::Index>(snapshot.beta_index());
    rho(a, b) = snapshot.coherence();
    rho(b, a) = std::conj(snapshot.coherence());
    return rho;
}

double ppt_min_eigenvalue(const Eigen::MatrixXcd& rho, const EnsembleShape& shape,
                          std::span<const int> sites)
{
    const FlatIndex dim = shape.dimension();
    if (dim > kPartialTransposeCap) {
        throw CapExceededError("partial transpose oracle limited to d^N <= 1024");
    }
    if (static_cast<FlatIndex>(rho.rows()) != dim || static_cast<FlatIndex>(rho.cols()) != dim) {
        throw ValidationError("density matrix size does not match d^N");
    }
    for (int site : sites) {
        if (site < 0 || site >= shape.sites()) {
            throw ValidationError("partial transpose site out of range");
        }
    }
    // Split every flat index into the part carried by the transposed sites
    // and the rest; (i, j) -> (j_part + i_rest, i_part + j_rest).
    std::vector<FlatIndex> part_of(dim, 0);
    for (FlatIndex i = 0; i < dim; ++i) {
        const auto label = label_of_flat(shape, i);
        FlatIndex stride = 1;
        for (int site = 0; site < shape.sites(); ++site) {
            if (std::find(sites.begin(), sites.end(), site) != sites.end()) {
                part_of[i] += static_cast<FlatIndex>(label[static_cast<std::size_t>(site)]) * stride;
            }
            stride *= static_cast<FlatIndex>(shape.levels());
        }
    }
    Eigen::MatrixXcd transposed(rho.rows(), rho.cols());
    for (FlatIndex i = 0; i < dim; ++i) {
        for (FlatIndex j = 0; j < dim; ++j) {
            const FlatIndex row = part_of[j] + (i - part_of[i]);
            const FlatIndex col = part_of[i] + (j - part_of[j]);
            transposed(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
                rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(transposed,
                                                                 Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

} // namespace ergoflow
