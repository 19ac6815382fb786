#include "doctest.h"

#include "oracles.hpp"

#include "ergoflow/entanglement.hpp"
#include "ergoflow/errors.hpp"
#include "ergoflow/protocol.hpp"
#include "ergoflow/work.hpp"

#include <numbers>

using namespace ergoflow;

namespace {

std::vector<double> flip_terms_oracle(const CoherentPairState& snapshot)
{
    // Walk every subset of D that excludes D's last site, flip digits by hand.
    const auto& a = snapshot.alpha().digits();
    const auto& b = snapshot.beta().digits();
    std::vector<int> d;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] != b[k]) {
            d.push_back(static_cast<int>(k));
        }
    }
    std::vector<double> terms;
    for (std::uint32_t mask = 1; mask < (1U << (d.size() - 1)); ++mask) {
        auto fa = a;
        auto fb = b;
        for (std::size_t i = 0; i + 1 < d.size(); ++i) {
            if ((mask >> i) & 1U) {
                std::swap(fa[static_cast<std::size_t>(d[i])], fb[static_cast<std::size_t>(d[i])]);
            }
        }
        terms.push_back(std::sqrt(snapshot.population(BasisLabel(fa)) * snapshot.population(BasisLabel(fb))));
    }
    return terms;
}

} // namespace

TEST_CASE("bipartitions")
{
    const BipartitionSet cuts({1, 3, 4});
    CHECK(cuts.size() == 3);
    CHECK(cuts.cuts()[0].part == std::vector<int>{1});
    CHECK(cuts.cuts()[0].complement == std::vector<int>{3, 4});
    CHECK(cuts.cuts()[2].part == std::vector<int>{1, 3});
    CHECK(BipartitionSet({0, 1, 2, 3}).size() == 7);
    CHECK(BipartitionSet({2}).size() == 0);
}

TEST_CASE("boundary indices")
{
    CHECK(boundary_index(4, 4) == 1);
    CHECK(boundary_index(4, 3) == 5);
    CHECK(boundary_index(4, 2) == 7);
    CHECK(boundary_index(2, 2) == 1);
    CHECK_THROWS_AS(boundary_index(4, 1), ValidationError);
}

TEST_CASE("flip states")
{
    // (1,1,1),(1,2,2) 1-based; gamma = {2} 1-based is site 1.
    const BasisLabel a({0, 0, 0}), b({0, 1, 1});
    const std::vector<int> part{1};
    const auto [fa, fb] = flip_states(a, b, part);
    CHECK(fa == BasisLabel({0, 1, 0}));
    CHECK(fb == BasisLabel({0, 0, 1}));
    const std::vector<int> other{2};
    const auto [ga, gb] = flip_states(a, b, other);
    CHECK(ga == fb);
    CHECK(gb == fa);
    const std::vector<int> outside{0};
    const std::vector<int> everything{1, 2};
    CHECK_THROWS_AS(flip_states(a, b, outside), ValidationError);
    CHECK_THROWS_AS(flip_states(a, b, everything), ValidationError);

    // Product states: P_{alpha_a} P_{beta_a} = P_alpha P_beta.
    const std::vector<double> p{0.5, 0.3, 0.2};
    const auto state = product_state(p, 4);
    const BasisLabel x({1, 1, 1, 1}), y({0, 2, 2, 2});
    const BipartitionSet cuts({0, 1, 2, 3});
    for (const auto& cut : cuts.cuts()) {
        const auto [xa, ya] = flip_states(x, y, cut.part);
        CHECK(state.population(xa) * state.population(ya) ==
              doctest::Approx(state.population(x) * state.population(y)).epsilon(1e-14));
    }
}

TEST_CASE("lambda_at against subset enumeration")
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        const int levels = 2 + trial % 2;
        const int sites = 2 + trial % 3;
        const EnsembleShape shape(sites, levels);
        const DiagonalState state(shape, oracle::random_distribution(rng, shape.dimension()));
        std::uniform_int_distribution<int> digit(0, levels - 1);
        std::vector<int> da(static_cast<std::size_t>(sites)), db(static_cast<std::size_t>(sites));
        for (int k = 0; k < sites; ++k) {
            da[static_cast<std::size_t>(k)] = digit(rng);
            db[static_cast<std::size_t>(k)] = digit(rng);
        }
        if (differing_sites(BasisLabel(da), BasisLabel(db)).size() < 2) {
            continue;
        }
        const TranspositionStep step{BasisLabel(da), BasisLabel(db), Schedule()};
        const auto snapshot = evolve_step(state, step, std::uniform_real_distribution<double>(0, 1)(rng));
        const auto lambda = lambda_at(snapshot);
        const auto terms = flip_terms_oracle(snapshot);
        REQUIRE(lambda.size() == terms.size());
        for (std::size_t k = 1; k <= lambda.size(); ++k) {
            CHECK(lambda.at(k) == doctest::Approx(oracle::lambda_by_subsets(std::abs(snapshot.coherence()), terms,
                                                                            static_cast<int>(k)))
                                      .epsilon(1e-12));
            if (k > 1) {
                CHECK(lambda.at(k) <= lambda.at(k - 1));
            }
            CHECK(lambda.at(k) <= std::abs(state.population(step.alpha) - state.population(step.beta)) + 1e-15);
        }
    }
}

TEST_CASE("lambda examples")
{
    // p = (0.9, 0.1), N = 2, pair (0,0),(1,1) at s = 1/2: 0.62.
    const std::vector<double> p{0.9, 0.1};
    const auto state = product_state(p, 2);
    const TranspositionStep step{BasisLabel({0, 0}), BasisLabel({1, 1}), Schedule()};
    const auto mid = lambda_at(evolve_step(state, step, 0.5));
    REQUIRE(mid.size() == 1);
    CHECK(mid.first() == doctest::Approx(0.62).epsilon(1e-14));
    CHECK(lambda_peak(state, step.alpha, step.beta).first() == doctest::Approx(0.62).epsilon(1e-14));
    CHECK(lambda_at(evolve_step(state, step, 0.0)).first() <= 0.0);

    // Pair 1111/0222: Lambda_k = |p1^4 - p0 p2^3| - 2k sqrt(p0 p1^4 p2^3).
    const std::vector<double> q{0.4, 0.35, 0.25};
    const auto fig = product_state(q, 4);
    const auto peak = lambda_peak(fig, BasisLabel({1, 1, 1, 1}), BasisLabel({0, 2, 2, 2}));
    REQUIRE(peak.size() == 7);
    const double pa = std::pow(0.35, 4);
    const double pb = 0.4 * std::pow(0.25, 3);
    for (std::size_t k = 1; k <= 7; ++k) {
        CHECK(peak.at(k) == doctest::Approx(std::abs(pa - pb) - 2.0 * k * std::sqrt(pa * pb)).epsilon(1e-12));
    }

    const DiagonalState equal(EnsembleShape(2, 2), {0.25, 0.25, 0.25, 0.25});
    CHECK(lambda_peak(equal, BasisLabel({0, 0}), BasisLabel({1, 1})).first() <= 0.0);
    CHECK(lambda_at(evolve_step(state, TranspositionStep{BasisLabel({0, 0}), BasisLabel({0, 1}), Schedule()}, 0.5))
              .empty());
}

TEST_CASE("lambda_at peaks at the maximal mixing point")
{
    std::mt19937_64 rng(2);
    const EnsembleShape shape(3, 3);
    const DiagonalState state(shape, oracle::random_distribution(rng, shape.dimension()));
    const BasisLabel a({0, 1, 2}), b({2, 0, 1});
    for (const auto& schedule : {Schedule::linear(), Schedule::smoothstep()}) {
        const TranspositionStep step{a, b, schedule};
        const auto peak = lambda_peak(state, a, b);
        std::vector<double> best(peak.size(), -std::numeric_limits<double>::infinity());
        for (int j = 0; j <= 1000; ++j) {
            const auto lambda = lambda_at(evolve_step(state, step, j / 1000.0));
            for (std::size_t k = 0; k < best.size(); ++k) {
                best[k] = std::max(best[k], lambda.entries[k]);
            }
        }
        const auto at_half = lambda_at(evolve_step(state, step, 0.5));
        for (std::size_t k = 0; k < best.size(); ++k) {
            CHECK(best[k] == doctest::Approx(peak.entries[k]).epsilon(1e-9));
            CHECK(std::abs(at_half.entries[k] - peak.entries[k]) <= 1e-12);
        }
    }
}

TEST_CASE("classification")
{
    CHECK(classify(LambdaVector{4, {-1, -1, -1, -1, -1, -1, -1}}).label() == "SEP");
    const auto l4 = classify(LambdaVector{4, {0.5, 0.4, 0.3, 0.2, -0.1, -0.2, -0.3}});
    CHECK(l4.entangled);
    CHECK_FALSE(l4.gme);
    CHECK(l4.excluded_levels[4]);
    CHECK_FALSE(l4.excluded_levels[3]);
    CHECK(l4.separability_upper_bound == 3);
    CHECK(l4.strongest_excluded_level == 4);
    CHECK(l4.label() == "L3");
    const auto l2 = classify(LambdaVector{4, {0.5, 0.4, 0.3, 0.2, 0.1, 0.0, -0.3}});
    CHECK(l2.label() == "L2");
    CHECK(l2.strongest_excluded_level == 3);
    const auto gme = classify(LambdaVector{4, {0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1}});
    CHECK(gme.gme);
    CHECK(gme.label() == "GME");
    CHECK(gme.separability_upper_bound == 1);
    const auto pair = classify(LambdaVector{2, {0.1}});
    CHECK(pair.entangled);
    CHECK(pair.gme);
    CHECK_THROWS_AS(classify(LambdaVector{4, {0.1, 0.0}}), ValidationError);
}

TEST_CASE("threshold ratios")
{
    CHECK(threshold_ratio_exact(1) == doctest::Approx(3.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-15));
    CHECK(threshold_ratio_exact(2) == doctest::Approx(9.0 + 4.0 * std::sqrt(5.0)).epsilon(1e-15));
    CHECK(threshold_ratio_gamma(1) == doctest::Approx(3.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-15));
    CHECK(threshold_ratio_gamma(7) == doctest::Approx(15.0 + 2.0 * std::sqrt(56.0)).epsilon(1e-15));
    CHECK(threshold_ratio_gamma(3) < threshold_ratio_exact(3));
    // Sign change of x - 1 - 2k sqrt(x) at the exact ratio, by bisection.
    for (int k = 1; k <= 7; ++k) {
        double lo = 1.0, hi = 1e6;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (mid - 1.0 - 2.0 * k * std::sqrt(mid) > 0.0 ? hi : lo) = mid;
        }
        CHECK(threshold_ratio_exact(k) == doctest::Approx(lo).epsilon(1e-12));
    }
}

TEST_CASE("pure-state entropy vectors")
{
    const EnsembleShape qubits(3, 2);
    std::vector<std::complex<double>> product(8, 0.0);
    product[3] = 1.0;
    for (double e : entropy_vector_pure(product, qubits)) {
        CHECK(e == doctest::Approx(0.0).epsilon(1e-15));
    }

    std::vector<std::complex<double>> ghz(8, 0.0);
    ghz[0] = ghz[7] = 1.0 / std::sqrt(2.0);
    for (double e : entropy_vector_pure(ghz, qubits)) {
        CHECK(e == doctest::Approx(1.0).epsilon(1e-14));
    }

    // Bell pair on sites 0,1 with site 2 in |0>.
    std::vector<std::complex<double>> bell(8, 0.0);
    bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
    const auto entries = entropy_vector_pure(bell, qubits);
    CHECK(std::count_if(entries.begin(), entries.end(), [](double e) { return std::abs(e) < 1e-7; }) == 1);

    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss;
    for (auto [sites, levels] : {std::pair{3, 2}, {3, 3}, {4, 2}}) {
        const EnsembleShape shape(sites, levels);
        std::vector<std::complex<double>> psi(shape.dimension());
        double norm = 0.0;
        for (auto& x : psi) {
            x = {gauss(rng), gauss(rng)};
            norm += std::norm(x);
        }
        for (auto& x : psi) {
            x /= std::sqrt(norm);
        }
        const auto got = entropy_vector_pure(psi, shape);
        const auto want = oracle::entropy_vector(psi, sites, levels);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
        }
    }
    std::vector<std::complex<double>> unnormalised(8, 0.5);
    CHECK_THROWS_AS(entropy_vector_pure(unnormalised, qubits), ValidationError);
}

TEST_CASE("partial transpose")
{
    std::mt19937_64 rng(13);
    const EnsembleShape shape(3, 3);
    const DiagonalState state(shape, oracle::random_distribution(rng, shape.dimension()));
    const TranspositionStep step{BasisLabel({0, 1, 2}), BasisLabel({1, 0, 2}), Schedule()};
    const auto snapshot = evolve_step(state, step, 0.4);
    const auto rho = dense_density_matrix(snapshot);
    for (std::uint32_t mask = 1; mask < 4; ++mask) {
        std::vector<int> sites;
        for (int k = 0; k < 3; ++k) {
            if ((mask >> k) & 1U) {
                sites.push_back(k);
            }
        }
        CHECK(ppt_min_eigenvalue(rho, shape, sites) ==
              doctest::Approx(oracle::partial_transpose_min_eigenvalue(rho, 3, 3, mask)).epsilon(1e-12));
    }
    const auto diagonal = dense_density_matrix(evolve_step(state, step, 0.0));
    const std::vector<int> first{0};
    CHECK(ppt_min_eigenvalue(diagonal, shape, first) >= 0.0);

    // Strong coherence against empty flip labels: NPT across the splitting cut.
    std::vector<double> pops(shape.dimension(), 0.0);
    pops[flat_of_label(shape, step.alpha)] = 0.6;
    pops[flat_of_label(shape, step.beta)] = 0.4;
    const auto strong = dense_density_matrix(evolve_step(DiagonalState(shape, pops), step, 0.5));
    CHECK(ppt_min_eigenvalue(strong, shape, first) < 0.0);
    CHECK_THROWS_AS(dense_density_matrix(evolve_step(product_state(std::vector<double>{0.5, 0.5}, 11),
                                                     TranspositionStep{BasisLabel(std::vector<int>(11, 0)),
                                                                       BasisLabel(std::vector<int>(11, 1)),
                                                                       Schedule()},
                                                     0.5)),
                    CapExceededError);
}
