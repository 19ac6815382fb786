#include "doctest.h"

#include "oracles.hpp"

#include "ergoflow/errors.hpp"
#include "ergoflow/spectra.hpp"
#include "ergoflow/work.hpp"

using namespace ergoflow;

TEST_CASE("total energy")
{
    const QuditHamiltonian qubit({0.0, 1.0});
    const DiagonalState uniform(EnsembleShape(2, 2), {0.25, 0.25, 0.25, 0.25});
    CHECK(total_energy(uniform, qubit) == 1.0);
    const std::vector<double> p{0.5, 0.4, 0.1};
    CHECK(total_energy(product_state(p, 1), QuditHamiltonian({0.0, 1.0, 2.0})) == doctest::Approx(0.6));
    CHECK_THROWS_AS(total_energy(uniform, QuditHamiltonian({0.0, 1.0, 2.0})), ValidationError);
}

TEST_CASE("passivity")
{
    const QuditHamiltonian h({0.0, 1.0, 2.0});
    CHECK(is_passive(product_state(gibbs_spectrum(h, 0.8), 3), h));
    const std::vector<double> p{0.5, 0.4, 0.1};
    const auto two = product_state(p, 2);
    CHECK(is_passive(two, h));
    // Tensor powers of a non-Gibbs passive spectrum eventually are not: (1,1,1) outweighs (0,0,2).
    CHECK_FALSE(is_passive(product_state(p, 3), h));
    // (1,3) -> (0,2) carries 0.05 at energy 2; (2,2) -> (1,1) carries 0.16 at energy 2.
    // Same shell: swapping them keeps passivity.
    CHECK(is_passive(apply_swap(two, BasisLabel({0, 2}), BasisLabel({1, 1})), h));
    // Swapping (0,2) [E=2, 0.05] with (1,0) [E=1, 0.2] breaks the order.
    CHECK_FALSE(is_passive(apply_swap(two, BasisLabel({0, 2}), BasisLabel({1, 0})), h));

    // Degenerate levels accept any order inside a shell.
    const QuditHamiltonian degenerate({0.0, 1.0, 1.0});
    const DiagonalState inside(EnsembleShape(1, 3), {0.5, 0.1, 0.4});
    CHECK(is_passive(inside, degenerate));
}

TEST_CASE("optimal permutation examples")
{
    const QuditHamiltonian qubit({0.0, 1.0});
    const DiagonalState state(EnsembleShape(2, 2), {0.1, 0.2, 0.3, 0.4});
    const auto report = optimal_permutation(state, qubit);
    CHECK(report.initial_energy == doctest::Approx(1.3));
    CHECK(report.final_energy == doctest::Approx(0.7));
    CHECK(report.work == doctest::Approx(0.6));
    CHECK(report.work == doctest::Approx(report.initial_energy - report.final_energy).epsilon(1e-12));

    const DiagonalState single(EnsembleShape(1, 2), {0.3, 0.7});
    CHECK(optimal_permutation(single, qubit).work == doctest::Approx(0.4));

    const QuditHamiltonian ladder({0.0, 1.0, 2.0});
    const auto passive = product_state(gibbs_spectrum(ladder, 0.9), 3);
    const auto none = optimal_permutation(passive, ladder);
    CHECK(none.work == 0.0);
    for (FlatIndex i = 0; i < passive.size(); ++i) {
        CHECK(none.final_state.population(i) == passive.population(i));
    }
}

TEST_CASE("optimal permutation matches exhaustive search")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const int levels = trial % 2 == 0 ? 2 : 3;
        const int sites = levels == 2 ? 1 + trial % 3 : 1;
        const EnsembleShape shape(sites, levels);
        std::vector<double> eps(static_cast<std::size_t>(levels));
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        for (auto& e : eps) {
            e = uniform(rng);
        }
        std::sort(eps.begin(), eps.end());
        const QuditHamiltonian h(eps);
        const auto pops = oracle::random_distribution(rng, shape.dimension());
        const DiagonalState state(shape, pops);
        const auto report = optimal_permutation(state, h);
        std::vector<double> energies;
        for (const auto& label : oracle::all_labels(sites, levels)) {
            energies.push_back(oracle::label_energy(label, eps));
        }
        CHECK(report.final_energy == doctest::Approx(oracle::brute_force_min_energy(pops, energies)).epsilon(1e-12));
        CHECK(report.work >= 0.0);
        CHECK(is_passive(report.final_state, h));
        const auto moved = apply_permutation(state, report.permutation);
        for (FlatIndex i = 0; i < state.size(); ++i) {
            CHECK(moved.population(i) == report.final_state.population(i));
        }
        CHECK((report.work == 0.0) == is_passive(state, h));
    }
}

TEST_CASE("swaps")
{
    const QuditHamiltonian h({0.0, 1.0});
    const DiagonalState state(EnsembleShape(2, 2), {0.1, 0.2, 0.3, 0.4});
    const BasisLabel a({0, 0}), b({1, 1});
    const auto once = apply_swap(state, a, b);
    CHECK(once.population(a) == 0.4);
    CHECK(once.population(b) == 0.1);
    const auto twice = apply_swap(once, a, b);
    for (FlatIndex i = 0; i < state.size(); ++i) {
        CHECK(twice.population(i) == state.population(i));
    }
    CHECK(work_of_swap(state, a, b, h) == doctest::Approx(0.6));
    CHECK(total_energy(state, h) - total_energy(once, h) == work_of_swap(state, a, b, h));
    const DiagonalState flat(EnsembleShape(1, 2), {0.5, 0.5});
    CHECK(work_of_swap(flat, BasisLabel({0}), BasisLabel({1}), h) == 0.0);

    // Exchange 1111 <-> 0222: W = (p1^4 - p0 p2^3) eps.
    const double eps = 1.3;
    const QuditHamiltonian fig({0.0, eps, eps});
    const std::vector<double> p{0.5, 0.3, 0.2};
    const auto product = product_state(p, 4);
    const double expected = (std::pow(0.3, 4) - 0.5 * std::pow(0.2, 3)) * eps;
    CHECK(work_of_swap(product, BasisLabel({1, 1, 1, 1}), BasisLabel({0, 2, 2, 2}), fig) ==
          doctest::Approx(expected).epsilon(1e-12));

    const std::vector<FlatIndex> not_bijective{0, 0, 2, 3};
    CHECK_THROWS_AS(apply_permutation(state, not_bijective), ValidationError);
}

TEST_CASE("energy shells")
{
    const std::vector<double> energies{1.0, 0.0, 1.0 + 1e-14, 2.0, 0.0};
    const auto shells = energy_shells(energies);
    REQUIRE(shells.size() == 3);
    CHECK(shells[0] == std::vector<FlatIndex>{1, 4});
    CHECK(shells[1] == std::vector<FlatIndex>{0, 2});
    CHECK(shells[2] == std::vector<FlatIndex>{3});
}
