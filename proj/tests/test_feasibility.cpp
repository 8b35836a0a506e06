#include <doctest.h>

#include <numbers>

#include "bellbank/feasibility.hpp"
#include "bellbank/majorize.hpp"
#include "test_helpers.hpp"

using namespace bellbank;
using testutil::random_state;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("ghz feasibility bound") {
    const auto at_quarter = ghz_feasible(kPi / 4, 0.8);
    CHECK(at_quarter.feasible);
    CHECK_NEAR(at_quarter.bound, 1.0, 1e-12);

    const auto saturating = ghz_feasible(kPi / 6, std::sqrt(2.0 / 3.0));
    CHECK(saturating.feasible);
    CHECK_NEAR(saturating.bound, 2.0 / 3.0, 1e-12);
    CHECK_NEAR(saturating.margin, 0.0, 1e-12);

    const auto violated = ghz_feasible(kPi / 8, std::sqrt(0.9));
    CHECK_FALSE(violated.feasible);
    CHECK_NEAR(violated.bound, 0.585786437627, 1e-11);
    CHECK_NEAR(violated.binding_value, 0.9, 1e-12);

    CHECK_THROWS_AS(ghz_feasible(1.0, 0.8), std::domain_error);
    CHECK_THROWS_AS(ghz_feasible(kPi / 6, std::sqrt(0.3)), std::domain_error);
}

TEST_CASE("ghz success probability formula") {
    CHECK_NEAR(ghz_pmax(kPi / 8, std::sqrt(0.9)), 0.463603896932, 1e-11);

    for (double theta : {0.3, kPi / 8, kPi / 6}) {
        const double boundary = 1.0 / (2.0 * std::cos(theta) * std::cos(theta));
        CHECK_NEAR(ghz_pmax(theta, std::sqrt(boundary)), 1.0, 1e-12);
    }

    // degenerate-Bank limit alpha = 1
    CHECK_NEAR(ghz_pmax(kPi / 8, 1.0), 0.292893218813, 1e-11);
}

TEST_CASE("w bank-measures feasibility") {
    const auto at_quarter = w_meas_feasible(kPi / 4, std::sqrt(0.2), std::sqrt(0.5),
                                            std::sqrt(0.3));
    CHECK(at_quarter.feasible);
    CHECK_NEAR(at_quarter.bound, 0.0, 1e-12);

    // symmetric slice at pi/8: the best binding value 1/2 misses the bound
    const double bound_pi8 = 0.970562748477;  // 1 - tan^4(pi/8)
    for (double b2 : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double ag = std::sqrt((1.0 - b2) / 2.0);
        const auto r = w_meas_feasible(kPi / 8, ag, std::sqrt(b2), ag);
        CHECK_FALSE(r.feasible);
        CHECK_NEAR(r.bound, bound_pi8, 1e-11);
        CHECK(r.binding_value <= 0.5 + 1e-12);
    }

    const auto at_07 = w_meas_feasible(0.7, std::sqrt(0.1), std::sqrt(0.45), std::sqrt(0.45));
    CHECK(at_07.feasible);
    CHECK_NEAR(at_07.binding_value, 0.81, 1e-12);
    CHECK_NEAR(at_07.bound, 0.496681100662, 1e-11);

    CHECK_THROWS_AS(w_meas_feasible(0.5, 0.5, 0.5, 0.5), std::domain_error);
}

TEST_CASE("w bank-measures success probability") {
    // symmetric slice beta^2 = 1/2 at pi/8 (gamma^2 = 1/4)
    CHECK_NEAR(w_meas_pmax(kPi / 8, std::sqrt(0.5), std::sqrt(0.25)), 0.542893218813, 1e-11);

    CHECK_NEAR(w_meas_pmax(kPi / 4, std::sqrt(0.3), std::sqrt(0.4)), 1.0, 1e-12);

    // guarded boundary: 4 b^2 g^2 = 1 gives delta = 0 and the value clips to 1
    CHECK_NEAR(w_meas_pmax(kPi / 8, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)), 1.0, 1e-12);

    // equals 1 exactly on the feasibility region
    for (double theta : {0.6, 0.7, kPi / 4}) {
        for (double b2 : {0.3, 0.45, 0.5, 0.6}) {
            const double g2 = (1.0 - b2) / 2.0;
            const auto f = w_meas_feasible(theta, std::sqrt(1.0 - b2 - g2), std::sqrt(b2),
                                           std::sqrt(g2));
            const double p = w_meas_pmax(theta, std::sqrt(b2), std::sqrt(g2));
            if (f.feasible) {
                CHECK_NEAR(p, 1.0, 1e-12);
            } else {
                CHECK(p < 1.0);
            }
        }
    }
}

TEST_CASE("w transfer feasibility interval") {
    const auto inside = w_trans_feasible(kPi / 8, std::sqrt(0.5));
    CHECK(inside.feasible);

    const auto below = w_trans_feasible(kPi / 8, std::sqrt(0.2));
    CHECK_FALSE(below.feasible);

    const auto sep = separation_witnesses(kPi / 8);
    CHECK_NEAR(sep.beta2_lo, 0.414213562373, 1e-11);
    CHECK_NEAR(sep.beta2_hi, 0.585786437627, 1e-11);
    CHECK_NEAR(sep.interval_length, 0.171572875254, 1e-11);
    CHECK(sep.meas_empty_on_slice);

    // at pi/4 the interval fills (0, 1)
    for (double b2 : {0.01, 0.5, 0.99})
        CHECK(w_trans_feasible(kPi / 4, std::sqrt(b2)).feasible);
    const auto sep_quarter = separation_witnesses(kPi / 4);
    CHECK_FALSE(sep_quarter.meas_empty_on_slice);

    // marginal slice threshold theta* = atan(2^(-1/4))
    const double theta_star = 0.699185164541;
    CHECK_FALSE(separation_witnesses(theta_star + 1e-9).meas_empty_on_slice);
    CHECK(separation_witnesses(theta_star - 1e-3).meas_empty_on_slice);
    // exactly marginal at beta^2 = 1/2: binding 1/2 equals the bound
    const double ag = std::sqrt(0.25);
    const auto marginal = w_meas_feasible(theta_star, ag, std::sqrt(0.5), ag);
    CHECK_NEAR(marginal.binding_value, 0.5, 1e-9);
    CHECK_NEAR(marginal.bound, 0.5, 1e-9);
}

TEST_CASE("w transfer success probability") {
    CHECK_NEAR(w_trans_pmax(kPi / 8, std::sqrt(0.5)), 1.0, 1e-12);
    CHECK_NEAR(w_trans_pmax(kPi / 8, std::sqrt(0.9)), 0.463603896932, 1e-11);
    CHECK_NEAR(w_trans_pmax(kPi / 8, 0.0), 0.292893218813, 1e-11);
}

TEST_CASE("separation interval length equals tan^2 theta") {
    for (int i = 1; i <= 50; ++i) {
        const double theta = i * (kPi / 4) / 50.0;
        const auto sep = separation_witnesses(theta);
        const double t2 = std::tan(theta) * std::tan(theta);
        CHECK_NEAR(sep.interval_length, t2, 1e-10);
    }
}

TEST_CASE("general transfer criterion recovers the family bounds") {
    const double theta = kPi / 6;
    const auto link = make_link_state(theta);

    for (int j = 0; j <= 20; ++j) {
        const double a2 = 0.5 + 0.49 * j / 20.0;
        const bool general = general_transfer_feasible(link, make_ghz(std::sqrt(a2))).feasible;
        CHECK(general == ghz_feasible(theta, std::sqrt(a2)).feasible);
    }

    for (int j = 1; j <= 20; ++j) {
        const double b2 = j / 21.0;
        const double ag = std::sqrt((1.0 - b2) / 2.0);
        const bool general =
            general_transfer_feasible(link, make_w(ag, std::sqrt(b2), ag)).feasible;
        CHECK(general == w_trans_feasible(theta, std::sqrt(b2)).feasible);
    }

    // ideal link: the product spectrum halves every coefficient
    std::mt19937_64 rng(53);
    const auto ideal = make_link_state(kPi / 4);
    for (int trial = 0; trial < 10; ++trial) {
        const auto resource = random_state({reg::Ap, reg::Bp, reg::K}, rng);
        CHECK(general_transfer_feasible(ideal, resource).feasible);
    }

    CHECK_THROWS_AS(general_transfer_feasible(link, make_link_state(0.3)),
                    std::invalid_argument);
}

TEST_CASE("bank cost") {
    CHECK_NEAR(bank_cost(make_ghz(std::sqrt(2.0 / 3.0))), 0.918295834054, 1e-10);

    for (double a2 : {0.5, 0.7, 0.9}) {
        CHECK_NEAR(bank_cost(make_ghz(std::sqrt(a2))), binary_entropy(a2), 1e-12);
    }

    const PureState product({reg::Ap, reg::Bp, reg::K}, std::size_t{0});
    CHECK_NEAR(bank_cost(product), 0.0, 1e-12);

    CHECK_THROWS_AS(bank_cost(make_link_state(0.5)), std::invalid_argument);
}

TEST_CASE("least feasible bank cost within families") {
    // GHZ: minimum sits exactly on the saturated bound
    CHECK_NEAR(min_feasible_bank_cost(ResourceFamily::Ghz, BankModel::Measures, kPi / 6),
               0.918295834054, 1e-10);
    CHECK_NEAR(min_feasible_bank_cost(ResourceFamily::Ghz, BankModel::Transfer, kPi / 8),
               binary_entropy(0.585786437627), 1e-10);

    // W family: nearly-product resources stay feasible, so the infimum is ~0
    CHECK(min_feasible_bank_cost(ResourceFamily::W, BankModel::Measures, kPi / 8) < 1e-6);
    CHECK(min_feasible_bank_cost(ResourceFamily::W, BankModel::Transfer, kPi / 8) < 1e-6);
}

TEST_CASE("minimax search finds the Hadamard measurement for GHZ") {
    const auto link = make_link_state(kPi / 6);
    const double a2 = 2.0 / 3.0;
    const auto ghz = make_ghz(std::sqrt(a2));

    // closed-form consistency at the explicit Hadamard direction
    const double expected = a2 * std::cos(kPi / 6) * std::cos(kPi / 6);
    CHECK_NEAR(mu_branch_sup(link, ghz, kPi / 2, 0.0), expected, 1e-10);

    MuStarConfig config;
    config.mode = ExecMode::Serial;
    const auto result = minimax_mu_star(link, ghz, config);
    CHECK_NEAR(result.mu_star_upper, expected, 1e-6);
    CHECK(result.feasible);
    CHECK_NEAR(result.polar, kPi / 2, 1e-3);

    // infeasible GHZ point still minimizes on the equator
    const auto tight_link = make_link_state(kPi / 8);
    const auto tight = minimax_mu_star(tight_link, make_ghz(std::sqrt(0.7)), config);
    CHECK_NEAR(tight.mu_star_upper, 0.7 * 0.853553390593, 1e-6);
    CHECK_FALSE(tight.feasible);
}

TEST_CASE("minimax search on the W symmetric slice stays above one half") {
    const auto link = make_link_state(kPi / 8);
    const double b2 = 0.5;
    const double ag = std::sqrt((1.0 - b2) / 2.0);
    const auto w = make_w(ag, std::sqrt(b2), ag);

    MuStarConfig config;
    config.mode = ExecMode::Serial;
    const auto result = minimax_mu_star(link, w, config);
    CHECK(result.mu_star_upper > 0.5);
    CHECK_FALSE(result.feasible);

    // Hadamard direction agrees with the closed-form branch lambda_max
    const double delta = std::sqrt(1.0 - 4.0 * b2 * ag * ag);
    const double lam1 = std::cos(kPi / 8) * std::cos(kPi / 8) * (1.0 + delta) / 2.0;
    CHECK_NEAR(mu_branch_sup(link, w, kPi / 2, 0.0), lam1, 1e-10);
}

TEST_CASE("minimax on a product resource returns the bare link value") {
    const double theta = kPi / 6;
    const auto link = make_link_state(theta);
    const PureState product({reg::Ap, reg::Bp, reg::K}, std::size_t{0});

    MuStarConfig config;
    config.polar_samples = 16;
    config.azimuth_samples = 8;
    config.mode = ExecMode::Serial;
    const auto result = minimax_mu_star(link, product, config);
    const double c2 = std::cos(theta) * std::cos(theta);
    CHECK_NEAR(result.mu_star_upper, c2, 1e-9);

    CHECK_THROWS_AS(minimax_mu_star(link, make_link_state(0.4), config),
                    std::invalid_argument);
}

TEST_CASE("formula and simulation agree across the curve grids") {
    const Bipartition cut{{reg::A, reg::Ap, reg::K}, {reg::B, reg::Bp}};
    for (int i = 0; i < 30; ++i) {
        const double theta = 0.05 + (kPi / 4 - 0.05) * i / 29.0;
        const auto link = make_link_state(theta);
        for (int j = 0; j < 30; ++j) {
            const double a2 = 0.5 + 0.49 * j / 29.0;
            const auto joint = tensor(link, make_ghz(std::sqrt(a2)));
            const double simulated = bell_pmax(schmidt_lambda_max(joint, cut));
            CHECK_NEAR(simulated, ghz_pmax(theta, std::sqrt(a2)), 1e-12);
        }
    }

    const double inv = 1.0 / std::sqrt(2.0);
    Vector plus(2);
    plus << inv, inv;
    const Bipartition cut4{{reg::A, reg::Ap}, {reg::B, reg::Bp}};
    for (int i = 0; i < 30; ++i) {
        const double theta = 0.05 + (kPi / 4 - 0.05) * i / 29.0;
        const auto link = make_link_state(theta);
        for (int j = 0; j < 30; ++j) {
            const double b2 = 0.03 + 0.94 * j / 29.0;
            const double ag = std::sqrt((1.0 - b2) / 2.0);

            // bank-measures: the Hadamard branch carries the conditional state
            const auto joint = tensor(link, make_w(ag, std::sqrt(b2), ag));
            const auto [p, branch] = project_qubit(joint, reg::K, plus);
            const double simulated_meas = bell_pmax(schmidt_lambda_max(branch, cut4));
            CHECK_NEAR(simulated_meas, w_meas_pmax(theta, std::sqrt(b2), ag), 1e-12);

            // transfer: plain joint-state spectrum
            const double simulated_trans = bell_pmax(schmidt_lambda_max(joint, cut));
            CHECK_NEAR(simulated_trans, w_trans_pmax(theta, std::sqrt(b2)), 1e-12);
        }
    }
}

TEST_CASE("pmax monotonicity and unimodality") {
    for (double theta : {kPi / 8, kPi / 6, 0.7}) {
        double prev = 2.0;
        for (int j = 0; j <= 40; ++j) {
            const double a2 = 0.5 + 0.5 * j / 41.0;
            const double p = ghz_pmax(theta, std::sqrt(a2));
            CHECK(p <= prev + 1e-12);
            prev = p;
        }

        prev = 0.0;
        for (int j = 1; j <= 20; ++j) {  // rising to beta^2 = 1/2
            const double p = w_trans_pmax(theta, std::sqrt(0.5 * j / 20.0));
            CHECK(p >= prev - 1e-12);
            prev = p;
        }
        for (int j = 1; j <= 20; ++j) {  // falling past the peak
            const double p = w_trans_pmax(theta, std::sqrt(0.5 + 0.5 * j / 21.0));
            CHECK(p <= prev + 1e-12);
            prev = p;
        }
    }
}

TEST_CASE("phase diagram grid") {
    PhaseDiagramConfig config{0.05, kPi / 4, 100, 0.01, 0.99, 100, ExecMode::Serial};
    const auto grid = scan_phase_diagram(config);
    REQUIRE(grid.cells.size() == 10000);

    const double theta_star = 0.699185164541;
    for (std::size_t i = 0; i < grid.thetas.size(); ++i) {
        const double theta = grid.thetas[i];
        bool any_meas = false, any_separation = false;
        for (std::size_t j = 0; j < grid.beta2s.size(); ++j) {
            const auto& cell = grid.at(i, j);

            // independent closed-form recomputation
            const double t2 = std::tan(theta) * std::tan(theta);
            const bool meas_expected =
                2.0 * cell.beta2 * (1.0 - cell.beta2) >= 1.0 - t2 * t2 - 1e-12;
            const bool trans_expected = cell.beta2 >= (1.0 - t2) / 2.0 - 1e-12 &&
                                        cell.beta2 <= (1.0 + t2) / 2.0 + 1e-12;
            CHECK(cell.meas_feasible == meas_expected);
            CHECK(cell.trans_feasible == trans_expected);
            if (cell.meas_feasible) CHECK_NEAR(cell.pmax_meas, 1.0, 1e-12);
            if (cell.trans_feasible) CHECK_NEAR(cell.pmax_trans, 1.0, 1e-12);

            any_meas |= cell.meas_feasible;
            any_separation |= (cell.trans_feasible && !cell.meas_feasible);
        }
        // Bank-measures region on the slice empties exactly below theta*
        CHECK(any_meas == (theta >= theta_star - 1e-9));
        // separation shows up once the grid resolves the transfer interval
        const double spacing = (grid.beta2s.back() - grid.beta2s.front()) /
                               (grid.beta2s.size() - 1);
        const double t2 = std::tan(theta) * std::tan(theta);
        if (theta < theta_star && t2 > 2.0 * spacing) CHECK(any_separation);
    }

    // single cell at pi/4: no separation anywhere
    PhaseDiagramConfig single{kPi / 4, kPi / 4, 1, 0.5, 0.5, 1, ExecMode::Serial};
    const auto one = scan_phase_diagram(single);
    REQUIRE(one.cells.size() == 1);
    CHECK(one.cells[0].meas_feasible);
    const bool lone_separation = one.cells[0].trans_feasible && !one.cells[0].meas_feasible;
    CHECK_FALSE(lone_separation);

    CHECK_THROWS_AS(scan_phase_diagram(PhaseDiagramConfig{0.1, 0.2, 0, 0.1, 0.9, 5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(scan_phase_diagram(PhaseDiagramConfig{0.1, 0.2, 2000, 0.1, 0.9, 2000}),
                    std::length_error);
}
