#include "bellbank/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bellbank/majorize.hpp"

namespace bellbank {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4;

void check_theta(double theta) {
    if (!(theta > 0.0 && theta <= kQuarterPi + 1e-12))
        throw std::domain_error("link angle must lie in (0, pi/4]");
}

void check_w_params(double alpha, double beta, double gamma) {
    if (!(alpha > 0.0 && beta > 0.0 && gamma > 0.0))
        throw std::domain_error("W coefficients must be strictly positive");
    if (std::abs(alpha * alpha + beta * beta + gamma * gamma - 1.0) > kNormTol)
        throw std::domain_error("W coefficients are not normalized");
}

}  // namespace

double binary_entropy(double p) {
    if (p < -1e-12 || p > 1.0 + 1e-12) throw std::domain_error("probability outside [0, 1]");
    p = std::clamp(p, 0.0, 1.0);
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

FeasibilityResult ghz_feasible(double theta, double alpha) {
    check_theta(theta);
    // The GHZ family takes alpha >= beta, i.e. alpha^2 >= 1/2; below that the
    // closed form would not describe the actual largest Schmidt coefficient.
    if (!(alpha < 1.0 && alpha * alpha >= 0.5 - kFeasibilitySlack))
        throw std::domain_error("GHZ coefficient must satisfy 1/2 <= alpha^2 < 1");
    const double c = std::cos(theta);
    const double bound = 1.0 / (2.0 * c * c);
    const double binding = alpha * alpha;
    const double margin = bound - binding;
    return {margin >= -kFeasibilitySlack, binding, bound, margin,
            "alpha^2 <= 1/(2 cos^2 theta)"};
}

double ghz_pmax(double theta, double alpha) {
    check_theta(theta);
    if (!(alpha <= 1.0 && alpha * alpha >= 0.5 - kFeasibilitySlack))
        throw std::domain_error("GHZ coefficient must satisfy 1/2 <= alpha^2 <= 1");
    const double c = std::cos(theta);
    return bell_pmax(alpha * alpha * c * c);
}

FeasibilityResult w_meas_feasible(double theta, double alpha, double beta, double gamma) {
    check_theta(theta);
    check_w_params(alpha, beta, gamma);
    const double t2 = std::tan(theta) * std::tan(theta);
    const double bound = 1.0 - t2 * t2;
    const double binding = 4.0 * beta * beta * gamma * gamma;
    const double margin = binding - bound;
    return {margin >= -kFeasibilitySlack, binding, bound, margin,
            "4 beta^2 gamma^2 >= 1 - tan^4 theta"};
}

double w_meas_pmax(double theta, double beta, double gamma) {
    check_theta(theta);
    const double prod = 4.0 * beta * beta * gamma * gamma;
    if (prod > 1.0 + 1e-12) throw std::domain_error("4 beta^2 gamma^2 exceeds 1");
    const double delta = std::sqrt(std::max(0.0, 1.0 - prod));
    const double c2 = std::cos(theta) * std::cos(theta);
    return std::clamp(std::min(1.0, 2.0 - c2 * (1.0 + delta)), 0.0, 1.0);
}

FeasibilityResult w_trans_feasible(double theta, double beta) {
    check_theta(theta);
    if (!(beta > 0.0 && beta < 1.0))
        throw std::domain_error("W coefficient beta must lie in (0, 1)");
    const double t2 = std::tan(theta) * std::tan(theta);
    const double lo = (1.0 - t2) / 2.0;
    const double hi = (1.0 + t2) / 2.0;
    const double b2 = beta * beta;
    const double margin = std::min(b2 - lo, hi - b2);
    return {margin >= -kFeasibilitySlack, b2, lo, margin,
            "(1 - tan^2 theta)/2 <= beta^2 <= (1 + tan^2 theta)/2"};
}

double w_trans_pmax(double theta, double beta) {
    check_theta(theta);
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::domain_error("beta outside [0, 1]");
    const double b2 = beta * beta;
    const double c2 = std::cos(theta) * std::cos(theta);
    return bell_pmax(c2 * std::max(b2, 1.0 - b2));
}

SeparationWitness separation_witnesses(double theta) {
    check_theta(theta);
    const double t2 = std::tan(theta) * std::tan(theta);
    SeparationWitness w;
    w.beta2_lo = (1.0 - t2) / 2.0;
    w.beta2_hi = (1.0 + t2) / 2.0;
    w.interval_length = w.beta2_hi - w.beta2_lo;
    w.meas_empty_on_slice = t2 * t2 < 0.5 - kFeasibilitySlack;
    return w;
}

FeasibilityResult general_transfer_feasible(const PureState& link,
                                            const PureState& bank_resource) {
    if (!(link.num_qubits() == 2 && link.has_label(reg::A) && link.has_label(reg::B)))
        throw std::invalid_argument("link must live on registers A, B");
    if (!(bank_resource.num_qubits() == 3 && bank_resource.has_label(reg::Ap) &&
          bank_resource.has_label(reg::Bp) && bank_resource.has_label(reg::K)))
        throw std::invalid_argument("bank resource must live on registers A', B', K");

    const PureState joint = tensor(link, bank_resource);
    const double lmax =
        schmidt_lambda_max(joint, {{reg::A, reg::Ap, reg::K}, {reg::B, reg::Bp}});
    const double margin = 0.5 - lmax;
    return {margin >= -kFeasibilitySlack, lmax, 0.5, margin,
            "lambda_max across AA'K|BB' <= 1/2"};
}

double bank_cost(const PureState& bank_resource) {
    if (!(bank_resource.num_qubits() == 3 && bank_resource.has_label(reg::Ap) &&
          bank_resource.has_label(reg::Bp) && bank_resource.has_label(reg::K)))
        throw std::invalid_argument("bank resource must live on registers A', B', K");
    return entanglement_entropy(bank_resource, {{reg::K}, {reg::Ap, reg::Bp}});
}

double min_feasible_bank_cost(ResourceFamily family, BankModel model, double theta,
                              std::size_t samples) {
    check_theta(theta);
    if (samples < 2) throw std::invalid_argument("need at least two samples");
    double best = std::numeric_limits<double>::infinity();

    if (family == ResourceFamily::Ghz) {
        // Within the GHZ family (alpha >= beta) the cost h2(alpha^2) decreases
        // in alpha^2, so the boundary point is included in the grid exactly.
        const double c = std::cos(theta);
        const double cap = std::min(1.0 - 1e-9, 1.0 / (2.0 * c * c));
        for (double a2 : linspace(0.5, cap, samples)) best = std::min(best, binary_entropy(a2));
        return best;
    }

    // W family: the cost is h2(alpha^2); scan alpha^2 with the remaining
    // weight split to maximize feasibility.
    for (double a2 : linspace(1e-9, 1.0 - 1e-9, samples)) {
        const double rest = 1.0 - a2;
        bool ok = false;
        if (model == BankModel::Measures) {
            const double prod = rest * rest;  // best 4 b^2 g^2 at b^2 = g^2 = rest/2
            ok = prod >= 1.0 - std::pow(std::tan(theta), 4.0) - kFeasibilitySlack;
        } else {
            const double b2 = std::min(0.5, rest - 1e-12);  // keep gamma^2 > 0
            ok = b2 > 0.0 && w_trans_feasible(theta, std::sqrt(b2)).feasible;
        }
        if (ok) best = std::min(best, binary_entropy(a2));
    }
    return best;
}

// --- Minimax measurement search ---

namespace {

Vector bloch_direction_state(double polar, double azimuth, bool plus) {
    Vector v(2);
    const double half = polar / 2.0;
    if (plus) {
        v << std::cos(half), std::polar(std::sin(half), azimuth);
    } else {
        v << std::sin(half), -std::polar(std::cos(half), azimuth);
    }
    return v;
}

// One golden-section pass on [lo, hi]; assumes local unimodality near the
// grid minimum and tolerates flat directions.
double golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                       double& best_x) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 80 && (b - a) > 1e-10; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    best_x = (fc < fd) ? c : d;
    return std::min(fc, fd);
}

}  // namespace

double mu_branch_sup(const PureState& link, const PureState& bank_resource, double polar,
                     double azimuth) {
    const PureState joint = tensor(link, bank_resource);
    const Bipartition cut{{reg::A, reg::Ap}, {reg::B, reg::Bp}};
    double sup = 0.0;
    for (bool plus : {true, false}) {
        const auto [p, branch] =
            project_qubit(joint, reg::K, bloch_direction_state(polar, azimuth, plus));
        if (p <= kBranchCutoff) continue;
        sup = std::max(sup, schmidt_lambda_max(branch, cut));
    }
    return sup;
}

MinimaxResult minimax_mu_star(const PureState& link, const PureState& bank_resource,
                              const MuStarConfig& config) {
    if (!bank_resource.has_label(reg::K))
        throw std::invalid_argument("bank resource must hold the qubit K");
    if (config.polar_samples < 2 || config.azimuth_samples < 1)
        throw std::invalid_argument("measurement grid is too small");

    const auto polars = linspace(0.0, std::numbers::pi, config.polar_samples);
    std::vector<double> azimuths(config.azimuth_samples);
    for (int j = 0; j < config.azimuth_samples; ++j)
        azimuths[j] = 2.0 * std::numbers::pi * j / config.azimuth_samples;

    const std::size_t cells = polars.size() * azimuths.size();
    const std::function<double(std::size_t)> cell = [&](std::size_t idx) {
        const std::size_t i = idx / azimuths.size(), j = idx % azimuths.size();
        return mu_branch_sup(link, bank_resource, polars[i], azimuths[j]);
    };
    const auto values = evaluate_cells(cells, cell, config.mode);

    std::size_t best_idx = 0;
    for (std::size_t i = 1; i < cells; ++i)
        if (values[i] < values[best_idx]) best_idx = i;

    MinimaxResult out;
    out.mu_star_upper = values[best_idx];
    out.polar = polars[best_idx / azimuths.size()];
    out.azimuth = azimuths[best_idx % azimuths.size()];

    if (config.golden_refine) {
        const double dp = std::numbers::pi / (config.polar_samples - 1);
        const double da = 2.0 * std::numbers::pi / config.azimuth_samples;

        double x = out.polar;
        const double vp = golden_minimize(
            [&](double p) { return mu_branch_sup(link, bank_resource, p, out.azimuth); },
            std::max(0.0, out.polar - dp), std::min(std::numbers::pi, out.polar + dp), x);
        if (vp < out.mu_star_upper) {
            out.mu_star_upper = vp;
            out.polar = x;
        }

        const double va = golden_minimize(
            [&](double a) { return mu_branch_sup(link, bank_resource, out.polar, a); },
            out.azimuth - da, out.azimuth + da, x);
        if (va < out.mu_star_upper) {
            out.mu_star_upper = va;
            out.azimuth = x;
        }
    }

    out.feasible = out.mu_star_upper <= 0.5 + 1e-9;
    return out;
}

// --- Phase diagram ---

PhaseDiagramGrid scan_phase_diagram(const PhaseDiagramConfig& config) {
    if (config.theta_samples == 0 || config.beta2_samples == 0)
        throw std::invalid_argument("phase diagram grid is empty");
    if (config.theta_samples * config.beta2_samples > 1000000)
        throw std::length_error("phase diagram grid exceeds 10^6 cells");
    if (!(config.theta_lo > 0.0 && config.theta_hi <= kQuarterPi + 1e-12 &&
          config.theta_lo <= config.theta_hi))
        throw std::domain_error("theta range must lie in (0, pi/4]");
    if (!(config.beta2_lo > 0.0 && config.beta2_hi < 1.0 && config.beta2_lo <= config.beta2_hi))
        throw std::domain_error("beta^2 range must lie in (0, 1)");

    PhaseDiagramGrid grid;
    grid.thetas = linspace(config.theta_lo, config.theta_hi, config.theta_samples);
    grid.beta2s = linspace(config.beta2_lo, config.beta2_hi, config.beta2_samples);

    const std::size_t n = grid.thetas.size() * grid.beta2s.size();
    const std::function<PhaseDiagramCell(std::size_t)> cell = [&](std::size_t idx) {
        const double theta = grid.thetas[idx / grid.beta2s.size()];
        const double b2 = grid.beta2s[idx % grid.beta2s.size()];
        // symmetric slice alpha = gamma
        const double ag = std::sqrt((1.0 - b2) / 2.0);
        const double beta = std::sqrt(b2);
        PhaseDiagramCell c;
        c.theta = theta;
        c.beta2 = b2;
        c.meas_feasible = w_meas_feasible(theta, ag, beta, ag).feasible;
        c.trans_feasible = w_trans_feasible(theta, beta).feasible;
        c.pmax_meas = w_meas_pmax(theta, beta, ag);
        c.pmax_trans = w_trans_pmax(theta, beta);
        return c;
    };
    grid.cells = evaluate_cells(n, cell, config.mode);
    return grid;
}

}  // namespace bellbank
