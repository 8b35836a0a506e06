// Closed-form feasibility predicates and success probabilities for the
// assisted restoration models, the minimax measurement search, phase-diagram
// scanning, and Bank resource-cost quantities.

#pragma once

#include <string>
#include <vector>

#include "bellbank/qstate.hpp"
#include "bellbank/scan.hpp"

namespace bellbank {

struct FeasibilityResult {
    bool feasible;
    double binding_value;  // the evaluated constraint quantity
    double bound;
    double margin;  // >= -1e-12 iff feasible
    std::string constraint;
};

constexpr double kFeasibilitySlack = 1e-12;

double binary_entropy(double p);

// GHZ assistance: alpha^2 <= 1/(2 cos^2 theta), both models.
FeasibilityResult ghz_feasible(double theta, double alpha);
double ghz_pmax(double theta, double alpha);

// W assistance, Bank-measures model: 4 beta^2 gamma^2 >= 1 - tan^4 theta.
FeasibilityResult w_meas_feasible(double theta, double alpha, double beta, double gamma);
double w_meas_pmax(double theta, double beta, double gamma);

// W assistance, transfer model: (1 - tan^2)/2 <= beta^2 <= (1 + tan^2)/2.
FeasibilityResult w_trans_feasible(double theta, double beta);
double w_trans_pmax(double theta, double beta);

// Transfer-only window on the symmetric slice alpha = gamma. The interval has
// length tan^2 theta; the Bank-measures region on the slice is empty exactly
// when tan^4 theta < 1/2.
struct SeparationWitness {
    double beta2_lo;
    double beta2_hi;
    double interval_length;
    bool meas_empty_on_slice;
};
SeparationWitness separation_witnesses(double theta);

// Universal transfer-model criterion: lambda_max across AA'K | BB' <= 1/2.
FeasibilityResult general_transfer_feasible(const PureState& link, const PureState& bank_resource);

// Entanglement across K | A'B' in bits: the Bank's cost of the resource.
double bank_cost(const PureState& bank_resource);

// Least Bank cost over the feasible part of a resource family, located by grid
// search on the family parameters (the general infimum over all resources is
// out of reach here).
enum class ResourceFamily { Ghz, W };
enum class BankModel { Measures, Transfer };
double min_feasible_bank_cost(ResourceFamily family, BankModel model, double theta,
                              std::size_t samples = 2000);

// --- Minimax measurement search ---

struct MuStarConfig {
    int polar_samples = 64;
    int azimuth_samples = 128;
    bool golden_refine = true;
    ExecMode mode = ExecMode::Parallel;
};

struct MinimaxResult {
    double mu_star_upper;  // best found sup-branch lambda_max (upper bound on mu*)
    double polar;          // Bloch direction of the best measurement
    double azimuth;
    bool feasible;  // mu_star_upper <= 1/2 + 1e-9
};

// Grid search over rank-1 projective measurements on K (Bloch direction),
// refined by one golden-section pass per coordinate. For each direction the
// score is the worst-branch lambda_max across AA'(K) | BB'.
MinimaxResult minimax_mu_star(const PureState& link, const PureState& bank_resource,
                              const MuStarConfig& config = {});

// Worst-branch lambda_max for one fixed measurement direction on K.
double mu_branch_sup(const PureState& link, const PureState& bank_resource, double polar,
                     double azimuth);

// --- Phase diagram ---

struct PhaseDiagramCell {
    double theta;
    double beta2;
    bool meas_feasible;
    bool trans_feasible;
    double pmax_meas;
    double pmax_trans;
};

struct PhaseDiagramGrid {
    std::vector<double> thetas;
    std::vector<double> beta2s;
    std::vector<PhaseDiagramCell> cells;  // row-major: theta outer, beta2 inner

    const PhaseDiagramCell& at(std::size_t i_theta, std::size_t i_beta) const {
        return cells[i_theta * beta2s.size() + i_beta];
    }
};

struct PhaseDiagramConfig {
    double theta_lo;
    double theta_hi;
    std::size_t theta_samples;
    double beta2_lo;
    double beta2_hi;
    std::size_t beta2_samples;
    ExecMode mode = ExecMode::Parallel;
};

// W-state assistance on the symmetric slice: per-cell closed-form predicates
// and optimal probabilities. Cells with trans && !meas witness the separation.
PhaseDiagramGrid scan_phase_diagram(const PhaseDiagramConfig& config);

}  // namespace bellbank
