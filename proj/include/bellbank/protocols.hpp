// Executable LOCC protocols for Bell-pair restoration over the imperfect link,
// each returning a transcript with per-round ensembles so that entanglement
// accounting can be audited after the fact.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bellbank/majorize.hpp"
#include "bellbank/qstate.hpp"

namespace bellbank {

enum class Actor { Alice, Bob, Bank };

std::string to_string(Actor a);

struct WeightedState {
    double probability;
    PureState state;
};
using Ensemble = std::vector<WeightedState>;

struct Round {
    Actor actor;
    std::string description;
    int classical_bits = 0;  // bits broadcast by the actor in this round
    bool locc = true;        // false only for the routing model's joint unitaries
    Ensemble after;          // ensemble once the round has been applied
};

struct Branch {
    double probability;
    PureState state;
    double bell_fidelity;  // on the original A,B registers
};

struct ProtocolTranscript {
    Ensemble initial;
    std::vector<Round> rounds;
    std::vector<Branch> branches;
    bool deterministic = false;
    int total_bank_bits = 0;
    Bipartition audit_cut;  // Alice-side | Bob-side split used for accounting

    // Probability of branches that reached Bell fidelity >= 1 - 1e-9.
    double success_probability() const;
};

// Ensemble-average entanglement entropy across the transcript's audit cut.
double ensemble_entanglement(const Ensemble& e, const Bipartition& cut);

// Verifies that the weighted average entanglement never increases over the
// LOCC rounds (non-LOCC routing unitaries are exempt). Returns the largest
// observed increase; the transcript passes when this is <= tol.
double max_entanglement_increase(const ProtocolTranscript& t);
bool passes_monotonicity_audit(const ProtocolTranscript& t, double tol = 1e-9);

// --- GHZ-assisted restoration ---

// Bank measures K in the Hadamard basis (one broadcast bit), Alice runs the
// majorization POVM on her side, Bob applies the permutation correction and
// the sigma_z fix on the minus branch. Requires alpha^2 <= 1/(2 cos^2 theta);
// with probabilistic=true an infeasible configuration runs the optimal filter
// instead of throwing.
ProtocolTranscript run_ghz_bank_measures(double theta, double alpha,
                                         bool probabilistic = false);

// Alice and Bob act before the Bank: the intermediate state is a coherent
// superposition correlated with K, and only the Bank's later one-bit
// Hadamard-basis broadcast completes the correction.
ProtocolTranscript run_ghz_deferred(double theta, double alpha);

// K is handed to Alice; a single joint POVM on AA'K finishes deterministically
// with zero Bank bits.
ProtocolTranscript run_ghz_transfer(double theta, double alpha,
                                    bool probabilistic = false);

// --- W-assisted restoration ---

ProtocolTranscript run_w_bank_measures(double theta, double alpha, double beta, double gamma,
                                       bool probabilistic = false);

ProtocolTranscript run_w_transfer(double theta, double alpha, double beta, double gamma,
                                  bool probabilistic = false);

// --- Catalysis benchmark ---

// Single-sided filter diag(tan theta, 1) on A next to a two-qubit catalyst
// sqrt(c1)|00> + sqrt(c2)|11> on A'B'. Succeeds with probability 2 sin^2 theta
// and returns the catalyst exactly.
ProtocolTranscript run_catalysis(double theta, double c1);

// Deterministic catalytic restoration is possible iff cos^2 theta <= 1/2,
// independent of the catalyst.
bool check_catalysis_deterministic(double theta, double c1);

// --- Non-local routing benchmark ---

// Sequential joint unitaries U_KA then U_KB route a fresh |0>_K ancilla so the
// final state is exactly |Phi+>_AB x |0>_K. No measurement, no classical bits.
ProtocolTranscript run_routing(double theta);

// Schmidt spectrum across (KA)|B is untouched by any unitary on K,A alone.
bool check_single_sided_invariance(double theta, const Matrix& unitary_on_ka);

// --- Shared machinery ---

// One-round restoration instrument for `state` across `cut`: Alice's POVM on
// the full side-a register (Nielsen measurement with the Schmidt-basis
// alignment folded in) and Bob's per-outcome correction unitary on side b.
// When the spectrum is infeasible and allow_probabilistic is set, the optimal
// two-outcome filter is composed in front and a `fail` outcome appears.
struct RestorationInstrument {
    PovmEnsemble alice;            // operators on the full side-a register
    std::vector<Matrix> bob_ops;   // per-outcome unitaries on the side-b register
    std::vector<bool> success;     // outcome completes the Bell restoration
};
RestorationInstrument build_restoration_instrument(const PureState& state, const Bipartition& cut,
                                                   const QubitLabel& bell_a,
                                                   const QubitLabel& bell_b,
                                                   bool allow_probabilistic);

}  // namespace bellbank
