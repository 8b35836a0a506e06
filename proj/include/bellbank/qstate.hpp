// Exact pure-state simulation of small labeled qubit registers.
//
// Amplitude indexing is big-endian in label order: the first label of a
// register is the most significant bit of the computational-basis index.
// All comparisons between states go through fidelity, never amplitude-wise,
// so global phase is irrelevant throughout.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellbank/linalg.hpp"
#include "bellbank/povm.hpp"

namespace bellbank {

constexpr int kMaxQubits = 8;
constexpr double kNormTol = 1e-12;
constexpr double kBranchCutoff = 1e-14;

struct QubitLabel {
    std::string name;

    friend bool operator==(const QubitLabel&, const QubitLabel&) = default;
    friend auto operator<=>(const QubitLabel&, const QubitLabel&) = default;
};

// Conventional register names: A/B the link, A'/B'/K the Bank resource.
namespace reg {
inline const QubitLabel A{"A"};
inline const QubitLabel B{"B"};
inline const QubitLabel Ap{"A'"};
inline const QubitLabel Bp{"B'"};
inline const QubitLabel K{"K"};
inline const QubitLabel R{"R"};
inline const QubitLabel Q{"Q"};
inline const QubitLabel T{"T"};
}  // namespace reg

class PureState {
  public:
    // |index> on the given labels (big-endian index).
    PureState(std::vector<QubitLabel> labels, std::size_t basis_index);

    // Normalizing constructor: rescales the amplitudes to unit norm.
    // Throws if the labels repeat, the length is not 2^n, or the norm vanishes.
    PureState(std::vector<QubitLabel> labels, std::vector<Complex> amplitudes);

    int num_qubits() const { return static_cast<int>(labels_.size()); }
    std::size_t dim() const { return amps_.size(); }
    const std::vector<QubitLabel>& labels() const { return labels_; }
    const std::vector<Complex>& amplitudes() const { return amps_; }
    Complex amplitude(std::size_t i) const { return amps_[i]; }

    double squared_norm() const;
    bool has_label(const QubitLabel& l) const;
    // Position of a label in the register (0 = most significant bit).
    int label_pos(const QubitLabel& l) const;
    // Bit mask of the label within a basis index.
    std::size_t bit_of(const QubitLabel& l) const;

    PureState normalized() const;

    // Raw (possibly unnormalized) construction, for measurement branches.
    static PureState raw(std::vector<QubitLabel> labels, std::vector<Complex> amps);

  private:
    PureState() = default;
    std::vector<QubitLabel> labels_;
    std::vector<Complex> amps_;
};

struct Bipartition {
    std::vector<QubitLabel> side_a;
    std::vector<QubitLabel> side_b;
};

struct SchmidtDecomposition {
    // Squared Schmidt coefficients, nonincreasing, summing to 1.
    std::vector<double> coefficients;
    // Orthonormal local families, one column per retained coefficient,
    // expressed in the cut's label orders.
    Matrix vectors_a;
    Matrix vectors_b;
    Bipartition cut;

    // Rebuilds sum_k sqrt(lambda_k) |a_k>|b_k> on labels side_a + side_b.
    PureState reconstruct() const;
};

struct MeasurementBranch {
    int outcome;  // index into the POVM's operator list
    double probability;
    PureState state;  // normalized
};

// --- Constructors from the protocol family ---

// cos(theta)|00> + sin(theta)|11> on {A,B}.
PureState make_link_state(double theta);

// alpha|000> + sqrt(1-alpha^2)|111> on {A',B',K}.
PureState make_ghz(double alpha);

// alpha|001> + beta|010> + gamma|100> on {A',B',K}; requires exact normalization.
PureState make_w(double alpha, double beta, double gamma);

// --- Register algebra ---

PureState tensor(const PureState& s1, const PureState& s2);

// Amplitude permutation onto a new label order (same label set).
PureState reorder_labels(const PureState& s, const std::vector<QubitLabel>& order);

// Applies `op` (dimension 2^targets) on the target subspace. The first target
// is the operator's most significant bit. Result may be unnormalized.
PureState apply_local(const PureState& s, const Matrix& op,
                      const std::vector<QubitLabel>& targets);

// Contracts one qubit with a fixed bra (2-vector): returns the squared norm of
// the component and the remaining register state (normalized when weight > 0).
std::pair<double, PureState> project_qubit(const PureState& s, const QubitLabel& l,
                                           const Vector& bra);

// --- Spectral quantities ---

SchmidtDecomposition schmidt(const PureState& s, const Bipartition& cut);

// Largest squared Schmidt coefficient across the cut (cheap path).
double schmidt_lambda_max(const PureState& s, const Bipartition& cut);

// Entropy of entanglement across the cut, in bits.
double entanglement_entropy(const PureState& s, const Bipartition& cut);

// Reduced density matrix on the given labels (their order fixes the index bits).
Matrix reduced_density(const PureState& s, const std::vector<QubitLabel>& kept);

// <Phi+| rho_pair |Phi+> for the reduced state on the pair.
double fidelity_to_bell(const PureState& s, const QubitLabel& a, const QubitLabel& b);

// |<a|b>|^2 after aligning label orders; requires equal label sets.
double state_fidelity(const PureState& a, const PureState& b);

// --- Measurement ---

// Branches of a complete POVM applied to the targets. Probabilities sum to 1;
// branches below the cutoff are dropped; branch states are normalized.
std::vector<MeasurementBranch> measure_branches(const PureState& s, const PovmEnsemble& povm,
                                                const std::vector<QubitLabel>& targets);

}  // namespace bellbank
