// Majorization order on Schmidt spectra, the constructive Birkhoff-von Neumann
// decomposition, and the measurement ensembles built from it.
//
// The chain solve_doubly_stochastic -> bvn_decompose -> build_nielsen_povm
// turns a feasible spectrum pair into an executable deterministic conversion;
// build_procrustean_filter covers the probabilistic (infeasible) case.

#pragma once

#include <stdexcept>
#include <vector>

#include "bellbank/linalg.hpp"
#include "bellbank/povm.hpp"

namespace bellbank {

// Thrown when a requested conversion violates majorization; carries the
// quantity that was tested and the bound it had to meet.
class infeasible_error : public std::runtime_error {
  public:
    infeasible_error(const std::string& what, double binding_value, double bound)
        : std::runtime_error(what), binding_value(binding_value), bound(bound) {}
    double binding_value;
    double bound;
};

// Nonincreasing probability spectrum. The constructor sorts and validates.
class SpectrumVector {
  public:
    explicit SpectrumVector(std::vector<double> values);

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double lambda_max() const { return values_.front(); }

    // The Bell-pair target (1/2, 1/2, 0, ..., 0) in the given dimension.
    static SpectrumVector bell_target(std::size_t dim);

  private:
    std::vector<double> values_;
};

class DoublyStochasticMatrix {
  public:
    explicit DoublyStochasticMatrix(Eigen::MatrixXd entries);

    const Eigen::MatrixXd& entries() const { return entries_; }
    int dim() const { return static_cast<int>(entries_.rows()); }

  private:
    Eigen::MatrixXd entries_;
};

// Permutation stored as sigma with (P x)_i = x_{sigma(i)}, i.e. P[i][sigma(i)] = 1.
struct Permutation {
    std::vector<int> map;

    Eigen::MatrixXd matrix() const;
    int operator()(int i) const { return map[i]; }
    int size() const { return static_cast<int>(map.size()); }
    static Permutation identity(int d);
};

struct BvnTerm {
    double weight;
    Permutation permutation;
};

struct BvnDecomposition {
    std::vector<BvnTerm> terms;

    Eigen::MatrixXd reconstruct() const;
};

// True iff every prefix sum of `source` is dominated by that of `target`
// (1e-12 slack). Shorter vector is zero-padded.
bool majorized_by(const SpectrumVector& source, const SpectrumVector& target);

// Vidal optimal conversion probability: min_k of tail-sum ratios.
// Ratios with a zero target tail are skipped.
double vidal_pmax(const SpectrumVector& source, const SpectrumVector& target);

// Bell-target specialization min(1, 2(1 - lambda_max)).
double bell_pmax(double lambda_max);

// Doubly stochastic D with D * target = source, built from a T-transform chain.
// Throws infeasible_error when source is not majorized by target.
DoublyStochasticMatrix solve_doubly_stochastic(const SpectrumVector& source,
                                               const SpectrumVector& target);

// Constructive Birkhoff-von Neumann decomposition via perfect matchings on the
// positive-entry support graph. Terminates in at most (d-1)^2 + 1 terms.
BvnDecomposition bvn_decompose(const DoublyStochasticMatrix& d_matrix);

// Measurement operators M_k = sqrt(p_k) Lambda_target^{1/2} P_k^T Lambda_source^{-1/2}
// in the source Schmidt basis, with the inverse square root taken on the
// support. Outcome k's label encodes the correction permutation P_k^T.
struct NielsenPovm {
    PovmEnsemble povm;
    std::vector<Permutation> corrections;  // Bob's permutation per outcome
    std::vector<double> weights;           // branch probabilities p_k
};
NielsenPovm build_nielsen_povm(const SpectrumVector& source, const SpectrumVector& target);

// Two-outcome filter achieving the Vidal probability for a Bell target when
// lambda_max > 1/2: the success branch is majorized by (1/2,1/2,0,...) and a
// deterministic conversion finishes the job. Outcome 0 is success.
PovmEnsemble build_procrustean_filter(const SpectrumVector& source);

}  // namespace bellbank
