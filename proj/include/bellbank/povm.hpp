#pragma once

#include <string>
#include <vector>

#include "bellbank/linalg.hpp"

namespace bellbank {

// Finite list of measurement operators M_m on a fixed dimension with
// sum_m M_m^dag M_m = I. Outcome labels travel with the operators.
struct PovmEnsemble {
    std::vector<Matrix> operators;
    std::vector<std::string> outcome_labels;

    int dim() const { return operators.empty() ? 0 : static_cast<int>(operators.front().rows()); }

    // Max-norm deviation of sum M^dag M from the identity.
    double completeness_defect() const {
        if (operators.empty()) return 1.0;
        Matrix acc = Matrix::Zero(operators.front().cols(), operators.front().cols());
        for (const auto& m : operators) acc += m.adjoint() * m;
        return (acc - Matrix::Identity(acc.rows(), acc.cols())).cwiseAbs().maxCoeff();
    }

    bool is_complete(double tol = 1e-10) const { return completeness_defect() <= tol; }
};

}  // namespace bellbank
