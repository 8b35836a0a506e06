#include "bellbank/linalg.hpp"

#include <stdexcept>

namespace bellbank {

Matrix complete_to_unitary(const Matrix& columns) {
    const Eigen::Index dim = columns.rows();
    if (columns.cols() > dim) throw std::invalid_argument("more columns than dimension");

    Matrix u(dim, dim);
    Eigen::Index filled = 0;

    auto push = [&](Vector v) {
        for (Eigen::Index k = 0; k < filled; ++k) v -= u.col(k).dot(v) * u.col(k);
        const double n = v.norm();
        if (n < 1e-9) return false;
        u.col(filled++) = v / n;
        return true;
    };

    for (Eigen::Index c = 0; c < columns.cols(); ++c) {
        if (!push(columns.col(c)))
            throw std::invalid_argument("given columns are linearly dependent");
    }
    for (Eigen::Index b = 0; b < dim && filled < dim; ++b) {
        Vector e = Vector::Zero(dim);
        e(b) = 1.0;
        push(e);
    }
    if (filled != dim) throw std::runtime_error("unitary completion failed");
    return u;
}

Matrix random_unitary(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        Complex d = r(j, j);
        q.col(j) *= (std::abs(d) > 0) ? d / std::abs(d) : Complex(1, 0);
    }
    return q;
}

}  // namespace bellbank
