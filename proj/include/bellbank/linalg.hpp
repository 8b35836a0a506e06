// Small dense linear-algebra helpers shared across modules.

#pragma once

#include <complex>
#include <random>

#include <Eigen/Dense>

namespace bellbank {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline Matrix pauli_y() {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

inline Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline Matrix identity(int dim) { return Matrix::Identity(dim, dim); }

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Extends the given orthonormal columns to a full unitary. Remaining columns
// are obtained by Gram-Schmidt against the computational basis vectors scanned
// in lexicographic order, so the completion is deterministic.
Matrix complete_to_unitary(const Matrix& columns);

// Haar-ish random unitary from the QR decomposition of a complex Gaussian matrix.
Matrix random_unitary(int dim, std::mt19937_64& rng);

}  // namespace bellbank
