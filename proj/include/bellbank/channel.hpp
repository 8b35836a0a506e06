// Geometry of the single-qubit channel induced by teleporting through a
// two-qubit resource: correlation matrix, Bloch-ellipsoid image, and the
// exact protocol simulation used as its oracle.

#pragma once

#include <array>

#include "bellbank/qstate.hpp"

namespace bellbank {

using Bloch = Eigen::Vector3d;

struct CorrelationMatrix {
    Eigen::Matrix3d t;
};

struct Ellipsoid {
    std::array<double, 3> semi_axes;
    Bloch center;  // zero for unital maps
};

// T_ij = <psi| sigma_i x sigma_j |psi> for a two-qubit pure state.
CorrelationMatrix correlation_matrix(const PureState& resource);

// diag(sin 2theta, sin 2theta, 1): the contraction after Pauli corrections.
CorrelationMatrix effective_contraction(double theta);

// Image of the Bloch sphere: semi-axes are the singular values of T.
Ellipsoid image_ellipsoid(const CorrelationMatrix& t);

// (4 pi / 3) sin^2(2 theta).
double ellipsoid_volume(double theta);

// Runs the full Bell-measurement protocol with resource psi(theta) on a
// three-qubit register and averages the four corrected outcomes exactly.
// Matches effective_contraction(theta) * input.
Bloch simulate_teleport_channel(double theta, const Bloch& input);

// Maximal singlet fraction of psi(theta): (1 + sin 2theta) / 2.
double singlet_fraction(double theta);

}  // namespace bellbank
