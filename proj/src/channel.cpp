#include "bellbank/channel.hpp"

#include <cmath>
#include <numbers>

namespace bellbank {

namespace {

Matrix pauli(int i) {
    switch (i) {
        case 0: return pauli_x();
        case 1: return pauli_y();
        default: return pauli_z();
    }
}

// Bell basis on two qubits, first qubit most significant.
Vector bell_vector(int m) {
    Vector v = Vector::Zero(4);
    const double s = 1.0 / std::sqrt(2.0);
    switch (m) {
        case 0: v(0) = s; v(3) = s; break;   // |Phi+>
        case 1: v(0) = s; v(3) = -s; break;  // |Phi->
        case 2: v(1) = s; v(2) = s; break;   // |Psi+>
        default: v(1) = s; v(2) = -s; break; // |Psi->
    }
    return v;
}

}  // namespace

CorrelationMatrix correlation_matrix(const PureState& resource) {
    if (resource.num_qubits() != 2)
        throw std::invalid_argument("correlation matrix needs a two-qubit state");
    Vector psi(4);
    for (int i = 0; i < 4; ++i) psi(i) = resource.amplitude(i);
    CorrelationMatrix out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out.t(i, j) = (psi.adjoint() * kron(pauli(i), pauli(j)) * psi)(0, 0).real();
    return out;
}

CorrelationMatrix effective_contraction(double theta) {
    if (!(theta > 0.0 && theta < std::numbers::pi / 2))
        throw std::domain_error("link angle must lie in (0, pi/2)");
    CorrelationMatrix out;
    out.t.setZero();
    out.t(0, 0) = out.t(1, 1) = std::sin(2.0 * theta);
    out.t(2, 2) = 1.0;
    return out;
}

Ellipsoid image_ellipsoid(const CorrelationMatrix& t) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(t.t);
    const auto& sv = svd.singularValues();
    return Ellipsoid{{sv(0), sv(1), sv(2)}, Bloch::Zero()};
}

double ellipsoid_volume(double theta) {
    if (!(theta > 0.0 && theta < std::numbers::pi / 2))
        throw std::domain_error("link angle must lie in (0, pi/2)");
    const double s = std::sin(2.0 * theta);
    return 4.0 * std::numbers::pi / 3.0 * s * s;
}

double singlet_fraction(double theta) { return 0.5 * (1.0 + std::sin(2.0 * theta)); }

Bloch simulate_teleport_channel(double theta, const Bloch& input) {
    const double r = input.norm();
    if (r > 1.0 + 1e-12) throw std::domain_error("Bloch vector must lie inside the unit ball");
    if (r < 1e-15) return Bloch::Zero();
    const Bloch unit = input / r;

    // pure input qubit with Bloch vector `unit`
    const double polar = std::acos(std::clamp(unit.z(), -1.0, 1.0));
    const double azimuth = std::atan2(unit.y(), unit.x());
    std::vector<Complex> in_amps = {std::cos(polar / 2.0),
                                    std::polar(std::sin(polar / 2.0), azimuth)};
    const PureState source({reg::Q}, in_amps);
    const PureState joint = tensor(source, make_link_state(theta));

    PovmEnsemble bell_povm;
    for (int m = 0; m < 4; ++m) {
        const Vector v = bell_vector(m);
        bell_povm.operators.push_back(v * v.adjoint());
        bell_povm.outcome_labels.push_back("bell" + std::to_string(m));
    }

    // Outcome -> Pauli correction in the standard convention; the net effect
    // on Bloch vectors is the y-sign flip that turns T into diag(s, s, 1).
    const std::vector<Matrix> corrections = {identity(2), pauli_z(), pauli_x(),
                                             pauli_z() * pauli_x()};

    Matrix rho_out = Matrix::Zero(2, 2);
    for (const auto& branch : measure_branches(joint, bell_povm, {reg::Q, reg::A})) {
        const PureState corrected =
            apply_local(branch.state, corrections[branch.outcome], {reg::B});
        rho_out += branch.probability * reduced_density(corrected, {reg::B});
    }

    Bloch out;
    for (int i = 0; i < 3; ++i) out(i) = (pauli(i) * rho_out).trace().real();
    return r * out;
}

}  // namespace bellbank
