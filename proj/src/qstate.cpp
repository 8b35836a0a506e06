#include "bellbank/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <unordered_map>

namespace bellbank {

namespace {

void check_labels(const std::vector<QubitLabel>& labels) {
    if (labels.empty() || labels.size() > kMaxQubits)
        throw std::invalid_argument("register must hold between 1 and 8 qubits");
    std::set<std::string> seen;
    for (const auto& l : labels)
        if (!seen.insert(l.name).second)
            throw std::invalid_argument("duplicate qubit label: " + l.name);
}

}  // namespace

PureState::PureState(std::vector<QubitLabel> labels, std::size_t basis_index)
    : labels_(std::move(labels)), amps_(std::size_t{1} << labels_.size(), Complex{0, 0}) {
    check_labels(labels_);
    if (basis_index >= amps_.size()) throw std::invalid_argument("basis index out of range");
    amps_[basis_index] = Complex{1, 0};
}

PureState::PureState(std::vector<QubitLabel> labels, std::vector<Complex> amplitudes)
    : labels_(std::move(labels)), amps_(std::move(amplitudes)) {
    check_labels(labels_);
    if (amps_.size() != (std::size_t{1} << labels_.size()))
        throw std::invalid_argument("amplitude vector length is not 2^n");
    const double n2 = squared_norm();
    if (n2 < 1e-24) throw std::invalid_argument("cannot normalize the zero vector");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& a : amps_) a *= inv;
}

PureState PureState::raw(std::vector<QubitLabel> labels, std::vector<Complex> amps) {
    PureState s;
    s.labels_ = std::move(labels);
    s.amps_ = std::move(amps);
    check_labels(s.labels_);
    if (s.amps_.size() != (std::size_t{1} << s.labels_.size()))
        throw std::invalid_argument("amplitude vector length is not 2^n");
    return s;
}

double PureState::squared_norm() const {
    double n2 = 0.0;
    for (const auto& a : amps_) n2 += std::norm(a);
    return n2;
}

bool PureState::has_label(const QubitLabel& l) const {
    return std::find(labels_.begin(), labels_.end(), l) != labels_.end();
}

int PureState::label_pos(const QubitLabel& l) const {
    auto it = std::find(labels_.begin(), labels_.end(), l);
    if (it == labels_.end()) throw std::invalid_argument("label not in register: " + l.name);
    return static_cast<int>(it - labels_.begin());
}

std::size_t PureState::bit_of(const QubitLabel& l) const {
    return std::size_t{1} << (labels_.size() - 1 - label_pos(l));
}

PureState PureState::normalized() const {
    PureState s = *this;
    const double n2 = squared_norm();
    if (n2 < 1e-24) throw std::invalid_argument("cannot normalize the zero vector");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& a : s.amps_) a *= inv;
    return s;
}

PureState make_link_state(double theta) {
    if (!(theta > 0.0 && theta < std::numbers::pi / 2))
        throw std::domain_error("link angle must lie in (0, pi/2)");
    std::vector<Complex> amps(4, Complex{0, 0});
    amps[0] = std::cos(theta);
    amps[3] = std::sin(theta);
    return PureState({reg::A, reg::B}, std::move(amps));
}

PureState make_ghz(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("GHZ coefficient alpha must lie in (0, 1)");
    std::vector<Complex> amps(8, Complex{0, 0});
    amps[0] = alpha;
    amps[7] = std::sqrt(1.0 - alpha * alpha);
    return PureState({reg::Ap, reg::Bp, reg::K}, std::move(amps));
}

PureState make_w(double alpha, double beta, double gamma) {
    if (!(alpha > 0.0 && beta > 0.0 && gamma > 0.0))
        throw std::domain_error("W coefficients must be strictly positive");
    const double n2 = alpha * alpha + beta * beta + gamma * gamma;
    if (std::abs(n2 - 1.0) > kNormTol)
        throw std::domain_error("W coefficients are not normalized");
    std::vector<Complex> amps(8, Complex{0, 0});
    amps[1] = alpha;  // |001> on A'B'K
    amps[2] = beta;   // |010>
    amps[4] = gamma;  // |100>
    return PureState({reg::Ap, reg::Bp, reg::K}, std::move(amps));
}

PureState tensor(const PureState& s1, const PureState& s2) {
    for (const auto& l : s2.labels())
        if (s1.has_label(l)) throw std::invalid_argument("label collision in tensor: " + l.name);

    std::vector<QubitLabel> labels = s1.labels();
    labels.insert(labels.end(), s2.labels().begin(), s2.labels().end());
    if (labels.size() > kMaxQubits) throw std::invalid_argument("tensor exceeds 8 qubits");

    std::vector<Complex> amps(s1.dim() * s2.dim());
    for (std::size_t i = 0; i < s1.dim(); ++i)
        for (std::size_t j = 0; j < s2.dim(); ++j)
            amps[i * s2.dim() + j] = s1.amplitude(i) * s2.amplitude(j);
    return PureState::raw(std::move(labels), std::move(amps));
}

PureState reorder_labels(const PureState& s, const std::vector<QubitLabel>& order) {
    if (order.size() != s.labels().size())
        throw std::invalid_argument("reorder must keep the label set");
    const int n = s.num_qubits();
    std::vector<std::size_t> old_bit(n);
    for (int p = 0; p < n; ++p) old_bit[p] = s.bit_of(order[p]);

    std::vector<Complex> amps(s.dim());
    for (std::size_t g = 0; g < s.dim(); ++g) {
        std::size_t src = 0;
        for (int p = 0; p < n; ++p)
            if (g & (std::size_t{1} << (n - 1 - p))) src |= old_bit[p];
        amps[g] = s.amplitude(src);
    }
    return PureState::raw(order, std::move(amps));
}

PureState apply_local(const PureState& s, const Matrix& op,
                      const std::vector<QubitLabel>& targets) {
    const int t = static_cast<int>(targets.size());
    const std::size_t dim_t = std::size_t{1} << t;
    if (op.rows() != static_cast<Eigen::Index>(dim_t) || op.cols() != op.rows())
        throw std::invalid_argument("operator dimension does not match target count");

    std::vector<std::size_t> tbit(t);
    std::size_t tmask = 0;
    for (int j = 0; j < t; ++j) {
        tbit[j] = s.bit_of(targets[j]);
        tmask |= tbit[j];
    }

    auto scatter = [&](std::size_t k) {
        std::size_t g = 0;
        for (int j = 0; j < t; ++j)
            if (k & (std::size_t{1} << (t - 1 - j))) g |= tbit[j];
        return g;
    };
    std::vector<std::size_t> offset(dim_t);
    for (std::size_t k = 0; k < dim_t; ++k) offset[k] = scatter(k);

    std::vector<Complex> amps(s.dim(), Complex{0, 0});
    Vector in(dim_t), out(dim_t);
    for (std::size_t base = 0; base < s.dim(); ++base) {
        if (base & tmask) continue;
        for (std::size_t k = 0; k < dim_t; ++k) in(k) = s.amplitude(base | offset[k]);
        out = op * in;
        for (std::size_t k = 0; k < dim_t; ++k) amps[base | offset[k]] = out(k);
    }
    return PureState::raw(s.labels(), std::move(amps));
}

std::pair<double, PureState> project_qubit(const PureState& s, const QubitLabel& l,
                                           const Vector& direction) {
    if (direction.size() != 2) throw std::invalid_argument("direction must be a qubit state");
    const std::size_t bit = s.bit_of(l);
    const int pos = s.label_pos(l);
    const int n = s.num_qubits();

    std::vector<QubitLabel> rest;
    for (const auto& q : s.labels())
        if (!(q == l)) rest.push_back(q);

    std::vector<Complex> amps(s.dim() / 2, Complex{0, 0});
    for (std::size_t g = 0; g < s.dim(); ++g) {
        const int b = (g & bit) ? 1 : 0;
        // squeeze the label's bit out of the index
        const std::size_t hi = g >> (n - pos);
        const std::size_t lo = g & ((std::size_t{1} << (n - 1 - pos)) - 1);
        const std::size_t r = (hi << (n - 1 - pos)) | lo;
        amps[r] += std::conj(direction(b)) * s.amplitude(g);
    }
    PureState out = PureState::raw(std::move(rest), std::move(amps));
    const double weight = out.squared_norm();
    if (weight > kBranchCutoff) out = out.normalized();
    return {weight, out};
}

namespace {

// Amplitude matrix of the state reshaped by the cut, side_a rows, side_b cols.
Matrix cut_matrix(const PureState& s, const Bipartition& cut) {
    std::set<std::string> seen;
    for (const auto& l : cut.side_a) seen.insert(l.name);
    for (const auto& l : cut.side_b)
        if (!seen.insert(l.name).second)
            throw std::invalid_argument("cut sides overlap at " + l.name);
    if (cut.side_a.empty() || cut.side_b.empty())
        throw std::invalid_argument("cut sides must be nonempty");
    if (cut.side_a.size() + cut.side_b.size() != s.labels().size())
        throw std::invalid_argument("cut does not partition the register");

    const int na = static_cast<int>(cut.side_a.size());
    const int nb = static_cast<int>(cut.side_b.size());
    std::vector<std::size_t> abits(na), bbits(nb);
    for (int p = 0; p < na; ++p) abits[p] = s.bit_of(cut.side_a[p]);
    for (int p = 0; p < nb; ++p) bbits[p] = s.bit_of(cut.side_b[p]);

    Matrix m(std::size_t{1} << na, std::size_t{1} << nb);
    for (std::size_t ia = 0; ia < (std::size_t{1} << na); ++ia) {
        std::size_t ga = 0;
        for (int p = 0; p < na; ++p)
            if (ia & (std::size_t{1} << (na - 1 - p))) ga |= abits[p];
        for (std::size_t ib = 0; ib < (std::size_t{1} << nb); ++ib) {
            std::size_t g = ga;
            for (int p = 0; p < nb; ++p)
                if (ib & (std::size_t{1} << (nb - 1 - p))) g |= bbits[p];
            m(ia, ib) = s.amplitude(g);
        }
    }
    return m;
}

constexpr double kSchmidtCutoff = 1e-14;

}  // namespace

SchmidtDecomposition schmidt(const PureState& s, const Bipartition& cut) {
    const Matrix m = cut_matrix(s, cut);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);

    const auto& sv = svd.singularValues();
    int r = 0;
    while (r < sv.size() && sv(r) * sv(r) > kSchmidtCutoff) ++r;
    if (r == 0) r = 1;

    SchmidtDecomposition out;
    out.cut = cut;
    out.coefficients.resize(r);
    for (int k = 0; k < r; ++k) out.coefficients[k] = sv(k) * sv(k);
    out.vectors_a = svd.matrixU().leftCols(r);
    out.vectors_b = svd.matrixV().conjugate().leftCols(r);
    return out;
}

PureState SchmidtDecomposition::reconstruct() const {
    std::vector<QubitLabel> labels = cut.side_a;
    labels.insert(labels.end(), cut.side_b.begin(), cut.side_b.end());
    const std::size_t da = vectors_a.rows(), db = vectors_b.rows();
    std::vector<Complex> amps(da * db, Complex{0, 0});
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
        const double w = std::sqrt(coefficients[k]);
        for (std::size_t ia = 0; ia < da; ++ia)
            for (std::size_t ib = 0; ib < db; ++ib)
                amps[ia * db + ib] += w * vectors_a(ia, k) * vectors_b(ib, k);
    }
    return PureState::raw(std::move(labels), std::move(amps));
}

double schmidt_lambda_max(const PureState& s, const Bipartition& cut) {
    const Matrix m = cut_matrix(s, cut);
    const Matrix gram =
        (m.rows() <= m.cols()) ? Matrix(m * m.adjoint()) : Matrix(m.adjoint() * m);
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().maxCoeff();
    return std::clamp(top, 0.0, 1.0);
}

double entanglement_entropy(const PureState& s, const Bipartition& cut) {
    const auto dec = schmidt(s, cut);
    double h = 0.0;
    for (double lam : dec.coefficients)
        if (lam > kSchmidtCutoff) h -= lam * std::log2(lam);
    return h;
}

Matrix reduced_density(const PureState& s, const std::vector<QubitLabel>& kept) {
    const int k = static_cast<int>(kept.size());
    std::vector<std::size_t> kbits(k);
    std::size_t kmask = 0;
    for (int p = 0; p < k; ++p) {
        kbits[p] = s.bit_of(kept[p]);
        kmask |= kbits[p];
    }
    const std::size_t dk = std::size_t{1} << k;

    auto kept_index = [&](std::size_t g) {
        std::size_t i = 0;
        for (int p = 0; p < k; ++p)
            if (g & kbits[p]) i |= std::size_t{1} << (k - 1 - p);
        return i;
    };

    Matrix rho = Matrix::Zero(dk, dk);
    for (std::size_t g1 = 0; g1 < s.dim(); ++g1) {
        if (s.amplitude(g1) == Complex{0, 0}) continue;
        const std::size_t rest1 = g1 & ~kmask;
        for (std::size_t g2 = 0; g2 < s.dim(); ++g2) {
            if ((g2 & ~kmask) != rest1) continue;
            rho(kept_index(g1), kept_index(g2)) += s.amplitude(g1) * std::conj(s.amplitude(g2));
        }
    }
    return rho;
}

double fidelity_to_bell(const PureState& s, const QubitLabel& a, const QubitLabel& b) {
    const Matrix rho = reduced_density(s, {a, b});
    const Complex f = 0.5 * (rho(0, 0) + rho(0, 3) + rho(3, 0) + rho(3, 3));
    return std::clamp(f.real(), 0.0, 1.0);
}

double state_fidelity(const PureState& a, const PureState& b) {
    const PureState bb = reorder_labels(b, a.labels());
    Complex ip{0, 0};
    for (std::size_t i = 0; i < a.dim(); ++i) ip += std::conj(a.amplitude(i)) * bb.amplitude(i);
    return std::norm(ip);
}

std::vector<MeasurementBranch> measure_branches(const PureState& s, const PovmEnsemble& povm,
                                                const std::vector<QubitLabel>& targets) {
    if (!povm.is_complete(1e-10))
        throw std::invalid_argument("POVM is not complete on the targets");
    std::vector<MeasurementBranch> branches;
    for (std::size_t m = 0; m < povm.operators.size(); ++m) {
        PureState post = apply_local(s, povm.operators[m], targets);
        const double p = post.squared_norm();
        if (p <= kBranchCutoff) continue;
        branches.push_back({static_cast<int>(m), p, post.normalized()});
    }
    return branches;
}

}  // namespace bellbank
