#include "bellbank/protocols.hpp"

#include <cmath>
#include <numbers>

#include "bellbank/feasibility.hpp"

namespace bellbank {

namespace {

constexpr double kDetTol = 1e-9;
constexpr double kQuarterPi = std::numbers::pi / 4;

void check_protocol_angle(double theta) {
    if (!(theta > 0.0 && theta <= kQuarterPi + 1e-12))
        throw std::domain_error("protocol link angle must lie in (0, pi/4]");
}

PovmEnsemble hadamard_povm() {
    const double s = 1.0 / std::sqrt(2.0);
    Vector plus(2), minus(2);
    plus << s, s;
    minus << s, -s;
    PovmEnsemble povm;
    povm.operators = {plus * plus.adjoint(), minus * minus.adjoint()};
    povm.outcome_labels = {"+", "-"};
    return povm;
}

// sigma_z on B' within the ordered register (B, B').
Matrix sigma_z_on_bprime() { return kron(identity(2), pauli_z()); }

int bits_for(std::size_t outcomes) {
    int bits = 0;
    while ((std::size_t{1} << bits) < outcomes) ++bits;
    return bits;
}

struct Work {
    double p;
    PureState state;
};

Ensemble to_ensemble(const std::vector<Work>& work) {
    Ensemble e;
    for (const auto& w : work) e.push_back({w.p, w.state});
    return e;
}

std::vector<Branch> finalize(const std::vector<Work>& work) {
    std::vector<Branch> out;
    for (const auto& w : work)
        out.push_back({w.p, w.state, fidelity_to_bell(w.state, reg::A, reg::B)});
    return out;
}

bool all_successful(const std::vector<Branch>& branches) {
    for (const auto& b : branches)
        if (b.bell_fidelity < 1.0 - kDetTol) return false;
    return true;
}

}  // namespace

std::string to_string(Actor a) {
    switch (a) {
        case Actor::Alice: return "Alice";
        case Actor::Bob: return "Bob";
        default: return "Bank";
    }
}

double ProtocolTranscript::success_probability() const {
    double p = 0.0;
    for (const auto& b : branches)
        if (b.bell_fidelity >= 1.0 - kDetTol) p += b.probability;
    return p;
}

double ensemble_entanglement(const Ensemble& e, const Bipartition& cut) {
    double acc = 0.0;
    for (const auto& w : e) acc += w.probability * entanglement_entropy(w.state, cut);
    return acc;
}

double max_entanglement_increase(const ProtocolTranscript& t) {
    double prev = ensemble_entanglement(t.initial, t.audit_cut);
    double worst = 0.0;
    for (const auto& r : t.rounds) {
        const double cur = ensemble_entanglement(r.after, t.audit_cut);
        if (r.locc) worst = std::max(worst, cur - prev);
        prev = cur;
    }
    return worst;
}

bool passes_monotonicity_audit(const ProtocolTranscript& t, double tol) {
    return max_entanglement_increase(t) <= tol;
}

RestorationInstrument build_restoration_instrument(const PureState& state, const Bipartition& cut,
                                                   const QubitLabel& bell_a,
                                                   const QubitLabel& bell_b,
                                                   bool allow_probabilistic) {
    const auto dec = schmidt(state, cut);
    const std::size_t r = dec.coefficients.size();
    const std::size_t d = std::max<std::size_t>(r, 2);
    const std::size_t dim_a = std::size_t{1} << cut.side_a.size();
    const std::size_t dim_b = std::size_t{1} << cut.side_b.size();
    if (d > dim_a || d > dim_b)
        throw std::invalid_argument("Schmidt rank exceeds a side's dimension");

    const Matrix a_ext = complete_to_unitary(dec.vectors_a);
    const Matrix b_ext = complete_to_unitary(dec.vectors_b);

    // Alignment targets: Schmidt vector 0 -> |bell=0, junk=0>, 1 -> |bell=1, junk=0>.
    auto alignment = [](std::size_t dim, std::size_t bell_bit) {
        Matrix cols = Matrix::Zero(dim, 2);
        cols(0, 0) = 1.0;
        cols(bell_bit, 1) = 1.0;
        return complete_to_unitary(cols);
    };
    const std::size_t na = cut.side_a.size(), nb = cut.side_b.size();
    std::size_t pos_a = na, pos_b = nb;
    for (std::size_t i = 0; i < na; ++i)
        if (cut.side_a[i] == bell_a) pos_a = i;
    for (std::size_t i = 0; i < nb; ++i)
        if (cut.side_b[i] == bell_b) pos_b = i;
    if (pos_a == na || pos_b == nb)
        throw std::invalid_argument("Bell labels must lie on their cut sides");
    const Matrix c_a = alignment(dim_a, std::size_t{1} << (na - 1 - pos_a));
    const Matrix c_b = alignment(dim_b, std::size_t{1} << (nb - 1 - pos_b));

    const SpectrumVector source(dec.coefficients);
    const double l1 = source.lambda_max();

    // Schmidt-coordinate pieces per outcome: (alice d x d, bob permutation, off-support
    // diagonal weight, success flag).
    struct Piece {
        Matrix alice;
        Matrix bob;
        double off_weight;
        bool success;
    };
    std::vector<Piece> pieces;

    auto add_nielsen = [&](const SpectrumVector& spec, const Matrix& prefilter) {
        const auto np = build_nielsen_povm(spec, SpectrumVector::bell_target(d));
        for (std::size_t k = 0; k < np.povm.operators.size(); ++k) {
            Matrix perm_t = np.corrections[k].matrix().transpose().cast<Complex>();
            pieces.push_back({np.povm.operators[k] * prefilter, std::move(perm_t),
                              std::sqrt(np.weights[k]), true});
        }
    };

    if (l1 <= 0.5 + kFeasibilitySlack) {
        add_nielsen(source, Matrix::Identity(d, d));
    } else {
        if (!allow_probabilistic)
            throw infeasible_error("largest Schmidt coefficient exceeds 1/2", l1, 0.5);
        // Optimal filter first; its success branch is exactly Bell-feasible.
        const double p_succ = 2.0 * (1.0 - l1);
        Matrix f_succ = Matrix::Identity(d, d);
        f_succ(0, 0) = std::sqrt((1.0 - l1) / l1);
        std::vector<double> filtered(dec.coefficients);
        filtered[0] = 1.0 - l1;
        for (auto& v : filtered) v /= p_succ;
        add_nielsen(SpectrumVector(filtered), f_succ);

        Matrix f_fail = Matrix::Zero(d, d);
        f_fail(0, 0) = std::sqrt((2.0 * l1 - 1.0) / l1);
        pieces.push_back({std::move(f_fail), Matrix::Identity(d, d), 0.0, false});
    }

    // Guard: off-support weights must square-sum to 1 for completeness.
    double off_sum = 0.0;
    for (const auto& p : pieces) off_sum += p.off_weight * p.off_weight;
    if (std::abs(off_sum - 1.0) > 1e-9)
        throw std::runtime_error("instrument off-support weights are inconsistent");

    RestorationInstrument out;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        Matrix ea = Matrix::Zero(dim_a, dim_a);
        ea.topLeftCorner(d, d) = pieces[k].alice;
        for (std::size_t j = d; j < dim_a; ++j) ea(j, j) = pieces[k].off_weight;
        out.alice.operators.push_back(c_a * ea * a_ext.adjoint());
        out.alice.outcome_labels.push_back(pieces[k].success ? "k" + std::to_string(k) : "fail");

        Matrix fb = Matrix::Identity(dim_b, dim_b);
        fb.topLeftCorner(d, d) = pieces[k].bob;
        out.bob_ops.push_back(c_b * fb * b_ext.adjoint());
        out.success.push_back(pieces[k].success);
    }
    return out;
}

namespace {

// Applies Alice's instrument and Bob's per-outcome correction to every work
// branch; records the two rounds.
void run_instrument_rounds(std::vector<Work>& work, ProtocolTranscript& t,
                           const std::vector<QubitLabel>& side_a,
                           const std::vector<QubitLabel>& side_b, const QubitLabel& bell_a,
                           const QubitLabel& bell_b, const Bipartition& cut,
                           bool allow_probabilistic, const std::string& what) {
    struct Pending {
        double p;
        PureState state;
        Matrix bob_op;
    };
    std::vector<Pending> pending;
    std::size_t worst_outcomes = 1;

    for (const auto& w : work) {
        const auto instr =
            build_restoration_instrument(w.state, cut, bell_a, bell_b, allow_probabilistic);
        worst_outcomes = std::max(worst_outcomes, instr.alice.operators.size());
        for (const auto& br : measure_branches(w.state, instr.alice, side_a))
            pending.push_back({w.p * br.probability, br.state, instr.bob_ops[br.outcome]});
    }

    work.clear();
    for (const auto& pn : pending) work.push_back({pn.p, pn.state});
    t.rounds.push_back(
        {Actor::Alice, what, bits_for(worst_outcomes), true, to_ensemble(work)});

    for (std::size_t i = 0; i < work.size(); ++i)
        work[i].state = apply_local(work[i].state, pending[i].bob_op, side_b).normalized();
    t.rounds.push_back({Actor::Bob, "permutation correction and basis alignment", 0, true,
                        to_ensemble(work)});
}

ProtocolTranscript run_ghz_like(double theta, const PureState& resource, bool transfer,
                                bool ghz_sign_fix, bool probabilistic,
                                const FeasibilityResult& feas, const std::string& resource_name) {
    if (!feas.feasible && !probabilistic)
        throw infeasible_error(resource_name + " feasibility violated", feas.binding_value,
                               feas.bound);

    const PureState link = make_link_state(theta);
    PureState state0 = tensor(link, resource);

    ProtocolTranscript t;
    t.audit_cut = {{reg::A, reg::Ap, reg::K}, {reg::B, reg::Bp}};
    t.initial = {{1.0, state0}};
    std::vector<Work> work{{1.0, state0}};

    if (transfer) {
        // Relocating K is the model's defining move; the spectrum across the
        // audit cut is unchanged.
        t.rounds.push_back({Actor::Bank, "transfers K to Alice", 0, true, to_ensemble(work)});
        run_instrument_rounds(work, t, {reg::A, reg::Ap, reg::K}, {reg::B, reg::Bp}, reg::A,
                              reg::B, t.audit_cut, probabilistic,
                              "joint restoration instrument on AA'K");
        t.total_bank_bits = 0;
    } else {
        std::vector<Work> split;
        for (const auto& w : work)
            for (const auto& br : measure_branches(w.state, hadamard_povm(), {reg::K}))
                split.push_back({w.p * br.probability, br.state});
        work = std::move(split);
        t.rounds.push_back({Actor::Bank, "measures K in the Hadamard basis and broadcasts", 1,
                            true, to_ensemble(work)});
        t.total_bank_bits = 1;

        if (ghz_sign_fix && work.size() == 2) {
            // The minus branch differs from plus by sigma_z on B'; Bob undoes
            // it so both branches share one conditional state.
            work[1].state =
                apply_local(work[1].state, pauli_z(), {reg::Bp}).normalized();
            t.rounds.push_back({Actor::Bob, "sigma_z fix on B' for the minus branch", 0, true,
                                to_ensemble(work)});
        }

        run_instrument_rounds(work, t, {reg::A, reg::Ap, reg::K}, {reg::B, reg::Bp}, reg::A,
                              reg::B, t.audit_cut, probabilistic,
                              "restoration instrument on AA'");
    }

    t.branches = finalize(work);
    t.deterministic = all_successful(t.branches);
    return t;
}

}  // namespace

ProtocolTranscript run_ghz_bank_measures(double theta, double alpha, bool probabilistic) {
    check_protocol_angle(theta);
    return run_ghz_like(theta, make_ghz(alpha), false, true, probabilistic,
                        ghz_feasible(theta, alpha), "GHZ");
}

ProtocolTranscript run_ghz_transfer(double theta, double alpha, bool probabilistic) {
    check_protocol_angle(theta);
    return run_ghz_like(theta, make_ghz(alpha), true, false, probabilistic,
                        ghz_feasible(theta, alpha), "GHZ");
}

ProtocolTranscript run_w_bank_measures(double theta, double alpha, double beta, double gamma,
                                       bool probabilistic) {
    check_protocol_angle(theta);
    // The two Hadamard branches differ by more than a local sign here, so the
    // instrument is rebuilt per branch instead of reusing plus-branch data.
    return run_ghz_like(theta, make_w(alpha, beta, gamma), false, false, probabilistic,
                        w_meas_feasible(theta, alpha, beta, gamma), "W Bank-measures");
}

ProtocolTranscript run_w_transfer(double theta, double alpha, double beta, double gamma,
                                  bool probabilistic) {
    check_protocol_angle(theta);
    return run_ghz_like(theta, make_w(alpha, beta, gamma), true, false, probabilistic,
                        w_trans_feasible(theta, beta), "W transfer");
}

ProtocolTranscript run_ghz_deferred(double theta, double alpha) {
    check_protocol_angle(theta);
    const auto feas = ghz_feasible(theta, alpha);
    if (!feas.feasible)
        throw infeasible_error("GHZ feasibility violated", feas.binding_value, feas.bound);

    const double beta = std::sqrt(1.0 - alpha * alpha);
    const PureState link = make_link_state(theta);
    const PureState ghz = make_ghz(alpha);
    PureState state0 = tensor(link, ghz);

    // Alice and Bob act on the + conditional state's Schmidt structure before
    // the Bank has measured anything.
    const PureState plus_branch =
        tensor(link, PureState({reg::Ap, reg::Bp}, {alpha, 0.0, 0.0, beta}));
    const Bipartition cut4{{reg::A, reg::Ap}, {reg::B, reg::Bp}};
    const auto instr = build_restoration_instrument(plus_branch, cut4, reg::A, reg::B, false);

    ProtocolTranscript t;
    t.audit_cut = {{reg::A, reg::Ap, reg::K}, {reg::B, reg::Bp}};
    t.initial = {{1.0, state0}};

    struct Tagged {
        double p;
        PureState state;
        int outcome;
    };
    std::vector<Tagged> tagged;
    for (const auto& br : measure_branches(state0, instr.alice, {reg::A, reg::Ap}))
        tagged.push_back({br.probability, br.state, br.outcome});

    auto snapshot = [&] {
        Ensemble e;
        for (const auto& w : tagged) e.push_back({w.p, w.state});
        return e;
    };
    t.rounds.push_back({Actor::Alice, "restoration instrument on AA' before the Bank acts",
                        bits_for(instr.alice.operators.size()), true, snapshot()});

    for (auto& w : tagged)
        w.state = apply_local(w.state, instr.bob_ops[w.outcome], {reg::B, reg::Bp}).normalized();
    t.rounds.push_back(
        {Actor::Bob, "permutation correction and basis alignment", 0, true, snapshot()});

    // Bank finally measures K; the minus branch still carries the conjugated
    // sigma_z that only the broadcast bit lets Bob undo.
    std::vector<Tagged> split;
    for (const auto& w : tagged)
        for (const auto& br : measure_branches(w.state, hadamard_povm(), {reg::K}))
            split.push_back({w.p * br.probability, br.state,
                             w.outcome * 2 + br.outcome});  // encode (k, +/-)
    tagged = std::move(split);
    t.rounds.push_back({Actor::Bank, "measures K in the Hadamard basis and broadcasts", 1, true,
                        snapshot()});

    for (auto& w : tagged) {
        const int k = w.outcome / 2;
        if (w.outcome % 2 == 1) {
            const Matrix fix =
                instr.bob_ops[k] * sigma_z_on_bprime() * instr.bob_ops[k].adjoint();
            w.state = apply_local(w.state, fix, {reg::B, reg::Bp}).normalized();
        }
    }
    t.rounds.push_back({Actor::Bob, "conditional phase fix on the minus branch", 0, true,
                        snapshot()});

    for (const auto& w : tagged)
        t.branches.push_back({w.p, w.state, fidelity_to_bell(w.state, reg::A, reg::B)});
    t.deterministic = all_successful(t.branches);
    t.total_bank_bits = 1;
    return t;
}

ProtocolTranscript run_catalysis(double theta, double c1) {
    check_protocol_angle(theta);
    if (!(c1 >= 0.5 && c1 < 1.0))
        throw std::domain_error("catalyst coefficient c1 must lie in [1/2, 1)");

    const PureState catalyst(
        {reg::Ap, reg::Bp}, {std::sqrt(c1), 0.0, 0.0, std::sqrt(1.0 - c1)});
    PureState state0 = tensor(make_link_state(theta), catalyst);

    ProtocolTranscript t;
    t.audit_cut = {{reg::A, reg::Ap}, {reg::B, reg::Bp}};
    t.initial = {{1.0, state0}};

    // Procrustean filter on A alone; the catalyst is never touched.
    const double tn = std::tan(theta);
    Matrix succ(2, 2), fail(2, 2);
    succ << tn, 0, 0, 1;
    fail << std::sqrt(std::max(0.0, 1.0 - tn * tn)), 0, 0, 0;
    PovmEnsemble filter;
    filter.operators = {succ, fail};
    filter.outcome_labels = {"success", "fail"};

    std::vector<Work> work;
    for (const auto& br : measure_branches(state0, filter, {reg::A}))
        work.push_back({br.probability, br.state});
    t.rounds.push_back({Actor::Alice, "Procrustean filter on A", 1, true, to_ensemble(work)});

    t.branches = finalize(work);
    t.deterministic = all_successful(t.branches);
    t.total_bank_bits = 0;
    return t;
}

bool check_catalysis_deterministic(double theta, double c1) {
    check_protocol_angle(theta);
    if (!(c1 >= 0.5 && c1 < 1.0))
        throw std::domain_error("catalyst coefficient c1 must lie in [1/2, 1)");
    // The binding majorization inequality is cos^2(theta) c1 <= c1/2: the
    // catalyst drops out.
    const double c = std::cos(theta);
    return c * c <= 0.5 + kFeasibilitySlack;
}

namespace {

Matrix routing_u_ka() {
    const double s = 1.0 / std::sqrt(2.0);
    // basis order (A, K): U|00> = |Phi+>, U|10> = |Psi+>, rest completed
    Matrix u = Matrix::Zero(4, 4);
    Vector phi_plus(4), psi_plus(4);
    phi_plus << s, 0, 0, s;
    psi_plus << 0, s, s, 0;
    // place the prescribed images, then Gram-Schmidt the remaining columns
    Matrix partial(4, 2);
    partial.col(0) = phi_plus;
    partial.col(1) = psi_plus;
    const Matrix ext = complete_to_unitary(partial);
    u.col(0) = ext.col(0);
    u.col(2) = ext.col(1);
    u.col(1) = ext.col(2);
    u.col(3) = ext.col(3);
    return u;
}

Matrix routing_u_kb(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    // basis order (K, B): v1 -> |00>, v2 -> |01>; build U^dag column-wise
    Matrix partial(4, 2);
    partial.col(0) << c, 0, 0, s;  // cos|00> + sin|11>
    partial.col(1) << 0, s, c, 0;  // cos|10> + sin|01>
    return complete_to_unitary(partial).adjoint();
}

}  // namespace

ProtocolTranscript run_routing(double theta) {
    check_protocol_angle(theta);
    PureState state0 = tensor(PureState({reg::K}, std::size_t{0}), make_link_state(theta));

    ProtocolTranscript t;
    t.audit_cut = {{reg::K, reg::A}, {reg::B}};
    t.initial = {{1.0, state0}};

    PureState s1 = apply_local(state0, routing_u_ka(), {reg::A, reg::K}).normalized();
    t.rounds.push_back({Actor::Bank, "joint unitary U_KA with Alice", 0, false, {{1.0, s1}}});

    PureState s2 = apply_local(s1, routing_u_kb(theta), {reg::K, reg::B}).normalized();
    t.rounds.push_back({Actor::Bank, "joint unitary U_KB with Bob", 0, false, {{1.0, s2}}});

    t.branches = {{1.0, s2, fidelity_to_bell(s2, reg::A, reg::B)}};
    t.deterministic = all_successful(t.branches);
    t.total_bank_bits = 0;
    return t;
}

bool check_single_sided_invariance(double theta, const Matrix& unitary_on_ka) {
    check_protocol_angle(theta);
    if (unitary_on_ka.rows() != 4 || unitary_on_ka.cols() != 4)
        throw std::invalid_argument("expected a 4x4 unitary on K,A");
    if ((unitary_on_ka.adjoint() * unitary_on_ka - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() >
        1e-10)
        throw std::invalid_argument("operator on K,A is not unitary");

    PureState state = tensor(PureState({reg::K}, std::size_t{0}), make_link_state(theta));
    state = apply_local(state, unitary_on_ka, {reg::K, reg::A}).normalized();

    const auto dec = schmidt(state, {{reg::K, reg::A}, {reg::B}});
    const double c2 = std::cos(theta) * std::cos(theta);
    std::vector<double> expected = {std::max(c2, 1.0 - c2), std::min(c2, 1.0 - c2)};
    if (dec.coefficients.size() > expected.size()) return false;
    for (std::size_t i = 0; i < dec.coefficients.size(); ++i)
        if (std::abs(dec.coefficients[i] - expected[i]) > 1e-10) return false;
    return true;
}

}  // namespace bellbank
