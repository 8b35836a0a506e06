#include "bellbank/majorize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bellbank {

namespace {
constexpr double kSlack = 1e-12;
constexpr double kSupportCutoff = 1e-14;
constexpr double kMatchCutoff = 1e-12;

std::vector<double> padded(const SpectrumVector& v, std::size_t d) {
    std::vector<double> out = v.values();
    out.resize(d, 0.0);
    return out;
}
}  // namespace

SpectrumVector::SpectrumVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("empty spectrum");
    double sum = 0.0;
    for (auto& v : values_) {
        if (v < -kSlack || v > 1.0 + kSlack)
            throw std::invalid_argument("spectrum entry outside [0, 1]");
        v = std::clamp(v, 0.0, 1.0);
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSlack)
        throw std::invalid_argument("spectrum does not sum to 1");
    for (auto& v : values_) v /= sum;
    std::sort(values_.begin(), values_.end(), std::greater<>());
}

SpectrumVector SpectrumVector::bell_target(std::size_t dim) {
    if (dim < 2) throw std::invalid_argument("Bell target needs dimension >= 2");
    std::vector<double> v(dim, 0.0);
    v[0] = v[1] = 0.5;
    return SpectrumVector(std::move(v));
}

DoublyStochasticMatrix::DoublyStochasticMatrix(Eigen::MatrixXd entries)
    : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols())
        throw std::invalid_argument("doubly stochastic matrix must be square");
    const int d = static_cast<int>(entries_.rows());
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (entries_(i, j) < -1e-10)
                throw std::invalid_argument("negative entry at (" + std::to_string(i) + "," +
                                            std::to_string(j) + ")");
    for (int i = 0; i < d; ++i) {
        const double rs = entries_.row(i).sum();
        if (std::abs(rs - 1.0) > 1e-10)
            throw std::invalid_argument("row " + std::to_string(i) + " sums to " +
                                        std::to_string(rs));
    }
    for (int j = 0; j < d; ++j) {
        const double cs = entries_.col(j).sum();
        if (std::abs(cs - 1.0) > 1e-10)
            throw std::invalid_argument("column " + std::to_string(j) + " sums to " +
                                        std::to_string(cs));
    }
}

Eigen::MatrixXd Permutation::matrix() const {
    const int d = size();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) p(i, map[i]) = 1.0;
    return p;
}

Permutation Permutation::identity(int d) {
    Permutation p;
    p.map.resize(d);
    std::iota(p.map.begin(), p.map.end(), 0);
    return p;
}

Eigen::MatrixXd BvnDecomposition::reconstruct() const {
    if (terms.empty()) throw std::logic_error("empty decomposition");
    const int d = terms.front().permutation.size();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
    for (const auto& t : terms) acc += t.weight * t.permutation.matrix();
    return acc;
}

bool majorized_by(const SpectrumVector& source, const SpectrumVector& target) {
    const std::size_t d = std::max(source.size(), target.size());
    const auto s = padded(source, d);
    const auto t = padded(target, d);
    double ps = 0.0, pt = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        ps += s[k];
        pt += t[k];
        if (ps > pt + kSlack) return false;
    }
    return true;
}

double vidal_pmax(const SpectrumVector& source, const SpectrumVector& target) {
    const std::size_t d = std::max(source.size(), target.size());
    const auto s = padded(source, d);
    const auto t = padded(target, d);
    double best = 1.0;
    double tail_s = 0.0, tail_t = 0.0;
    for (std::size_t k = d; k-- > 0;) {
        tail_s += s[k];
        tail_t += t[k];
        if (tail_t <= kSupportCutoff) continue;
        best = std::min(best, tail_s / tail_t);
    }
    return std::clamp(best, 0.0, 1.0);
}

double bell_pmax(double lambda_max) {
    return std::clamp(std::min(1.0, 2.0 * (1.0 - lambda_max)), 0.0, 1.0);
}

namespace {

void report_infeasible(const std::vector<double>& s, const std::vector<double>& t) {
    double ps = 0.0, pt = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        ps += s[k];
        pt += t[k];
        if (ps > pt + kSlack)
            throw infeasible_error("source spectrum is not majorized by target (partial sum " +
                                       std::to_string(k + 1) + ")",
                                   ps, pt);
    }
}

}  // namespace

DoublyStochasticMatrix solve_doubly_stochastic(const SpectrumVector& source,
                                               const SpectrumVector& target) {
    const std::size_t d = std::max(source.size(), target.size());
    const auto x = padded(source, d);
    auto cur = padded(target, d);
    if (!majorized_by(source, target)) report_infeasible(x, cur);

    Eigen::MatrixXd dmat = Eigen::MatrixXd::Identity(d, d);
    // T-transform chain: each pass moves surplus from the first coordinate
    // where cur exceeds x onto the first later coordinate where it falls short,
    // matching at least one coordinate exactly per step.
    for (std::size_t step = 0; step + 1 < d + d; ++step) {
        std::size_t j = d;
        for (std::size_t i = 0; i < d; ++i)
            if (cur[i] - x[i] > kSlack) {
                j = i;
                break;
            }
        if (j == d) break;  // converged
        std::size_t k = d;
        for (std::size_t i = j + 1; i < d; ++i)
            if (x[i] - cur[i] > kSlack) {
                k = i;
                break;
            }
        if (k == d) break;  // remaining discrepancy is numerical dust

        const double delta = std::min(cur[j] - x[j], x[k] - cur[k]);
        const double t = delta / (cur[j] - cur[k]);
        Eigen::MatrixXd tt = Eigen::MatrixXd::Identity(d, d);
        tt(j, j) = tt(k, k) = 1.0 - t;
        tt(j, k) = tt(k, j) = t;
        cur[j] -= delta;
        cur[k] += delta;
        dmat = tt * dmat;
    }
    return DoublyStochasticMatrix(dmat);
}

namespace {

// Kuhn's augmenting-path matching on the support graph; rows scanned in
// increasing index order so the decomposition is reproducible.
bool try_augment(int row, const Eigen::MatrixXd& r, std::vector<int>& col_owner,
                 std::vector<bool>& visited) {
    const int d = static_cast<int>(r.rows());
    for (int c = 0; c < d; ++c) {
        if (r(row, c) <= kMatchCutoff || visited[c]) continue;
        visited[c] = true;
        if (col_owner[c] < 0 || try_augment(col_owner[c], r, col_owner, visited)) {
            col_owner[c] = row;
            return true;
        }
    }
    return false;
}

}  // namespace

BvnDecomposition bvn_decompose(const DoublyStochasticMatrix& d_matrix) {
    const int d = d_matrix.dim();
    Eigen::MatrixXd r = d_matrix.entries();
    const int max_terms = (d - 1) * (d - 1) + 1;

    BvnDecomposition out;
    // Stop once the residual's common row sum is dust. Above this level the
    // thresholded support graph still satisfies Hall's condition, so a perfect
    // matching must exist.
    while (r.sum() / d > d * d * kMatchCutoff) {
        std::vector<int> col_owner(d, -1);
        for (int row = 0; row < d; ++row) {
            std::vector<bool> visited(d, false);
            if (!try_augment(row, r, col_owner, visited))
                throw std::runtime_error(
                    "no perfect matching in a positive residual; input was not doubly stochastic");
        }
        Permutation perm;
        perm.map.assign(d, -1);
        for (int c = 0; c < d; ++c) perm.map[col_owner[c]] = c;

        double p = 2.0;
        for (int i = 0; i < d; ++i) p = std::min(p, r(i, perm.map[i]));
        for (int i = 0; i < d; ++i) r(i, perm.map[i]) -= p;

        out.terms.push_back({p, std::move(perm)});
        if (static_cast<int>(out.terms.size()) > max_terms)
            throw std::runtime_error("Birkhoff decomposition exceeded the (d-1)^2+1 term bound");
    }
    if (out.terms.empty()) out.terms.push_back({1.0, Permutation::identity(d)});
    return out;
}

NielsenPovm build_nielsen_povm(const SpectrumVector& source, const SpectrumVector& target) {
    const std::size_t d = std::max(source.size(), target.size());
    const auto lam = padded(source, d);
    const auto mu = padded(target, d);
    if (!majorized_by(source, target)) report_infeasible(lam, mu);

    const auto decomposition = bvn_decompose(solve_doubly_stochastic(source, target));

    NielsenPovm out;
    for (const auto& term : decomposition.terms) {
        Matrix m = Matrix::Zero(d, d);
        for (std::size_t j = 0; j < d; ++j) {
            if (lam[j] > kSupportCutoff) {
                const int i = term.permutation.map[j];
                m(i, j) = std::sqrt(term.weight * mu[i] / lam[j]);
            } else {
                m(j, j) = std::sqrt(term.weight);
            }
        }
        out.povm.operators.push_back(std::move(m));
        std::string label = "P(";
        for (int i = 0; i < term.permutation.size(); ++i)
            label += (i ? " " : "") + std::to_string(term.permutation.map[i]);
        label += ")";
        out.povm.outcome_labels.push_back(label);
        out.corrections.push_back(term.permutation);
        out.weights.push_back(term.weight);
    }
    return out;
}

PovmEnsemble build_procrustean_filter(const SpectrumVector& source) {
    const std::size_t d = source.size();
    const double l1 = source.lambda_max();

    PovmEnsemble povm;
    if (l1 <= 0.5 + kSlack) {
        povm.operators.push_back(Matrix::Identity(d, d));
        povm.outcome_labels.push_back("success");
        return povm;
    }

    Matrix succ = Matrix::Zero(d, d);
    Matrix fail = Matrix::Zero(d, d);
    succ(0, 0) = std::sqrt((1.0 - l1) / l1);
    fail(0, 0) = std::sqrt((2.0 * l1 - 1.0) / l1);
    for (std::size_t j = 1; j < d; ++j) succ(j, j) = 1.0;
    povm.operators = {std::move(succ), std::move(fail)};
    povm.outcome_labels = {"success", "fail"};
    return povm;
}

}  // namespace bellbank
