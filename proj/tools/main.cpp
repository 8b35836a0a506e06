// Command-line surface: feasibility checks, protocol simulation, curve and
// phase-diagram sweeps, BvN decomposition, the minimax search, and channel
// geometry. Exit codes: 0 ok/feasible, 2 infeasible, 1 usage, 3 internal.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <regex>
#include <sstream>

#include <CLI11.hpp>

#include "bellbank/channel.hpp"
#include "bellbank/feasibility.hpp"
#include "bellbank/majorize.hpp"
#include "bellbank/protocols.hpp"

namespace {

using namespace bellbank;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitInternal = 3;

class usage_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Angles come as plain radians or as pi literals ("pi", "pi/8", "3*pi/16") so
// feasibility boundaries are not lost to decimal drift.
double parse_angle(const std::string& text) {
    static const std::regex pi_form(
        R"(^\s*(?:([0-9]+(?:\.[0-9]*)?)\s*\*\s*)?pi(?:\s*/\s*([0-9]+(?:\.[0-9]*)?))?\s*$)");
    std::smatch m;
    if (std::regex_match(text, m, pi_form)) {
        const double num = m[1].matched ? std::stod(m[1].str()) : 1.0;
        const double den = m[2].matched ? std::stod(m[2].str()) : 1.0;
        if (den == 0.0) throw usage_error("angle denominator is zero: " + text);
        return num * std::numbers::pi / den;
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw usage_error("cannot parse angle: " + text);
        return v;
    } catch (const std::exception&) {
        throw usage_error("cannot parse angle: " + text);
    }
}

std::string g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// All output is assembled in memory first; files appear only on success and
// via a temp + rename so interrupted runs leave nothing partial behind.
void emit(const std::string& content, const std::string& path) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp);
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("write to " + tmp + " failed");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot rename " + tmp + " to " + path);
    }
}

struct WParams {
    double alpha;
    double beta;
    double gamma;
};

// beta^2 is always required; gamma^2 defaults to the symmetric slice
// alpha = gamma, i.e. gamma^2 = (1 - beta^2) / 2.
WParams resolve_w(double beta2, double gamma2) {
    if (!(beta2 > 0.0 && beta2 < 1.0)) throw usage_error("--beta2 must lie in (0, 1)");
    if (gamma2 < 0.0) gamma2 = (1.0 - beta2) / 2.0;
    const double alpha2 = 1.0 - beta2 - gamma2;
    if (!(gamma2 > 0.0 && alpha2 > 0.0))
        throw usage_error("W coefficients must remain strictly positive");
    return {std::sqrt(alpha2), std::sqrt(beta2), std::sqrt(gamma2)};
}

int cmd_feasibility(const std::string& resource, const std::string& model, double theta,
                    double alpha2, double beta2, double gamma2) {
    FeasibilityResult r;
    if (resource == "ghz") {
        if (alpha2 < 0.0) throw usage_error("--alpha2 is required for the GHZ resource");
        r = ghz_feasible(theta, std::sqrt(alpha2));
    } else if (resource == "w") {
        if (model == "transfer") {
            if (beta2 < 0.0) throw usage_error("--beta2 is required for the W resource");
            r = w_trans_feasible(theta, std::sqrt(beta2));
        } else {
            const auto p = resolve_w(beta2, gamma2);
            r = w_meas_feasible(theta, p.alpha, p.beta, p.gamma);
        }
    } else {
        throw usage_error("unknown --resource: " + resource);
    }

    std::ostringstream out;
    out << "constraint: " << r.constraint << "\n"
        << "binding_value: " << g9(r.binding_value) << "\n"
        << "bound: " << g9(r.bound) << "\n"
        << "margin: " << g9(r.margin) << "\n"
        << "feasible: " << (r.feasible ? "yes" : "no") << "\n";
    std::cout << out.str();
    return r.feasible ? kExitOk : kExitInfeasible;
}

int cmd_simulate(const std::string& protocol, double theta, double alpha2, double beta2,
                 double gamma2, double c1, bool probabilistic, bool dump_transcript) {
    ProtocolTranscript t;
    if (protocol == "ghz-meas" || protocol == "ghz-deferred" || protocol == "ghz-transfer") {
        if (alpha2 < 0.0) throw usage_error("--alpha2 is required for GHZ protocols");
        const double alpha = std::sqrt(alpha2);
        if (protocol == "ghz-meas")
            t = run_ghz_bank_measures(theta, alpha, probabilistic);
        else if (protocol == "ghz-deferred")
            t = run_ghz_deferred(theta, alpha);
        else
            t = run_ghz_transfer(theta, alpha, probabilistic);
    } else if (protocol == "w-meas" || protocol == "w-transfer") {
        const auto p = resolve_w(beta2, gamma2);
        t = (protocol == "w-meas")
                ? run_w_bank_measures(theta, p.alpha, p.beta, p.gamma, probabilistic)
                : run_w_transfer(theta, p.alpha, p.beta, p.gamma, probabilistic);
    } else if (protocol == "catalysis") {
        t = run_catalysis(theta, c1);
    } else if (protocol == "routing") {
        t = run_routing(theta);
    } else {
        throw usage_error("unknown --protocol: " + protocol);
    }

    std::ostringstream out;
    if (dump_transcript) {
        int i = 0;
        for (const auto& r : t.rounds)
            out << "round " << ++i << ": " << to_string(r.actor) << " " << r.description
                << " (classical bits: " << r.classical_bits
                << (r.locc ? "" : ", non-local") << ")\n";
    }
    char line[128];
    for (const auto& b : t.branches) {
        std::snprintf(line, sizeof(line), "branch p=%.6f fidelity %.6f\n", b.probability,
                      b.bell_fidelity);
        out << line;
    }
    out << "bank_bits: " << t.total_bank_bits << "\n"
        << "deterministic: " << (t.deterministic ? "yes" : "no") << "\n"
        << "success_probability: " << g9(t.success_probability()) << "\n"
        << "monotonicity_audit: " << (passes_monotonicity_audit(t) ? "pass" : "fail") << "\n";
    std::cout << out.str();
    return kExitOk;
}

int cmd_pmax_curve(const std::string& family, double theta, double lo, double hi,
                   std::size_t samples, const std::string& output, bool serial) {
    if (samples == 0) throw usage_error("--samples must be positive");
    const auto params = linspace(lo, hi, samples);
    const auto link = make_link_state(theta);
    const ExecMode mode = serial ? ExecMode::Serial : ExecMode::Parallel;

    struct Row {
        double param, formula, simulated;
    };
    std::function<Row(std::size_t)> cell;
    const Bipartition cut5{{reg::A, reg::Ap, reg::K}, {reg::B, reg::Bp}};
    const Bipartition cut4{{reg::A, reg::Ap}, {reg::B, reg::Bp}};

    if (family == "ghz") {
        cell = [&](std::size_t i) {
            const double a2 = params[i];
            // alpha = 1 is the degenerate product resource |000>
            const PureState resource = (a2 >= 1.0)
                                           ? PureState({reg::Ap, reg::Bp, reg::K}, std::size_t{0})
                                           : make_ghz(std::sqrt(a2));
            const auto joint = tensor(link, resource);
            return Row{a2, ghz_pmax(theta, std::sqrt(a2)),
                       bell_pmax(schmidt_lambda_max(joint, cut5))};
        };
    } else if (family == "w-meas") {
        cell = [&](std::size_t i) {
            const double b2 = params[i];
            const auto p = resolve_w(b2, -1.0);
            const auto joint = tensor(link, make_w(p.alpha, p.beta, p.gamma));
            const double s = 1.0 / std::sqrt(2.0);
            Vector plus(2);
            plus << s, s;
            const auto [w, branch] = project_qubit(joint, reg::K, plus);
            return Row{b2, w_meas_pmax(theta, p.beta, p.gamma),
                       bell_pmax(schmidt_lambda_max(branch, cut4))};
        };
    } else if (family == "w-trans") {
        cell = [&](std::size_t i) {
            const double b2 = params[i];
            const auto p = resolve_w(b2, -1.0);
            const auto joint = tensor(link, make_w(p.alpha, p.beta, p.gamma));
            return Row{b2, w_trans_pmax(theta, p.beta),
                       bell_pmax(schmidt_lambda_max(joint, cut5))};
        };
    } else {
        throw usage_error("unknown --family: " + family);
    }

    const auto rows = evaluate_cells(samples, cell, mode);
    std::ostringstream csv;
    csv << "param,theta,pmax_formula,pmax_simulated\n";
    for (const auto& r : rows)
        csv << g9(r.param) << "," << g9(theta) << "," << g9(r.formula) << ","
            << g9(r.simulated) << "\n";
    emit(csv.str(), output);
    return kExitOk;
}

int cmd_phase_diagram(const PhaseDiagramConfig& config, const std::string& output) {
    const auto grid = scan_phase_diagram(config);
    std::ostringstream csv;
    csv << "theta,beta2,meas_feasible,trans_feasible,separation\n";
    for (const auto& c : grid.cells) {
        const bool separation = c.trans_feasible && !c.meas_feasible;
        csv << g9(c.theta) << "," << g9(c.beta2) << "," << (c.meas_feasible ? 1 : 0) << ","
            << (c.trans_feasible ? 1 : 0) << "," << (separation ? 1 : 0) << "\n";
    }
    emit(csv.str(), output);
    return kExitOk;
}

Eigen::MatrixXd parse_matrix(std::string text) {
    for (auto& ch : text)
        if (ch == ';') ch = '\n';
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::istringstream fields(line);
        std::vector<double> row;
        double v;
        while (fields >> v) row.push_back(v);
        if (!fields.eof()) throw usage_error("matrix row has a non-numeric entry: " + line);
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw usage_error("matrix input is empty");
    const std::size_t d = rows.size();
    Eigen::MatrixXd m(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        if (rows[i].size() != d)
            throw usage_error("matrix is not square: row " + std::to_string(i) + " has " +
                              std::to_string(rows[i].size()) + " entries");
        for (std::size_t j = 0; j < d; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

int cmd_bvn(const std::string& inline_matrix, const std::string& file) {
    std::string text = inline_matrix;
    if (!file.empty()) {
        std::ifstream f(file);
        if (!f) throw usage_error("cannot open matrix file: " + file);
        std::ostringstream buf;
        buf << f.rdbuf();
        text = buf.str();
    }
    if (text.empty()) throw usage_error("provide --matrix or --file");

    const DoublyStochasticMatrix d(parse_matrix(text));
    const auto dec = bvn_decompose(d);

    std::ostringstream out;
    for (const auto& term : dec.terms) {
        out << "term weight=" << g9(term.weight) << " permutation=(";
        for (int i = 0; i < term.permutation.size(); ++i)
            out << (i ? " " : "") << term.permutation.map[i];
        out << ")\n";
    }
    const double residual = (dec.reconstruct() - d.entries()).cwiseAbs().maxCoeff();
    out << "terms: " << dec.terms.size() << "\n"
        << "reconstruction_residual: " << g9(residual) << "\n";
    std::cout << out.str();
    return kExitOk;
}

int cmd_mu_star(const std::string& resource, double theta, double alpha2, double beta2,
                double gamma2, int polar, int azimuth, bool serial) {
    PureState bank = PureState({reg::Ap, reg::Bp, reg::K}, std::size_t{0});
    if (resource == "ghz") {
        if (alpha2 < 0.0) throw usage_error("--alpha2 is required for the GHZ resource");
        bank = make_ghz(std::sqrt(alpha2));
    } else if (resource == "w") {
        const auto p = resolve_w(beta2, gamma2);
        bank = make_w(p.alpha, p.beta, p.gamma);
    } else if (resource != "product") {
        throw usage_error("unknown --resource: " + resource);
    }

    MuStarConfig config;
    config.polar_samples = polar;
    config.azimuth_samples = azimuth;
    config.mode = serial ? ExecMode::Serial : ExecMode::Parallel;
    const auto r = minimax_mu_star(make_link_state(theta), bank, config);

    std::ostringstream out;
    out << "mu_star_upper: " << g9(r.mu_star_upper) << "\n"
        << "best_polar: " << g9(r.polar) << "\n"
        << "best_azimuth: " << g9(r.azimuth) << "\n"
        << "feasible: " << (r.feasible ? "yes" : "no") << "\n";
    std::cout << out.str();
    return r.feasible ? kExitOk : kExitInfeasible;
}

int cmd_channel(double theta, const std::string& bloch) {
    const auto t = effective_contraction(theta);
    const auto ell = image_ellipsoid(t);

    std::ostringstream out;
    out << "contraction_diag: " << g9(t.t(0, 0)) << " " << g9(t.t(1, 1)) << " "
        << g9(t.t(2, 2)) << "\n"
        << "ellipsoid_semi_axes: " << g9(ell.semi_axes[0]) << " " << g9(ell.semi_axes[1]) << " "
        << g9(ell.semi_axes[2]) << "\n"
        << "volume: " << g9(ellipsoid_volume(theta)) << "\n"
        << "singlet_fraction: " << g9(singlet_fraction(theta)) << "\n";

    if (!bloch.empty()) {
        std::istringstream in(bloch);
        std::string part;
        std::vector<double> v;
        while (std::getline(in, part, ',')) v.push_back(std::stod(part));
        if (v.size() != 3) throw usage_error("--bloch expects x,y,z");
        const Bloch output = simulate_teleport_channel(theta, Bloch(v[0], v[1], v[2]));
        out << "output_bloch: " << g9(output(0)) << " " << g9(output(1)) << " "
            << g9(output(2)) << "\n";
    }
    std::cout << out.str();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bell-pair restoration toolkit for non-maximally entangled links"};
    app.require_subcommand(1);

    std::string theta_text, resource = "ghz", model = "meas", protocol, family = "ghz";
    std::string output, matrix_text, matrix_file, bloch;
    double alpha2 = -1.0, beta2 = -1.0, gamma2 = -1.0, c1 = 0.5;
    double param_min = 0.5, param_max = 1.0;
    std::size_t samples = 200;
    bool probabilistic = false, dump_transcript = false, serial = false;
    int polar = 64, azimuth = 128;
    PhaseDiagramConfig pd{0.05, std::numbers::pi / 4, 200, 0.005, 0.995, 200};
    std::string theta_min_text = "0.05", theta_max_text = "pi/4";

    auto* feas = app.add_subcommand("feasibility", "evaluate a closed-form feasibility bound");
    feas->add_option("--resource", resource, "ghz or w");
    feas->add_option("--model", model, "meas or transfer (w only)");
    feas->add_option("--theta", theta_text, "link angle")->required();
    feas->add_option("--alpha2", alpha2, "GHZ weight alpha^2");
    feas->add_option("--beta2", beta2, "W weight beta^2");
    feas->add_option("--gamma2", gamma2, "W weight gamma^2 (default: symmetric slice)");

    auto* sim = app.add_subcommand("simulate", "run a restoration protocol end to end");
    sim->add_option("--protocol", protocol,
                    "ghz-meas | ghz-deferred | ghz-transfer | w-meas | w-transfer | catalysis "
                    "| routing")
        ->required();
    sim->add_option("--theta", theta_text, "link angle")->required();
    sim->add_option("--alpha2", alpha2, "GHZ weight alpha^2");
    sim->add_option("--beta2", beta2, "W weight beta^2");
    sim->add_option("--gamma2", gamma2, "W weight gamma^2 (default: symmetric slice)");
    sim->add_option("--c1", c1, "catalyst weight c1");
    sim->add_flag("--probabilistic", probabilistic, "best-effort run when infeasible");
    sim->add_flag("--transcript", dump_transcript, "print the round-by-round transcript");

    auto* curve = app.add_subcommand("pmax-curve", "optimal success probability sweep (CSV)");
    curve->add_option("--family", family, "ghz | w-meas | w-trans");
    curve->add_option("--theta", theta_text, "link angle")->required();
    curve->add_option("--param-min", param_min, "sweep start");
    curve->add_option("--param-max", param_max, "sweep end");
    curve->add_option("--samples", samples, "sample count");
    curve->add_option("--output", output, "CSV path (stdout when omitted)");
    curve->add_flag("--serial", serial, "disable the parallel scan path");

    auto* phase = app.add_subcommand("phase-diagram", "W symmetric-slice feasibility grid (CSV)");
    phase->add_option("--theta-min", theta_min_text, "theta range start");
    phase->add_option("--theta-max", theta_max_text, "theta range end");
    phase->add_option("--theta-samples", pd.theta_samples, "theta samples");
    phase->add_option("--beta2-min", pd.beta2_lo, "beta^2 range start");
    phase->add_option("--beta2-max", pd.beta2_hi, "beta^2 range end");
    phase->add_option("--beta2-samples", pd.beta2_samples, "beta^2 samples");
    phase->add_option("--output", output, "CSV path (stdout when omitted)");
    phase->add_flag("--serial", serial, "disable the parallel scan path");

    auto* bvn = app.add_subcommand("bvn", "Birkhoff-von Neumann decomposition");
    bvn->add_option("--matrix", matrix_text, "rows of space-separated reals, ';' between rows");
    bvn->add_option("--file", matrix_file, "file with one matrix row per line");

    auto* mu = app.add_subcommand("mu-star", "minimax measurement search on K");
    mu->add_option("--resource", resource, "ghz | w | product");
    mu->add_option("--theta", theta_text, "link angle")->required();
    mu->add_option("--alpha2", alpha2, "GHZ weight alpha^2");
    mu->add_option("--beta2", beta2, "W weight beta^2");
    mu->add_option("--gamma2", gamma2, "W weight gamma^2 (default: symmetric slice)");
    mu->add_option("--polar", polar, "polar grid samples");
    mu->add_option("--azimuth", azimuth, "azimuthal grid samples");
    mu->add_flag("--serial", serial, "disable the parallel scan path");

    auto* chan = app.add_subcommand("channel", "teleportation channel geometry");
    chan->add_option("--theta", theta_text, "link angle")->required();
    chan->add_option("--bloch", bloch, "input Bloch vector x,y,z to push through");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (feas->parsed())
            return cmd_feasibility(resource, model, parse_angle(theta_text), alpha2, beta2,
                                   gamma2);
        if (sim->parsed())
            return cmd_simulate(protocol, parse_angle(theta_text), alpha2, beta2, gamma2, c1,
                                probabilistic, dump_transcript);
        if (curve->parsed())
            return cmd_pmax_curve(family, parse_angle(theta_text), param_min, param_max,
                                  samples, output, serial);
        if (phase->parsed()) {
            pd.theta_lo = parse_angle(theta_min_text);
            pd.theta_hi = parse_angle(theta_max_text);
            pd.mode = serial ? ExecMode::Serial : ExecMode::Parallel;
            return cmd_phase_diagram(pd, output);
        }
        if (bvn->parsed()) return cmd_bvn(matrix_text, matrix_file);
        if (mu->parsed())
            return cmd_mu_star(resource, parse_angle(theta_text), alpha2, beta2, gamma2, polar,
                               azimuth, serial);
        if (chan->parsed()) return cmd_channel(parse_angle(theta_text), bloch);
        return kExitUsage;
    } catch (const infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << " (value " << g9(e.binding_value)
                  << ", bound " << g9(e.bound) << ")\n";
        return kExitInfeasible;
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::length_error& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
