// Command-line front end: certification verdicts, boundary and figure data
// tables, detection-scheme Monte Carlo, and measurement planning.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qng/qng.hpp"

using nlohmann::json;

namespace {

constexpr int kExitInvalidInput = 2;
constexpr int kExitNonphysical = 3;
constexpr int kExitNoPlan = 4;

struct StateSpec {
    std::string model;
    double eta = 0.0;
    double nbar = 0.0;
    std::vector<double> probs;
    qng::GaussianStateParams gauss;
};

StateSpec load_state_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw qng::invalid_input("cannot open state spec: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw qng::invalid_input(std::string("bad state spec JSON: ") +
                                 e.what());
    }
    StateSpec spec;
    spec.model = j.at("model").get<std::string>();
    if (spec.model == "noisy_single_photon") {
        spec.eta = j.at("eta").get<double>();
        spec.nbar = j.at("nbar").get<double>();
    } else if (spec.model == "fock_mixture") {
        spec.probs = j.at("probs").get<std::vector<double>>();
    } else if (spec.model == "squeezed_coherent") {
        spec.gauss.V = j.at("V").get<double>();
        spec.gauss.d_x = j.at("dx").get<double>();
        spec.gauss.d_p = j.at("dp").get<double>();
    } else {
        throw qng::invalid_input("unknown model: " + spec.model);
    }
    return spec;
}

qng::PhotonNumberDistribution spec_distribution(const StateSpec& spec) {
    if (spec.model == "noisy_single_photon")
        return qng::noisy_single_photon_distribution({spec.eta, spec.nbar});
    if (spec.model == "fock_mixture") return qng::fock_mixture(spec.probs);
    return qng::squeezed_coherent_distribution(spec.gauss);
}

std::pair<double, double> spec_vacuum_pair(const StateSpec& spec, double T) {
    if (spec.model == "noisy_single_photon")
        return qng::noisy_single_photon_vacuum_pair({spec.eta, spec.nbar}, T);
    if (spec.model == "squeezed_coherent")
        return {qng::p0_gaussian(spec.gauss),
                qng::q0_gaussian(spec.gauss, T)};
    const auto dist = qng::fock_mixture(spec.probs);
    return {dist.p0(), qng::vacuum_after_loss(dist, T)};
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw qng::invalid_input("cannot open output: " + out_path);
    out << text;
}

std::string render_table(const qng::FigureTable& table, bool as_json) {
    std::ostringstream os;
    if (!as_json) {
        table.write_csv(os);
        return os.str();
    }
    table.validate();
    json j;
    j["metadata"] = table.metadata;
    for (const auto& [name, values] : table.columns) j["columns"][name] = values;
    os << j.dump(2) << "\n";
    return os.str();
}

json result_json(const qng::CertificationResult& res) {
    return {{"verdict", res.certified ? "certified" : "not_certified"},
            {"margin", res.margin},
            {"witness",
             {{"lambda", res.witness.lambda},
              {"V", res.witness.V},
              {"W", res.witness.W},
              {"W_G", res.witness.W_G}}},
            {"significance", res.witness.significance}};
}

/// Approximate-criterion threshold: the q0 at which the cubic test
/// turns from false to true, bisected inside the physical band.
double approx_threshold_q0(double p0, double T) {
    auto above = [&](double q0) {
        return qng::approx_qng_test(p0, q0, T).certified;
    };
    double lo = p0, hi = 1.0 - T * (1.0 - p0);
    if (above(lo)) return lo;
    if (!above(hi)) return hi;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (above(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

qng::FigureTable boundary_table(double T, int points) {
    if (points < 2) throw qng::invalid_input("need at least 2 points");
    qng::FigureTable table;
    std::vector<double> V, p0, q0, lambda, W_G, delta, delta_approx;
    for (int i = 0; i < points; ++i) {
        // start at V = 0.05 (p0 ~ 1e-14 already) so lambda stays finite
        const double lg0 = std::log10(0.05);
        const double v =
            std::pow(10.0, lg0 - lg0 * double(i) / double(points - 1));
        const auto bp = qng::boundary_point(std::min(v, 1.0), T);
        V.push_back(bp.V);
        p0.push_back(bp.p0);
        q0.push_back(bp.q0);
        lambda.push_back(bp.lambda);
        W_G.push_back(bp.W_G);
        delta.push_back(1.0 - T * (1.0 - bp.p0) - bp.q0);
        delta_approx.push_back(1.0 - T * (1.0 - bp.p0) -
                               approx_threshold_q0(bp.p0, T));
    }
    table.columns = {{"V", V},         {"p0", p0},
                     {"q0", q0},       {"lambda", lambda},
                     {"W_G", W_G},     {"delta", delta},
                     {"delta_approx", delta_approx}};
    table.metadata["figure_id"] = "boundary";
    table.metadata["T"] = qng::format_double(T);
    return table;
}

qng::FigureTable fig3_table(int points) {
    qng::FigureTable table;
    const std::vector<double> Ts{0.1, 0.25, 0.5, 0.75, 0.9};
    std::vector<double> nbar_col;
    std::vector<std::vector<double>> eta_cols(Ts.size());
    for (int i = 0; i < points; ++i) {
        const double nbar =
            std::pow(10.0, -6.0 + 4.0 * double(i) / double(points - 1));
        nbar_col.push_back(nbar);
        for (std::size_t t = 0; t < Ts.size(); ++t) {
            const auto eta = qng::eta_threshold(nbar, Ts[t]);
            eta_cols[t].push_back(eta ? *eta : 1.0);
        }
    }
    table.columns.emplace_back("nbar", nbar_col);
    for (std::size_t t = 0; t < Ts.size(); ++t)
        table.columns.emplace_back("eta_th_T" + qng::format_double(Ts[t]),
                                   eta_cols[t]);
    table.metadata["figure_id"] = "fig3";
    return table;
}

qng::FigureTable fig4_table(int points) {
    qng::FigureTable table;
    const std::vector<double> Ts{0.25, 0.5, 0.75};
    std::vector<double> V_col;
    for (int i = 0; i < points; ++i)
        V_col.push_back(
            std::pow(10.0, -2.0 + 2.0 * double(i) / double(points - 1)));
    table.columns.emplace_back("V", V_col);
    for (double T : Ts) {
        std::vector<double> p0_col, rds_col;
        for (double v : V_col) {
            const auto bp = qng::boundary_point(std::min(v, 1.0), T);
            p0_col.push_back(bp.p0);
            rds_col.push_back(qng::rds_min(bp.p0, bp.q0));
        }
        table.columns.emplace_back("p0_T" + qng::format_double(T), p0_col);
        table.columns.emplace_back("rds_min_T" + qng::format_double(T),
                                   rds_col);
    }
    table.metadata["figure_id"] = "fig4";
    return table;
}

qng::FigureTable fig5_table(const std::string& panel, int points) {
    qng::FigureTable table;
    table.metadata["figure_id"] = "fig5";
    table.metadata["panel"] = panel;
    const bool vs_eta = (panel == "a" || panel == "c");
    const std::vector<double> nbars =
        (panel == "a" || panel == "b") ? std::vector<double>{1e-2, 1e-3}
                                       : std::vector<double>{1e-3};
    std::vector<double> x_col;
    std::vector<std::vector<double>> cols;
    std::vector<std::string> names;
    for (double nbar : nbars) {
        const std::string tag = "_nbar" + qng::format_double(nbar);
        if (panel == "a" || panel == "b") {
            names.push_back("N_S" + tag);
            names.push_back("N_D" + tag);
        } else {
            names.push_back("R_DS" + tag);
            names.push_back("R_DS_min" + tag);
        }
    }
    cols.resize(names.size());
    for (int i = 0; i < points; ++i) {
        const double x =
            vs_eta ? 0.02 + 0.96 * double(i) / double(points - 1)
                   : 0.02 + 0.96 * double(i) / double(points - 1);
        const double eta = vs_eta ? x : 0.1;
        const double T = vs_eta ? 0.5 : x;
        std::vector<double> row;
        bool ok = true;
        for (double nbar : nbars) {
            const auto [p0, q0] =
                qng::noisy_single_photon_vacuum_pair({eta, nbar}, T);
            std::optional<qng::PlanResult> plan;
            if (p0 > 0.0 && p0 < 1.0 && q0 > p0 && q0 < 1.0)
                plan = qng::required_runs(qng::VacuumPair::make(p0, q0, T));
            if (!plan) {
                ok = false;
                break;
            }
            if (panel == "a" || panel == "b") {
                row.push_back(plan->N_S);
                row.push_back(plan->N_D);
            } else {
                row.push_back(plan->R_DS);
                row.push_back(plan->R_DS_min);
            }
        }
        if (!ok) continue;  // not certifiable at this grid point
        x_col.push_back(x);
        for (std::size_t c = 0; c < row.size(); ++c) cols[c].push_back(row[c]);
    }
    table.columns.emplace_back(vs_eta ? "eta" : "T", x_col);
    for (std::size_t c = 0; c < names.size(); ++c)
        table.columns.emplace_back(names[c], cols[c]);
    return table;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum non-Gaussianity certification from vacuum "
                 "probabilities"};
    app.require_subcommand(1);

    std::string spec_path, out_path, scheme_name = "double", figure_id,
                              panel = "a";
    double T = 0.5, eta = 1.0, eta_A = 1.0, eta_B = 1.0, nbar = 0.0;
    double p0_flag = -1.0, q0_flag = -1.0;
    std::int64_t N = 1000000, K = 0;
    std::uint64_t seed = 1;
    int shards = 1, points = 200;
    bool as_json = false;
    bool have_eta = false, have_nbar = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_path, "Write output to file");
        cmd->add_flag("--json", as_json, "Emit JSON instead of CSV");
    };
    auto add_state = [&](CLI::App* cmd) {
        cmd->add_option("--spec", spec_path, "State spec JSON file");
        cmd->add_option("--eta", eta, "Single-photon fraction")
            ->each([&](const std::string&) { have_eta = true; });
        cmd->add_option("--nbar", nbar, "Poissonian noise mean")
            ->each([&](const std::string&) { have_nbar = true; });
    };

    auto* cmd_boundary = app.add_subcommand(
        "boundary", "Gaussian boundary table at transmittance T");
    cmd_boundary->add_option("--T", T, "Channel transmittance")->required();
    cmd_boundary->add_option("--points", points, "Number of V grid points");
    add_common(cmd_boundary);

    auto* cmd_certify =
        app.add_subcommand("certify", "Certify a modeled state");
    cmd_certify->add_option("--T", T, "Channel transmittance")->required();
    add_state(cmd_certify);
    cmd_certify->add_option("--p0", p0_flag, "Measured vacuum probability");
    cmd_certify->add_option("--q0", q0_flag,
                            "Measured vacuum probability after loss");
    cmd_certify->add_option("--N", N, "Runs behind each probability");
    cmd_certify->add_option("--scheme", scheme_name,
                            "Detection scheme: single or double");
    add_common(cmd_certify);

    auto* cmd_figure = app.add_subcommand("figure", "Figure data tables");
    cmd_figure->add_option("--id", figure_id, "fig2, fig3, fig4 or fig5")
        ->required();
    cmd_figure->add_option("--T", T, "Transmittance (fig2)");
    cmd_figure->add_option("--panel", panel, "fig5 panel: a, b, c or d");
    cmd_figure->add_option("--points", points, "Grid points");
    add_common(cmd_figure);

    auto* cmd_simulate =
        app.add_subcommand("simulate", "Monte Carlo detection run");
    cmd_simulate->add_option("--T", T, "Channel transmittance")->required();
    add_state(cmd_simulate);
    cmd_simulate->add_option("--scheme", scheme_name,
                             "Detection scheme: single or double");
    cmd_simulate->add_option("--eta-A", eta_A, "APD_A efficiency");
    cmd_simulate->add_option("--eta-B", eta_B, "APD_B efficiency");
    cmd_simulate->add_option("--N", N, "Total runs");
    cmd_simulate->add_option("--K", K,
                             "Runs at setting T (single scheme; default N/2)");
    cmd_simulate->add_option("--seed", seed, "RNG seed");
    cmd_simulate->add_option("--shards", shards, "Worker shard count");
    add_common(cmd_simulate);

    auto* cmd_plan =
        app.add_subcommand("plan", "Required measurement counts");
    cmd_plan->add_option("--T", T, "Channel transmittance")->required();
    add_state(cmd_plan);
    cmd_plan->add_option("--p0", p0_flag, "Vacuum probability");
    cmd_plan->add_option("--q0", q0_flag, "Vacuum probability after loss");
    add_common(cmd_plan);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalidInput;
    }

    try {
        auto make_spec = [&]() -> StateSpec {
            if (!spec_path.empty()) return load_state_spec(spec_path);
            if (have_eta || have_nbar) {
                StateSpec s;
                s.model = "noisy_single_photon";
                s.eta = have_eta ? eta : 0.0;
                s.nbar = nbar;
                return s;
            }
            throw qng::invalid_input(
                "state required: pass --spec or --eta/--nbar");
        };
        auto make_pair = [&]() -> qng::VacuumPair {
            if (p0_flag >= 0.0 || q0_flag >= 0.0) {
                if (p0_flag < 0.0 || q0_flag < 0.0)
                    throw qng::invalid_input("--p0 and --q0 go together");
                return qng::VacuumPair::make(p0_flag, q0_flag, T);
            }
            const auto [p0, q0] = spec_vacuum_pair(make_spec(), T);
            return qng::VacuumPair::make(p0, q0, T);
        };
        const qng::Scheme scheme = scheme_name == "single"
                                       ? qng::Scheme::single_apd
                                       : qng::Scheme::double_apd;
        if (scheme_name != "single" && scheme_name != "double")
            throw qng::invalid_input("scheme must be single or double");

        if (*cmd_boundary) {
            emit(render_table(boundary_table(T, points), as_json), out_path);
        } else if (*cmd_certify) {
            auto pair = make_pair();
            pair.runs = N;
            const auto res = qng::certify(pair, scheme);
            emit(result_json(res).dump(2) + "\n", out_path);
        } else if (*cmd_figure) {
            qng::FigureTable table;
            if (figure_id == "fig2")
                table = boundary_table(T, points);
            else if (figure_id == "fig3")
                table = fig3_table(points);
            else if (figure_id == "fig4")
                table = fig4_table(points);
            else if (figure_id == "fig5")
                table = fig5_table(panel, points);
            else
                throw qng::invalid_input("unknown figure id: " + figure_id);
            emit(render_table(table, as_json), out_path);
        } else if (*cmd_simulate) {
            const auto spec = make_spec();
            const auto dist = spec_distribution(spec);
            json j;
            double p0_hat, q0_hat, lambda;
            if (scheme == qng::Scheme::double_apd) {
                const auto tally = qng::simulate_double(dist, {T, eta_A, eta_B},
                                                        N, seed, shards);
                j["tally"] = {{"n_none", tally.n_none},
                              {"n_b_only", tally.n_b_only},
                              {"n_a", tally.n_a},
                              {"N", tally.N},
                              {"seed", tally.seed}};
                p0_hat = double(tally.n_none) / double(N);
                q0_hat = 1.0 - double(tally.n_a) / double(N);
            } else {
                if (K == 0) K = N / 2;
                const auto tally =
                    qng::simulate_single(dist, T, eta_A, N, K, seed, shards);
                j["tally"] = {{"k0_full", tally.k0_full},
                              {"k0_open", tally.k0_open},
                              {"N", tally.N},
                              {"K", tally.K},
                              {"seed", tally.seed}};
                q0_hat = double(tally.k0_full) / double(K);
                p0_hat = double(tally.k0_open) / double(N - K);
            }
            j["estimate"] = {{"p0", p0_hat}, {"q0", q0_hat}};
            // Project the noisy estimate onto the physical region before
            // certification; sampling noise can overshoot the exact bounds.
            double p0_c = std::min(std::max(p0_hat, 1e-12), 1.0);
            double q0_c = std::min(
                std::max(q0_hat, p0_c), 1.0 - T * (1.0 - p0_c));
            auto pair = qng::VacuumPair::make(p0_c, q0_c, T, N);
            const auto res = qng::certify(pair, scheme);
            j["certification"] = result_json(res);
            lambda = res.witness.lambda;
            j["certification"]["witness"]["lambda"] = lambda;
            emit(j.dump(2) + "\n", out_path);
        } else if (*cmd_plan) {
            const auto pair = make_pair();
            const auto plan = qng::required_runs(pair);
            if (!plan) {
                std::cerr << "state not certifiable: no finite plan\n";
                return kExitNoPlan;
            }
            json j = {{"N_S", plan->N_S},
                      {"N_D", plan->N_D},
                      {"N_S_ceil", std::ceil(plan->N_S)},
                      {"N_D_ceil", std::ceil(plan->N_D)},
                      {"lambda_S", plan->lambda_S},
                      {"lambda_D", plan->lambda_D},
                      {"R_DS", plan->R_DS},
                      {"R_DS_min", plan->R_DS_min},
                      {"lambda0", plan->lambda0},
                      {"K_opt_fraction", plan->K_opt_fraction}};
            emit(j.dump(2) + "\n", out_path);
        }
    } catch (const qng::nonphysical_pair& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNonphysical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    }
    return 0;
}
