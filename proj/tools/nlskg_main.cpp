// Command-line driver: validation sweeps, residual sweeps, identity suites,
// energy traces, non-resonance scans, and coefficient derivation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nlskg/harness.hpp"

namespace {

using namespace nlskg;

struct CommonOpts {
    std::string config_path;
    std::string eps_csv;
    std::string out_dir;
    double k0 = -1.0;
    int s = -1;
    double T0 = -1.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool dt_halving = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON config file (schema in README)");
    cmd->add_option("--eps", o.eps_csv, "comma-separated epsilon list, overrides config");
    cmd->add_option("--k0", o.k0, "carrier wavenumber");
    cmd->add_option("--s", o.s, "Sobolev index");
    cmd->add_option("--T0", o.T0, "slow-time horizon");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "PRNG seed")->each([&](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_flag("--dt-halving-check", o.dt_halving, "append a dt self-convergence check");
}

ExperimentConfig resolve(const CommonOpts& o) {
    ExperimentConfig cfg;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw ConfigError("cannot read config file " + o.config_path);
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = config_from_json(ss.str());
    }
    if (!o.eps_csv.empty()) {
        cfg.eps_list.clear();
        std::stringstream ss(o.eps_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) cfg.eps_list.push_back(std::stod(tok));
    }
    if (o.k0 > 0.0) cfg.k0 = o.k0;
    if (o.s >= 0) cfg.s = o.s;
    if (o.T0 > 0.0) cfg.T0 = o.T0;
    if (o.seed_set) cfg.seed = o.seed;
    if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
    cfg.dt_halving_check = cfg.dt_halving_check || o.dt_halving;
    cfg.validate();
    return cfg;
}

void ensure_dir(const std::string& dir) {
    if (!dir.empty()) std::filesystem::create_directories(dir);
}

std::string joined(const std::string& dir, const std::string& name) {
    return dir.empty() ? name : (std::filesystem::path(dir) / name).string();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path);
    out << text << '\n';
}

int run_validate(const ExperimentConfig& cfg) {
    const SweepReport report = run_validation(cfg);
    ensure_dir(cfg.output_dir);
    write_file(joined(cfg.output_dir, "report.json"), report_to_json(report));
    write_validation_csv(report, joined(cfg.output_dir, "validation.csv"));
    for (const auto& r : report.records) {
        std::cout << "eps=" << r.eps << "  n=" << r.grid_n << "  sup_h" << cfg.s << "="
                  << r.sup_hs << "  sup_linf=" << r.sup_linf << "  ham_drift="
                  << r.hamiltonian_drift << "  runtime=" << r.runtime_sec << "s"
                  << (r.blew_up ? "  BLOWUP" : "") << '\n';
    }
    std::cout << "H^s slope=" << report.hs_fit.slope << " (r2=" << report.hs_fit.r2
              << "), Linf slope=" << report.linf_fit.slope << '\n';
    if (report.has_dt_check)
        std::cout << "dt halving ratio=" << report.dt_check.ratio << " (expect ~16)\n";
    std::cout << (report.pass() ? "PASS" : "FAIL") << '\n';
    return report.pass() ? 0 : 1;
}

int run_residual(const ExperimentConfig& cfg) {
    const ResidualReport report = run_residual_sweep(cfg);
    ensure_dir(cfg.output_dir);
    write_file(joined(cfg.output_dir, "report.json"), report_to_json(report));
    write_residual_csv(report, joined(cfg.output_dir, "residual.csv"));
    for (const auto& r : report.records)
        std::cout << "eps=" << r.eps << "  |Res|_H" << cfg.s << "=" << r.total_hs
                  << "  order_gap=" << r.order_gap_hs << "  psi_check=" << r.psi_check << '\n';
    std::cout << "residual slope=" << report.residual_fit.slope
              << ", order-gap slope=" << report.order_gap_fit.slope
              << ", psi-check slope=" << report.psi_check_fit.slope << '\n';
    std::cout << (report.pass() ? "PASS" : "FAIL") << '\n';
    return report.pass() ? 0 : 1;
}

int run_identities(const ExperimentConfig& cfg) {
    const IdentityReport report = run_identity_suite(cfg);
    ensure_dir(cfg.output_dir);
    write_file(joined(cfg.output_dir, "report.json"), report_to_json(report));
    std::cout << "normal-form max=" << report.max_normal_form
              << ", adjoint max=" << report.max_adjoint << ", parts max=("
              << report.max_parts_50 << ", " << report.max_parts_51 << ")\n";
    std::cout << "equivalence ratio in [" << report.min_equiv_ratio << ", "
              << report.max_equiv_ratio << "]\n";
    std::cout << (report.pass() ? "PASS" : "FAIL") << '\n';
    return report.pass() ? 0 : 1;
}

int run_energy_cmd(const ExperimentConfig& cfg) {
    const GronwallReport report = run_energy_check(cfg);
    ensure_dir(cfg.output_dir);
    write_file(joined(cfg.output_dir, "report.json"), report_to_json(report));
    write_energy_csv(report, joined(cfg.output_dir, "energy.csv"));
    std::cout << "eps=" << report.eps << "  sup E_s=" << report.trace.sup_e_s
              << "  sup E~_s=" << report.trace.sup_e_mod << "  bound=" << report.bound << '\n';
    std::cout << "sup |E~-E|/eps^2=" << report.gap_constant
              << "  sup |ratio|=" << report.trace.sup_abs_ratio << '\n';
    std::cout << (report.pass() ? "PASS" : "FAIL") << '\n';
    return report.pass() ? 0 : 1;
}

int run_nonres(const ExperimentConfig& cfg, const std::vector<double>& k1s, int density) {
    const NonresonanceReport report = run_nonresonance_scan(cfg, k1s, density);
    ensure_dir(cfg.output_dir);
    write_file(joined(cfg.output_dir, "report.json"), report_to_json(report));
    for (size_t i = 0; i < k1s.size(); ++i) {
        const auto& s = report.scans[i];
        std::cout << "k1=" << k1s[i] << "  C=" << s.min_gap << "  at (k=" << s.k_at
                  << ", p=" << s.p_at << ", j1=" << s.j1 << ", j2=" << s.j2 << ")\n";
    }
    std::cout << (report.pass() ? "PASS" : "FAIL") << '\n';
    return report.pass() ? 0 : 1;
}

int run_coeffs(const ExperimentConfig& cfg) {
    const CoefficientSet c = derive_coefficients(cfg.k0);
    std::cout.precision(15);
    std::cout << "k0      = " << c.carrier.k0 << '\n'
              << "omega0  = " << c.carrier.omega0 << '\n'
              << "cg      = " << c.carrier.cg << '\n'
              << "omega'' = " << c.carrier.omega2 << '\n'
              << "nu1     = " << c.nu1 << '\n'
              << "nu2     = " << c.nu2 << '\n'
              << "gamma21 = " << c.gamma21 << '\n'
              << "gamma22 = " << c.gamma22 << '\n'
              << "a21     = " << c.a21 << '\n'
              << "a22     = " << c.a22 << '\n'
              << "a01     = " << c.a01 << '\n'
              << "a02     = " << c.a02 << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for the NLS approximation of a quasilinear "
                 "Klein-Gordon equation"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::vector<double> k1_list{3.0};
    int density = 1000;

    CLI::App* validate = app.add_subcommand("validate", "epsilon sweep against the envelope "
                                                        "approximation, power-law fit");
    CLI::App* residual = app.add_subcommand("residual", "residual band norms of the cutoff "
                                                        "ansatz over an epsilon sweep");
    CLI::App* energy = app.add_subcommand("energy-check", "modified-energy trace along a "
                                                          "production run");
    CLI::App* identities = app.add_subcommand("identities", "seeded random verification of "
                                                            "the bilinear identities");
    CLI::App* nonres = app.add_subcommand("nonresonance", "scan the non-resonance constant");
    CLI::App* coeffs = app.add_subcommand("coeffs", "print the derived modulation "
                                                    "coefficients");
    for (CLI::App* cmd : {validate, residual, energy, identities, nonres, coeffs})
        add_common(cmd, opts);
    nonres->add_option("--k1", k1_list, "band half-widths to scan");
    nonres->add_option("--density", density, "grid points per unit wavenumber");

    CLI11_PARSE(app, argc, argv);

    try {
        const ExperimentConfig cfg = resolve(opts);
        if (validate->parsed()) return run_validate(cfg);
        if (residual->parsed()) return run_residual(cfg);
        if (energy->parsed()) return run_energy_cmd(cfg);
        if (identities->parsed()) return run_identities(cfg);
        if (nonres->parsed()) return run_nonres(cfg, k1_list, density);
        if (coeffs->parsed()) return run_coeffs(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
