#include "fracdrift/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fracdrift/classifier.hpp"
#include "fracdrift/errors.hpp"
#include "fracdrift/fields.hpp"
#include "fracdrift/format.hpp"
#include "fracdrift/radial_fraclap.hpp"
#include "fracdrift/simulator.hpp"
#include "fracdrift/verifier.hpp"

namespace fracdrift {

namespace {

struct Outcome {
    int code = exit_ok;
    std::string summary;
    std::string report;
    std::string csv;
};

ProblemParams params_from(const RunConfig& cfg) {
    ProblemParams p;
    p.N = static_cast<int>(cfg.get_int("params.N"));
    p.s = cfg.get_real("params.s");
    p.alpha = cfg.get_real("params.alpha");
    p.C0 = cfg.get_real("params.C0");
    p.sigma = cfg.get_real("params.sigma");
    p.K = cfg.get_real("params.K");
    p.p = cfg.get_real("params.p");
    p.c0 = cfg.get_real("params.c0");
    p.validate();
    return p;
}

double real_or(const RunConfig& cfg, const std::string& name, double fallback) {
    return cfg.has(name) ? cfg.get_real(name) : fallback;
}

Density density_from(const RunConfig& cfg, const ProblemParams& p) {
    Density d = cfg.get_word("scenario.density") == "constant" ? Density::constant(p.C0)
                                                                : Density::inverse_poly(p.alpha, p.C0);
    if (cfg.has("scenario.alpha_bar")) {
        const double ab = cfg.get_real("scenario.alpha_bar");
        if (!(ab >= 0.0 && ab <= d.alpha)) throw DomainError("alpha_bar must lie in [0, alpha]");
        d.alpha_bar = ab;
    }
    return d;
}

DriftField drift_from(const RunConfig& cfg, const ProblemParams& p, double default_smoothing) {
    const std::string family = cfg.get_word("scenario.drift");
    const double sigma = real_or(cfg, "scenario.drift_sigma", p.sigma);
    const double K = real_or(cfg, "scenario.drift_K", p.K);
    if (!(K >= 0.0)) throw DomainError("drift_K must be >= 0");
    if (family == "zero") return DriftField::zero();
    if (family == "envelope") return DriftField::envelope(sigma, K);
    const double delta = real_or(cfg, "scenario.smoothing", default_smoothing);
    if (!(delta >= 0.0)) throw DomainError("smoothing must be >= 0");
    return DriftField::radial_power(p.N, sigma, K, delta);
}

std::function<double(double)> exterior_from(const std::string& family, double gamma) {
    if (family == "constant") return [gamma](double) { return gamma; };
    if (family == "linear") return [gamma](double t) { return gamma * t; };
    return [](double) { return 0.0; };
}

std::vector<double> radii_from(const RunConfig& cfg, std::vector<double> fallback) {
    return cfg.has("scenario.radii") ? cfg.get_list("scenario.radii") : std::move(fallback);
}

double beta_from(const RunConfig& cfg) {
    const double beta = cfg.get_real("params.beta");
    if (!(beta > 0.0)) throw DomainError("beta must be > 0");
    return beta;
}

std::string line(const std::string& key, const std::string& value) { return key + " = " + value + "\n"; }
std::string line(const std::string& key, double value) { return line(key, fmt17(value)); }

Outcome do_classify(const RunConfig& cfg) {
    const ProblemParams p = params_from(cfg);
    const CaseTag tag = classify_case(p, beta_from(cfg));
    const DriftRegimeTag regime = drift_regime(p.alpha, p.sigma);
    Outcome o;
    o.summary = tag.kind == Case::NotCovered ? "case not covered" : std::string("case ") + to_string(tag.kind);
    o.report = line("case", to_string(tag.kind)) + line("beta", tag.beta) +
               line("drift_regime", to_string(regime.regime)) +
               line("drift_regime_boundary", regime.boundary ? "true" : "false");
    o.csv = "case,beta,drift_regime\n" + std::string(to_string(tag.kind)) + "," + fmt17(tag.beta) + "," +
            to_string(regime.regime) + "\n";
    return o;
}

Outcome do_thresholds(const RunConfig& cfg) {
    const ProblemParams p = params_from(cfg);
    const ThresholdReport rep = full_thresholds(p, beta_from(cfg), cfg.get_real("params.eps"));
    Outcome o;
    o.summary = std::string("case ") + to_string(rep.tag.kind) +
                (rep.lambda_star ? ", lambda* = " + fmt17(*rep.lambda_star) : "") +
                (rep.pc0_star ? ", pc0* = " + fmt17(*rep.pc0_star) : "");
    o.report = rep.to_key_value();
    o.csv = ThresholdReport::csv_header() + "\n" + rep.to_csv_row() + "\n";
    return o;
}

Outcome certificate_outcome(const BarrierCertificate& cert) {
    Outcome o;
    o.code = cert.pass ? exit_ok : exit_fail;
    o.summary = cert.kind + (cert.pass ? ": PASS" : ": FAIL") + " (max residual " + fmt17(cert.max_residual) +
                " at r = " + fmt17(cert.argmax_r) + ")";
    o.report = cert.to_text();
    o.csv = cert.to_csv();
    return o;
}

Outcome do_verify_parabolic(const RunConfig& cfg) {
    const ProblemParams p = params_from(cfg);
    const double beta = beta_from(cfg);
    double lambda = 0.0;
    if (cfg.has("params.lambda")) {
        lambda = cfg.get_real("params.lambda");
    } else {
        const ThresholdReport th = lambda_threshold(p, beta, cfg.get_real("params.eps"));
        if (!th.lambda_star) throw DomainError("beta: no lambda threshold for this case");
        lambda = *th.lambda_star;
    }
    const std::vector<double> times = cfg.has("scenario.times") ? cfg.get_list("scenario.times") : default_times();
    return certificate_outcome(verify_parabolic_supersolution(p, beta, lambda, density_from(cfg, p),
                                                              drift_from(cfg, p, 0.0),
                                                              radii_from(cfg, default_radii()), times));
}

Outcome do_verify_elliptic(const RunConfig& cfg) {
    const ProblemParams p = params_from(cfg);
    return certificate_outcome(verify_elliptic_barrier(p, beta_from(cfg), p.p, p.c0, density_from(cfg, p),
                                                       drift_from(cfg, p, 0.0), nullptr,
                                                       radii_from(cfg, default_radii())));
}

Outcome do_verify_barrier(const RunConfig& cfg) {
    const ProblemParams p = params_from(cfg);
    const DriftField b = drift_from(cfg, p, 0.0);
    return certificate_outcome(build_nonuniqueness_barrier(p.N, p.s, real_or(cfg, "scenario.drift_sigma", p.sigma),
                                                           real_or(cfg, "scenario.drift_K", p.K),
                                                           cfg.get_real("scenario.R0"), density_from(cfg, p), b));
}

Outcome do_cutoff_probe(const RunConfig& cfg) {
    const ProblemParams p = params_from(cfg);
    const double ve = cfg.get_real("scenario.v_exponent");
    if (!(ve >= 0.0)) throw DomainError("v_exponent must be >= 0");
    const auto v = [ve](double r) { return std::pow(1.0 + r * r, -0.5 * ve); };
    const DecayTable table = cutoff_decay_probe(p.N, p.s, RadialProfile::psi_beta(beta_from(cfg)), v,
                                                drift_from(cfg, p, 0.0), cfg.get_list("scenario.R_values"));
    const bool decays = table.decays_by(0.9);
    Outcome o;
    o.code = decays ? exit_ok : exit_fail;
    o.summary = decays ? "cutoff terms decay: PASS" : "cutoff terms decay: FAIL";
    o.report = line("result", decays ? "PASS" : "FAIL") + line("factor", 0.9);
    for (const auto& r : table.rows)
        o.report += "R = " + fmt17(r.R) + ", I1 = " + fmt17(r.I1) + ", I2 = " + fmt17(r.I2) + ", I3 = " +
                    fmt17(r.I3) + ", sign_violations = " + std::to_string(r.sign_violations) + "\n";
    o.csv = table.to_csv();
    return o;
}

Outcome do_fraclap_eval(const RunConfig& cfg) {
    const ProblemParams p = params_from(cfg);
    const std::string profile = cfg.get_word("scenario.profile");
    const std::vector<double> radii = radii_from(cfg, {0.5, 1.0, 2.0});
    const double R0 = cfg.get_real("scenario.R0");
    const double beta = profile == "getoor" ? 0.0 : beta_from(cfg);
    const RadialProfile w = profile == "psi_beta"    ? RadialProfile::psi_beta(beta)
                            : profile == "power_law" ? RadialProfile::power_law(beta)
                                                     : RadialProfile::getoor(R0, p.s);
    Outcome o;
    o.csv = "r,closed_form,quadrature,rel_diff\n";
    double worst = 0.0;
    for (double r : radii) {
        const double closed = profile == "psi_beta"    ? fraclap_psi_beta(p.N, p.s, beta, r)
                              : profile == "power_law" ? fraclap_power_law(p.N, p.s, beta, r)
                                                       : fraclap_getoor(p.N, p.s, R0, r);
        const double quad = fraclap_quadrature(p.N, p.s, w, r);
        const double rel = std::abs(quad - closed) / std::max(std::abs(closed), 1e-300);
        worst = std::max(worst, rel);
        o.csv += fmt17(r) + "," + fmt17(closed) + "," + fmt17(quad) + "," + fmt17(rel) + "\n";
    }
    o.summary = profile + ": max relative difference " + fmt17(worst);
    o.report = line("profile", profile) + line("max_rel_diff", worst);
    return o;
}

void check_one_dimensional(const ProblemParams& p) {
    if (p.N != 1) throw DomainError("N must be 1 for the simulator");
}

Scenario scenario_from(const RunConfig& cfg, const ProblemParams& p, double h) {
    Scenario sc;
    sc.s = p.s;
    sc.b = drift_from(cfg, p, h);
    sc.rho = density_from(cfg, p);
    sc.T = cfg.get_real("scenario.T");
    sc.dt = cfg.get_real("scenario.dt");
    if (!(sc.T > 0.0)) throw DomainError("T must be > 0");
    if (!(sc.dt > 0.0 && sc.dt <= sc.T)) throw DomainError("dt must lie in (0, T]");
    if (cfg.get_word("scenario.initial") == "gaussian") sc.u0 = [](double x) { return std::exp(-x * x); };
    return sc;
}

double h0_from(const RunConfig& cfg) {
    const double h0 = cfg.get_real("scenario.h0");
    if (!(h0 > 0.0)) throw DomainError("h0 must be > 0");
    return h0;
}

Outcome do_simulate(const RunConfig& cfg) {
    const ProblemParams p = params_from(cfg);
    check_one_dimensional(p);
    const double L = cfg.get_list("scenario.L").front();
    if (!(L > 0.0)) throw DomainError("L must be > 0");
    const int M = cfg.has("scenario.M") ? static_cast<int>(cfg.get_int("scenario.M")) : odd_node_count(L, h0_from(cfg));
    const DiscreteSystem sys = assemble_operator(p.s, L, M);
    Scenario sc = scenario_from(cfg, p, sys.h);
    sc.L = L;
    sc.M = M;
    const double gamma = cfg.get_real("scenario.gamma");
    sc.g = exterior_from(cfg.get_word("scenario.exterior"), gamma);

    SolutionRecord rec;
    const bool elliptic = cfg.get_word("scenario.mode") == "elliptic";
    if (elliptic) {
        const double c = cfg.get_real("scenario.c");
        if (!(c >= 0.0)) throw DomainError("c must be >= 0");
        sc.c = [c](double) { return c; };
        rec = solve_elliptic(sys, sc, gamma);
    } else {
        rec = evolve(sys, sc);
    }
    Outcome o;
    o.summary = std::string(elliptic ? "elliptic" : "parabolic") + " solve: u(0) = " + fmt17(rec.at(0.0)) +
                ", max |u| = " + fmt17(rec.max_norm.back());
    o.report = line("mode", elliptic ? "elliptic" : "parabolic") + line("L", L) + line("M", std::to_string(M)) +
               line("h", sys.h) + line("steps", std::to_string(rec.t.size() - 1)) + line("u_at_0", rec.at(0.0)) +
               line("max_norm", rec.max_norm.back()) + line("mass", rec.mass.back()) +
               line("solve_residual", rec.solve_residual);
    o.csv = rec.to_csv();
    return o;
}

Outcome do_influence(const RunConfig& cfg) {
    const ProblemParams p = params_from(cfg);
    check_one_dimensional(p);
    const double h0 = h0_from(cfg);
    Scenario sc = scenario_from(cfg, p, h0);
    const auto g1 = exterior_from(cfg.get_word("scenario.exterior"), cfg.get_real("scenario.gamma"));
    const auto g2 = exterior_from(cfg.get_word("scenario.exterior2"), cfg.get_real("scenario.gamma2"));
    const InfluenceTable table =
        exterior_influence_experiment(sc, g1, g2, cfg.get_list("scenario.L"), cfg.get_real("scenario.probe"), h0);
    Outcome o;
    o.summary = table.regime + ": d(L_first) = " + fmt17(table.rows.front().d) +
                ", d(L_last) = " + fmt17(table.rows.back().d);
    o.report = line("regime", table.regime);
    for (const auto& r : table.rows)
        o.report += "L = " + fmt17(r.L) + ", M = " + std::to_string(r.M) + ", d = " + fmt17(r.d) + "\n";
    o.csv = table.to_csv();
    return o;
}

Outcome dispatch(const RunConfig& cfg) {
    const std::string& cmd = cfg.command();
    if (cmd == "classify") return do_classify(cfg);
    if (cmd == "thresholds") return do_thresholds(cfg);
    if (cmd == "verify-parabolic") return do_verify_parabolic(cfg);
    if (cmd == "verify-elliptic") return do_verify_elliptic(cfg);
    if (cmd == "verify-barrier") return do_verify_barrier(cfg);
    if (cmd == "cutoff-probe") return do_cutoff_probe(cfg);
    if (cmd == "fraclap-eval") return do_fraclap_eval(cfg);
    if (cmd == "simulate") return do_simulate(cfg);
    if (cmd == "influence") return do_influence(cfg);
    throw ConfigError("unknown command " + cmd);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ArgumentError("cannot write " + path.string());
    f << content;
    if (!f) throw ArgumentError("cannot write " + path.string());
}

}  // namespace

int run(const RunConfig& config, const RunOptions& options, std::ostream& out, std::ostream& err) {
    try {
        Outcome o = dispatch(config);
        const long seed = options.seed ? *options.seed : config.get_int("seed");
        o.report = line("command", config.command()) + line("seed", std::to_string(seed)) + o.report;
        if (options.write_files) {
            const std::filesystem::path dir = options.out_dir ? *options.out_dir : config.get_word("output.dir");
            const std::string prefix = config.has("output.prefix") ? config.get_word("output.prefix") : config.command();
            std::error_code ec;
            std::filesystem::create_directories(dir, ec);
            if (ec) throw ArgumentError("cannot create output directory " + dir.string());
            write_file(dir / (prefix + "_report.txt"), o.report);
            write_file(dir / (prefix + ".csv"), o.csv);
        }
        out << (options.verbose ? o.report : o.summary + "\n");
        return o.code;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
}

int run_document(const std::string& text, const RunOptions& options, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = parse_config(text);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return run(cfg, options, out, err);
}

}  // namespace fracdrift
