#include "fracdrift/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "fracdrift/errors.hpp"
#include "fracdrift/format.hpp"
#include "fracdrift/radial_fraclap.hpp"
#include "fracdrift/specfun.hpp"

namespace fracdrift {

namespace {

double tol_for(double worst) { return residual_rel_tol * (1.0 + worst); }

double max_abs(std::initializer_list<double> xs) {
    double m = 0.0;
    for (double x : xs) m = std::max(m, std::fabs(x));
    return m;
}

// Fills max_residual, argmax, violations and pass from the samples.
void aggregate(BarrierCertificate& cert) {
    cert.violations = 0;
    cert.max_residual = -HUGE_VAL;
    for (const auto& smp : cert.samples) {
        if (smp.violation) ++cert.violations;
        if (smp.residual > cert.max_residual) {
            cert.max_residual = smp.residual;
            cert.argmax_r = smp.r;
            cert.argmax_t = smp.t;
        }
    }
    cert.pass = cert.violations == 0 && !cert.samples.empty();
}

// Claims of the coefficients against the params they are certified for.
bool coefficients_admissible(const ProblemParams& params, const Density& rho, const DriftField& b,
                             const std::vector<double>& radii, std::vector<std::string>& notes) {
    bool ok = true;
    if (const auto c = check_claims(b, radii); !c.holds) {
        notes.push_back("drift claim failed: " + c.what);
        ok = false;
    }
    if (const auto c = check_claims(rho, radii); !c.holds) {
        notes.push_back("density claim failed: " + c.what);
        ok = false;
    }
    if (b.K > 0.0 && (b.K > params.K || b.sigma > params.sigma)) {
        notes.push_back("drift bounds (sigma = " + fmt17(b.sigma) + ", K = " + fmt17(b.K) +
                        ") exceed the problem's (sigma = " + fmt17(params.sigma) + ", K = " + fmt17(params.K) + ")");
        ok = false;
    }
    if (rho.alpha > params.alpha || rho.C0 < params.C0) {
        notes.push_back("density lower bound (alpha = " + fmt17(rho.alpha) + ", C0 = " + fmt17(rho.C0) +
                        ") is weaker than the problem's (alpha = " + fmt17(params.alpha) + ", C0 = " +
                        fmt17(params.C0) + ")");
        ok = false;
    }
    return ok;
}

struct PsiTerms {
    double psi = 0.0;
    double dpsi = 0.0;
    double lap = 0.0;
};

PsiTerms psi_terms(int N, double s, double beta, double r) {
    const double X = 1.0 + r * r;
    PsiTerms t;
    t.psi = std::pow(X, -0.5 * beta);
    t.dpsi = -beta * r * t.psi / X;
    t.lap = fraclap_psi_beta(N, s, beta, r);
    return t;
}

CaseTag covered_case(const ProblemParams& params, double beta) {
    params.validate();
    const auto tag = classify_case(params, beta);
    if (tag.kind == Case::NotCovered) throw DomainError("beta is not covered by any case for these parameters");
    return tag;
}

}  // namespace

std::vector<double> default_radii() { return log_grid(0.1, 1e3, 40); }
std::vector<double> default_times() { return uniform_grid(0.0, 1.0, 10); }

std::string BarrierCertificate::to_text() const {
    std::ostringstream os;
    os << "certificate = " << kind << '\n';
    os << "result = " << (pass ? "PASS" : "FAIL") << '\n';
    if (tag) os << "case = " << to_string(tag->kind) << '\n';
    os << "beta = " << fmt17(beta) << '\n';
    if (lambda) os << "lambda = " << fmt17(*lambda) << '\n';
    if (pc0) os << "pc0 = " << fmt17(*pc0) << '\n';
    if (C) os << "C = " << fmt17(*C) << '\n';
    if (C2) os << "C2 = " << fmt17(*C2) << '\n';
    if (R0) os << "R0 = " << fmt17(*R0) << '\n';
    os << "samples = " << samples.size() << '\n';
    os << "max_residual = " << fmt17(max_residual) << '\n';
    os << "argmax_r = " << fmt17(argmax_r) << '\n';
    os << "argmax_t = " << fmt17(argmax_t) << '\n';
    os << "violations = " << violations << '\n';
    for (const auto& n : notes) os << "note = " << n << '\n';
    return os.str();
}

std::string BarrierCertificate::to_csv() const {
    std::ostringstream os;
    os << "r,t,residual,worst_term\n";
    for (const auto& smp : samples) {
        os << fmt17(smp.r) << ',' << fmt17(smp.t) << ',' << fmt17(smp.residual) << ',' << fmt17(smp.worst_term)
           << '\n';
    }
    return os.str();
}

BarrierCertificate verify_parabolic_supersolution(const ProblemParams& params, double beta, double lambda,
                                                  const Density& rho, const DriftField& b,
                                                  const std::vector<double>& radii,
                                                  const std::vector<double>& times) {
    const auto tag = covered_case(params, beta);
    if (radii.empty() || times.empty()) throw ArgumentError("verify_parabolic_supersolution: empty sample grid");
    BarrierCertificate cert;
    cert.kind = "parabolic";
    cert.tag = tag;
    cert.beta = beta;
    cert.lambda = lambda;
    const bool admissible = coefficients_admissible(params, rho, b, radii, cert.notes);

    const int nr = static_cast<int>(radii.size()), nt = static_cast<int>(times.size());
    cert.samples.resize(static_cast<std::size_t>(nr) * nt);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < nr; ++i) {
        const double r = radii[i];
        const auto p = psi_terms(params.N, params.s, beta, r);
        const double br = b.radial(r), dv = b.div(r), rh = rho.rho(r);
        for (int j = 0; j < nt; ++j) {
            const double e = std::exp(-lambda * times[j]);
            const double a = -p.lap * e, bt = -lambda * rh * p.psi * e, dr = -br * p.dpsi * e, di = -p.psi * dv * e;
            SampleResidual& smp = cert.samples[static_cast<std::size_t>(i) * nt + j];
            smp.r = r;
            smp.t = times[j];
            smp.residual = a + bt + dr + di;
            smp.worst_term = max_abs({a, bt, dr, di});
            smp.violation = !(smp.residual <= tol_for(smp.worst_term));
        }
    }
    aggregate(cert);
    if (!admissible) cert.pass = false;
    return cert;
}

BarrierCertificate verify_elliptic_barrier(const ProblemParams& params, double beta, double p, double c0,
                                           const Density& rho, const DriftField& b,
                                           const std::function<double(double)>& c,
                                           const std::vector<double>& radii) {
    const auto tag = covered_case(params, beta);
    if (radii.empty()) throw ArgumentError("verify_elliptic_barrier: empty sample grid");
    if (c0 < 0.0) throw ArgumentError("verify_elliptic_barrier: c0 must be >= 0");
    if (p < 1.0) throw ArgumentError("verify_elliptic_barrier: p must be >= 1");
    const auto coef = c ? c : std::function<double(double)>([c0](double) { return c0; });
    for (double r : radii) {
        if (!(coef(r) >= c0)) throw ArgumentError("verify_elliptic_barrier: c(r) < c0 at r = " + fmt17(r));
    }
    BarrierCertificate cert;
    cert.kind = "elliptic";
    cert.tag = tag;
    cert.beta = beta;
    cert.pc0 = p * c0;
    if (c0 == 0.0) cert.notes.push_back("c0 = 0: no strictly negative bulk term");
    const bool admissible = coefficients_admissible(params, rho, b, radii, cert.notes);

    const int nr = static_cast<int>(radii.size());
    cert.samples.resize(nr);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < nr; ++i) {
        const double r = radii[i];
        const auto q = psi_terms(params.N, params.s, beta, r);
        const double a = -q.lap, dr = -b.radial(r) * q.dpsi, di = -q.psi * b.div(r);
        const double bulk = -rho.rho(r) * p * coef(r) * q.psi;
        SampleResidual& smp = cert.samples[i];
        smp.r = r;
        smp.residual = a + dr + di + bulk;
        smp.worst_term = max_abs({a, dr, di, bulk});
        smp.violation = !(smp.residual <= -tol_for(smp.worst_term));
    }
    aggregate(cert);
    if (!admissible) cert.pass = false;
    return cert;
}

BarrierCertificate build_nonuniqueness_barrier(int N, double s, double sigma, double K, double R0,
                                               const Density& rho, const DriftField& b,
                                               const NonuniquenessOptions& opt) {
    if (N < 1) throw DomainError("build_nonuniqueness_barrier: N must be >= 1");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("build_nonuniqueness_barrier: s must lie in (0,1)");
    if (!(R0 > 0.0)) throw DomainError("build_nonuniqueness_barrier: R0 must be > 0");
    if (!rho.alpha_bar || !rho.C_bar) {
        throw ArgumentError("build_nonuniqueness_barrier: the density needs an upper bound (alpha_bar, C_bar)");
    }
    std::vector<double> outer = opt.outer_factors, inner = opt.inner_factors;
    if (outer.empty()) {
        outer = {1.5, 3.0, 10.0, 30.0};
        for (int k = 2; k <= 40; ++k) outer.push_back(std::pow(10.0, k));
    }
    if (inner.empty()) inner = {0.0, 0.25, 0.5, 0.75, 0.9};
    for (double& f : outer) {
        if (!(f > 1.0)) throw ArgumentError("build_nonuniqueness_barrier: outer factors must exceed 1");
        f *= R0;
    }
    for (double& f : inner) {
        if (!(f >= 0.0 && f < 1.0)) throw ArgumentError("build_nonuniqueness_barrier: inner factors must lie in [0,1)");
        f *= R0;
    }
    for (const auto* grid : {&outer, &inner}) {
        for (double r : *grid) {
            if (r > 0.0 && b.radial(r) < 0.0) {
                throw ArgumentError("build_nonuniqueness_barrier: drift points inward at r = " + fmt17(r));
            }
        }
    }

    BarrierCertificate cert;
    cert.kind = "nonuniqueness";
    cert.R0 = R0;
    const double abar = *rho.alpha_bar;
    const double raw = sigma - 1.0 + abar;
    double beta = std::min(raw, static_cast<double>(N)) * (1.0 - 1e-3);
    if (!(beta > 0.0)) {
        // Uniqueness regime: no admissible exponent. Keep a small one so the failure
        // of the escalation is reported on actual residuals.
        beta = 1e-3 * std::min(1.0, static_cast<double>(N));
        cert.notes.push_back("sigma - 1 + alpha_bar = " + fmt17(raw) + " <= 0 (uniqueness regime); beta clipped to " +
                             fmt17(beta));
    }
    cert.beta = beta;
    const double m = power_law_multiplier(N, s, beta);
    if (const auto c = check_claims(b, outer); !c.holds) cert.notes.push_back("drift claim failed: " + c.what);
    if (b.K > 0.0 && (b.sigma != sigma || b.K != K)) {
        cert.notes.push_back("drift metadata (sigma = " + fmt17(b.sigma) + ", K = " + fmt17(b.K) +
                             ") differs from the requested (sigma = " + fmt17(sigma) + ", K = " + fmt17(K) + ")");
    }

    // Outside: C [-m r^{-beta-2s} - beta b_r r^{-beta-1}] + rho <= 0.
    struct Outer {
        double r, lap, drift, rho;
    };
    std::vector<Outer> pts;
    for (double r : outer) pts.push_back({r, m * std::pow(r, -beta - 2.0 * s), beta * b.radial(r) * std::pow(r, -beta - 1.0), rho.rho(r)});
    auto outer_samples = [&](double C) {
        std::vector<SampleResidual> out;
        for (const auto& q : pts) {
            SampleResidual smp;
            smp.r = q.r;
            smp.residual = -C * q.lap - C * q.drift + q.rho;
            smp.worst_term = max_abs({C * q.lap, C * q.drift, q.rho});
            smp.violation = !(smp.residual <= tol_for(smp.worst_term));
            out.push_back(smp);
        }
        return out;
    };
    double C = 1.0;
    std::vector<SampleResidual> best;
    bool found = false;
    for (int k = 0; k <= opt.cap_exponent; ++k, C *= 2.0) {
        best = outer_samples(C);
        if (std::none_of(best.begin(), best.end(), [](const SampleResidual& x) { return x.violation; })) {
            found = true;
            break;
        }
    }
    if (!found) {
        C = std::ldexp(1.0, opt.cap_exponent);
        cert.notes.push_back("no C up to 2^" + std::to_string(opt.cap_exponent) +
                             " makes the outer residual nonpositive on every sample");
    }
    cert.C = C;
    cert.samples = best;

    // Inside: V2 = C2 (R0^2 - r^2)^s / K_G, so -(-Delta)^s V2 = -C2.
    double C2 = 0.0;
    for (int i = 0; i <= 200; ++i) C2 = std::max(C2, rho.rho(R0 * i / 200.0));
    for (double r : inner) C2 = std::max(C2, rho.rho(r));
    cert.C2 = C2;
    const double KG = getoor_constant(N, s);
    for (double r : inner) {
        const double grad = C2 * s * std::pow(R0 * R0 - r * r, s - 1.0) * (-2.0 * r) / KG;
        const double drift = b.radial(r) * grad, rh = rho.rho(r);
        SampleResidual smp;
        smp.r = r;
        smp.residual = -C2 + drift + rh;
        smp.worst_term = max_abs({C2, drift, rh});
        smp.violation = !(smp.residual <= tol_for(smp.worst_term));
        cert.samples.push_back(smp);
    }
    aggregate(cert);
    if (!found) cert.pass = false;
    return cert;
}

bool DecayTable::decays_by(double factor) const {
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const auto& a = rows[k - 1];
        const auto& c = rows[k];
        if (!(c.I1 < factor * a.I1 && c.I2 < factor * a.I2 && c.I3 < factor * a.I3)) return false;
    }
    return rows.size() >= 2;
}

std::string DecayTable::to_csv() const {
    std::ostringstream os;
    os << "R,I1,I2,I3,sign_violations\n";
    for (const auto& row : rows) {
        os << fmt17(row.R) << ',' << fmt17(row.I1) << ',' << fmt17(row.I2) << ',' << fmt17(row.I3) << ','
           << row.sign_violations << '\n';
    }
    return os.str();
}

namespace {

struct Node {
    double r, w;
};

// Gauss-Legendre nodes on consecutive panels between sorted breakpoints.
std::vector<Node> panel_nodes(const std::vector<double>& brk) {
    using GL = boost::math::quadrature::gauss<double, 8>;
    std::vector<Node> out;
    for (std::size_t k = 1; k < brk.size(); ++k) {
        const double a = brk[k - 1], b = brk[k], c = 0.5 * (a + b), h = 0.5 * (b - a);
        if (!(h > 0.0)) continue;
        const auto& x = GL::abscissa();
        const auto& w = GL::weights();
        for (std::size_t i = 0; i < x.size(); ++i) {
            out.push_back({c + h * x[i], h * w[i]});
            out.push_back({c - h * x[i], h * w[i]});
        }
    }
    return out;
}

}  // namespace

DecayTable cutoff_decay_probe(int N, double s, const RadialProfile& phi, const std::function<double(double)>& v,
                              const DriftField& b, const std::vector<double>& R_values) {
    if (N < 1) throw DomainError("cutoff_decay_probe: N must be >= 1");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("cutoff_decay_probe: s must lie in (0,1)");
    if (R_values.empty()) throw ArgumentError("cutoff_decay_probe: empty R sequence");
    const double omega = specfun::unit_sphere_area(N);
    DecayTable table;
    for (double R : R_values) {
        if (!(R > 0.0)) throw ArgumentError("cutoff_decay_probe: R must be > 0");
        const auto gamma = RadialProfile::cutoff(R);
        // Geometric panels from 1/8 out to 1024 R, the transition annulus split finely.
        std::vector<double> brk{0.0};
        for (double x = 0.125; x < 1024.0 * R; x *= 2.0) brk.push_back(x);
        for (int j = 0; j <= 16; ++j) brk.push_back(0.5 * R + 0.5 * R * j / 16.0);
        brk.push_back(1024.0 * R);
        std::sort(brk.begin(), brk.end());
        brk.erase(std::unique(brk.begin(), brk.end()), brk.end());
        const auto nodes = panel_nodes(brk);

        const int n = static_cast<int>(nodes.size());
        std::vector<double> f1(n), f2(n), f3(n);
        std::vector<int> bad(n, 0);
        bool failed = false;
        std::string failure;
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) {
            const double r = nodes[i].r;
            const double vr = std::fabs(v(r));
            const double jac = omega * std::pow(r, N - 1) * nodes[i].w;
            if (vr == 0.0) continue;
            try {
                const double ph = phi.value(r);
                f1[i] = vr * ph * std::fabs(fraclap_quadrature(N, s, gamma, r)) * jac;
                f2[i] = vr * std::fabs(bilinear_form(N, s, phi, gamma, r)) * jac;
                if (r > 0.5 * R && r < R && b.in_d_plus(r)) {
                    const double bg = b.radial(r) * gamma.jet(r).d1;
                    if (bg > 0.0) bad[i] = 1;
                    f3[i] = vr * ph * std::fabs(bg) * jac;
                }
            } catch (const std::exception& e) {
#pragma omp critical
                {
                    failed = true;
                    failure = e.what();
                }
            }
        }
        if (failed) throw NumericalFailure("cutoff_decay_probe: " + failure, 0.0, 0.0);
        DecayRow row;
        row.R = R;
        for (int i = 0; i < n; ++i) {
            row.I1 += f1[i];
            row.I2 += f2[i];
            row.I3 += f3[i];
            row.sign_violations += bad[i];
        }
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace fracdrift
