#include "fracdrift/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracdrift/errors.hpp"
#include "fracdrift/format.hpp"
#include "fracdrift/profiles.hpp"
#include "fracdrift/radial_fraclap.hpp"
#include "fracdrift/specfun.hpp"

namespace fracdrift {

namespace {

using specfun::gamma_real;
using specfun::rgamma;

constexpr double r_scan_max = 1e6;
constexpr int r_scan_points = 600;
constexpr int m_samples = 200;

// Tolerance for the non-strict case IV bound alpha + beta <= 2s + N, so that
// beta = N + 2s - alpha computed in floating point stays on the admissible side.
bool leq_with_ulps(double lhs, double rhs) {
    return lhs <= rhs + 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(rhs));
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); }

}  // namespace

void ProblemParams::validate() const {
    if (N < 1) throw DomainError("N must be >= 1");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("s must lie in (0,1)");
    if (!(alpha >= 0.0)) throw DomainError("alpha must be >= 0");
    if (!(C0 > 0.0)) throw DomainError("C0 must be > 0");
    if (!std::isfinite(sigma)) throw DomainError("sigma must be finite");
    if (!(K >= 0.0)) throw DomainError("K must be >= 0");
    if (!(p >= 1.0)) throw DomainError("p must be >= 1");
    if (!(c0 >= 0.0)) throw DomainError("c0 must be >= 0");
}

const char* to_string(Case c) {
    switch (c) {
        case Case::I: return "I";
        case Case::II: return "II";
        case Case::III: return "III";
        case Case::IV: return "IV";
        case Case::NotCovered: return "NotCovered";
    }
    return "?";
}

const char* to_string(DriftRegime r) {
    return r == DriftRegime::uniqueness_compatible ? "uniqueness-compatible" : "nonuniqueness-regime";
}

CaseTag classify_case(const ProblemParams& prm, double beta) {
    prm.validate();
    if (!(beta > 0.0)) throw DomainError("beta must be > 0");
    const double N = prm.N, s = prm.s, a = prm.alpha;
    CaseTag tag{Case::NotCovered, beta};
    if (beta <= N - 2.0 * s) tag.kind = Case::I;
    else if (beta < N) tag.kind = a <= 2.0 * s ? Case::II : Case::NotCovered;
    else if (beta == N) tag.kind = a < 2.0 * s ? Case::III : Case::NotCovered;
    else tag.kind = leq_with_ulps(a + beta, 2.0 * s + N) ? Case::IV : Case::NotCovered;
    return tag;
}

double asymptotic_shape(Case kind, int N, double s, double beta, double r) {
    const double X = 1.0 + r * r;
    switch (kind) {
        case Case::II: return std::pow(X, -(s + 0.5 * beta));
        case Case::III: return std::pow(X, -(s + 0.5 * beta)) * std::log(X);
        case Case::IV: return std::pow(X, -(s + 0.5 * N));
        default: throw DomainError("asymptotic_shape: only cases II-IV have a growth constant");
    }
}

GrowthConstants growth_constants(const ProblemParams& prm, double beta, double eps, FraclapEvaluation eval) {
    if (!(eps > 0.0)) throw DomainError("eps must be > 0");
    const CaseTag tag = classify_case(prm, beta);
    if (tag.kind == Case::I || tag.kind == Case::NotCovered) {
        throw DomainError(std::string("growth_constants: requires case II, III or IV, got ") + to_string(tag.kind));
    }
    const int N = prm.N;
    const double s = prm.s;

    GrowthConstants g;
    g.kind = tag.kind;
    g.psi_const = psi_constant(N, s, beta);
    // (-Delta)^s psi = psi_const (1+r^2)^{-(beta/2+s)} F(-s, beta/2+s; N/2; r^2/(1+r^2)).
    const auto lim = specfun::limit_2f1_at_one(-s, 0.5 * beta + s, 0.5 * N, 0.5 * (N - beta));
    g.C_const = -lim.coefficient;
    switch (tag.kind) {
        case Case::II: {
            g.C_label = "C1";
            g.C_printed = -gamma_real(0.5 * N) * gamma_real(0.5 * (N - beta)) /
                          (gamma_real(0.5 * (N + s)) * gamma_real(0.5 * (N - beta) - s));
            g.C_printed_mismatch = std::fabs(*g.C_printed - g.C_const) > 1e-12 * std::fabs(g.C_const);
            break;
        }
        case Case::III: g.C_label = "C2"; break;
        default: g.C_label = "C3"; break;
    }

    const auto psi = RadialProfile::psi_beta(beta);
    auto lap = [&](double r) {
        return eval == FraclapEvaluation::closed_form ? fraclap_psi_beta(N, s, beta, r)
                                                      : fraclap_quadrature(N, s, psi, r);
    };
    const double bound_coef = g.psi_const * (g.C_const + eps);
    // Nonnegative exactly where the asymptotic bound holds.
    auto gap = [&](double r) { return bound_coef * asymptotic_shape(tag.kind, N, s, beta, r) + lap(r); };

    double last_bad = -1.0, next_good = -1.0;
    for (int i = 0; i <= r_scan_points; ++i) {
        const double r = std::pow(r_scan_max, static_cast<double>(i) / r_scan_points);
        if (gap(r) < 0.0) {
            last_bad = r;
            next_good = -1.0;
        } else if (last_bad > 0.0 && next_good < 0.0) {
            next_good = r;
        }
    }
    if (last_bad > 0.0 && next_good < 0.0) {
        throw NumericalFailure("growth_constants: asymptotic bound still violated at r = 1e6", last_bad, 0.0);
    }
    if (last_bad < 0.0) {
        g.R_eps = 1.0;
    } else {
        double lo = last_bad, hi = next_good;
        for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (gap(mid) < 0.0 ? lo : hi) = mid;
        }
        g.R_eps = hi;
    }

    g.R_bound = g.R_eps;
    if (tag.kind == Case::III) {
        // Canonical enlargement for the logarithmic factor.
        const double lambda_a = (2.0 / prm.C0) * std::max(bound_coef, beta * prm.K + 1.0);
        const double mono = std::sqrt(std::exp(1.0 / (s - 0.5 * prm.alpha)) - 1.0);
        auto absorbed = [&](double r) {
            const double X = 1.0 + r * r;
            return bound_coef * std::pow(X, -s) * std::log(X) <= 0.5 * lambda_a * prm.C0 * std::pow(X, -0.5 * prm.alpha);
        };
        double R = std::max(g.R_eps, mono);
        for (int it = 0; it < 200 && !absorbed(R); ++it) R *= 2.0;
        if (!absorbed(R)) throw NumericalFailure("growth_constants: logarithmic enlargement overflows (s - alpha/2 too small)", R, 0.0);
        g.R_eps = R;
    }

    g.M = 0.0;
    for (int i = 0; i < m_samples; ++i) {
        const double r = g.R_eps * i / (m_samples - 1.0);
        g.M = std::max(g.M, std::fabs(lap(r)));
    }
    return g;
}

namespace {

ThresholdReport base_report(const ProblemParams& prm, double beta, double eps) {
    ThresholdReport rep;
    rep.tag = classify_case(prm, beta);
    rep.eps = eps;
    if (rep.tag.kind == Case::NotCovered) {
        throw DomainError("thresholds: parameters are not covered by any case (beta = " + fmt17(beta) + ")");
    }
    if (rep.tag.kind != Case::I) rep.growth = growth_constants(prm, beta, eps);
    return rep;
}

void fill_lambda(ThresholdReport& rep, const ProblemParams& prm) {
    const double beta = rep.tag.beta;
    const double bk = beta * prm.K + 1.0;
    if (rep.tag.kind == Case::I) {
        rep.lambda_branches = {{"case_I", bk / prm.C0}};
        rep.lambda_star = bk / prm.C0;
        rep.lambda_strict = false;
        return;
    }
    const auto& g = *rep.growth;
    const double far = (2.0 / prm.C0) * std::max(g.psi_const * (g.C_const + rep.eps), bk);
    const double near =
        (2.0 / prm.C0) * (g.M + bk) * std::pow(1.0 + g.R_eps * g.R_eps, 0.5 * (beta + prm.alpha));
    rep.lambda_branches = {{"far_field", far}, {"compact_region", near}};
    rep.lambda_star = std::max(far, near);
    rep.lambda_strict = true;
}

void fill_pc0(ThresholdReport& rep, const ProblemParams& prm) {
    const double beta = rep.tag.beta;
    const double bk = beta * prm.K + 1.0;
    if (rep.tag.kind == Case::I) {
        rep.pc0_branches = {{"case_I", bk / prm.C0}};
        rep.pc0_star = bk / prm.C0;
    } else {
        const auto& g = *rep.growth;
        const double a = (2.0 / prm.C0) * g.psi_const * (g.C_const + rep.eps);
        const double b = (2.0 / prm.C0) * bk;
        const double c = (2.0 / prm.C0) * g.M * std::pow(1.0 + g.R_eps * g.R_eps, 0.5 * (beta + prm.alpha));
        rep.pc0_branches = {{"growth_constant", a}, {"drift", b}, {"compact_region", c}};
        rep.pc0_star = std::max({a, b, c});
    }
    rep.pc0_never_sufficient = prm.c0 == 0.0;
    rep.pc0_clears = !rep.pc0_never_sufficient && prm.p * prm.c0 > *rep.pc0_star;
}

}  // namespace

ThresholdReport lambda_threshold(const ProblemParams& prm, double beta, double eps) {
    ThresholdReport rep = base_report(prm, beta, eps);
    fill_lambda(rep, prm);
    return rep;
}

ThresholdReport pc0_threshold(const ProblemParams& prm, double beta, double eps) {
    ThresholdReport rep = base_report(prm, beta, eps);
    fill_pc0(rep, prm);
    return rep;
}

ThresholdReport full_thresholds(const ProblemParams& prm, double beta, double eps) {
    ThresholdReport rep = base_report(prm, beta, eps);
    fill_lambda(rep, prm);
    fill_pc0(rep, prm);
    return rep;
}

std::string ThresholdReport::to_key_value() const {
    std::ostringstream os;
    os << "case = " << to_string(tag.kind) << '\n';
    os << "beta = " << fmt17(tag.beta) << '\n';
    os << "eps = " << fmt17(eps) << '\n';
    if (growth) {
        os << "psi_const = " << fmt17(growth->psi_const) << '\n';
        os << growth->C_label << " = " << fmt17(growth->C_const) << '\n';
        if (growth->C_printed) {
            os << growth->C_label << "_printed_form = " << fmt17(*growth->C_printed) << '\n';
            os << growth->C_label << "_printed_form_mismatch = " << (growth->C_printed_mismatch ? "yes" : "no") << '\n';
        }
        if (growth->R_bound != growth->R_eps) os << "R_bound = " << fmt17(growth->R_bound) << '\n';
        os << "R_eps = " << fmt17(growth->R_eps) << '\n';
        os << "M = " << fmt17(growth->M) << '\n';
    }
    if (lambda_star) {
        for (const auto& b : lambda_branches) os << "lambda_branch." << b.name << " = " << fmt17(b.value) << '\n';
        os << "lambda_star = " << fmt17(*lambda_star) << '\n';
        os << "lambda_condition = " << (lambda_strict ? "lambda > lambda_star" : "lambda >= lambda_star") << '\n';
    }
    if (pc0_star) {
        for (const auto& b : pc0_branches) os << "pc0_branch." << b.name << " = " << fmt17(b.value) << '\n';
        os << "pc0_star = " << fmt17(*pc0_star) << '\n';
        os << "pc0_condition = p*c0 > pc0_star\n";
        if (pc0_never_sufficient) os << "pc0_status = never-sufficient (c0 = 0)\n";
        else if (pc0_clears) os << "pc0_status = " << (*pc0_clears ? "clears" : "does-not-clear") << '\n';
    }
    return os.str();
}

std::string ThresholdReport::csv_header() { return "case,beta,eps,R_eps,M,C_const,lambda_star,pc0_star"; }

std::string ThresholdReport::to_csv_row() const {
    std::ostringstream os;
    os << to_string(tag.kind) << ',' << fmt17(tag.beta) << ',' << fmt17(eps) << ',';
    if (growth) os << fmt17(growth->R_eps) << ',' << fmt17(growth->M) << ',' << fmt17(growth->C_const) << ',';
    else os << ",,,";
    os << fmt_opt(lambda_star) << ',' << fmt_opt(pc0_star);
    return os.str();
}

DriftRegimeTag drift_regime(double alpha, double sigma) {
    if (!(alpha >= 0.0)) throw DomainError("alpha must be >= 0");
    DriftRegimeTag t;
    t.regime = sigma <= 1.0 - alpha ? DriftRegime::uniqueness_compatible : DriftRegime::nonuniqueness;
    t.boundary = sigma == 1.0 - alpha;
    return t;
}

CorollaryWeight corollary_weight(const ProblemParams& prm) {
    prm.validate();
    if (!(prm.alpha > 0.0 && prm.alpha < 2.0 * prm.s)) {
        throw DomainError("corollary_weight: requires alpha in (0, 2s)");
    }
    CorollaryWeight w;
    w.beta = prm.N + 2.0 * prm.s - prm.alpha;
    w.p = 1.0;
    w.tag = classify_case(prm, w.beta);
    if (w.tag.kind != Case::IV) {
        throw NumericalFailure("corollary_weight: reduced weight did not land in case IV", w.beta, 0.0);
    }
    return w;
}

}  // namespace fracdrift
