#include "fracdrift/specfun.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracdrift/errors.hpp"

namespace fracdrift::specfun {

namespace {

constexpr double pi = std::numbers::pi;

// Lanczos coefficients for g = 7, n = 9.
constexpr double lanczos_g = 7.0;
constexpr std::array<double, 9> lanczos_coef = {
    0.99999999999980993,   676.5203681218851,     -1259.1392167224028,
    771.32342877765313,    -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,  9.9843695780195716e-6, 1.5056327351493116e-7};

// Gamma(x) for x >= 1/2.
double lanczos_gamma(double x) {
    const double xm1 = x - 1.0;
    double acc = lanczos_coef[0];
    for (std::size_t k = 1; k < lanczos_coef.size(); ++k) {
        acc += lanczos_coef[k] / (xm1 + static_cast<double>(k));
    }
    const double t = xm1 + lanczos_g + 0.5;
    // Split the power so that t^(x-1/2) does not overflow before exp(-t) is applied.
    const double half = std::pow(t, 0.5 * (xm1 + 0.5));
    return std::sqrt(2.0 * pi) * half * (half * std::exp(-t)) * acc;
}

}  // namespace

bool is_nonpositive_integer(double x) { return x <= 0.0 && std::floor(x) == x; }

double sinpi(double t) {
    const double n = std::nearbyint(t);
    const double f = t - n;  // exact, |f| <= 1/2
    if (f == 0.0) return 0.0;
    const double v = std::sin(pi * f);
    return (std::fmod(std::fabs(n), 2.0) == 1.0) ? -v : v;
}

double gamma_real(double t) {
    if (is_nonpositive_integer(t)) {
        throw DomainError("gamma_real: pole at t = " + std::to_string(t));
    }
    if (std::isnan(t)) return t;
    if (t < 0.5) {
        // Reflection: Gamma(t) Gamma(1 - t) = pi / sin(pi t).
        return pi / (sinpi(t) * lanczos_gamma(1.0 - t));
    }
    if (t > 171.7) return std::numeric_limits<double>::infinity();
    return lanczos_gamma(t);
}

double rgamma(double t) {
    if (is_nonpositive_integer(t)) return 0.0;
    if (t < 0.5) return sinpi(t) * lanczos_gamma(1.0 - t) / pi;
    return 1.0 / gamma_real(t);
}

double digamma(double t) {
    if (is_nonpositive_integer(t)) {
        throw DomainError("digamma: pole at t = " + std::to_string(t));
    }
    double acc = 0.0;
    if (t < 0.5) {
        // psi(t) = psi(1 - t) - pi cot(pi t)
        const double n = std::nearbyint(t);
        const double f = t - n;
        acc -= pi * std::cos(pi * f) / std::sin(pi * f);
        t = 1.0 - t;
    }
    while (t < 10.0) {
        acc -= 1.0 / t;
        t += 1.0;
    }
    const double inv2 = 1.0 / (t * t);
    // Asymptotic series with Bernoulli numbers B_2 .. B_12.
    const double series =
        inv2 * (1.0 / 12 -
                inv2 * (1.0 / 120 -
                        inv2 * (1.0 / 252 -
                                inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * 691.0 / 32760)))));
    return acc + std::log(t) - 0.5 / t - series;
}

double unit_sphere_area(int n) {
    if (n < 1) throw DomainError("unit_sphere_area: dimension must be >= 1");
    return 2.0 * std::pow(pi, 0.5 * n) / gamma_real(0.5 * n);
}

const char* to_string(LimitRegime regime) {
    switch (regime) {
        case LimitRegime::finite: return "finite";
        case LimitRegime::logarithmic: return "logarithmic";
        case LimitRegime::power: return "power";
    }
    return "?";
}

double LimitDescriptor::leading(double one_minus_z) const {
    switch (regime) {
        case LimitRegime::finite: return coefficient;
        case LimitRegime::logarithmic: return -coefficient * std::log(one_minus_z);
        case LimitRegime::power: return coefficient * std::pow(one_minus_z, exponent);
    }
    return coefficient;
}

LimitDescriptor limit_2f1_at_one(double a, double b, double c, std::optional<double> excess) {
    if (is_nonpositive_integer(c)) {
        throw DomainError("limit_2f1_at_one: c is a nonpositive integer");
    }
    LimitDescriptor d;
    d.exponent = excess.value_or(c - a - b);
    if (d.exponent > 0.0) {
        d.regime = LimitRegime::finite;
        d.coefficient = gamma_real(c) * gamma_real(d.exponent) * rgamma(c - a) * rgamma(c - b);
    } else if (d.exponent == 0.0) {
        d.regime = LimitRegime::logarithmic;
        d.coefficient = gamma_real(a + b) * rgamma(a) * rgamma(b);
    } else {
        d.regime = LimitRegime::power;
        d.coefficient = gamma_real(c) * gamma_real(-d.exponent) * rgamma(a) * rgamma(b);
    }
    return d;
}

FracConstant cns_constant(int N, double s) {
    if (N < 1) throw DomainError("cns_constant: N must be >= 1");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("cns_constant: s must lie in (0,1)");
    FracConstant out{N, s, 0.0};
    out.value = std::pow(2.0, 2.0 * s - 1.0) * 2.0 * s * gamma_real(0.5 * (N + 2.0 * s)) /
                (std::pow(pi, 0.5 * N) * gamma_real(1.0 - s));
    return out;
}

FracConstantCheck verify_cns_constant(int N, double s) {
    const FracConstant closed = cns_constant(N, s);

    // Integrating out xi_2..xi_N at fixed xi_1 leaves
    //   |xi_1|^{-1-2s} * K,  K = int_{R^{N-1}} (1 + |eta|^2)^{-(N+2s)/2} d eta,
    // so the N-dimensional integral factors into K * 2 int_0^inf (1 - cos u) u^{-1-2s} du.
    double transverse = 1.0;
    double err_transverse = 0.0;
    if (N >= 2) {
        boost::math::quadrature::exp_sinh<double> half_line;
        const double q = 0.5 * (N + 2.0 * s);
        auto f = [&](double rho) { return std::pow(rho, N - 2) * std::pow(1.0 + rho * rho, -q); };
        double l1 = 0.0;
        const double val = half_line.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14,
                                               &err_transverse, &l1);
        transverse = unit_sphere_area(N - 1) * val;
        err_transverse *= unit_sphere_area(N - 1);
    }

    // Oscillatory 1-D integral: finite part on [0, U] by tanh-sinh (1 - cos u = 2 sin^2(u/2)
    // avoids cancellation), tail on [U, inf) split into the algebraic piece and the cosine piece,
    // the latter along the contour u = U + i v where the integrand decays like exp(-v).
    const double U = 40.0 * pi;
    const double q1 = 1.0 + 2.0 * s;
    boost::math::quadrature::tanh_sinh<double> finite;
    double err_near = 0.0;
    double l1 = 0.0;
    double near = 0.0;
    {
        // Panels of one period keep the integrand non-oscillatory on each.
        const int panels = 20;
        for (int k = 0; k < panels; ++k) {
            const double lo = U * k / panels;
            const double hi = U * (k + 1) / panels;
            double e = 0.0;
            near += finite.integrate(
                [&](double u) {
                    if (u <= 0.0) return 0.0;
                    // 2 sin^2(u/2) u^{-1-2s} = sinc^2(u/2) u^{1-2s} / 2, finite for tiny u
                    const double sc = std::sin(0.5 * u) / (0.5 * u);
                    return 0.5 * sc * sc * std::pow(u, 1.0 - 2.0 * s);
                },
                lo, hi, 1e-14, &e, &l1);
            err_near += e;
        }
    }
    const double algebraic_tail = std::pow(U, -2.0 * s) / (2.0 * s);
    boost::math::quadrature::exp_sinh<double> half_line;
    double err_osc = 0.0;
    const std::complex<double> i1(0.0, 1.0);
    const std::complex<double> phase = std::exp(i1 * U);
    const double cosine_tail = half_line.integrate(
        [&](double v) {
            const std::complex<double> w = std::pow(std::complex<double>(U, v), -q1);
            return std::real(i1 * phase * w) * std::exp(-v);
        },
        0.0, std::numeric_limits<double>::infinity(), 1e-14, &err_osc, &l1);

    const double one_dim = 2.0 * (near + algebraic_tail - cosine_tail);
    const double integral = transverse * one_dim;
    const double rel_err = err_transverse / transverse + 2.0 * (err_near + err_osc) / one_dim;
    if (!(rel_err < 1e-9)) {
        throw NumericalFailure("verify_cns_constant: quadrature did not converge", 1.0 / integral,
                               rel_err / integral);
    }

    FracConstantCheck out;
    out.gamma_form = closed.value;
    out.integral_form = 1.0 / integral;
    out.relative_discrepancy = std::fabs(out.integral_form - out.gamma_form) / out.gamma_form;
    return out;
}

}  // namespace fracdrift::specfun
