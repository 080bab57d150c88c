#include "fracdrift/radial_fraclap.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracdrift/errors.hpp"
#include "fracdrift/specfun.hpp"

namespace fracdrift {

namespace {

using specfun::gamma_real;
using specfun::rgamma;
using specfun::unit_sphere_area;

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

void check_order(int N, double s) {
    if (N < 1) throw DomainError("dimension N must be >= 1");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("order s must lie in (0,1)");
}

// Integrand data for a radial singular integral
//   int_0^inf t^{-1-2s} A(t) dt,  A(t) = int_{S^{N-1}} pair(|x + t w|) dw,
// with pair(rho) = c0 + q(rho) and A(t) ~ near_coef * t^2 as t -> 0.
struct PairKernel {
    std::function<double(double)> pair;
    double c0 = 0.0;
    std::function<double(double)> q;
    std::optional<double> q_inf;
    double near_coef = 0.0;
    std::vector<double> kinks;
    std::vector<double> breaks;
};

struct Accum {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
    void add(double v, double e, double l) {
        value += v;
        error += e;
        l1 += l;
    }
};

boost::math::quadrature::tanh_sinh<double>& outer_rule() {
    thread_local boost::math::quadrature::tanh_sinh<double> rule;
    return rule;
}
boost::math::quadrature::tanh_sinh<double>& inner_rule() {
    thread_local boost::math::quadrature::tanh_sinh<double> rule;
    return rule;
}
boost::math::quadrature::exp_sinh<double>& tail_rule() {
    thread_local boost::math::quadrature::exp_sinh<double> rule;
    return rule;
}

constexpr double outer_tol = 1e-9;
constexpr double inner_tol = 1e-9;

// Sphere integral of f(|x + t w|) over w in S^{N-1} with |x| = r. `r_minus_t` is r - t,
// passed separately so that it keeps full precision when t approaches r.
Accum sphere_integral(int N, double r, double t, double r_minus_t, const std::function<double(double)>& f,
                      const std::vector<double>& radii) {
    Accum acc;
    if (r == 0.0) {
        const double v = unit_sphere_area(N) * f(t);
        acc.add(v, 0.0, std::fabs(v));
        return acc;
    }
    if (N == 1) {
        const double a = f(r + t), b = f(std::fabs(r_minus_t));
        acc.add(a + b, 0.0, std::fabs(a) + std::fabs(b));
        return acc;
    }
    // |x + t w|^2 = (r - t)^2 + 4 r t cos^2(theta/2), theta the angle between x and w.
    const double d2 = r_minus_t * r_minus_t;
    const double rt4 = 4.0 * r * t;
    std::vector<double> nodes{0.0, pi};
    for (double k : radii) {
        const double c2 = (k * k - d2) / rt4;
        if (c2 > 0.0 && c2 < 1.0) nodes.push_back(2.0 * std::acos(std::sqrt(c2)));
    }
    std::sort(nodes.begin(), nodes.end());
    const double area = unit_sphere_area(N - 1);
    auto integrand = [&](double theta) {
        const double c = std::cos(0.5 * theta);
        const double rho = std::sqrt(d2 + rt4 * c * c);
        const double v = f(rho);
        if (!std::isfinite(v)) return 0.0;  // isolated singular point of the profile
        return N == 2 ? v : v * std::pow(std::sin(theta), N - 2);
    };
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (nodes[i + 1] - nodes[i] <= 1e-15) continue;
        double err = 0.0, l1 = 0.0;
        const double v = inner_rule().integrate(integrand, nodes[i], nodes[i + 1], inner_tol, &err, &l1);
        acc.add(area * v, area * err, area * l1);
    }
    return acc;
}

QuadratureResult radial_singular_integral(int N, double s, double r, const PairKernel& k,
                                          const QuadratureOptions& opt) {
    check_order(N, s);
    if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("radius must be finite and >= 0");

    std::vector<double> radii = k.kinks;
    radii.insert(radii.end(), k.breaks.begin(), k.breaks.end());

    double delta = r > 0.0 ? 1e-3 * std::min(r, 1.0) : 1e-3;
    for (double kink : k.kinks) {
        const double dist = std::fabs(r - kink);
        if (dist <= 1e-12 * std::max(1.0, kink)) {
            throw DomainError("quadrature point r = " + std::to_string(r) + " sits on a non-smooth radius");
        }
        delta = std::min(delta, 0.01 * dist);
    }
    for (double b : k.breaks) {
        if (b > 0.0) delta = std::min(delta, 1e-3 * b);
    }

    Accum acc;
    // Inner ball |y - x| < delta: second-order Taylor expansion of the pair term.
    const double near = k.near_coef * std::pow(delta, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
    acc.add(near, 0.0, std::fabs(near));

    double kmax = 0.0;
    for (double x : radii) kmax = std::max(kmax, x);
    const double T = 10.0 * std::max({1.0, r, r + kmax});
    std::vector<double> nodes{delta, T, 1.0, r};
    for (double x : radii) {
        nodes.push_back(std::fabs(r - x));
        nodes.push_back(r + x);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::remove_if(nodes.begin(), nodes.end(), [&](double x) { return x < delta || x > T; }),
                nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    const double q1 = 1.0 + 2.0 * s;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double lo = nodes[i], hi = nodes[i + 1];
        if (hi - lo <= 1e-14 * hi) continue;
        // tanh-sinh passes tc = lo - t near lo and hi - t near hi; when that endpoint is r
        // itself, tc is r - t without cancellation.
        auto outer = [&](double t, double tc) {
            const bool near_r = (tc <= 0.0 && lo == r) || (tc > 0.0 && hi == r);
            const Accum a = sphere_integral(N, r, t, near_r ? tc : r - t, k.pair, radii);
            const double v = a.value * std::pow(t, -q1);
            return std::isfinite(v) ? v : 0.0;
        };
        double err = 0.0, l1 = 0.0;
        const double v = outer_rule().integrate(outer, lo, hi, outer_tol, &err, &l1);
        acc.add(v, err, l1);
    }

    // Tail t > T: the constant part c0 + q_inf integrates in closed form, the rest decays.
    const double area = unit_sphere_area(N);
    const double qinf = k.q_inf.value_or(0.0);
    const double analytic = area * (k.c0 + qinf) * std::pow(T, -2.0 * s) / (2.0 * s);
    acc.add(analytic, 0.0, std::fabs(analytic));
    auto tail = [&](double t) {
        const Accum a = sphere_integral(N, r, t, r - t, k.q, radii);
        return (a.value - area * qinf) * std::pow(t, -q1);
    };
    {
        double err = 0.0, l1 = 0.0;
        const double v = tail_rule().integrate(tail, T, inf, outer_tol, &err, &l1);
        acc.add(v, err, l1);
    }

    const double C = specfun::cns_constant(N, s).value;
    QuadratureResult out{C * acc.value, C * acc.error};
    if (!(out.error <= opt.rel_tol * C * acc.l1 + opt.abs_tol) || !std::isfinite(out.value)) {
        throw NumericalFailure("radial quadrature: error estimate above tolerance", out.value, out.error);
    }
    return out;
}

// Laplacian of a radial function at radius r in R^N.
double radial_laplacian(int N, const Jet& j, double r) {
    if (r == 0.0) return N * j.d2;
    return j.d2 + (N - 1) * j.d1 / r;
}

}  // namespace

QuadratureResult fraclap_quadrature_detailed(int N, double s, const RadialProfile& w, double r,
                                             const QuadratureOptions& opt) {
    check_order(N, s);
    const Jet j = w.jet(r);
    const auto& tr = w.traits();
    PairKernel k;
    k.c0 = j.v;
    k.pair = [&w, v = j.v](double rho) { return v - w.value(rho); };
    k.q = [&w](double rho) { return -w.value(rho); };
    if (tr.limit_at_infinity) k.q_inf = -*tr.limit_at_infinity;
    k.near_coef = -unit_sphere_area(N) * radial_laplacian(N, j, r) / (2.0 * N);
    k.kinks = tr.kinks;
    k.breaks = tr.breaks;
    return radial_singular_integral(N, s, r, k, opt);
}

double fraclap_quadrature(int N, double s, const RadialProfile& w, double r) {
    return fraclap_quadrature_detailed(N, s, w, r).value;
}

QuadratureResult bilinear_form_detailed(int N, double s, const RadialProfile& f, const RadialProfile& g,
                                        double r, const QuadratureOptions& opt) {
    check_order(N, s);
    const Jet jf = f.jet(r);
    const Jet jg = g.jet(r);
    PairKernel k;
    k.c0 = jf.v * jg.v;
    k.pair = [&f, &g, fr = jf.v, gr = jg.v](double rho) { return (fr - f.value(rho)) * (gr - g.value(rho)); };
    k.q = [&f, &g, fr = jf.v, gr = jg.v](double rho) {
        const double a = f.value(rho), b = g.value(rho);
        return -fr * b - gr * a + a * b;
    };
    const auto& tf = f.traits();
    const auto& tg = g.traits();
    if (tf.limit_at_infinity && tg.limit_at_infinity) {
        const double a = *tf.limit_at_infinity, b = *tg.limit_at_infinity;
        k.q_inf = -jf.v * b - jg.v * a + a * b;
    }
    k.near_coef = unit_sphere_area(N) * jf.d1 * jg.d1 / N;
    k.kinks = tf.kinks;
    k.kinks.insert(k.kinks.end(), tg.kinks.begin(), tg.kinks.end());
    k.breaks = tf.breaks;
    k.breaks.insert(k.breaks.end(), tg.breaks.begin(), tg.breaks.end());
    return radial_singular_integral(N, s, r, k, opt);
}

double bilinear_form(int N, double s, const RadialProfile& f, const RadialProfile& g, double r) {
    return bilinear_form_detailed(N, s, f, g, r).value;
}

double bilinear_form(int N, double s, const RadialProfile& f, const RadialProfile& g,
                     const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != N) throw ArgumentError("bilinear_form: point has wrong dimension");
    double r2 = 0.0;
    for (double c : x) r2 += c * c;
    return bilinear_form(N, s, f, g, std::sqrt(r2));
}

std::vector<double> fraclap_quadrature_sweep_serial(int N, double s, const RadialProfile& w,
                                                    const std::vector<double>& radii) {
    std::vector<double> out(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) out[i] = fraclap_quadrature(N, s, w, radii[i]);
    return out;
}

std::vector<double> fraclap_quadrature_sweep(int N, double s, const RadialProfile& w,
                                             const std::vector<double>& radii) {
    std::vector<double> out(radii.size());
    std::exception_ptr failure;
    std::mutex guard;
    const long n = static_cast<long>(radii.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        try {
            out[i] = fraclap_quadrature(N, s, w, radii[i]);
        } catch (...) {
            std::lock_guard<std::mutex> lock(guard);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

double psi_constant(int N, double s, double beta) {
    check_order(N, s);
    if (!(beta > 0.0)) throw DomainError("psi_constant: beta must be positive");
    return std::pow(2.0, 2.0 * s) * gamma_real(0.5 * beta + s) * gamma_real(0.5 * N + s) /
           (gamma_real(0.5 * beta) * gamma_real(0.5 * N));
}

double fraclap_psi_beta(int N, double s, double beta, double r) {
    if (!(r >= 0.0)) throw DomainError("fraclap_psi_beta: radius must be >= 0");
    const double C = psi_constant(N, s, beta);
    const double X = 1.0 + r * r;
    const double b = 0.5 * beta + s;
    const double F = specfun::gauss_2f1_unit(-s, b, 0.5 * N, r * r / X, 1.0 / X, 0.5 * (N - beta));
    return C * std::pow(X, -b) * F;
}

PsiCalibration psi_calibration(int N, double s, double beta, double radius) {
    PsiCalibration c;
    c.radius = radius;
    c.closed_form = fraclap_psi_beta(N, s, beta, radius);
    c.quadrature = fraclap_quadrature(N, s, RadialProfile::psi_beta(beta), radius);
    c.ratio = c.quadrature / c.closed_form;
    c.relative_residual = std::fabs(c.ratio - 1.0);
    return c;
}

double power_law_multiplier(int N, double s, double beta) {
    check_order(N, s);
    if (!(beta > 0.0 && beta < N)) throw DomainError("power law: requires 0 < beta < N");
    return std::pow(2.0, 2.0 * s) * gamma_real(0.5 * (beta + 2.0 * s)) * gamma_real(0.5 * (N - beta)) *
           rgamma(0.5 * (N - beta - 2.0 * s)) / gamma_real(0.5 * beta);
}

double power_law_multiplier_quadrature(int N, double s, double beta) {
    check_order(N, s);
    if (!(beta > 0.0 && beta < N)) throw DomainError("power law: requires 0 < beta < N");
    return fraclap_quadrature(N, s, RadialProfile::power_law(beta), 1.0);
}

double fraclap_power_law(int N, double s, double beta, double r) {
    if (!(r > 0.0)) throw DomainError("fraclap_power_law: radius must be > 0");
    return power_law_multiplier(N, s, beta) * std::pow(r, -beta - 2.0 * s);
}

double getoor_constant(int N, double s) {
    check_order(N, s);
    return std::pow(2.0, 2.0 * s) * gamma_real(1.0 + s) * gamma_real(0.5 * N + s) / gamma_real(0.5 * N);
}

double fraclap_getoor(int N, double s, double R0, double r) {
    if (!(R0 > 0.0)) throw DomainError("fraclap_getoor: R0 must be positive");
    if (!(r >= 0.0 && r < R0)) throw DomainError("fraclap_getoor: requires 0 <= |x| < R0");
    return getoor_constant(N, s);
}

SupersolutionReport radial_supersolution_test(int N, double s, const RadialProfile& w,
                                              const std::vector<double>& r_grid) {
    check_order(N, s);
    if (r_grid.empty()) throw ArgumentError("radial_supersolution_test: empty radius grid");
    if (!w.c2() || !w.traits().bounded) {
        throw DomainError("radial_supersolution_test: profile '" + w.kind() + "' is not bounded and C^2");
    }
    SupersolutionReport rep;
    const double coef = N - 2.0 * s + 1.0;
    for (double r : r_grid) {
        if (!(r > 0.0)) throw ArgumentError("radial_supersolution_test: radii must be positive");
        const Jet j = w.jet(r);
        const double v = j.d2 + coef / r * j.d1;
        rep.values.push_back(v);
        if (v > 0.0 && rep.holds) {
            rep.holds = false;
            rep.first_violation = r;
        }
    }
    return rep;
}

double kato_gap(int N, double s, const RadialProfile& u, const ConvexTransform& G, double r) {
    const double lu = fraclap_quadrature(N, s, u, r);
    const double lg = fraclap_quadrature(N, s, compose(G, u), r);
    return G.dG(u.value(r)) * lu - lg;
}

double kato_gap(int N, double s, const RadialProfile& u, const GAlphaParams& G, double r) {
    return kato_gap(N, s, u, g_alpha(G), r);
}

}  // namespace fracdrift
