#include "fracdrift/fields.hpp"

#include <cmath>
#include <sstream>

#include "fracdrift/errors.hpp"

namespace fracdrift {

namespace {

// Claims are compared with a relative slack of a few ulps.
constexpr double claim_slack = 1e-12;

}  // namespace

double DriftField::magnitude(double r) const { return std::fabs(radial(r)); }

DriftField DriftField::zero() {
    DriftField b;
    b.name = "zero";
    b.radial = [](double) { return 0.0; };
    b.div = [](double) { return 0.0; };
    return b;
}

DriftField DriftField::radial_power(int N, double sigma, double K, double delta) {
    if (N < 1) throw DomainError("radial_power: N must be >= 1");
    if (delta < 0.0) throw DomainError("radial_power: delta must be >= 0");
    DriftField b;
    b.name = "radial_power";
    b.sigma = sigma;
    b.K = K;
    const double d2 = delta * delta;
    b.radial = [=](double r) { return K * r * std::pow(d2 + r * r, 0.5 * (sigma - 1.0)); };
    b.div = [=](double r) {
        const double q = d2 + r * r;
        return K * std::pow(q, 0.5 * (sigma - 3.0)) * (d2 + sigma * r * r) +
               (N - 1) * K * std::pow(q, 0.5 * (sigma - 1.0));
    };
    return b;
}

DriftField DriftField::envelope(double sigma, double K) {
    DriftField b;
    b.name = "envelope";
    b.sigma = sigma;
    b.K = K;
    b.radial = [=](double r) { return K * std::pow(1.0 + r, sigma); };
    b.div = [=](double r) { return -K * std::pow(1.0 + r, sigma - 1.0); };
    return b;
}

ClaimCheck check_claims(const DriftField& b, const std::vector<double>& radii) {
    ClaimCheck c;
    for (double r : radii) {
        const double br = b.radial(r), dv = b.div(r);
        const double rad_bound = b.K * std::pow(1.0 + r, b.sigma);
        const double div_bound = b.K * std::pow(1.0 + r, b.sigma - 1.0);
        std::ostringstream os;
        if (!std::isfinite(br) || !std::isfinite(dv)) {
            os << "drift not finite at r = " << r;
        } else if (br > 0.0 && br > rad_bound * (1.0 + claim_slack)) {
            os << "radial component " << br << " exceeds K(1+r)^sigma = " << rad_bound << " at r = " << r;
        } else if (-dv > div_bound * (1.0 + claim_slack)) {
            os << "[div b]_- = " << -dv << " exceeds K(1+r)^(sigma-1) = " << div_bound << " at r = " << r;
        } else {
            continue;
        }
        c.holds = false;
        c.first_violation = r;
        c.what = os.str();
        return c;
    }
    return c;
}

Density Density::inverse_poly(double alpha, double C0) {
    if (C0 <= 0.0) throw DomainError("inverse_poly: C0 must be > 0");
    Density d;
    d.name = "inverse_poly";
    d.alpha = alpha;
    d.C0 = C0;
    d.alpha_bar = alpha;
    d.C_bar = C0;
    d.rho = [=](double r) { return C0 * std::pow(1.0 + r * r, -0.5 * alpha); };
    return d;
}

Density Density::constant(double c) {
    Density d = inverse_poly(0.0, c);
    d.name = "constant";
    return d;
}

ClaimCheck check_claims(const Density& d, const std::vector<double>& radii) {
    ClaimCheck c;
    for (double r : radii) {
        const double v = d.rho(r);
        const double w = std::pow(1.0 + r * r, -0.5 * d.alpha);
        std::ostringstream os;
        if (!(v > 0.0) || !std::isfinite(v)) {
            os << "rho must be positive and finite, got " << v << " at r = " << r;
        } else if (v < d.C0 * w * (1.0 - claim_slack)) {
            os << "rho = " << v << " below C0(1+r^2)^(-alpha/2) at r = " << r;
        } else if (d.alpha_bar && d.C_bar &&
                   v > *d.C_bar * std::pow(1.0 + r * r, -0.5 * *d.alpha_bar) * (1.0 + claim_slack)) {
            os << "rho = " << v << " above C_bar(1+r^2)^(-alpha_bar/2) at r = " << r;
        } else {
            continue;
        }
        c.holds = false;
        c.first_violation = r;
        c.what = os.str();
        return c;
    }
    return c;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw ArgumentError("log_grid: need n >= 2 and 0 < lo < hi");
    std::vector<double> g(n);
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * i / (n - 1.0));
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
    if (n < 2 || !(hi > lo)) throw ArgumentError("uniform_grid: need n >= 2 and lo < hi");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1.0);
    g.back() = hi;
    return g;
}

}  // namespace fracdrift
