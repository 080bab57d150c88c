#include <cmath>
#include <limits>
#include <string>

#include "fracdrift/errors.hpp"
#include "fracdrift/specfun.hpp"

namespace fracdrift::specfun {

namespace {

constexpr int max_terms = 100000;
constexpr double series_rtol = 1e-14;

// Excess values within this distance of an integer use the logarithmic
// connection formulas; beyond it the generic formula loses at most
// ~eps / distance to cancellation.
constexpr double integer_excess_tol = 1e-9;

[[noreturn]] void fail_series(const char* where, double sum, double bound) {
    throw NumericalFailure(std::string(where) + ": series did not converge within " +
                               std::to_string(max_terms) + " terms",
                           sum, bound);
}

// Tail bound for a series whose term ratio tends to `limit_ratio`: once the
// current ratio r_n is below one, the remaining terms are dominated by a
// geometric series with ratio max(r_n, limit_ratio).
bool tail_small(double term, double ratio, double limit_ratio, double scale) {
    const double q = std::max(std::fabs(ratio), std::fabs(limit_ratio));
    if (q >= 1.0) return false;
    return std::fabs(term) * q / (1.0 - q) <= series_rtol * scale;
}

// Plain power series sum_n (a)_n (b)_n / ((c)_n n!) z^n for |z| <= 1/2 or
// terminating parameter sets.
double series_2f1(double a, double b, double c, double z) {
    double term = 1.0;
    double sum = 1.0;
    double biggest = 1.0;
    for (int n = 0; n < max_terms; ++n) {
        const double ratio = (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        term *= ratio;
        if (term == 0.0) return sum;
        sum += term;
        biggest = std::max(biggest, std::fabs(term));
        const double next_ratio = (a + n + 1) * (b + n + 1) / ((c + n + 1) * (n + 2.0)) * z;
        if (tail_small(term, next_ratio, z, std::max(std::fabs(sum), 1e-3 * biggest))) return sum;
    }
    fail_series("gauss_2f1 power series", sum, std::fabs(term));
}

// Generic connection formula around z = 1 (c - a - b not an integer):
// F = G(c)G(e)/(G(c-a)G(c-b)) F(a,b;1-e;w) + w^e G(c)G(-e)/(G(a)G(b)) F(c-a,c-b;1+e;w).
double near_one_generic(double a, double b, double c, double w, double e) {
    const double gc = gamma_real(c);
    double out = 0.0;
    const double k1 = gc * gamma_real(e) * rgamma(c - a) * rgamma(c - b);
    if (k1 != 0.0) out += k1 * series_2f1(a, b, 1.0 - e, w);
    const double k2 = gc * gamma_real(-e) * rgamma(a) * rgamma(b);
    if (k2 != 0.0) out += k2 * std::pow(w, e) * series_2f1(c - a, c - b, 1.0 + e, w);
    return out;
}

// Logarithmic series shared by the integer cases:
//   sum_n (p)_n (q)_n / (n! (n+m)!) w^n [log w - psi(n+1) - psi(n+m+1) + psi(p+n) + psi(q+n)].
double log_series(double p, double q, int m, double w) {
    const double logw = std::log(w);
    double coef = 1.0;
    for (int k = 2; k <= m; ++k) coef /= k;  // 1 / m!
    double psi1 = digamma(1.0);
    double psi2 = digamma(m + 1.0);
    double psip = digamma(p);
    double psiq = digamma(q);
    double sum = coef * (logw - psi1 - psi2 + psip + psiq);
    double biggest = std::fabs(sum);
    for (int n = 0; n < max_terms; ++n) {
        // Advance n -> n + 1 using psi(x + 1) = psi(x) + 1/x.
        coef *= (p + n) * (q + n) / ((n + 1.0) * (n + 1.0 + m)) * w;
        psi1 += 1.0 / (n + 1.0);
        psi2 += 1.0 / (n + 1.0 + m);
        psip += 1.0 / (p + n);
        psiq += 1.0 / (q + n);
        const double term = coef * (logw - psi1 - psi2 + psip + psiq);
        sum += term;
        biggest = std::max(biggest, std::fabs(term));
        if (coef == 0.0) return sum;
        // The bracket grows only logarithmically; bound the tail with a margin on the ratio.
        const double ratio = (p + n + 1) * (q + n + 1) / ((n + 2.0) * (n + 2.0 + m)) * w;
        if (n > 2 && tail_small(2.0 * term, ratio * 1.05, w * 1.05,
                                std::max(std::fabs(sum), 1e-3 * biggest))) {
            return sum;
        }
    }
    fail_series("gauss_2f1 logarithmic series", sum, std::fabs(coef));
}

// c = a + b + m, m >= 0 integer (Abramowitz & Stegun 15.3.10 / 15.3.11).
double near_one_integer_nonneg(double a, double b, int m, double w) {
    const double cab = a + b + m;
    double out = 0.0;
    if (m > 0) {
        double finite = 0.0;
        double t = 1.0;
        for (int n = 0; n < m; ++n) {
            finite += t;
            t *= (a + n) * (b + n) / ((n + 1.0) * (1.0 - m + n)) * w;
        }
        out += gamma_real(m) * gamma_real(cab) * rgamma(a + m) * rgamma(b + m) * finite;
    }
    const double k = gamma_real(cab) * rgamma(a) * rgamma(b);
    if (k != 0.0) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;  // (z - 1)^m = (-w)^m
        out -= sign * std::pow(w, m) * k * log_series(a + m, b + m, m, w);
    }
    return out;
}

// c = a + b - m, m >= 1 integer (Abramowitz & Stegun 15.3.12).
double near_one_integer_neg(double a, double b, int m, double w) {
    const double cab = a + b - m;
    double finite = 0.0;
    double t = 1.0;
    for (int n = 0; n < m; ++n) {
        finite += t;
        t *= (a - m + n) * (b - m + n) / ((n + 1.0) * (1.0 - m + n)) * w;
    }
    double out = gamma_real(m) * gamma_real(cab) * rgamma(a) * rgamma(b) * std::pow(w, -m) * finite;
    const double k = gamma_real(cab) * rgamma(a - m) * rgamma(b - m);
    if (k != 0.0) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        out -= sign * k * log_series(a, b, m, w);
    }
    return out;
}

double near_one(double a, double b, double c, double w, double e) {
    const double m = std::nearbyint(e);
    if (std::fabs(e - m) > integer_excess_tol) return near_one_generic(a, b, c, w, e);
    const int mi = static_cast<int>(m);
    return mi >= 0 ? near_one_integer_nonneg(a, b, mi, w) : near_one_integer_neg(a, b, -mi, w);
}

void check_args(double c, double z) {
    if (is_nonpositive_integer(c)) throw DomainError("gauss_2f1: c is a nonpositive integer");
    if (!(z < 1.0)) throw DomainError("gauss_2f1: requires z < 1");
}

}  // namespace

double gauss_2f1_unit(double a, double b, double c, double z, double one_minus_z,
                      std::optional<double> excess) {
    // z may round to 1 in double precision; 1 - z is authoritative.
    if (is_nonpositive_integer(c)) throw DomainError("gauss_2f1: c is a nonpositive integer");
    if (!(z >= 0.0 && z <= 1.0) || !(one_minus_z > 0.0)) {
        throw DomainError("gauss_2f1_unit: requires z in [0,1)");
    }
    if (is_nonpositive_integer(a) || is_nonpositive_integer(b)) return series_2f1(a, b, c, z);
    if (z <= 0.5) return series_2f1(a, b, c, z);
    return near_one(a, b, c, one_minus_z, excess.value_or(c - a - b));
}

double gauss_2f1(const HypArgs& args) {
    const auto [a, b, c, z, excess] = args;
    check_args(c, z);
    if (z == 0.0) return 1.0;
    if (is_nonpositive_integer(a) || is_nonpositive_integer(b)) return series_2f1(a, b, c, z);
    if (z < 0.0) {
        // Pfaff: F(a,b;c;z) = (1-z)^{-b} F(c-a, b; c; z/(z-1)).
        const double one_minus = 1.0 - z;
        const double zt = -z / one_minus;
        const double wt = 1.0 / one_minus;
        return std::pow(one_minus, -b) * gauss_2f1_unit(c - a, b, c, zt, wt);
    }
    return gauss_2f1_unit(a, b, c, z, 1.0 - z, excess);
}

double gauss_2f1(double a, double b, double c, double z) {
    return gauss_2f1(HypArgs{a, b, c, z, std::nullopt});
}

}  // namespace fracdrift::specfun
