#pragma once

// Real-argument special functions: Gamma, digamma, the Gauss
// hypergeometric function 2F1 on z < 1, its z -> 1- limit regimes and the
// normalisation constant C_{N,s} of the fractional Laplacian.

#include <optional>

namespace fracdrift::specfun {

/// Gamma(t) by a Lanczos approximation (g = 7, 9 terms), reflected for t < 1/2.
/// Throws DomainError at t = 0, -1, -2, ...
double gamma_real(double t);

/// 1 / Gamma(t); exactly zero at the poles of Gamma.
double rgamma(double t);

/// Digamma psi(t) = Gamma'(t) / Gamma(t). Throws DomainError at the poles.
double digamma(double t);

/// sin(pi t) with exact zeros at the integers.
double sinpi(double t);

/// Surface area of the unit sphere S^{n-1} in R^n (n >= 1; |S^0| = 2).
double unit_sphere_area(int n);

bool is_nonpositive_integer(double x);

/// Arguments of F(a, b; c; z).
///
/// `excess`, when set, is the exact value of c - a - b supplied by a caller
/// that knows it symbolically; it selects the regime of the z -> 1 expansion
/// without trusting floating-point cancellation in c - a - b.
struct HypArgs {
    double a = 0.0;
    double b = 0.0;
    double c = 1.0;
    double z = 0.0;
    std::optional<double> excess{};
};

/// Gauss hypergeometric function for z < 1.
///
/// z in [0, 1/2]: power series. z in (1/2, 1): connection formulas around
/// z = 1 (including the logarithmic cases c - a - b in Z). z < 0: Pfaff
/// transformation (1 - z)^{-b} F(c - a, b; c; z / (z - 1)).
double gauss_2f1(const HypArgs& args);
double gauss_2f1(double a, double b, double c, double z);

/// F(a, b; c; z) for z in [0, 1) given both z and 1 - z, so that arguments
/// extremely close to 1 keep their precision.
double gauss_2f1_unit(double a, double b, double c, double z, double one_minus_z,
                      std::optional<double> excess = std::nullopt);

enum class LimitRegime {
    finite,       // c > a + b
    logarithmic,  // c = a + b
    power         // c < a + b
};

const char* to_string(LimitRegime regime);

/// Leading behaviour of F(a, b; c; z) as z -> 1-.
struct LimitDescriptor {
    LimitRegime regime = LimitRegime::finite;
    double coefficient = 0.0;
    double exponent = 0.0;  // c - a - b

    /// The leading term evaluated at 1 - z = w > 0:
    /// coefficient, coefficient * (-log w) or coefficient * w^exponent.
    double leading(double one_minus_z) const;
};

LimitDescriptor limit_2f1_at_one(double a, double b, double c,
                                 std::optional<double> excess = std::nullopt);

struct FracConstant {
    int N = 1;
    double s = 0.5;
    double value = 0.0;
};

/// C_{N,s} = 2^{2s-1} 2s Gamma((N+2s)/2) / (pi^{N/2} Gamma(1-s)).
FracConstant cns_constant(int N, double s);

struct FracConstantCheck {
    double gamma_form = 0.0;
    double integral_form = 0.0;
    double relative_discrepancy = 0.0;
};

/// Recomputes C_{N,s} as the reciprocal of the integral of
/// (1 - cos xi_1) / |xi|^{N+2s} over R^N by quadrature.
FracConstantCheck verify_cns_constant(int N, double s);

}  // namespace fracdrift::specfun
