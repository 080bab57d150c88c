#pragma once

// Radial coefficient fields: drifts b(x) = b_r(|x|) x/|x| with a prescribed
// divergence, and densities rho(|x|) with claimed power-type bounds.

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fracdrift {

/// A radial drift described by its radial component <b(x), x/|x|> and div b as
/// functions of r = |x|. D+ is where the radial component is positive. The
/// claimed bounds (sigma, K) are checked by check_claims, never assumed.
struct DriftField {
    std::string name;
    double sigma = 0.0;
    double K = 0.0;
    std::function<double(double)> radial;
    std::function<double(double)> div;

    bool in_d_plus(double r) const { return radial(r) > 0.0; }
    /// Magnitude |b(x)| as a vector in R^N (radial fields only).
    double magnitude(double r) const;

    /// b = 0.
    static DriftField zero();
    /// b(x) = K x (delta^2 + |x|^2)^{(sigma-1)/2} in R^N; delta = 0 gives K |x|^sigma x/|x|.
    static DriftField radial_power(int N, double sigma, double K, double delta = 0.0);
    /// The extreme coefficients allowed by the bounds: radial component K(1+r)^sigma and
    /// div b = -K(1+r)^{sigma-1}. Not the divergence of an actual field; it is the worst
    /// case the residual tests have to absorb.
    static DriftField envelope(double sigma, double K);
};

struct ClaimCheck {
    bool holds = true;
    std::optional<double> first_violation;
    std::string what;
};

/// radial <= K(1+r)^sigma where positive and [div b]_- <= K(1+r)^{sigma-1} at every radius.
ClaimCheck check_claims(const DriftField& b, const std::vector<double>& radii);

struct Density {
    std::string name;
    double alpha = 0.0;
    double C0 = 1.0;
    /// Optional upper bound rho <= C_bar (1+r^2)^{-alpha_bar/2}.
    std::optional<double> alpha_bar;
    std::optional<double> C_bar;
    std::function<double(double)> rho;

    /// rho = C0 (1+r^2)^{-alpha/2}, carrying itself as the upper bound.
    static Density inverse_poly(double alpha, double C0);
    static Density constant(double c);
};

/// rho > 0, rho >= C0 (1+r^2)^{-alpha/2}, and the upper bound when supplied.
ClaimCheck check_claims(const Density& rho, const std::vector<double>& radii);

/// Log-spaced radii on [lo, hi], n >= 2 points.
std::vector<double> log_grid(double lo, double hi, int n);
/// Uniform points on [lo, hi], n >= 2 points.
std::vector<double> uniform_grid(double lo, double hi, int n);

}  // namespace fracdrift
