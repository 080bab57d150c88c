#pragma once

// Radial profiles w(x) = w~(|x|) with their first two radial derivatives,
// the smooth cutoff family gamma_R and the convex transforms G used by the
// Kato inequality.

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace fracdrift {

/// Value and first two radial derivatives at one radius.
struct Jet {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

class RadialProfile {
public:
    using JetFn = std::function<Jet(double)>;

    struct Traits {
        std::string kind;
        /// Radii where w~ fails to be C^2 (or is singular). Quadrature splits there
        /// and refuses to evaluate exactly on them.
        std::vector<double> kinks;
        /// Radii where w~ is smooth but changes character; used only as panel breaks.
        std::vector<double> breaks;
        bool bounded = true;
        /// Order of the singularity at the origin, |w| ~ r^{-order} (0 if bounded).
        double singular_order = 0.0;
        /// Far-field behaviour |w| ~ r^{-decay}; +inf for compact support.
        double decay = 0.0;
        /// lim_{r -> inf} w~(r) when it exists.
        std::optional<double> limit_at_infinity;
    };

    RadialProfile(Traits traits, JetFn jet);

    double value(double r) const { return jet_(r).v; }
    Jet jet(double r) const { return jet_(r); }

    const std::string& kind() const { return traits_.kind; }
    const Traits& traits() const { return traits_; }
    bool c2() const { return traits_.kinks.empty(); }

    /// Tail exponent fitted for tabulated data (value ~ A r^exponent), if any.
    std::optional<double> fitted_tail_exponent() const { return fitted_exponent_; }

    /// int |w(x)| / (1 + |x|^{N+2s}) dx < inf, judged from the singular order and decay.
    bool in_weighted_l1(int N, double s) const;

    /// (1 + r^2)^{-beta/2}.
    static RadialProfile psi_beta(double beta);
    /// r^{-beta}, singular at the origin.
    static RadialProfile power_law(double beta);
    /// (R0^2 - r^2)_+^exponent.
    static RadialProfile getoor(double R0, double exponent);
    /// exp(-r^2 / width^2).
    static RadialProfile gaussian(double width);
    static RadialProfile constant(double c);
    /// max(1 - r, 0): not C^2 at r = 1.
    static RadialProfile capped_linear();
    /// gamma(r / R) with the bridge of CutoffFamily.
    static RadialProfile cutoff(double R);
    /// Natural cubic spline through (radius, value) pairs; beyond the last radius a power
    /// law fitted to the last points in log-log coordinates (constant if the data are
    /// not positive there).
    static RadialProfile tabulated(std::vector<double> radii, std::vector<double> values);
    static RadialProfile custom(Traits traits, JetFn jet);

    /// f * g.
    static RadialProfile product(const RadialProfile& f, const RadialProfile& g);

private:
    Traits traits_;
    JetFn jet_;
    std::optional<double> fitted_exponent_;
};

/// Reads the two-column text format "radius value" (blank lines and '#' comments
/// skipped). Radii must be strictly increasing and nonnegative.
RadialProfile read_tabulated_profile(std::istream& in);

/// Smooth nonincreasing bridge gamma: 1 on [0, 1/2], 0 on [1, inf), on (1/2, 1) the
/// normalised integral of exp(-1/(t - 1/2) - 1/(1 - t)).
struct CutoffFamily {
    double R = 1.0;

    /// gamma(t) and its derivatives in t.
    static Jet bridge(double t);
    /// gamma_R(x) = gamma(|x| / R) with derivatives in r.
    Jet at(double r) const;
};

/// A convex function of one variable with two derivatives.
struct ConvexTransform {
    std::string name;
    std::function<double(double)> G;
    std::function<double(double)> dG;
    std::function<double(double)> d2G;
};

struct GAlphaParams {
    double p = 2.0;
    double alpha_reg = 0.1;
};

/// G_alpha(r) = (r^2 + alpha)^{p/2}. Requires p >= 1, alpha > 0.
ConvexTransform g_alpha(const GAlphaParams& params);

/// G(r) = r, the affine limit where the Kato inequality is an equality.
ConvexTransform linear_transform();

/// G(u(r)) as a radial profile.
RadialProfile compose(const ConvexTransform& G, const RadialProfile& u);

}  // namespace fracdrift
