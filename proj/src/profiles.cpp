#include "fracdrift/profiles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "fracdrift/errors.hpp"

namespace fracdrift {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// exp(-1/(t - 1/2) - 1/(1 - t)) on (1/2, 1), zero elsewhere.
double bump(double t) {
    if (!(t > 0.5 && t < 1.0)) return 0.0;
    return std::exp(-1.0 / (t - 0.5) - 1.0 / (1.0 - t));
}

// Cumulative integral of the bump over equal panels of (1/2, 1).
class BumpTable {
public:
    static constexpr int panels = 512;

    BumpTable() {
        cumulative_[0] = 0.0;
        for (int k = 0; k < panels; ++k) {
            cumulative_[k + 1] = cumulative_[k] + panel_integral(node(k), node(k + 1));
        }
        remaining_[panels] = 0.0;
        for (int k = panels; k > 0; --k) {
            remaining_[k - 1] = remaining_[k] + panel_integral(node(k - 1), node(k));
        }
    }

    double total() const { return cumulative_[panels]; }

    // int_t^1 bump, summed from the right end so it keeps relative accuracy as t -> 1.
    double complement(double t) const {
        if (t <= 0.5) return remaining_[0];
        if (t >= 1.0) return 0.0;
        const int k = std::min(panels - 1, static_cast<int>((t - 0.5) * 2.0 * panels));
        return remaining_[k + 1] + panel_integral(t, node(k + 1));
    }

    // int_{1/2}^t bump.
    double partial(double t) const {
        if (t <= 0.5) return 0.0;
        if (t >= 1.0) return total();
        const int k = std::min(panels - 1, static_cast<int>((t - 0.5) * 2.0 * panels));
        return cumulative_[k] + panel_integral(node(k), t);
    }

private:
    static double node(int k) { return 0.5 + 0.5 * k / panels; }
    static double panel_integral(double a, double b) {
        return boost::math::quadrature::gauss<double, 7>::integrate(bump, a, b);
    }

    std::array<double, panels + 1> cumulative_{};
    std::array<double, panels + 1> remaining_{};
};

const BumpTable& bump_table() {
    static const BumpTable table;  // thread-safe initialisation
    return table;
}

void require(bool ok, const char* msg) {
    if (!ok) throw ArgumentError(msg);
}

}  // namespace

RadialProfile::RadialProfile(Traits traits, JetFn jet) : traits_(std::move(traits)), jet_(std::move(jet)) {}

bool RadialProfile::in_weighted_l1(int N, double s) const {
    return traits_.singular_order < N && traits_.decay + 2.0 * s > 0.0;
}

RadialProfile RadialProfile::psi_beta(double beta) {
    require(beta > 0.0, "psi_beta: beta must be positive");
    Traits t{"psi_beta", {}, {}, true, 0.0, beta, 0.0};
    return RadialProfile(std::move(t), [beta](double r) {
        const double X = 1.0 + r * r;
        const double v = std::pow(X, -0.5 * beta);
        return Jet{v, -beta * r * v / X, -beta * v / X + beta * (beta + 2.0) * r * r * v / (X * X)};
    });
}

RadialProfile RadialProfile::power_law(double beta) {
    require(beta > 0.0, "power_law: beta must be positive");
    Traits t{"power_law", {0.0}, {}, false, beta, beta, 0.0};
    return RadialProfile(std::move(t), [beta](double r) {
        const double v = std::pow(r, -beta);
        return Jet{v, -beta * v / r, beta * (beta + 1.0) * v / (r * r)};
    });
}

RadialProfile RadialProfile::getoor(double R0, double e) {
    require(R0 > 0.0 && e > 0.0, "getoor: radius and exponent must be positive");
    Traits t{"getoor", {R0}, {}, true, 0.0, inf, 0.0};
    return RadialProfile(std::move(t), [R0, e](double r) {
        const double q = R0 * R0 - r * r;
        if (q <= 0.0) return Jet{};
        const double v = std::pow(q, e);
        return Jet{v, -2.0 * e * r * v / q, -2.0 * e * v / q + 4.0 * e * (e - 1.0) * r * r * v / (q * q)};
    });
}

RadialProfile RadialProfile::gaussian(double width) {
    require(width > 0.0, "gaussian: width must be positive");
    Traits t{"gaussian", {}, {}, true, 0.0, inf, 0.0};
    const double a = 1.0 / (width * width);
    return RadialProfile(std::move(t), [a](double r) {
        const double v = std::exp(-a * r * r);
        return Jet{v, -2.0 * a * r * v, (4.0 * a * a * r * r - 2.0 * a) * v};
    });
}

RadialProfile RadialProfile::constant(double c) {
    Traits t{"constant", {}, {}, true, 0.0, 0.0, c};
    return RadialProfile(std::move(t), [c](double) { return Jet{c, 0.0, 0.0}; });
}

RadialProfile RadialProfile::capped_linear() {
    Traits t{"capped_linear", {1.0}, {}, true, 0.0, inf, 0.0};
    return RadialProfile(std::move(t), [](double r) {
        return r < 1.0 ? Jet{1.0 - r, -1.0, 0.0} : Jet{};
    });
}

RadialProfile RadialProfile::cutoff(double R) {
    require(R > 0.0, "cutoff: radius must be positive");
    Traits t{"cutoff", {}, {0.5 * R, R}, true, 0.0, inf, 0.0};
    const CutoffFamily fam{R};
    return RadialProfile(std::move(t), [fam](double r) { return fam.at(r); });
}

RadialProfile RadialProfile::custom(Traits traits, JetFn jet) {
    return RadialProfile(std::move(traits), std::move(jet));
}

RadialProfile RadialProfile::product(const RadialProfile& f, const RadialProfile& g) {
    Traits t;
    t.kind = "product(" + f.kind() + "," + g.kind() + ")";
    const auto& a = f.traits();
    const auto& b = g.traits();
    t.kinks = a.kinks;
    t.kinks.insert(t.kinks.end(), b.kinks.begin(), b.kinks.end());
    t.breaks = a.breaks;
    t.breaks.insert(t.breaks.end(), b.breaks.begin(), b.breaks.end());
    t.bounded = a.bounded && b.bounded;
    t.singular_order = a.singular_order + b.singular_order;
    t.decay = a.decay + b.decay;
    if (a.limit_at_infinity && b.limit_at_infinity) t.limit_at_infinity = *a.limit_at_infinity * *b.limit_at_infinity;
    if (a.decay > 0.0 && b.bounded) t.limit_at_infinity = 0.0;
    if (b.decay > 0.0 && a.bounded) t.limit_at_infinity = 0.0;
    return RadialProfile(std::move(t), [f, g](double r) {
        const Jet x = f.jet(r);
        const Jet y = g.jet(r);
        return Jet{x.v * y.v, x.d1 * y.v + x.v * y.d1, x.d2 * y.v + 2.0 * x.d1 * y.d1 + x.v * y.d2};
    });
}

RadialProfile RadialProfile::tabulated(std::vector<double> r, std::vector<double> v) {
    const std::size_t n = r.size();
    require(n >= 2 && v.size() == n, "tabulated: need at least two (radius, value) pairs");
    for (std::size_t i = 0; i < n; ++i) {
        require(std::isfinite(r[i]) && std::isfinite(v[i]), "tabulated: non-finite entry");
        require(r[i] >= 0.0, "tabulated: radii must be nonnegative");
        if (i > 0) require(r[i] > r[i - 1], "tabulated: radii must be strictly increasing");
    }

    // Natural cubic spline second derivatives by the tridiagonal (Thomas) solve.
    std::vector<double> m(n, 0.0);
    if (n > 2) {
        std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = r[i] - r[i - 1], h1 = r[i + 1] - r[i];
            diag[i] = 2.0 * (h0 + h1);
            upper[i] = h1;
            rhs[i] = 6.0 * ((v[i + 1] - v[i]) / h1 - (v[i] - v[i - 1]) / h0);
            if (i > 1) {
                const double w = h0 / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
        }
    }

    // Tail fit over the last few points, in log-log coordinates.
    const std::size_t k = std::min<std::size_t>(4, n);
    double exponent = 0.0;
    bool positive = r[n - k] > 0.0;
    for (std::size_t i = n - k; i < n; ++i) positive = positive && v[i] > 0.0;
    if (positive) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = n - k; i < n; ++i) {
            const double x = std::log(r[i]), y = std::log(v[i]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
        }
        const double kk = static_cast<double>(k);
        exponent = (kk * sxy - sx * sy) / (kk * sxx - sx * sx);
    }

    Traits t;
    t.kind = "tabulated";
    t.kinks = {r[n - 1]};
    t.bounded = exponent <= 0.0;
    t.decay = -exponent;
    if (exponent < 0.0) t.limit_at_infinity = 0.0;
    if (exponent == 0.0) t.limit_at_infinity = v[n - 1];

    auto jet = [r, v, m, exponent](double x) {
        const std::size_t n = r.size();
        if (x >= r[n - 1]) {
            const double val = v[n - 1] * std::pow(x / r[n - 1], exponent);
            return Jet{val, exponent * val / x, exponent * (exponent - 1.0) * val / (x * x)};
        }
        std::size_t i = 0;
        if (x > r[0]) i = static_cast<std::size_t>(std::upper_bound(r.begin(), r.end(), x) - r.begin()) - 1;
        const double h = r[i + 1] - r[i];
        const double A = (r[i + 1] - x) / h, B = (x - r[i]) / h;
        const double val = A * v[i] + B * v[i + 1] + ((A * A * A - A) * m[i] + (B * B * B - B) * m[i + 1]) * h * h / 6.0;
        const double d1 = (v[i + 1] - v[i]) / h + (-(3.0 * A * A - 1.0) * m[i] + (3.0 * B * B - 1.0) * m[i + 1]) * h / 6.0;
        const double d2 = A * m[i] + B * m[i + 1];
        return Jet{val, d1, d2};
    };
    RadialProfile out(std::move(t), std::move(jet));
    if (positive) out.fitted_exponent_ = exponent;
    else out.fitted_exponent_ = 0.0;
    return out;
}

RadialProfile read_tabulated_profile(std::istream& in) {
    std::vector<double> r, v;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double a, b;
        if (!(ls >> a)) continue;
        std::string rest;
        if (!(ls >> b) || (ls >> rest)) {
            throw ArgumentError("tabulated profile: line " + std::to_string(lineno) + " needs exactly two numbers");
        }
        r.push_back(a);
        v.push_back(b);
    }
    return RadialProfile::tabulated(std::move(r), std::move(v));
}

Jet CutoffFamily::bridge(double t) {
    if (t <= 0.5) return Jet{1.0, 0.0, 0.0};
    if (t >= 1.0) return Jet{};
    const auto& tab = bump_table();
    const double Z = tab.total();
    const double b = bump(t);
    const double a = t - 0.5, c = 1.0 - t;
    const double v = t < 0.75 ? 1.0 - tab.partial(t) / Z : tab.complement(t) / Z;
    return Jet{v, -b / Z, -b * (1.0 / (a * a) - 1.0 / (c * c)) / Z};
}

Jet CutoffFamily::at(double r) const {
    const Jet j = bridge(r / R);
    return Jet{j.v, j.d1 / R, j.d2 / (R * R)};
}

ConvexTransform g_alpha(const GAlphaParams& prm) {
    if (!(prm.p >= 1.0) || !(prm.alpha_reg > 0.0)) {
        throw DomainError("g_alpha: requires p >= 1 and alpha > 0");
    }
    const double p = prm.p, a = prm.alpha_reg;
    ConvexTransform g;
    g.name = "G_alpha";
    g.G = [p, a](double r) { return std::pow(r * r + a, 0.5 * p); };
    g.dG = [p, a](double r) { return p * r * std::pow(r * r + a, 0.5 * p - 1.0); };
    g.d2G = [p, a](double r) { return p * std::pow(r * r + a, 0.5 * p - 2.0) * (a + r * r * (p - 1.0)); };
    return g;
}

ConvexTransform linear_transform() {
    return ConvexTransform{"linear", [](double r) { return r; }, [](double) { return 1.0; },
                           [](double) { return 0.0; }};
}

RadialProfile compose(const ConvexTransform& G, const RadialProfile& u) {
    RadialProfile::Traits t = u.traits();
    t.kind = G.name + "(" + u.kind() + ")";
    if (t.limit_at_infinity) t.limit_at_infinity = G.G(*t.limit_at_infinity);
    // The composite tends to G(lim u); its decay toward that limit is not tracked.
    if (t.decay > 0.0) t.decay = 0.0;
    return RadialProfile::custom(std::move(t), [G, u](double r) {
        const Jet j = u.jet(r);
        const double g1 = G.dG(j.v);
        return Jet{G.G(j.v), g1 * j.d1, G.d2G(j.v) * j.d1 * j.d1 + g1 * j.d2};
    });
}

}  // namespace fracdrift
