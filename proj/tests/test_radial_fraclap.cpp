#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fracdrift/errors.hpp"
#include "fracdrift/radial_fraclap.hpp"
#include "fracdrift/specfun.hpp"

using namespace fracdrift;

namespace {

double rel(double x, double ref) { return std::fabs(x - ref) / std::fabs(ref); }

}  // namespace

TEST_CASE("psi_beta closed form agrees with the quadrature oracle") {
    struct Set { int N; double s, beta; };
    const Set sets[] = {{2, 0.5, 1.5}, {3, 0.25, 1.0}, {1, 0.75, 1.0}, {1, 0.75, 1.5}, {3, 0.5, 3.0}, {2, 0.3, 2.8}};
    for (const auto& p : sets) {
        const auto w = RadialProfile::psi_beta(p.beta);
        for (double r : {0.0, 1.5, 3.0, 10.0}) {
            INFO("N=" << p.N << " s=" << p.s << " beta=" << p.beta << " r=" << r);
            CHECK(rel(fraclap_psi_beta(p.N, p.s, p.beta, r), fraclap_quadrature(p.N, p.s, w, r)) < 1e-5);
        }
    }
    CHECK(rel(fraclap_psi_beta(3, 0.25, 1.0, 2.0), fraclap_quadrature(3, 0.25, RadialProfile::psi_beta(1.0), 2.0)) <
          1e-5);
}

TEST_CASE("psi_beta value at the origin is positive") {
    for (auto [N, s, beta] : {std::tuple{1, 0.5, 0.4}, {2, 0.75, 3.0}, {3, 0.1, 1.0}}) {
        CHECK(fraclap_psi_beta(N, s, beta, 0.0) > 0.0);
    }
}

TEST_CASE("psi calibration ratio is one") {
    const auto c = psi_calibration(2, 0.5, 1.5);
    CHECK(c.radius == 2.0);
    CHECK(c.relative_residual < 1e-8);
}

TEST_CASE("psi_beta far field: -(-Delta)^s psi (1+r^2)^{s+beta/2} tends to C * C1 > 0") {
    const int N = 2;
    const double s = 0.5, beta = 1.5;
    const auto lim = specfun::limit_2f1_at_one(-s, beta / 2 + s, N / 2.0, (N - beta) / 2.0);
    const double C1 = -lim.coefficient;
    CHECK(C1 > 0.0);
    const double target = psi_constant(N, s, beta) * C1;
    double prev = 1e300;
    for (double r : {10.0, 100.0, 1e4, 1e8, 1e12}) {
        const double scaled = -fraclap_psi_beta(N, s, beta, r) * std::pow(1.0 + r * r, s + beta / 2);
        CHECK(scaled > 0.0);
        const double dev = std::fabs(scaled / target - 1.0);
        CHECK(dev < prev);
        prev = dev;
    }
    CHECK(prev < 1e-3);
    // The same sign seen by the oracle at a large radius.
    CHECK(fraclap_quadrature(N, s, RadialProfile::psi_beta(beta), 50.0) < 0.0);
}

TEST_CASE("power law: homogeneity and multiplier") {
    const int N = 1;
    const double s = 0.5, beta = 0.5;
    for (double r : {0.3, 1.0, 7.0}) {
        CHECK(fraclap_power_law(N, s, beta, 2 * r) == doctest::Approx(std::pow(2.0, -beta - 2 * s) * fraclap_power_law(N, s, beta, r)).epsilon(1e-15));
    }
    const auto w = RadialProfile::power_law(beta);
    const double m = power_law_multiplier(N, s, beta);
    CHECK(std::fabs(power_law_multiplier_quadrature(N, s, beta) - m) < 1e-5 * std::fabs(m));
    CHECK(std::fabs(fraclap_quadrature(N, s, w, 3.0) * std::pow(3.0, beta + 2 * s) - m) < 1e-5 * std::fabs(m));
    // Independent homogeneity through the oracle.
    const double q1 = fraclap_quadrature(3, 0.25, RadialProfile::power_law(1.2), 0.8);
    const double q2 = fraclap_quadrature(3, 0.25, RadialProfile::power_law(1.2), 1.6);
    CHECK(std::fabs(q2 / q1 / std::pow(2.0, -1.2 - 0.5) - 1.0) < 1e-4);
    CHECK_THROWS_AS(power_law_multiplier(2, 0.5, 2.0), DomainError);
    CHECK_THROWS_AS(fraclap_power_law(2, 0.5, 1.0, 0.0), DomainError);
}

TEST_CASE("power-law multiplier is positive below N - 2s, by quadrature") {
    const int N = 3;
    const double s = 0.5;
    for (double beta = 0.2; beta < N - 2 * s; beta += 0.3) {
        INFO("beta=" << beta);
        const double mq = power_law_multiplier_quadrature(N, s, beta);
        CHECK(mq > 0.0);
        CHECK(rel(mq, power_law_multiplier(N, s, beta)) < 1e-5);
    }
    // Fundamental-solution exponent: multiplier vanishes.
    CHECK(std::fabs(power_law_multiplier(N, s, N - 2 * s)) < 1e-15);
    CHECK(power_law_multiplier(N, s, 2.5) < 0.0);
}

TEST_CASE("Getoor profile has constant fractional Laplacian in the ball") {
    const double K = getoor_constant(1, 0.5);
    CHECK(std::fabs(K - 1.0) < 1e-14);
    const auto w = RadialProfile::getoor(1.0, 0.5);
    const double q0 = fraclap_quadrature(1, 0.5, w, 0.0);
    CHECK(rel(fraclap_quadrature(1, 0.5, w, 0.5), q0) < 1e-4);
    for (double x : {0.0, 0.3, 0.6}) CHECK(rel(fraclap_quadrature(1, 0.5, w, x), K) < 1e-5);
    const auto w2 = RadialProfile::getoor(2.0, 0.5);
    CHECK(rel(fraclap_quadrature(1, 0.5, w2, 0.0), q0) < 1e-6);
    CHECK(fraclap_getoor(1, 0.5, 2.0, 1.0) == fraclap_getoor(1, 0.5, 1.0, 0.5));
    for (double x : {0.1, 0.9}) CHECK(rel(fraclap_quadrature(3, 0.3, RadialProfile::getoor(1.5, 0.3), x), getoor_constant(3, 0.3)) < 1e-5);
    CHECK_THROWS_AS(fraclap_getoor(1, 0.5, 1.0, 1.0), DomainError);
}

TEST_CASE("quadrature: constants, cutoff sign, non-smooth radius") {
    CHECK(std::fabs(fraclap_quadrature(2, 0.5, RadialProfile::constant(3.0), 1.0)) < 1e-10);
    CHECK(std::fabs(fraclap_quadrature(1, 0.2, RadialProfile::constant(-1.0), 0.0)) < 1e-10);
    const double R = 1.5;
    CHECK(fraclap_quadrature(2, 0.5, RadialProfile::cutoff(R), 2 * R) < 0.0);
    CHECK(fraclap_quadrature(1, 0.3, RadialProfile::cutoff(R), 2 * R) < 0.0);
    CHECK_THROWS_AS(fraclap_quadrature(1, 0.5, RadialProfile::getoor(1.0, 0.5), 1.0), DomainError);
    CHECK_THROWS_AS(fraclap_quadrature(1, 1.5, RadialProfile::constant(1.0), 1.0), DomainError);
}

TEST_CASE("cutoff fractional Laplacian scales like R^{-2s}") {
    for (double s : {0.25, 0.5, 0.75}) {
        auto sup = [s](double R) {
            double m = 0.0;
            for (double t : {0.2, 0.45, 0.6, 0.75, 0.9, 1.2, 2.0}) {
                m = std::max(m, std::fabs(fraclap_quadrature(2, s, RadialProfile::cutoff(R), t * R)));
            }
            return m;
        };
        const double ratio = sup(4.0) / sup(2.0);
        const double expect = std::pow(2.0, -2 * s);
        INFO("s=" << s << " ratio=" << ratio);
        CHECK(ratio >= 0.8 * expect);
        CHECK(ratio <= 1.2 * expect);
    }
}

TEST_CASE("bilinear form") {
    const int N = 2;
    const double s = 0.5;
    const auto f = RadialProfile::psi_beta(1.0);
    const auto g = RadialProfile::psi_beta(2.0);
    for (double r : {0.0, 0.5, 2.0}) CHECK(bilinear_form(N, s, f, f, r) >= 0.0);
    CHECK(std::fabs(bilinear_form(N, s, f, RadialProfile::constant(2.0), 0.7)) < 1e-10);
    // Product rule checked with four independent quadratures at |x| = 1.
    const double r = 1.0;
    const double lhs = fraclap_quadrature(N, s, RadialProfile::product(f, g), r);
    const double rhs = f.value(r) * fraclap_quadrature(N, s, g, r) + g.value(r) * fraclap_quadrature(N, s, f, r) -
                       bilinear_form(N, s, f, g, std::vector<double>{0.6, 0.8});
    CHECK(rel(rhs, lhs) < 1e-6);
    CHECK_THROWS_AS(bilinear_form(N, s, f, g, std::vector<double>{1.0}), ArgumentError);
}

TEST_CASE("radial supersolution test") {
    std::vector<double> grid;
    for (double r = 0.05; r < 20.0; r += 0.05) grid.push_back(r);
    const auto ok = radial_supersolution_test(3, 0.5, RadialProfile::psi_beta(1.5), grid);
    CHECK(ok.holds);
    CHECK(!ok.first_violation);
    for (double v : ok.values) CHECK(v <= 0.0);

    // beta > N - 2s: positive beyond r^2 = (N - 2s + 2) / (beta - N + 2s) = 4.
    const auto bad = radial_supersolution_test(3, 0.5, RadialProfile::psi_beta(3.0), grid);
    REQUIRE(bad.first_violation);
    CHECK(*bad.first_violation > 2.0);
    CHECK(*bad.first_violation < 2.0 + 0.051);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] > 2.001) CHECK(bad.values[i] > 0.0);
        if (grid[i] < 1.999) CHECK(bad.values[i] <= 0.0);
    }
    CHECK_THROWS_AS(radial_supersolution_test(1, 0.5, RadialProfile::capped_linear(), grid), DomainError);
    CHECK_THROWS_AS(radial_supersolution_test(1, 0.5, RadialProfile::power_law(0.5), grid), DomainError);
    CHECK_THROWS_AS(radial_supersolution_test(1, 0.5, RadialProfile::psi_beta(1.0), {}), ArgumentError);
}

TEST_CASE("Kato gap") {
    const auto u = RadialProfile::psi_beta(1.0);
    CHECK(kato_gap(1, 0.5, u, linear_transform(), 0.7) == 0.0);
    const GAlphaParams G{2.0, 0.1};
    CHECK(kato_gap(1, 0.5, u, G, 0.7) >= -1e-8);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(-5.0, 5.0);
    int negatives = 0;
    for (int i = 0; i < 100; ++i) {
        const double x = ux(rng);
        if (kato_gap(1, 0.5, u, G, std::fabs(x)) < -1e-8) ++negatives;
    }
    CHECK(negatives == 0);
}

TEST_CASE("G_alpha is convex") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> up(1.0, 5.0), ua(1e-3, 2.0), ur(-10.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        const auto G = g_alpha({up(rng), ua(rng)});
        const double r = ur(rng);
        CHECK(G.d2G(r) >= 0.0);
        const double h = 1e-4;
        CHECK(G.dG(r) == doctest::Approx((G.G(r + h) - G.G(r - h)) / (2 * h)).epsilon(1e-6));
    }
    CHECK_THROWS_AS(g_alpha({0.5, 0.1}), DomainError);
    CHECK_THROWS_AS(g_alpha({2.0, 0.0}), DomainError);
}

TEST_CASE("cutoff bridge shape") {
    CHECK(CutoffFamily::bridge(0.3).v == 1.0);
    CHECK(CutoffFamily::bridge(0.5).v == 1.0);
    CHECK(CutoffFamily::bridge(1.0).v == 0.0);
    CHECK(CutoffFamily::bridge(1.7).v == 0.0);
    // Strict decrease is checked where the bump exp(-1/(t-1/2) - 1/(1-t)) and the
    // distance of gamma from 1 are both representable in double precision.
    double prev = 1.0;
    for (double t = 0.501; t < 1.0; t += 0.001) {
        const Jet j = CutoffFamily::bridge(t);
        CHECK(j.v >= 0.0);
        CHECK(j.v <= 1.0);
        CHECK(j.v <= prev);
        CHECK(j.d1 <= 0.0);
        if (t > 0.56 && t < 0.99) {
            CHECK(j.v < prev);
            CHECK(j.d1 < 0.0);
        }
        prev = j.v;
        const double h = 1e-6;
        const double fd = (CutoffFamily::bridge(t + h).v - CutoffFamily::bridge(t - h).v) / (2 * h);
        CHECK(std::fabs(j.d1 - fd) < 1e-8 + 1e-5 * std::fabs(fd));
        const double fd2 = (CutoffFamily::bridge(t + h).d1 - CutoffFamily::bridge(t - h).d1) / (2 * h);
        CHECK(std::fabs(j.d2 - fd2) < 1e-6 + 1e-4 * std::fabs(fd2));
    }
    const CutoffFamily fam{3.0};
    CHECK(fam.at(2.4).v == doctest::Approx(CutoffFamily::bridge(0.8).v).epsilon(1e-12));
    CHECK(fam.at(2.4).d1 == doctest::Approx(CutoffFamily::bridge(0.8).d1 / 3.0));
}

TEST_CASE("tabulated profile") {
    std::vector<double> r, v;
    for (double x = 0.0; x <= 20.0; x += 0.05) {
        r.push_back(x);
        v.push_back(std::pow(1.0 + x * x, -0.75));
    }
    const auto w = RadialProfile::tabulated(r, v);
    REQUIRE(w.fitted_tail_exponent());
    CHECK(*w.fitted_tail_exponent() == doctest::Approx(-1.5).epsilon(1e-2));
    const auto exact = RadialProfile::psi_beta(1.5);
    for (double x : {0.33, 1.01, 7.77, 30.0}) CHECK(std::fabs(w.value(x) - exact.value(x)) < 1e-3 * exact.value(x));
    CHECK(std::fabs(fraclap_quadrature(2, 0.5, w, 1.5) / fraclap_psi_beta(2, 0.5, 1.5, 1.5) - 1.0) < 1e-3);

    std::istringstream good("# radius value\n0 1\n1 0.5\n\n2 0.25 # tail\n3 0.125\n");
    const auto t = read_tabulated_profile(good);
    CHECK(t.value(1.0) == doctest::Approx(0.5));
    std::istringstream bad("0 1\n1 0.5\n1 0.4\n");
    CHECK_THROWS_AS(read_tabulated_profile(bad), ArgumentError);
    std::istringstream junk("0 1 2\n");
    CHECK_THROWS_AS(read_tabulated_profile(junk), ArgumentError);
}

TEST_CASE("weighted L1 membership") {
    CHECK(RadialProfile::psi_beta(0.1).in_weighted_l1(3, 0.5));
    CHECK(RadialProfile::constant(1.0).in_weighted_l1(3, 0.5));
    CHECK(RadialProfile::power_law(1.0).in_weighted_l1(2, 0.5));
    CHECK(!RadialProfile::power_law(2.0).in_weighted_l1(2, 0.5));
}

TEST_CASE("parallel sweep reproduces the serial reference") {
    const auto w = RadialProfile::psi_beta(1.5);
    std::vector<double> radii;
    for (int i = 0; i < 24; ++i) radii.push_back(0.25 * i);
    const auto a = fraclap_quadrature_sweep(2, 0.5, w, radii);
    const auto b = fraclap_quadrature_sweep_serial(2, 0.5, w, radii);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    radii.push_back(1.0);
    CHECK_THROWS_AS(fraclap_quadrature_sweep(1, 0.5, RadialProfile::getoor(1.0, 0.5), radii), DomainError);
}
