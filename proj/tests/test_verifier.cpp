#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fracdrift/errors.hpp"
#include "fracdrift/radial_fraclap.hpp"
#include "fracdrift/verifier.hpp"

using namespace fracdrift;

namespace {

ProblemParams make(int N, double s, double alpha, double sigma, double K = 1.0, double C0 = 1.0) {
    ProblemParams p;
    p.N = N;
    p.s = s;
    p.alpha = alpha;
    p.sigma = sigma;
    p.K = K;
    p.C0 = C0;
    return p;
}

struct Instance {
    ProblemParams p;
    double beta;
};

// One instance per case.
const Instance instances[] = {
    {make(3, 0.5, 0.3, 0.5), 1.5},
    {make(2, 0.5, 0.5, 0.25), 1.5},
    {make(1, 0.75, 1.0, 0.0), 1.0},
    {make(1, 0.75, 1.0, 0.0), 1.5},
};

}  // namespace

TEST_CASE("drift and density claims are checked on samples") {
    const auto radii = log_grid(0.01, 1e4, 60);
    CHECK(check_claims(DriftField::zero(), radii).holds);
    CHECK(check_claims(DriftField::envelope(0.5, 2.0), radii).holds);
    CHECK(check_claims(DriftField::radial_power(3, 0.5, 1.0), radii).holds);
    CHECK(check_claims(DriftField::radial_power(1, 1.5, 1.0), radii).holds);
    CHECK(check_claims(DriftField::radial_power(1, 0.5, 1.0, 0.1), radii).holds);

    auto lying = DriftField::radial_power(1, 1.5, 1.0);
    lying.sigma = 1.0;
    const auto c = check_claims(lying, radii);
    CHECK_FALSE(c.holds);
    REQUIRE(c.first_violation);
    CHECK(c.what.find("radial component") != std::string::npos);

    auto sink = DriftField::envelope(0.5, 1.0);
    sink.div = [](double r) { return -2.0 * std::pow(1.0 + r, -0.5); };
    CHECK_FALSE(check_claims(sink, radii).holds);

    CHECK(check_claims(Density::inverse_poly(0.7, 2.0), radii).holds);
    auto low = Density::inverse_poly(0.7, 2.0);
    low.C0 = 3.0;
    CHECK_FALSE(check_claims(low, radii).holds);
    auto high = Density::constant(1.0);
    high.alpha_bar = 0.5;
    CHECK_FALSE(check_claims(high, radii).holds);
}

TEST_CASE("radial_power divergence matches a finite difference of r^{N-1} b_r") {
    for (int N : {1, 2, 3}) {
        for (double sigma : {0.5, 1.0, 1.5}) {
            const auto b = DriftField::radial_power(N, sigma, 1.3, 0.2);
            for (double r : {0.3, 1.0, 4.0}) {
                const double h = 1e-5 * r;
                auto flux = [&](double x) { return std::pow(x, N - 1) * b.radial(x); };
                const double fd = (flux(r + h) - flux(r - h)) / (2 * h) / std::pow(r, N - 1);
                CHECK(b.div(r) == doctest::Approx(fd).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("grids") {
    const auto g = log_grid(0.1, 1e3, 40);
    CHECK(g.size() == 40);
    CHECK(g.front() == 0.1);
    CHECK(g.back() == 1e3);
    CHECK(default_radii() == g);
    const auto t = default_times();
    CHECK(t.size() == 10);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == 1.0);
    CHECK_THROWS_AS(log_grid(0.0, 1.0, 4), ArgumentError);
    CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 1), ArgumentError);
}

TEST_CASE("parabolic certificate passes at lambda* and fails at lambda = 0 in every case") {
    for (const auto& in : instances) {
        const auto th = lambda_threshold(in.p, in.beta);
        const auto rho = Density::inverse_poly(in.p.alpha, in.p.C0);
        const auto b = DriftField::envelope(in.p.sigma, in.p.K);
        INFO("case " << to_string(th.tag.kind));
        const auto pass = verify_parabolic_supersolution(in.p, in.beta, *th.lambda_star, rho, b, default_radii(),
                                                         default_times());
        CHECK(pass.pass);
        CHECK(pass.violations == 0);
        CHECK(pass.samples.size() == 400);
        const auto fail = verify_parabolic_supersolution(in.p, in.beta, 0.0, rho, b, default_radii(), default_times());
        CHECK_FALSE(fail.pass);
        CHECK(fail.max_residual > 0.0);

        // Refining the grid keeps the verdict and barely moves the maximum.
        const auto fine = verify_parabolic_supersolution(in.p, in.beta, *th.lambda_star, rho, b,
                                                         log_grid(0.1, 1e3, 80), uniform_grid(0.0, 1.0, 20));
        CHECK(fine.pass);
        const auto fine0 = verify_parabolic_supersolution(in.p, in.beta, 0.0, rho, b, log_grid(0.1, 1e3, 80),
                                                          uniform_grid(0.0, 1.0, 20));
        CHECK(std::fabs(fine0.max_residual - fail.max_residual) < 0.1 * std::fabs(fail.max_residual));
    }
}

TEST_CASE("case I at lambda = 0 fails at small radii") {
    const auto& in = instances[0];
    const auto cert = verify_parabolic_supersolution(in.p, in.beta, 0.0, Density::inverse_poly(0.3, 1.0),
                                                     DriftField::envelope(0.5, 1.0), default_radii(), default_times());
    CHECK_FALSE(cert.pass);
    bool small = false;
    for (const auto& smp : cert.samples) small = small || (smp.violation && smp.r < 1.0);
    CHECK(small);
}

TEST_CASE("drift-free parabolic check") {
    const auto p = make(3, 0.5, 0.0, 0.0);
    const auto th = lambda_threshold(p, 1.5);
    const auto cert = verify_parabolic_supersolution(p, 1.5, *th.lambda_star, Density::constant(1.0),
                                                     DriftField::zero(), default_radii(), default_times());
    CHECK(cert.pass);
    CHECK(cert.notes.empty());
}

TEST_CASE("parabolic residual matches the quadrature of the barrier") {
    const auto& in = instances[1];
    const double lambda = 3.0, r = 2.5;
    const auto rho = Density::inverse_poly(in.p.alpha, in.p.C0);
    const auto b = DriftField::envelope(in.p.sigma, in.p.K);
    const auto cert = verify_parabolic_supersolution(in.p, in.beta, lambda, rho, b, {r}, {0.0});
    const auto psi = RadialProfile::psi_beta(in.beta);
    const auto j = psi.jet(r);
    const double ref = -fraclap_quadrature(in.p.N, in.p.s, psi, r) - lambda * rho.rho(r) * j.v -
                       b.radial(r) * j.d1 - j.v * b.div(r);
    CHECK(cert.samples[0].residual == doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("parabolic errors and claim failures") {
    const auto& in = instances[0];
    const auto rho = Density::inverse_poly(0.3, 1.0);
    const auto b = DriftField::envelope(0.5, 1.0);
    CHECK_THROWS_AS(verify_parabolic_supersolution(in.p, 4.0, 1.0, rho, b, default_radii(), default_times()),
                    DomainError);
    CHECK_THROWS_AS(verify_parabolic_supersolution(in.p, 1.5, 1.0, rho, b, {}, default_times()), ArgumentError);

    // A drift growing faster than the problem allows cannot be certified.
    const auto fast = DriftField::envelope(0.9, 1.0);
    const auto cert = verify_parabolic_supersolution(in.p, 1.5, 1e6, rho, fast, default_radii(), default_times());
    CHECK_FALSE(cert.pass);
    REQUIRE_FALSE(cert.notes.empty());
    CHECK(cert.notes[0].find("exceed") != std::string::npos);
}

TEST_CASE("certificate serialization") {
    const auto& in = instances[0];
    const auto cert = verify_parabolic_supersolution(in.p, in.beta, 2.5, Density::inverse_poly(0.3, 1.0),
                                                     DriftField::envelope(0.5, 1.0), {0.5, 1.0}, {0.0, 1.0});
    const auto text = cert.to_text();
    CHECK(text.find("result = PASS") != std::string::npos);
    CHECK(text.find("case = I") != std::string::npos);
    std::istringstream csv(cert.to_csv());
    std::string line;
    std::getline(csv, line);
    CHECK(line == "r,t,residual,worst_term");
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 4);
}

TEST_CASE("elliptic certificate per case") {
    for (const auto& in : instances) {
        const auto th = pc0_threshold(in.p, in.beta);
        const auto rho = Density::inverse_poly(in.p.alpha, in.p.C0);
        const auto b = DriftField::envelope(in.p.sigma, in.p.K);
        INFO("case " << to_string(th.tag.kind));
        const double c0 = 1.1 * *th.pc0_star;
        const auto pass = verify_elliptic_barrier(in.p, in.beta, 1.0, c0, rho, b, nullptr, default_radii());
        CHECK(pass.pass);
        CHECK(*pass.pc0 == doctest::Approx(c0));
        // Coefficient exactly c0 given as a function, and p > 1 splitting the product.
        const auto exact = verify_elliptic_barrier(in.p, in.beta, 2.0, c0 / 2, rho, b,
                                                   [c0](double) { return c0 / 2; }, default_radii());
        CHECK(exact.pass);
        const auto fail = verify_elliptic_barrier(in.p, in.beta, 1.0, 0.0, rho, b, nullptr, default_radii());
        CHECK_FALSE(fail.pass);
    }
}

TEST_CASE("elliptic preconditions") {
    const auto& in = instances[0];
    const auto rho = Density::inverse_poly(0.3, 1.0);
    const auto b = DriftField::envelope(0.5, 1.0);
    CHECK_THROWS_AS(verify_elliptic_barrier(in.p, 1.5, 1.0, 1.0, rho, b, [](double) { return 0.5; }, default_radii()),
                    ArgumentError);
    CHECK_THROWS_AS(verify_elliptic_barrier(in.p, 1.5, 1.0, -1.0, rho, b, nullptr, default_radii()), ArgumentError);
    CHECK_THROWS_AS(verify_elliptic_barrier(in.p, 5.0, 1.0, 1.0, rho, b, nullptr, default_radii()), DomainError);
}

TEST_CASE("nonuniqueness barrier in the nonuniqueness regime") {
    const auto b = DriftField::radial_power(1, 1.5, 1.0);
    NonuniquenessOptions near;
    near.outer_factors = {1.5, 3.0, 10.0, 30.0};
    const auto cert = build_nonuniqueness_barrier(1, 0.5, 1.5, 1.0, 1.0, Density::constant(1.0), b, near);
    CHECK(cert.pass);
    CHECK(cert.beta == doctest::Approx(0.5).epsilon(2e-3));
    REQUIRE(cert.C);
    REQUIRE(cert.C2);
    CHECK(*cert.C2 == 1.0);
    for (const auto& smp : cert.samples) CHECK(smp.residual <= 0.0);

    // V1 is positive and decays.
    double prev = HUGE_VAL;
    for (double r : {1.5, 3.0, 10.0, 1e3}) {
        const double V = *cert.C * std::pow(r, -cert.beta);
        CHECK(V > 0.0);
        CHECK(V < prev);
        prev = V;
    }

    const auto full = build_nonuniqueness_barrier(1, 0.5, 1.5, 1.0, 1.0, Density::constant(1.0), b);
    CHECK(full.pass);
    CHECK(full.samples.size() > cert.samples.size());
}

TEST_CASE("nonuniqueness barrier inside the ball with a nonconstant density") {
    const auto rho = Density::inverse_poly(0.5, 2.0);
    const auto b = DriftField::radial_power(2, 2.0, 1.0);
    const auto cert = build_nonuniqueness_barrier(2, 0.4, 2.0, 1.0, 2.0, rho, b);
    CHECK(cert.pass);
    REQUIRE(cert.C2);
    CHECK(*cert.C2 == doctest::Approx(2.0));
    // Inside samples: -C2 + <b, grad V2> + rho <= 0.
    int inner = 0;
    for (const auto& smp : cert.samples) {
        if (smp.r < 2.0) {
            CHECK(smp.residual <= 0.0);
            ++inner;
        }
    }
    CHECK(inner == 5);
}

TEST_CASE("nonuniqueness construction fails in the uniqueness regime") {
    const auto cert = build_nonuniqueness_barrier(1, 0.5, 0.5, 1.0, 1.0, Density::constant(1.0),
                                                  DriftField::radial_power(1, 0.5, 1.0));
    CHECK_FALSE(cert.pass);
    CHECK(cert.violations > 0);
    CHECK(*cert.C == std::ldexp(1.0, 40));
    CHECK(cert.notes.size() >= 2);
    CHECK(cert.to_text().find("uniqueness regime") != std::string::npos);
}

TEST_CASE("nonuniqueness preconditions") {
    auto rho = Density::constant(1.0);
    rho.alpha_bar.reset();
    CHECK_THROWS_AS(build_nonuniqueness_barrier(1, 0.5, 1.5, 1.0, 1.0, rho, DriftField::radial_power(1, 1.5, 1.0)),
                    ArgumentError);
    auto inward = DriftField::radial_power(1, 1.5, 1.0);
    inward.radial = [](double r) { return -r; };
    CHECK_THROWS_AS(build_nonuniqueness_barrier(1, 0.5, 1.5, 1.0, 1.0, Density::constant(1.0), inward),
                    ArgumentError);
    CHECK_THROWS_AS(build_nonuniqueness_barrier(1, 0.5, 1.5, 1.0, 0.0, Density::constant(1.0),
                                                DriftField::radial_power(1, 1.5, 1.0)),
                    DomainError);
}

TEST_CASE("cutoff error terms decay") {
    const auto phi = RadialProfile::psi_beta(1.5);
    auto v = [](double r) { return std::pow(1.0 + r * r, -0.25); };
    const auto table = cutoff_decay_probe(1, 0.5, phi, v, DriftField::radial_power(1, 0.5, 1.0), {10, 20, 40, 80});
    REQUIRE(table.rows.size() == 4);
    CHECK(table.decays_by(0.9));
    for (const auto& row : table.rows) {
        CHECK(row.I1 > 0.0);
        CHECK(row.I2 > 0.0);
        CHECK(row.I3 > 0.0);
        CHECK(row.sign_violations == 0);
    }
    std::istringstream csv(table.to_csv());
    std::string line;
    std::getline(csv, line);
    CHECK(line == "R,I1,I2,I3,sign_violations");

    const auto zero = cutoff_decay_probe(1, 0.5, phi, [](double) { return 0.0; },
                                         DriftField::radial_power(1, 0.5, 1.0), {10, 20});
    for (const auto& row : zero.rows) {
        CHECK(row.I1 == 0.0);
        CHECK(row.I2 == 0.0);
        CHECK(row.I3 == 0.0);
    }
    const auto nodrift = cutoff_decay_probe(1, 0.5, phi, v, DriftField::zero(), {10});
    CHECK(nodrift.rows[0].I3 == 0.0);
    CHECK(nodrift.rows[0].I1 == doctest::Approx(table.rows[0].I1));
}
