#pragma once

// One-dimensional truncated-domain solver for
//   rho u_t + (-Delta)^s u - b u_x = f   on (-L, L),  u = g(t) for |x| >= L,
// and its stationary counterpart (-Delta)^s u - b u_x + rho c u = 0 with u = gamma outside.

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracdrift/fields.hpp"

namespace fracdrift {

/// Cell-centred grid x_i = (i - (M-1)/2) h, h = 2L/M, so the M cells tile [-L, L] and
/// x = 0 is a node.
struct DiscreteSystem {
    double s = 0.5;
    double L = 1.0;
    int M = 0;
    double h = 0.0;
    std::vector<double> x;
    /// Discrete (-Delta)^s with the exterior closure: (A u)_i - g T_i approximates
    /// (-Delta)^s u(x_i) when u = g outside [-L, L].
    Eigen::MatrixXd A;
    /// Total weight of the exterior lattice nodes seen from x_i, close to
    /// C_{1,s} [(L - x_i)^{-2s} + (L + x_i)^{-2s}] / (2s); already on the diagonal of A.
    Eigen::VectorXd T;
};

/// Requires M odd, M >= 51, L > 0 and s in (0,1); otherwise ArgumentError / DomainError.
/// u is the piecewise-linear interpolant on the lattice x_i extended past the grid, with
/// value g at every exterior node; off-diagonal weights are exact integrals of hat
/// functions against C_{1,s}|z|^{-1-2s} for |z| >= h, and |z| < h contributes the
/// second difference. Rows are assembled in parallel.
DiscreteSystem assemble_operator(double s, double L, int M);
/// Row-by-row serial reference for assemble_operator.
DiscreteSystem assemble_operator_serial(double s, double L, int M);

/// C_{1,s} int_{|y| > L} w(y) |x_i - y|^{-1-2s} dy at every node, for exterior data that is
/// not constant. Then (A u)_i - tail_i approximates (-Delta)^s u(x_i).
Eigen::VectorXd exterior_tail(const DiscreteSystem& sys, const std::function<double(double)>& w);

/// Smallest odd node count with spacing at most h0 on [-L, L] (and at least 51).
int odd_node_count(double L, double h0);

struct Scenario {
    double s = 0.5;
    double L = 10.0;
    int M = 201;
    DriftField b = DriftField::zero();
    Density rho = Density::constant(1.0);
    /// Exterior data g(t).
    std::function<double(double)> g = [](double) { return 0.0; };
    /// Forcing f(x, t); empty means zero.
    std::function<double(double, double)> f;
    std::function<double(double)> u0 = [](double) { return 0.0; };
    double T = 1.0;
    double dt = 0.01;
    /// Zero-order coefficient c(x) for the elliptic solve; empty means zero.
    std::function<double(double)> c;
};

/// 1-D drift b(x) = sign(x) b_r(|x|).
double drift_1d(const DriftField& b, double x);

struct SolutionRecord {
    std::vector<double> x;
    std::vector<double> t;
    /// u[n] holds the solution at t[n].
    std::vector<std::vector<double>> u;
    std::vector<double> max_norm;
    /// Sum of rho_i u_i h per step.
    std::vector<double> mass;
    /// Largest relative linear-solve residual over all steps.
    double solve_residual = 0.0;

    /// Columns t,x,u in long format.
    std::string to_csv() const;
    /// Linear interpolation of the last snapshot (or snapshot n) at x.
    double at(double xq, int n = -1) const;
};

/// Backward Euler: P (u^{n+1} - u^n)/dt + A u^{n+1} - B u^{n+1} = f^{n+1} + g(t^{n+1}) (T + d),
/// with B the upwind drift and d its exterior coupling. One LU factorization for all steps.
/// Throws NumericalFailure when the system is singular or the solve residual exceeds 1e-12.
SolutionRecord evolve(const DiscreteSystem& sys, const Scenario& sc);

/// (A - B + P C) u = gamma (T + d). Returns a single-snapshot record at t = 0.
SolutionRecord solve_elliptic(const DiscreteSystem& sys, const Scenario& sc, double gamma);

struct InfluenceRow {
    double L = 0.0;
    int M = 0;
    double d = 0.0;
};

struct InfluenceTable {
    std::string regime;
    std::vector<InfluenceRow> rows;
    /// Columns L,d,regime.
    std::string to_csv() const;
};

/// For each L, d(L) = max over |x| <= probe and the time steps of |u_{g1} - u_{g2}|, both runs
/// from the same scenario (its s, b, rho, u0, f, T, dt) on a grid of spacing at most h0.
/// The regime tag comes from drift_regime(alpha, sigma) of the scenario's coefficients.
/// L values run concurrently.
InfluenceTable exterior_influence_experiment(const Scenario& sc, const std::function<double(double)>& g1,
                                             const std::function<double(double)>& g2,
                                             const std::vector<double>& L_values, double probe, double h0);

/// First time at which |u(0, t)| exceeds level for zero initial data and exterior data g = 1,
/// or +infinity if it never does on [0, T].
double arrival_time(const Scenario& sc, double level = 1e-3);

}  // namespace fracdrift
