#include "fracdrift/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "fracdrift/classifier.hpp"
#include "fracdrift/errors.hpp"
#include "fracdrift/format.hpp"
#include "fracdrift/specfun.hpp"

namespace fracdrift {

namespace {

// K(z) = C z^{-1-2s} and an antiderivative pair G'' = K, used for exact integrals of
// hat functions against the kernel.
struct Kernel {
    double C = 0.0;
    double s = 0.5;
    double G(double z) const {
        if (s == 0.5) return -C * std::log(z);
        return C * std::pow(z, 1.0 - 2.0 * s) / (2.0 * s * (2.0 * s - 1.0));
    }
    double dG(double z) const { return -C * std::pow(z, -2.0 * s) / (2.0 * s); }
};

// Lattice weights: u is the piecewise-linear interpolant of the nodal values, exterior
// nodes carry g, and the ball |z| < h is replaced by the second difference.
struct Weights {
    Kernel k;
    double h = 0.0;
    /// w[m] couples nodes m cells apart (m >= 1); w[1] includes the near-field term.
    std::vector<double> w;
    /// Near-field coupling to each neighbour.
    double local = 0.0;

    /// Sum of w over all lattice nodes at distance >= m0 cells on one side.
    double beyond(int m0) const {
        if (m0 == 1) return local - k.dG(h);
        return -(k.G(m0 * h) - k.G((m0 - 1) * h)) / h;
    }
    /// Far-field weight of the partial hat of the first exterior node at distance m0 >= 2
    /// (the ramp on [(m0-1)h, m0 h]).
    double ramp(int m0) const {
        const double b = m0 * h, a = b - h;
        return k.dG(b) - (k.G(b) - k.G(a)) / h;
    }
};

// S(s) = sum over both sides and cells k >= 1 of int_k^{k+1} (t-k)(k+1-t)/2 t^{-1-2s} dt.
// The piecewise-linear interpolant misses u by -u''(t-k)(k+1-t)h^2/2 on each cell, so the
// far field is off by -u''(x) C h^{2-2s} S(s) to leading order.
double interpolation_defect(double s) {
    using GL = boost::math::quadrature::gauss<double, 20>;
    constexpr int cells = 2000;
    double sum = 0.0;
    for (int k = 1; k < cells; ++k) {
        sum += GL::integrate([&](double t) { return 0.5 * (t - k) * (k + 1 - t) * std::pow(t, -1.0 - 2.0 * s); },
                             static_cast<double>(k), k + 1.0);
    }
    // Beyond, the cell average of (t-k)(k+1-t)/2 is 1/12.
    sum += std::pow(static_cast<double>(cells), -2.0 * s) / (24.0 * s);
    return 2.0 * sum;
}

Weights weights(double s, double h, int M) {
    Weights W;
    W.k = {specfun::cns_constant(1, s).value, s};
    W.h = h;
    W.w.assign(M + 1, 0.0);
    // Only the outer half of the first hat lies outside the near-field ball.
    const double first_hat = -W.k.dG(h) + (W.k.G(2 * h) - W.k.G(h)) / h;
    W.local = W.k.C * std::pow(h, -2.0 * s) * (1.0 / (2.0 - 2.0 * s) - interpolation_defect(s));
    // For small s the correction would make the neighbour coupling negative and break the
    // M-matrix structure; the uncorrected scheme is already of order 2 - 2s > 1 there.
    if (!(W.local + first_hat > 0.0)) W.local = W.k.C * std::pow(h, -2.0 * s) / (2.0 - 2.0 * s);
    W.w[1] = W.local + first_hat;
    for (int m = 2; m <= M; ++m) W.w[m] = (W.k.G((m + 1) * h) - 2.0 * W.k.G(m * h) + W.k.G((m - 1) * h)) / h;
    return W;
}

DiscreteSystem grid(double s, double L, int M) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("s must lie in (0,1)");
    if (!(L > 0.0)) throw ArgumentError("assemble_operator: L must be > 0");
    if (M < 51 || M % 2 == 0) throw ArgumentError("assemble_operator: M must be odd and >= 51");
    DiscreteSystem sys;
    sys.s = s;
    sys.L = L;
    sys.M = M;
    sys.h = 2.0 * L / M;
    sys.x.resize(M);
    const int mid = (M - 1) / 2;
    for (int i = 0; i < M; ++i) sys.x[i] = (i - mid) * sys.h;
    sys.A.setZero(M, M);
    sys.T.setZero(M);
    return sys;
}

void assemble_row(DiscreteSystem& sys, const Weights& W, int i) {
    const int M = sys.M;
    // Exterior nodes start M - i cells to the right and i + 1 to the left.
    const double Ti = W.beyond(M - i) + W.beyond(i + 1);
    double diag = Ti;
    for (int j = 0; j < M; ++j) {
        if (j == i) continue;
        const double wij = W.w[std::abs(i - j)];
        sys.A(i, j) = -wij;
        diag += wij;
    }
    sys.A(i, i) = diag;
    sys.T(i) = Ti;
}

// Upwind matrix D and exterior coupling d with D u - g d approximating -b u_x.
void drift_terms(const DiscreteSystem& sys, const DriftField& b, Eigen::MatrixXd& D, Eigen::VectorXd& d) {
    const int M = sys.M;
    D.setZero(M, M);
    d.setZero(M);
    for (int i = 0; i < M; ++i) {
        const double bi = drift_1d(b, sys.x[i]);
        const double a = std::fabs(bi) / sys.h;
        if (a == 0.0) continue;
        D(i, i) += a;
        // Information comes from x_{i+1} when b > 0 (characteristics dx/dt = -b).
        const int j = bi > 0.0 ? i + 1 : i - 1;
        if (j < 0 || j >= M) {
            d(i) += a;
        } else {
            D(i, j) -= a;
        }
    }
}

double backward_error(const Eigen::MatrixXd& K, const Eigen::VectorXd& u, const Eigen::VectorXd& rhs) {
    const double r = (K * u - rhs).lpNorm<Eigen::Infinity>();
    const double scale = K.cwiseAbs().rowwise().sum().maxCoeff() * u.lpNorm<Eigen::Infinity>() +
                         rhs.lpNorm<Eigen::Infinity>();
    return scale > 0.0 ? r / scale : r;
}

std::string describe(const DiscreteSystem& sys, const Scenario& sc) {
    std::ostringstream os;
    os << "s = " << sys.s << ", L = " << sys.L << ", M = " << sys.M << ", drift " << sc.b.name << " (sigma = "
       << sc.b.sigma << ", K = " << sc.b.K << "), dt = " << sc.dt;
    return os.str();
}

Eigen::PartialPivLU<Eigen::MatrixXd> factorize(const Eigen::MatrixXd& K, const DiscreteSystem& sys,
                                               const Scenario& sc) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
    const double rc = lu.rcond();
    if (!(rc > 1e-14)) {
        throw NumericalFailure("singular system for " + describe(sys, sc) + " (rcond " + fmt17(rc) + ")", rc, 0.0);
    }
    return lu;
}

void check_match(const DiscreteSystem& sys, const Scenario& sc) {
    if (sys.M != sc.M || sys.L != sc.L || sys.s != sc.s) {
        throw ArgumentError("the assembled system does not match the scenario's s, L, M");
    }
}

}  // namespace

DiscreteSystem assemble_operator(double s, double L, int M) {
    DiscreteSystem sys = grid(s, L, M);
    const Weights W = weights(s, sys.h, M);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < M; ++i) assemble_row(sys, W, i);
    return sys;
}

DiscreteSystem assemble_operator_serial(double s, double L, int M) {
    DiscreteSystem sys = grid(s, L, M);
    const Weights W = weights(s, sys.h, M);
    for (int i = 0; i < M; ++i) assemble_row(sys, W, i);
    return sys;
}

Eigen::VectorXd exterior_tail(const DiscreteSystem& sys, const std::function<double(double)>& w) {
    const Weights W = weights(sys.s, sys.h, 1);
    const double e = 1.0 + 2.0 * sys.s;
    const double edge = sys.x.back() + sys.h;  // first exterior node
    boost::math::quadrature::exp_sinh<double> q;
    Eigen::VectorXd out(sys.M);
    for (int i = 0; i < sys.M; ++i) {
        const double xi = sys.x[i];
        double sum = 0.0;
        for (int side : {1, -1}) {
            const int m0 = side > 0 ? sys.M - i : i + 1;
            const double far = q.integrate([&](double z) {
                const double y = side * (edge + z);
                return w(y) * std::pow(std::fabs(y - xi), -e);
            });
            const double first = w(side * edge);
            sum += W.k.C * far + first * (m0 == 1 ? W.local : W.ramp(m0));
        }
        out(i) = sum;
    }
    return out;
}

int odd_node_count(double L, double h0) {
    if (!(L > 0.0 && h0 > 0.0)) throw ArgumentError("odd_node_count: L and h0 must be > 0");
    int M = static_cast<int>(std::ceil(2.0 * L / h0 - 1e-9));
    if (M % 2 == 0) ++M;
    return std::max(M, 51);
}

double drift_1d(const DriftField& b, double x) {
    if (x == 0.0) return 0.0;
    return (x > 0.0 ? 1.0 : -1.0) * b.radial(std::fabs(x));
}

std::string SolutionRecord::to_csv() const {
    std::ostringstream os;
    os << "t,x,u\n";
    for (std::size_t n = 0; n < u.size(); ++n) {
        for (std::size_t i = 0; i < x.size(); ++i) os << fmt17(t[n]) << ',' << fmt17(x[i]) << ',' << fmt17(u[n][i]) << '\n';
    }
    return os.str();
}

double SolutionRecord::at(double xq, int n) const {
    const auto& v = n < 0 ? u.back() : u.at(n);
    if (xq <= x.front()) return v.front();
    if (xq >= x.back()) return v.back();
    const auto it = std::upper_bound(x.begin(), x.end(), xq);
    const std::size_t j = static_cast<std::size_t>(it - x.begin());
    const double a = (xq - x[j - 1]) / (x[j] - x[j - 1]);
    return (1.0 - a) * v[j - 1] + a * v[j];
}

SolutionRecord evolve(const DiscreteSystem& sys, const Scenario& sc) {
    check_match(sys, sc);
    if (!(sc.dt > 0.0) || !(sc.T > 0.0)) throw ArgumentError("evolve: T and dt must be > 0");
    const int M = sys.M;
    const int steps = static_cast<int>(std::llround(sc.T / sc.dt));
    Eigen::MatrixXd D;
    Eigen::VectorXd d;
    drift_terms(sys, sc.b, D, d);
    Eigen::VectorXd P(M);
    for (int i = 0; i < M; ++i) P(i) = sc.rho.rho(std::fabs(sys.x[i]));
    Eigen::MatrixXd K = sys.A + D;
    K.diagonal() += P / sc.dt;
    const auto lu = factorize(K, sys, sc);

    SolutionRecord rec;
    rec.x = sys.x;
    Eigen::VectorXd u(M);
    for (int i = 0; i < M; ++i) u(i) = sc.u0(sys.x[i]);
    auto push = [&](double t) {
        rec.t.push_back(t);
        rec.u.emplace_back(u.data(), u.data() + M);
        rec.max_norm.push_back(u.lpNorm<Eigen::Infinity>());
        rec.mass.push_back(P.dot(u) * sys.h);
    };
    push(0.0);
    const Eigen::VectorXd couple = sys.T + d;
    Eigen::VectorXd rhs(M);
    for (int n = 1; n <= steps; ++n) {
        const double t = n * sc.dt;
        rhs = P.cwiseProduct(u) / sc.dt + sc.g(t) * couple;
        if (sc.f) {
            for (int i = 0; i < M; ++i) rhs(i) += sc.f(sys.x[i], t);
        }
        u = lu.solve(rhs);
        rec.solve_residual = std::max(rec.solve_residual, backward_error(K, u, rhs));
        push(t);
    }
    if (!(rec.solve_residual < 1e-12)) {
        throw NumericalFailure("evolve: linear-solve residual " + fmt17(rec.solve_residual) + " for " +
                                   describe(sys, sc),
                               rec.solve_residual, rec.solve_residual);
    }
    return rec;
}

SolutionRecord solve_elliptic(const DiscreteSystem& sys, const Scenario& sc, double gamma) {
    check_match(sys, sc);
    const int M = sys.M;
    Eigen::MatrixXd D;
    Eigen::VectorXd d;
    drift_terms(sys, sc.b, D, d);
    Eigen::MatrixXd K = sys.A + D;
    for (int i = 0; i < M; ++i) {
        const double r = std::fabs(sys.x[i]);
        K(i, i) += sc.rho.rho(r) * (sc.c ? sc.c(sys.x[i]) : 0.0);
    }
    const auto lu = factorize(K, sys, sc);
    const Eigen::VectorXd rhs = gamma * (sys.T + d);
    const Eigen::VectorXd u = lu.solve(rhs);
    SolutionRecord rec;
    rec.x = sys.x;
    rec.t = {0.0};
    rec.u.emplace_back(u.data(), u.data() + M);
    rec.max_norm = {u.lpNorm<Eigen::Infinity>()};
    rec.mass = {0.0};
    rec.solve_residual = backward_error(K, u, rhs);
    if (!(rec.solve_residual < 1e-12)) {
        throw NumericalFailure("solve_elliptic: linear-solve residual " + fmt17(rec.solve_residual) + " for " +
                                   describe(sys, sc),
                               rec.solve_residual, rec.solve_residual);
    }
    return rec;
}

std::string InfluenceTable::to_csv() const {
    std::ostringstream os;
    os << "L,d,regime\n";
    for (const auto& row : rows) os << fmt17(row.L) << ',' << fmt17(row.d) << ',' << regime << '\n';
    return os.str();
}

InfluenceTable exterior_influence_experiment(const Scenario& sc, const std::function<double(double)>& g1,
                                             const std::function<double(double)>& g2,
                                             const std::vector<double>& L_values, double probe, double h0) {
    if (L_values.empty()) throw ArgumentError("influence experiment: empty L sequence");
    for (std::size_t k = 0; k < L_values.size(); ++k) {
        if (k > 0 && !(L_values[k] > L_values[k - 1])) throw ArgumentError("influence experiment: L sequence must increase");
    }
    if (!(probe >= 0.0 && probe < L_values.front())) {
        throw ArgumentError("influence experiment: probe window must lie strictly inside the smallest L");
    }
    InfluenceTable table;
    table.regime = to_string(drift_regime(sc.rho.alpha, sc.b.sigma).regime);
    const int n = static_cast<int>(L_values.size());
    table.rows.resize(n);
    std::string failure;
    bool failed = false;
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < n; ++k) {
        try {
            Scenario a = sc;
            a.L = L_values[k];
            a.M = odd_node_count(a.L, h0);
            const auto sys = assemble_operator(a.s, a.L, a.M);
            a.g = g1;
            const auto r1 = evolve(sys, a);
            a.g = g2;
            const auto r2 = evolve(sys, a);
            double dmax = 0.0;
            for (std::size_t m = 0; m < r1.u.size(); ++m) {
                for (int i = 0; i < a.M; ++i) {
                    if (std::fabs(sys.x[i]) <= probe) dmax = std::max(dmax, std::fabs(r1.u[m][i] - r2.u[m][i]));
                }
            }
            table.rows[k] = {a.L, a.M, dmax};
        } catch (const std::exception& e) {
#pragma omp critical
            {
                failed = true;
                failure = e.what();
            }
        }
    }
    if (failed) throw NumericalFailure("influence experiment: " + failure, 0.0, 0.0);
    return table;
}

double arrival_time(const Scenario& sc, double level) {
    Scenario a = sc;
    a.u0 = [](double) { return 0.0; };
    a.g = [](double) { return 1.0; };
    a.f = nullptr;
    const auto sys = assemble_operator(a.s, a.L, a.M);
    const auto rec = evolve(sys, a);
    for (std::size_t n = 0; n < rec.t.size(); ++n) {
        if (std::fabs(rec.at(0.0, static_cast<int>(n))) > level) return rec.t[n];
    }
    return std::numeric_limits<double>::infinity();
}

}  // namespace fracdrift
