#pragma once

// Sampled certification of the barrier inequalities: the parabolic and elliptic
// supersolution tests for psi_beta, the glued power-law / Getoor barrier of the
// nonuniqueness construction, and the decay of the cutoff error terms.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fracdrift/classifier.hpp"
#include "fracdrift/fields.hpp"
#include "fracdrift/profiles.hpp"

namespace fracdrift {

struct SampleResidual {
    double r = 0.0;
    double t = 0.0;
    double residual = 0.0;
    /// Largest magnitude among the individual terms; sets the tolerance scale.
    double worst_term = 0.0;
    bool violation = false;
};

struct BarrierCertificate {
    /// "parabolic", "elliptic" or "nonuniqueness".
    std::string kind;
    bool pass = false;

    std::optional<CaseTag> tag;
    double beta = 0.0;
    std::optional<double> lambda;
    std::optional<double> pc0;
    /// Nonuniqueness barrier: V1 = C |x|^-beta outside B_R0, V2 = C2 (R0^2-|x|^2)^s / K_G inside.
    std::optional<double> C;
    std::optional<double> C2;
    std::optional<double> R0;

    std::vector<SampleResidual> samples;
    double max_residual = 0.0;
    double argmax_r = 0.0;
    double argmax_t = 0.0;
    int violations = 0;
    /// Failed claim checks, clipping and escalation diagnostics.
    std::vector<std::string> notes;

    std::string to_text() const;
    /// Columns r,t,residual,worst_term.
    std::string to_csv() const;
};

/// Relative tolerance of the sign tests, applied as tol * (1 + worst_term).
inline constexpr double residual_rel_tol = 1e-8;

/// Default sample grids: 40 log-spaced radii on [0.1, 1e3], 10 times on [0, 1].
std::vector<double> default_radii();
std::vector<double> default_times();

/// Residual -(-Delta)^s phi + rho phi_t - <b, grad phi> - phi div b for phi = e^{-lambda t} psi_beta
/// at every (r, t); PASS iff every residual is <= tol. NotCovered throws DomainError.
/// Drift and density claims are checked on the radii, and must be within the params'
/// (sigma, K, alpha, C0); a failed claim is noted and fails the certificate.
BarrierCertificate verify_parabolic_supersolution(const ProblemParams& params, double beta, double lambda,
                                                  const Density& rho, const DriftField& b,
                                                  const std::vector<double>& radii,
                                                  const std::vector<double>& times);

/// Residual -(-Delta)^s psi - <b, grad psi> - psi div b - rho p c psi; PASS iff every
/// residual is <= -tol. c defaults to the constant c0; c(r) < c0 on a sample or c0 < 0
/// throws ArgumentError. c0 = 0 is accepted and reported (it can never pass where drift dominates).
BarrierCertificate verify_elliptic_barrier(const ProblemParams& params, double beta, double p, double c0,
                                           const Density& rho, const DriftField& b,
                                           const std::function<double(double)>& c,
                                           const std::vector<double>& radii);

struct NonuniquenessOptions {
    /// C is doubled from 1 up to 2^cap_exponent.
    int cap_exponent = 40;
    /// Outside samples, as multiples of R0. The default adds a far ladder up to 1e40 R0
    /// so that slowly losing drift terms are caught.
    std::vector<double> outer_factors;
    /// Inside samples, as multiples of R0, in [0, 1).
    std::vector<double> inner_factors;
};

/// Builds V1 = C |x|^-beta with beta = min(sigma - 1 + alpha_bar, N)(1 - 1e-3) (clipped to
/// (0, N) and noted when the raw value is not positive), escalating C until
/// -(-Delta)^s V1 + <b, grad V1> + rho <= tol on every outer sample, and V2 with C2 = max rho
/// on [0, R0]. A density without an upper bound or a drift pointing inward throws ArgumentError.
BarrierCertificate build_nonuniqueness_barrier(int N, double s, double sigma, double K, double R0,
                                               const Density& rho, const DriftField& b,
                                               const NonuniquenessOptions& opt = {});

struct DecayRow {
    double R = 0.0;
    double I1 = 0.0;
    double I2 = 0.0;
    double I3 = 0.0;
    /// Nodes in D+ where <b, grad gamma_R> > 0.
    int sign_violations = 0;
};

struct DecayTable {
    std::vector<DecayRow> rows;
    /// I(R_{k+1}) < factor * I(R_k) for every column and consecutive pair.
    bool decays_by(double factor) const;
    /// Columns R,I1,I2,I3,sign_violations.
    std::string to_csv() const;
};

/// I1(R) = int |v| phi |(-Delta)^s gamma_R|, I2(R) = int |v| |B(phi, gamma_R)|,
/// I3(R) = int over D+ and R/2 < |x| < R of |v| phi |<b, grad gamma_R>|, for the radial
/// cutoff gamma_R. Integrals over R^N by Gauss-Legendre panels in r; nodes are
/// evaluated in parallel.
DecayTable cutoff_decay_probe(int N, double s, const RadialProfile& phi, const std::function<double(double)>& v,
                              const DriftField& b, const std::vector<double>& R_values);

}  // namespace fracdrift
