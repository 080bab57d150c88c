#pragma once

// Parameter regimes for the weighted uniqueness results: which case a weight
// exponent beta falls into, the growth constants of (-Delta)^s (1+r^2)^{-beta/2}
// at infinity, and the resulting lower bounds for lambda (parabolic) and p*c0
// (elliptic).

#include <optional>
#include <string>
#include <vector>

namespace fracdrift {

/// rho(x) >= C0 (1+|x|^2)^{-alpha/2};  <b, x/|x|> <= K (1+|x|)^sigma on D+,
/// [div b]_- <= K (1+|x|)^{sigma-1};  c >= c0 >= 0.
struct ProblemParams {
    int N = 1;
    double s = 0.5;
    double alpha = 0.0;
    double C0 = 1.0;
    double sigma = 0.0;
    double K = 1.0;
    double p = 1.0;
    double c0 = 0.0;

    /// Throws DomainError naming the first out-of-range field.
    void validate() const;
};

enum class Case { I, II, III, IV, NotCovered };
const char* to_string(Case c);

struct CaseTag {
    Case kind = Case::NotCovered;
    double beta = 0.0;
};

/// I: 0 < beta <= N-2s.  II: N-2s < beta < N, alpha <= 2s.  III: beta = N, alpha < 2s.
/// IV: beta > N, alpha + beta <= 2s + N.  Otherwise NotCovered.
CaseTag classify_case(const ProblemParams& params, double beta);

/// How (-Delta)^s psi_beta is evaluated when locating R_eps and M.
enum class FraclapEvaluation { closed_form, quadrature };

struct GrowthConstants {
    Case kind = Case::NotCovered;
    /// C1, C2 or C3 depending on the case, from the z -> 1 limit of the
    /// Pfaff-transformed hypergeometric function.
    double C_const = 0.0;
    std::string C_label;
    /// Case II only: the constant with Gamma((N+s)/2) in the denominator, as it is
    /// sometimes printed, and whether it differs from C_const.
    std::optional<double> C_printed;
    bool C_printed_mismatch = false;
    /// Prefactor of the hypergeometric representation of (-Delta)^s psi_beta.
    double psi_const = 0.0;
    double R_eps = 1.0;
    /// The radius where the asymptotic bound starts to hold, before the case III
    /// enlargement (equal to R_eps in cases II and IV). Nonincreasing in eps.
    double R_bound = 1.0;
    /// max |(-Delta)^s psi_beta| over [0, R_eps].
    double M = 0.0;
};

/// Requires case II, III or IV. R_eps >= 1 is the last radius on [1, 1e6] where the
/// asymptotic bound with slack eps fails to dominate -(-Delta)^s psi_beta, refined by
/// bisection. In case III it is further doubled until the logarithmic term is
/// absorbed by half of the lambda C0 (1+r^2)^{-alpha/2} term (with lambda the
/// (C2 + eps) branch of the threshold) and that comparison is monotone beyond it.
GrowthConstants growth_constants(const ProblemParams& params, double beta, double eps,
                                 FraclapEvaluation eval = FraclapEvaluation::closed_form);

/// The asymptotic shape multiplying psi_const * (C + eps) in each case:
/// II (1+r^2)^{-(s+beta/2)}, III the same times log(1+r^2), IV (1+r^2)^{-(s+N/2)}.
double asymptotic_shape(Case kind, int N, double s, double beta, double r);

struct ThresholdBranch {
    std::string name;
    double value = 0.0;
};

struct ThresholdReport {
    CaseTag tag;
    double eps = 0.1;
    std::optional<GrowthConstants> growth;

    std::optional<double> lambda_star;
    std::vector<ThresholdBranch> lambda_branches;
    /// true: lambda must exceed lambda_star strictly; false: lambda >= lambda_star suffices.
    bool lambda_strict = true;

    std::optional<double> pc0_star;
    std::vector<ThresholdBranch> pc0_branches;
    /// Whether the params' p*c0 clears pc0_star (strict inequality).
    std::optional<bool> pc0_clears;
    bool pc0_never_sufficient = false;

    /// Flat "key = value" block.
    std::string to_key_value() const;
    static std::string csv_header();
    /// case,beta,eps,R_eps,M,C_const,lambda_star,pc0_star (empty where not applicable).
    std::string to_csv_row() const;
};

/// Case I: (beta K + 1)/C0 with ">=". Cases II-IV: max of
/// (2/C0) max{psi_const (C + eps), beta K + 1} and (2/C0)[M + K beta + 1](1+R_eps^2)^{(beta+alpha)/2},
/// strict. NotCovered throws DomainError.
ThresholdReport lambda_threshold(const ProblemParams& params, double beta, double eps = 0.1);

/// Case I: (beta K + 1)/C0. Cases II-IV:
/// (2/C0) max{psi_const (C + eps), beta K + 1, M (1+R_eps^2)^{(beta+alpha)/2}}. Strict.
/// c0 = 0 sets pc0_never_sufficient.
ThresholdReport pc0_threshold(const ProblemParams& params, double beta, double eps = 0.1);

/// Both thresholds in one report.
ThresholdReport full_thresholds(const ProblemParams& params, double beta, double eps = 0.1);

enum class DriftRegime { uniqueness_compatible, nonuniqueness };
const char* to_string(DriftRegime r);

struct DriftRegimeTag {
    DriftRegime regime = DriftRegime::uniqueness_compatible;
    /// sigma == 1 - alpha exactly: included in the uniqueness side.
    bool boundary = false;
};

/// sigma <= 1 - alpha: uniqueness-compatible; otherwise nonuniqueness (for outward drifts).
DriftRegimeTag drift_regime(double alpha, double sigma);

struct CorollaryWeight {
    double beta = 0.0;
    double p = 1.0;
    CaseTag tag;
};

/// beta = N + 2s - alpha, p = 1, for 0 < alpha < 2s; the result lies on the boundary of case IV.
CorollaryWeight corollary_weight(const ProblemParams& params);

}  // namespace fracdrift
