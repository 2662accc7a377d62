#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mesinar/likelihood.hpp"
#include "mesinar/model.hpp"

namespace mesinar {

enum class FitMethod { cml, yw };

const char* to_string(FitMethod m);

struct InfoCriteria {
    double aic = 0.0;
    double bic = 0.0;
    double hqic = 0.0;
};

/**
 * AIC = -2L + 2k, BIC = -2L + k ln n, HQIC = -2L + k ln ln n.
 *
 * The HQIC penalty carries no factor 2; together with n taken as the raw
 * series length this reproduces the published comparison tables.
 */
InfoCriteria info_criteria(double loglik, int k, std::size_t n);

/// Mean, divisor-n variance and lag-one autocorrelation of a series.
struct SampleMoments {
    double mean = 0.0;
    double variance = 0.0;
    double acf1 = 0.0;
    std::size_t n = 0;
};

/// Throws DomainError when the series is constant (r1 undefined).
SampleMoments sample_moments(const IntSeries& series);

/// +1 when r1 >= 0, otherwise -1.
Sign detect_delta(const IntSeries& series);

/// -sum log P(z_t | z_{t-1}); the marginal of z_0 is not included.
double neg_loglik(const IntSeries& series, const ModelParams& params);

/// Analytic gradient of the conditional log-likelihood, order (phi, p, beta, theta1, theta2).
Score score(const IntSeries& series, const ModelParams& params);

using Matrix5 = Eigen::Matrix<double, 5, 5>;

class SingularInformationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-transition negative Hessian from central differences of the analytic score.
struct ObservedInformation {
    Matrix5 matrix;            ///< symmetrized
    double asymmetry = 0.0;    ///< max |H - H^T| before symmetrizing
    std::size_t transitions = 0;
};

ObservedInformation observed_information(const IntSeries& series, const ModelParams& params);
ObservedInformation observed_information(const TransitionCounts& counts, const ModelParams& params);

/// sqrt(diag(G^{-1}) / n); throws SingularInformationError unless G is positive definite.
std::array<double, 5> standard_errors(const ObservedInformation& info);

struct FitOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;
    int n_starts = 5;
    std::uint64_t seed = 0;
    bool parallel_starts = true;

    void validate() const;
};

struct FitResult {
    FitMethod method = FitMethod::cml;
    ModelParams estimates;
    std::optional<std::array<double, 5>> std_errors;
    double loglik = 0.0;
    InfoCriteria criteria;
    Sign delta_used = Sign::positive;
    bool converged = false;
    int iterations = 0;
    std::size_t n_used = 0;
    bool phi_clamped = false;
    std::string message;

    /// Negative log-likelihood at each multistart initial point and at each local optimum.
    std::vector<double> start_objectives;
    std::vector<double> start_optima;
};

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, FitResult best) : std::runtime_error(what), best_(std::move(best)) {}
    [[nodiscard]] const FitResult& best() const { return best_; }

private:
    FitResult best_;
};

class InfeasibleError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Minimum series length accepted by fit_cml.
inline constexpr std::size_t kMinFitLength = 10;

/**
 * Conditional maximum likelihood over (logit phi, logit p, log beta,
 * log theta1, log theta2) with BFGS and the analytic score; the best of
 * several starts is returned.
 */
FitResult fit_cml(const IntSeries& series, Sign delta, const FitOptions& options = {});

/**
 * Moment estimator: phi = delta r1 / p, theta1 - theta2 from the mean
 * equation and theta1 + theta2 from the variance equation, with p and theta
 * supplied by the caller (usually from a likelihood pre-fit).
 */
FitResult fit_yw(const IntSeries& series, double p_plugin, double theta_plugin, Sign delta);

/// Same solve given the moments and E[ratio] directly.
FitResult fit_yw_from_moments(const SampleMoments& moments, double mean_ratio, double p_plugin,
                              double theta_plugin, Sign delta);

// PDINAR(1) comparator: alpha, theta1, theta2; the thinning dependence parameter
// is tied to the innovations as theta = theta1 theta2 / (1 - alpha)^2.

struct PdinarParams {
    double alpha = 0.5;
    double theta1 = 1.0;
    double theta2 = 1.0;
    Sign delta = Sign::positive;

    [[nodiscard]] double theta() const { return theta1 * theta2 / ((1.0 - alpha) * (1.0 - alpha)); }
    [[nodiscard]] SkellamParams innovation() const { return {theta1, theta2}; }
    void validate() const;
};

struct PdinarFit {
    PdinarParams estimates;
    std::optional<std::array<double, 3>> std_errors;
    double loglik = 0.0;
    InfoCriteria criteria;
    bool converged = false;
    int iterations = 0;
    std::size_t n_used = 0;
    std::string message;
};

double pdinar_neg_loglik(const IntSeries& series, const PdinarParams& params);

PdinarFit fit_pdinar(const IntSeries& series, Sign delta, const FitOptions& options = {});

}  // namespace mesinar
