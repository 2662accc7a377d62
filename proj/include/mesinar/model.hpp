#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mesinar/dist.hpp"
#include "mesinar/random.hpp"
#include "mesinar/specfun.hpp"

namespace mesinar {

/// Sign of the lag-one autocorrelation applied to the thinned state.
enum class Sign : int { negative = -1, positive = 1 };

constexpr int to_int(Sign s) { return static_cast<int>(s); }
Sign sign_from_int(int v);

/**
 * @brief MESINAR(1) parameter vector (phi, p, beta, theta1, theta2) plus delta.
 *
 * The next state is delta * S_{p, beta^2}(previous) with probability phi and a
 * fresh Skellam(theta1, theta2) innovation otherwise.
 */
struct ModelParams {
    double phi = 0.5;     ///< mixing weight, [0, 1]
    double p = 0.5;       ///< thinning weight, (0, 1)
    double beta = 1.0;    ///< theta = beta^2 > 0
    double theta1 = 1.0;  ///< innovation rate, > 0
    double theta2 = 1.0;  ///< innovation rate, > 0
    Sign delta = Sign::positive;

    [[nodiscard]] double theta() const { return beta * beta; }
    [[nodiscard]] SkellamParams innovation() const { return {theta1, theta2}; }
    [[nodiscard]] int sign() const { return to_int(delta); }

    /// Throws DomainError naming the offending field.
    void validate() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Ordered observations z_0, z_1, ... with optional time labels.
struct IntSeries {
    std::vector<int> values;
    std::vector<std::string> labels;

    [[nodiscard]] std::size_t size() const { return values.size(); }
    [[nodiscard]] bool empty() const { return values.empty(); }
    int operator[](std::size_t i) const { return values[i]; }
};

/// Probability masses on the integer interval [lo, lo + masses.size() - 1].
struct ProbVector {
    int lo = 0;
    std::vector<double> masses;

    [[nodiscard]] int hi() const { return lo + static_cast<int>(masses.size()) - 1; }
    [[nodiscard]] double at(int z) const;
    [[nodiscard]] double total() const;
    [[nodiscard]] double mean() const;
    [[nodiscard]] double variance() const;
    [[nodiscard]] double expect(const std::function<double(int)>& f) const;
};

/// Raised when an iterative procedure runs out of iterations.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Total variation distance between two probability vectors.
double total_variation(const ProbVector& a, const ProbVector& b);

/**
 * Truncate a unimodal-tailed pmf on Z: start at `center`, extend each side
 * until the geometric-ratio bound on the remaining tail falls below `tail_tol`.
 */
ProbVector truncated_pmf(const std::function<double(int)>& pmf, int center, double tail_tol = 1e-12);

// Transition kernel

/// One-step transition probability, extended-binomial / 0F1~ form.
double transition_pmf(int z_prev, int z_next, const ModelParams& params);
LogValue log_transition_pmf(int z_prev, int z_next, const ModelParams& params);

/// Same kernel written with modified Bessel functions of the first kind.
double transition_pmf_bessel(int z_prev, int z_next, const ModelParams& params);
LogValue log_transition_pmf_bessel(int z_prev, int z_next, const ModelParams& params);

/// Row z_prev of the kernel, truncated with tail mass below `tail_tol`.
ProbVector transition_row(int z_prev, const ModelParams& params, double tail_tol = 1e-12);

/// Simulate n observations after discarding burn_in steps from a Skellam start.
IntSeries simulate(const ModelParams& params, std::size_t n, std::size_t burn_in, RandomStream& rng);

// Moments

double cond_mean(int z_prev, const ModelParams& params);
double cond_var(int z_prev, const ModelParams& params);
double stationary_mean(const ModelParams& params);

/**
 * Stationary variance given E[0F1~(;Z+2;theta)/0F1~(;Z+1;theta)] under the
 * stationary law. The two overloads below supply that expectation exactly
 * (from a stationary distribution) or as a sample average over a series.
 */
double stationary_var_from_ratio(const ModelParams& params, double mean_ratio);
double stationary_var(const ModelParams& params, const ProbVector& dist);
double stationary_var_sample(const ModelParams& params, const IntSeries& series);

/// Sample average of hyp_ratio(z_{t-1}, theta) over z_0, ..., z_{n-2}.
double sample_mean_ratio(const IntSeries& series, double theta);

double autocovariance(int k, const ModelParams& params, double var0);

struct StationaryOptions {
    double tol = 1e-10;
    int max_iterations = 100000;
};

/// Stationary law by power iteration of the truncated kernel.
ProbVector stationary_dist(const ModelParams& params, const StationaryOptions& options = {});

// PDINAR(1): Z_t = delta * S_{alpha,theta}(Z_{t-1}) + eps_t

double pdinar_transition_pmf(int z_prev, int z_next, double alpha, double theta, const SkellamParams& innovation,
                             Sign delta);

/// Draw one PDINAR(1) step.
int pdinar_step(int z_prev, double alpha, double theta, const SkellamParams& innovation, Sign delta,
                RandomStream& rng);

}  // namespace mesinar
