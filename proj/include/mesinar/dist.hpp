#pragma once

#include "mesinar/random.hpp"
#include "mesinar/specfun.hpp"

namespace mesinar {

/// Poisson-difference (Skellam) law of N1 - N2, N_i ~ Poisson(theta_i).
struct SkellamParams {
    double theta1 = 0.0;
    double theta2 = 0.0;

    void validate() const;
    [[nodiscard]] double mean() const { return theta1 - theta2; }
    [[nodiscard]] double variance() const { return theta1 + theta2; }
};

/// Extended binomial EB(z, p, theta) on the integers.
struct EBParams {
    int z = 0;
    double p = 0.5;
    double theta = 1.0;

    void validate() const;
};

/// Bessel law on {0, 1, ...} with pmf proportional to theta^w / (w! (w+y)!).
struct BesselParams {
    int y = 0;
    double theta = 1.0;

    void validate() const;
};

/// Raised when conditioning on an event of probability zero.
class UndefinedConditionalError : public DomainError {
public:
    using DomainError::DomainError;
};

// Skellam
LogValue log_skellam_pmf(int z, const SkellamParams& params);
double skellam_pmf(int z, const SkellamParams& params);
int skellam_sample(const SkellamParams& params, RandomStream& rng);

// Extended binomial
LogValue log_eb_pmf(int x, const EBParams& params);
double eb_pmf(int x, const EBParams& params);

/// P(W = w | W + R = z) for independent W ~ PD(t1, t2), R ~ PD(t3, t4).
double cond_pd_pmf(int w, int z, double t1, double t2, double t3, double t4);

// Bessel
LogValue log_bessel_pmf(int w, const BesselParams& params);
double bessel_pmf(int w, const BesselParams& params);
int bessel_sample(const BesselParams& params, RandomStream& rng);

/**
 * Draw S_{alpha,theta}(z) = sgn(z) Bin(|z|, alpha) + sum_{i=1}^{W} B_i with
 * W ~ Bessel(|z|, theta) drawn once and B_i in {-1, 0, 1} with
 * P(B=1) = P(B=-1) = alpha(1-alpha). Its law is EB(z, alpha, theta).
 */
int eb_thinning_sample(int z, double alpha, double theta, RandomStream& rng);

// Building blocks, exposed for testing.
int poisson_sample(double mean, RandomStream& rng);
int binomial_sample(int n, double p, RandomStream& rng);

}  // namespace mesinar
