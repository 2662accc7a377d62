#include "mesinar/dist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace mesinar {

namespace {

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }
bool finite_pos(double x) { return std::isfinite(x) && x > 0.0; }

// Mean threshold below which the multiplication method is used.
constexpr double kPoissonInversionLimit = 30.0;

int poisson_multiplication(double mean, RandomStream& rng) {
    const double limit = std::exp(-mean);
    double prod = rng.uniform_open();
    int k = 0;
    while (prod > limit) {
        prod *= rng.uniform_open();
        ++k;
    }
    return k;
}

// Hormann's transformed rejection with squeeze (PTRS).
int poisson_ptrs(double mean, RandomStream& rng) {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform_open();
        const double us = 0.5 - std::abs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<int>(kd);
        if (kd < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -mean + kd * loglam - std::lgamma(kd + 1.0))
            return static_cast<int>(kd);
    }
}

}  // namespace

void SkellamParams::validate() const {
    if (!finite_nonneg(theta1)) throw DomainError("SkellamParams: theta1 must be >= 0, got " + std::to_string(theta1));
    if (!finite_nonneg(theta2)) throw DomainError("SkellamParams: theta2 must be >= 0, got " + std::to_string(theta2));
}

void EBParams::validate() const {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("EBParams: p must lie in (0,1), got " + std::to_string(p));
    if (!finite_pos(theta)) throw DomainError("EBParams: theta must be > 0, got " + std::to_string(theta));
}

void BesselParams::validate() const {
    if (y < 0) throw DomainError("BesselParams: order y must be >= 0, got " + std::to_string(y));
    if (!finite_pos(theta)) throw DomainError("BesselParams: theta must be > 0, got " + std::to_string(theta));
}

LogValue log_skellam_pmf(int z, const SkellamParams& params) {
    params.validate();
    const double t1 = params.theta1;
    const double t2 = params.theta2;
    // e^{-t1-t2} (t1 t2)^{max(0,-z)} t1^z 0F1~(;|z|+1; t1 t2), written as t1^{max(z,0)} t2^{max(-z,0)}.
    const int up = std::max(z, 0);
    const int down = std::max(-z, 0);
    if ((up > 0 && t1 == 0.0) || (down > 0 && t2 == 0.0)) return LogValue::zero();
    double log_p = -t1 - t2;
    if (up > 0) log_p += up * std::log(t1);
    if (down > 0) log_p += down * std::log(t2);
    return LogValue{log_p} * log_reg_hyp_0f1(std::abs(z) + 1, t1 * t2);
}

double skellam_pmf(int z, const SkellamParams& params) { return log_skellam_pmf(z, params).value(); }

int poisson_sample(double mean, RandomStream& rng) {
    if (!finite_nonneg(mean)) throw DomainError("poisson_sample: mean must be >= 0");
    if (mean == 0.0) return 0;
    return mean < kPoissonInversionLimit ? poisson_multiplication(mean, rng) : poisson_ptrs(mean, rng);
}

int skellam_sample(const SkellamParams& params, RandomStream& rng) {
    params.validate();
    const int n1 = poisson_sample(params.theta1, rng);
    const int n2 = poisson_sample(params.theta2, rng);
    return n1 - n2;
}

LogValue log_eb_pmf(int x, const EBParams& params) {
    params.validate();
    const double p = params.p;
    const double q = 1.0 - p;
    const int z = params.z;
    const double th = params.theta;
    const LogValue scale{x * std::log(p) + (z - x) * std::log(q)};
    return scale * log_reg_hyp_0f1(x + 1, p * p * th) * log_reg_hyp_0f1(z - x + 1, q * q * th) /
           log_reg_hyp_0f1(z + 1, th);
}

double eb_pmf(int x, const EBParams& params) { return log_eb_pmf(x, params).value(); }

double cond_pd_pmf(int w, int z, double t1, double t2, double t3, double t4) {
    for (double t : {t1, t2, t3, t4})
        if (!finite_pos(t)) throw DomainError("cond_pd_pmf: all rates must be > 0");
    const LogValue joint = log_skellam_pmf(w, {t1, t2}) * log_skellam_pmf(z - w, {t3, t4});
    const LogValue marginal = log_skellam_pmf(z, {t1 + t3, t2 + t4});
    if (marginal.is_zero()) throw UndefinedConditionalError("cond_pd_pmf: P(Z = z) is zero");
    return (joint / marginal).value();
}

LogValue log_bessel_pmf(int w, const BesselParams& params) {
    params.validate();
    if (w < 0) return LogValue::zero();
    const double log_num = w * std::log(params.theta) - std::lgamma(w + 1.0) - std::lgamma(w + params.y + 1.0);
    return LogValue{log_num} / log_reg_hyp_0f1(params.y + 1, params.theta);
}

double bessel_pmf(int w, const BesselParams& params) { return log_bessel_pmf(w, params).value(); }

int bessel_sample(const BesselParams& params, RandomStream& rng) {
    params.validate();
    const double y = params.y;
    const double th = params.theta;
    // Mode: largest w with w (w + y) <= theta.
    const int mode = std::max(0, static_cast<int>(std::floor(-0.5 * y + std::sqrt(0.25 * y * y + th))));
    const double p_mode = bessel_pmf(mode, params);

    // Chop-down search outward from the mode, always stepping to the heavier neighbour.
    double u = rng.uniform();
    if (u < p_mode) return mode;
    u -= p_mode;
    int lo = mode;
    int hi = mode;
    double p_lo = p_mode;
    double p_hi = p_mode;
    double next_lo = lo > 0 ? p_lo * lo * (lo + y) / th : 0.0;
    double next_hi = p_hi * th / ((hi + 1.0) * (hi + 1.0 + y));
    for (;;) {
        if (next_lo <= 0.0 && next_hi < 1e-300) return mode;  // residual u from rounding
        if (next_lo >= next_hi) {
            --lo;
            p_lo = next_lo;
            if (u < p_lo) return lo;
            u -= p_lo;
            next_lo = lo > 0 ? p_lo * lo * (lo + y) / th : 0.0;
        } else {
            ++hi;
            p_hi = next_hi;
            if (u < p_hi) return hi;
            u -= p_hi;
            next_hi = p_hi * th / ((hi + 1.0) * (hi + 1.0 + y));
        }
    }
}

int binomial_sample(int n, double p, RandomStream& rng) {
    if (n < 0) throw DomainError("binomial_sample: n must be >= 0");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial_sample: p must lie in [0,1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    const bool flip = p > 0.5;
    const double pp = flip ? 1.0 - p : p;
    const double qq = 1.0 - pp;
    int k = 0;
    if (n * std::log(qq) > -600.0) {
        // Sequential inversion from k = 0.
        const double odds = pp / qq;
        double f = std::pow(qq, n);
        double u = rng.uniform();
        while (u >= f && k < n) {
            u -= f;
            f *= odds * (n - k) / (k + 1.0);
            ++k;
        }
    } else {
        for (int i = 0; i < n; ++i)
            if (rng.uniform() < pp) ++k;
    }
    return flip ? n - k : k;
}

int eb_thinning_sample(int z, double alpha, double theta, RandomStream& rng) {
    EBParams{z, alpha, theta}.validate();
    const int n = std::abs(z);
    const int sign = (z > 0) - (z < 0);
    int out = sign * binomial_sample(n, alpha, rng);
    const int w = bessel_sample({n, theta}, rng);
    const double pq = alpha * (1.0 - alpha);
    for (int i = 0; i < w; ++i) {
        const double u = rng.uniform();
        if (u < pq)
            ++out;
        else if (u < 2.0 * pq)
            --out;
    }
    return out;
}

}  // namespace mesinar
