#include "mesinar/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

namespace mesinar {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxTruncationSpan = 1 << 20;

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

std::string describe(const char* field, double value, const char* range) {
    return std::string("ModelParams: ") + field + " must lie in " + range + ", got " + std::to_string(value);
}

}  // namespace

Sign sign_from_int(int v) {
    if (v == 1) return Sign::positive;
    if (v == -1) return Sign::negative;
    throw DomainError("delta must be +1 or -1, got " + std::to_string(v));
}

void ModelParams::validate() const {
    if (!(phi >= 0.0 && phi <= 1.0)) throw DomainError(describe("phi", phi, "[0,1]"));
    if (!(p > 0.0 && p < 1.0)) throw DomainError(describe("p", p, "(0,1)"));
    if (!(beta > 0.0 && std::isfinite(beta))) throw DomainError(describe("beta", beta, "(0,inf)"));
    if (!(theta1 > 0.0 && std::isfinite(theta1))) throw DomainError(describe("theta1", theta1, "(0,inf)"));
    if (!(theta2 > 0.0 && std::isfinite(theta2))) throw DomainError(describe("theta2", theta2, "(0,inf)"));
    if (delta != Sign::positive && delta != Sign::negative)
        throw DomainError("ModelParams: delta must be +1 or -1");
}

// ProbVector

double ProbVector::at(int z) const {
    if (z < lo || z > hi()) return 0.0;
    return masses[static_cast<std::size_t>(z - lo)];
}

double ProbVector::total() const { return std::accumulate(masses.begin(), masses.end(), 0.0); }

double ProbVector::expect(const std::function<double(int)>& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i)
        if (masses[i] > 0.0) acc += masses[i] * f(lo + static_cast<int>(i));
    return acc;
}

double ProbVector::mean() const {
    return expect([](int z) { return static_cast<double>(z); });
}

double ProbVector::variance() const {
    const double m = mean();
    return expect([m](int z) { return (z - m) * (z - m); });
}

double total_variation(const ProbVector& a, const ProbVector& b) {
    const int lo = std::min(a.lo, b.lo);
    const int hi = std::max(a.hi(), b.hi());
    double tv = 0.0;
    for (int z = lo; z <= hi; ++z) tv += std::abs(a.at(z) - b.at(z));
    return 0.5 * tv;
}

namespace {

// Extend one side until the geometric tail bound drops below tol.
std::vector<double> extend_side(const std::function<double(int)>& pmf, int start, int step, double edge_mass,
                                double tol) {
    std::vector<double> out;
    double prev = edge_mass;
    for (int k = 1; k < kMaxTruncationSpan; ++k) {
        const double v = pmf(start + step * k);
        out.push_back(v);
        if (v == 0.0 && prev == 0.0) break;
        if (v < prev) {
            const double r = v / prev;
            if (v * r / (1.0 - r) < tol && v < tol) break;
        } else if (v == 0.0) {
            break;
        }
        prev = v;
    }
    return out;
}

ProbVector truncated_pmf_range(const std::function<double(int)>& pmf, int lo, int hi, double tail_tol) {
    if (lo > hi) std::swap(lo, hi);
    std::vector<double> core;
    core.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (int z = lo; z <= hi; ++z) core.push_back(pmf(z));
    const auto left = extend_side(pmf, lo, -1, core.front(), tail_tol);
    const auto right = extend_side(pmf, hi, +1, core.back(), tail_tol);

    ProbVector out;
    out.lo = lo - static_cast<int>(left.size());
    out.masses.reserve(left.size() + core.size() + right.size());
    out.masses.insert(out.masses.end(), left.rbegin(), left.rend());
    out.masses.insert(out.masses.end(), core.begin(), core.end());
    out.masses.insert(out.masses.end(), right.begin(), right.end());
    return out;
}

}  // namespace

ProbVector truncated_pmf(const std::function<double(int)>& pmf, int center, double tail_tol) {
    return truncated_pmf_range(pmf, center, center, tail_tol);
}

// Transition kernel

LogValue log_transition_pmf(int z_prev, int z_next, const ModelParams& params) {
    params.validate();
    const double log_phi = safe_log(params.phi);
    const double log_rest = safe_log(1.0 - params.phi);
    double thinning = kNegInf;
    if (log_phi > kNegInf)
        thinning = log_phi + log_eb_pmf(params.sign() * z_next, {z_prev, params.p, params.theta()}).log_magnitude;
    double innovation = kNegInf;
    if (log_rest > kNegInf) innovation = log_rest + log_skellam_pmf(z_next, params.innovation()).log_magnitude;
    return {log_add(thinning, innovation)};
}

double transition_pmf(int z_prev, int z_next, const ModelParams& params) {
    return log_transition_pmf(z_prev, z_next, params).value();
}

LogValue log_transition_pmf_bessel(int z_prev, int z_next, const ModelParams& params) {
    params.validate();
    const double log_phi = safe_log(params.phi);
    const double log_rest = safe_log(1.0 - params.phi);
    const int n = params.sign() * z_next;
    const double b = params.beta;
    const double p = params.p;
    double thinning = kNegInf;
    if (log_phi > kNegInf) {
        thinning = log_phi + log_bessel_i(n, 2.0 * p * b).log_magnitude +
                   log_bessel_i(z_prev - n, 2.0 * (1.0 - p) * b).log_magnitude -
                   log_bessel_i(z_prev, 2.0 * b).log_magnitude;
    }
    double innovation = kNegInf;
    if (log_rest > kNegInf) {
        const double t1 = params.theta1;
        const double t2 = params.theta2;
        innovation = log_rest - t1 - t2 + 0.5 * z_next * std::log(t1 / t2) +
                     log_bessel_i(z_next, 2.0 * std::sqrt(t1 * t2)).log_magnitude;
    }
    return {log_add(thinning, innovation)};
}

double transition_pmf_bessel(int z_prev, int z_next, const ModelParams& params) {
    return log_transition_pmf_bessel(z_prev, z_next, params).value();
}

ProbVector transition_row(int z_prev, const ModelParams& params, double tail_tol) {
    params.validate();
    const double m1 = params.sign() * params.p * z_prev;
    const double m2 = params.theta1 - params.theta2;
    const int lo = static_cast<int>(std::floor(std::min(m1, m2)));
    const int hi = static_cast<int>(std::ceil(std::max(m1, m2)));
    return truncated_pmf_range([&](int z) { return transition_pmf(z_prev, z, params); }, lo, hi, tail_tol);
}

IntSeries simulate(const ModelParams& params, std::size_t n, std::size_t burn_in, RandomStream& rng) {
    params.validate();
    if (n == 0) throw DomainError("simulate: n must be >= 1");
    const SkellamParams eps = params.innovation();
    const double theta = params.theta();
    IntSeries out;
    out.values.reserve(n);
    int z = skellam_sample(eps, rng);
    const std::size_t total = burn_in + n;
    for (std::size_t t = 0; t < total; ++t) {
        if (t > 0) {
            const bool thin = rng.uniform() < params.phi;
            z = thin ? params.sign() * eb_thinning_sample(z, params.p, theta, rng) : skellam_sample(eps, rng);
        }
        if (t >= burn_in) out.values.push_back(z);
    }
    return out;
}

// Moments

double cond_mean(int z_prev, const ModelParams& params) {
    return params.phi * params.p * params.sign() * z_prev + (1.0 - params.phi) * (params.theta1 - params.theta2);
}

double cond_var(int z_prev, const ModelParams& params) {
    const double phi = params.phi;
    const double p = params.p;
    const double pq = p * (1.0 - p);
    const double theta = params.theta();
    const double d = params.theta1 - params.theta2;
    const double thinning_var = pq * z_prev + 2.0 * pq * theta * hyp_ratio(z_prev, theta);
    const double gap = p * params.sign() * z_prev - d;
    return phi * thinning_var + (1.0 - phi) * (params.theta1 + params.theta2) + phi * (1.0 - phi) * gap * gap;
}

double stationary_mean(const ModelParams& params) {
    return (1.0 - params.phi) * (params.theta1 - params.theta2) / (1.0 - params.phi * params.p * params.sign());
}

double stationary_var_from_ratio(const ModelParams& params, double mean_ratio) {
    // E[Z^2] (1 - phi p^2) = phi p q mu + 2 phi p q theta E[ratio] + (1 - phi)(theta1 + theta2 + d^2)
    const double phi = params.phi;
    const double p = params.p;
    const double pq = p * (1.0 - p);
    const double d = params.theta1 - params.theta2;
    const double mu = stationary_mean(params);
    const double second = (phi * pq * mu + 2.0 * phi * pq * params.theta() * mean_ratio +
                           (1.0 - phi) * (params.theta1 + params.theta2 + d * d)) /
                          (1.0 - phi * p * p);
    return second - mu * mu;
}

double stationary_var(const ModelParams& params, const ProbVector& dist) {
    if (std::abs(dist.total() - 1.0) > 1e-9) throw DomainError("stationary_var: distribution is not normalized");
    const double theta = params.theta();
    const double ratio = dist.expect([theta](int z) { return hyp_ratio(z, theta); });
    return stationary_var_from_ratio(params, ratio);
}

double sample_mean_ratio(const IntSeries& series, double theta) {
    if (series.size() < 2) throw DomainError("sample_mean_ratio: need at least two observations");
    // Ratio depends only on the state; cache by value.
    const auto [mn, mx] = std::minmax_element(series.values.begin(), series.values.end());
    std::vector<double> cache(static_cast<std::size_t>(*mx - *mn + 1), -1.0);
    double acc = 0.0;
    for (std::size_t t = 0; t + 1 < series.size(); ++t) {
        double& r = cache[static_cast<std::size_t>(series[t] - *mn)];
        if (r < 0.0) r = hyp_ratio(series[t], theta);
        acc += r;
    }
    return acc / static_cast<double>(series.size() - 1);
}

double stationary_var_sample(const ModelParams& params, const IntSeries& series) {
    return stationary_var_from_ratio(params, sample_mean_ratio(series, params.theta()));
}

double autocovariance(int k, const ModelParams& params, double var0) {
    if (k < 0) throw DomainError("autocovariance: lag must be >= 0");
    return std::pow(params.phi * params.p * params.sign(), k) * var0;
}

ProbVector stationary_dist(const ModelParams& params, const StationaryOptions& options) {
    params.validate();
    if (!(options.tol > 0.0)) throw DomainError("stationary_dist: tol must be positive");
    const double tol = options.tol;
    const double mu = stationary_mean(params);
    const double spread = std::sqrt(params.theta1 + params.theta2 + params.theta() + 1.0);
    int half_width = static_cast<int>(std::ceil(12.0 * spread)) + 10;

    for (int attempt = 0; attempt < 12; ++attempt, half_width *= 2) {
        const int lo = static_cast<int>(std::floor(mu)) - half_width;
        const int hi = static_cast<int>(std::ceil(mu)) + half_width;
        const auto size = static_cast<std::size_t>(hi - lo + 1);

        std::vector<double> kernel(size * size);
        std::vector<double> leak(size);
        for (std::size_t i = 0; i < size; ++i) {
            double row_sum = 0.0;
            for (std::size_t j = 0; j < size; ++j) {
                const double v = transition_pmf(lo + static_cast<int>(i), lo + static_cast<int>(j), params);
                kernel[i * size + j] = v;
                row_sum += v;
            }
            leak[i] = std::max(0.0, 1.0 - row_sum);
        }

        ProbVector cur;
        cur.lo = lo;
        cur.masses.resize(size);
        for (std::size_t j = 0; j < size; ++j) cur.masses[j] = skellam_pmf(lo + static_cast<int>(j), params.innovation());
        const double init_total = cur.total();
        for (double& m : cur.masses) m /= init_total;

        ProbVector next = cur;
        bool converged = false;
        for (int it = 0; it < options.max_iterations; ++it) {
            std::fill(next.masses.begin(), next.masses.end(), 0.0);
            for (std::size_t i = 0; i < size; ++i) {
                const double w = cur.masses[i];
                if (w == 0.0) continue;
                const double* row = &kernel[i * size];
                for (std::size_t j = 0; j < size; ++j) next.masses[j] += w * row[j];
            }
            const double total = next.total();
            for (double& m : next.masses) m /= total;
            const double tv = total_variation(cur, next);
            std::swap(cur, next);
            if (tv < tol) {
                converged = true;
                break;
            }
        }
        if (!converged) throw ConvergenceError("stationary_dist: power iteration did not converge");

        double boundary = 0.0;
        double leaked = 0.0;
        constexpr std::size_t kEdge = 3;
        for (std::size_t i = 0; i < kEdge; ++i) boundary += cur.masses[i] + cur.masses[size - 1 - i];
        for (std::size_t i = 0; i < size; ++i) leaked += cur.masses[i] * leak[i];
        if (boundary < tol / 10.0 && leaked < tol / 10.0) return cur;
    }
    throw ConvergenceError("stationary_dist: support expansion did not capture the mass");
}

// PDINAR(1)

double pdinar_transition_pmf(int z_prev, int z_next, double alpha, double theta, const SkellamParams& innovation,
                             Sign delta) {
    const EBParams eb{z_prev, alpha, theta};
    eb.validate();
    innovation.validate();
    const auto center = static_cast<int>(std::lround(alpha * z_prev));
    const ProbVector thinned = truncated_pmf([&](int x) { return eb_pmf(x, eb); }, center, 1e-14);
    double acc = 0.0;
    for (std::size_t i = 0; i < thinned.masses.size(); ++i) {
        const int s = to_int(delta) * (thinned.lo + static_cast<int>(i));
        acc += thinned.masses[i] * skellam_pmf(z_next - s, innovation);
    }
    return acc;
}

int pdinar_step(int z_prev, double alpha, double theta, const SkellamParams& innovation, Sign delta,
                RandomStream& rng) {
    return to_int(delta) * eb_thinning_sample(z_prev, alpha, theta, rng) + skellam_sample(innovation, rng);
}

}  // namespace mesinar
