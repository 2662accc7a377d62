#include "mesinar/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace mesinar {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kRelStop = 1e-18;
constexpr int kMaxTerms = 100000;

// Neumaier variant of Kahan summation; terms here are all positive.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    [[nodiscard]] double total() const { return sum + comp; }
};

}  // namespace

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

namespace detail {

double log_double_factorial_series(double log_a, int c1, int c2) {
    // term_j = A^j / ((j+c1)! (j+c2)!), ratio term_{j+1}/term_j = A / ((j+c1+1)(j+c2+1)).
    const double a = std::exp(log_a);
    if (a == 0.0) return -std::lgamma(c1 + 1.0) - std::lgamma(c2 + 1.0);

    // Peak index: largest j with (j+c1)(j+c2) <= A, i.e. term_j >= term_{j-1}.
    const double s = 0.5 * (c1 + c2);
    const double d = 0.5 * (c1 - c2);
    const double root = -s + std::sqrt(d * d + a);
    int peak = root > 0 ? static_cast<int>(std::floor(root)) : 0;
    peak = std::max(peak, 0);

    const double log_peak = peak * log_a - std::lgamma(peak + c1 + 1.0) - std::lgamma(peak + c2 + 1.0);

    CompensatedSum acc;
    acc.add(1.0);
    double term = 1.0;
    for (int j = peak; j < peak + kMaxTerms; ++j) {
        term *= a / ((j + c1 + 1.0) * (j + c2 + 1.0));
        acc.add(term);
        if (term < kRelStop * acc.total()) break;
    }
    term = 1.0;
    for (int j = peak; j > 0; --j) {
        term *= (static_cast<double>(j + c1) * (j + c2)) / a;
        acc.add(term);
        if (term < kRelStop * acc.total()) break;
    }
    return log_peak + std::log(acc.total());
}

}  // namespace detail

LogValue log_bessel_i(int order, double x) {
    if (!(x >= 0.0)) throw DomainError("log_bessel_i: x must be nonnegative");
    const int n = std::abs(order);
    if (x == 0.0) return n == 0 ? LogValue::one() : LogValue::zero();
    const double log_half_x = std::log(0.5 * x);
    return {n * log_half_x + detail::log_double_factorial_series(2.0 * log_half_x, 0, n)};
}

LogValue log_reg_hyp_0f1(int b, double m) {
    if (!(m >= 0.0)) throw DomainError("log_reg_hyp_0f1: m must be nonnegative");
    if (b >= 1) {
        if (m == 0.0) return {-std::lgamma(static_cast<double>(b))};
        return {detail::log_double_factorial_series(std::log(m), 0, b - 1)};
    }
    // Gamma poles remove k < 1-b; substituting k = (1-b) + j leaves j! in the other slot.
    const int k0 = 1 - b;
    if (m == 0.0) return LogValue::zero();
    const double log_m = std::log(m);
    return {k0 * log_m + detail::log_double_factorial_series(log_m, k0, 0)};
}

double hyp_ratio(int z, double theta) {
    if (!(theta > 0.0)) throw DomainError("hyp_ratio: theta must be positive");
    const LogValue num = log_reg_hyp_0f1(z + 2, theta);
    const LogValue den = log_reg_hyp_0f1(z + 1, theta);
    return std::exp(num.log_magnitude - den.log_magnitude);
}

}  // namespace mesinar
