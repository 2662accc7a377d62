#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mesinar {

/// Raised when an argument lies outside the mathematical domain of a routine.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/**
 * @brief Nonnegative quantity carried by its natural logarithm.
 *
 * An exact zero is stored as -inf and stays -inf through products
 * (sums of logs), so structural zeros never get confused with underflow.
 */
struct LogValue {
    double log_magnitude = -std::numeric_limits<double>::infinity();

    static constexpr LogValue zero() { return {}; }
    static constexpr LogValue one() { return {0.0}; }

    [[nodiscard]] bool is_zero() const { return std::isinf(log_magnitude) && log_magnitude < 0; }
    [[nodiscard]] double value() const { return std::exp(log_magnitude); }

    friend LogValue operator*(LogValue a, LogValue b) {
        if (a.is_zero() || b.is_zero()) return zero();
        return {a.log_magnitude + b.log_magnitude};
    }
    friend LogValue operator/(LogValue a, LogValue b) {
        if (b.is_zero()) throw DomainError("LogValue: division by exact zero");
        if (a.is_zero()) return zero();
        return {a.log_magnitude - b.log_magnitude};
    }
};

/// log(exp(a) + exp(b)) with -inf treated as exact zero.
double log_add(double a, double b);

/**
 * Natural log of the modified Bessel function of the first kind I_order(x)
 * for integer order. I_{-n} = I_n is applied before evaluation.
 *
 * Uses the ascending series summed outward from its largest term, which keeps
 * every intermediate finite for any order and any moderate x.
 */
LogValue log_bessel_i(int order, double x);

/**
 * Natural log of the regularized limit function
 * 0F1~(;b;m) = sum_k m^k / (k! Gamma(b+k)).
 *
 * Terms whose Gamma argument is a nonpositive integer contribute zero, so for
 * b <= 0 the series effectively starts at k = 1 - b.
 */
LogValue log_reg_hyp_0f1(int b, double m);

/// 0F1~(;z+2;theta) / 0F1~(;z+1;theta), theta > 0.
double hyp_ratio(int z, double theta);

namespace detail {

/// log sum_{j>=0} A^j / ((j+c1)! (j+c2)!) for A >= 0 and c1, c2 >= 0.
double log_double_factorial_series(double log_a, int c1, int c2);

}  // namespace detail

}  // namespace mesinar
