#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "mesinar/model.hpp"

namespace mesinar {

/// Distinct (z_{t-1}, z_t) pairs of a series with their multiplicities.
struct TransitionCounts {
    std::vector<std::pair<int, int>> pairs;
    std::vector<double> counts;
    std::size_t transitions = 0;
    int max_abs = 0;  ///< max |z| over the series
};

TransitionCounts count_transitions(const IntSeries& series);

/// log I_k(x) for |k| <= max_order at a fixed argument.
class BesselTable {
public:
    BesselTable(double x, int max_order);
    [[nodiscard]] double log_i(int order) const;
    /// (I_{k-1}(x) + I_{k+1}(x)) / I_k(x) = 2 I_k'(x) / I_k(x).
    [[nodiscard]] double derivative_ratio(int order) const;

private:
    std::vector<double> values_;  // indexed by |order|
};

/// Score components in the order (phi, p, beta, theta1, theta2).
using Score = std::array<double, 5>;

/// Conditional log-likelihood sum over the counted transitions.
double mesinar_loglik(const TransitionCounts& counts, const ModelParams& params);

/// Log-likelihood and its analytic gradient; requires 0 < phi < 1.
double mesinar_loglik_score(const TransitionCounts& counts, const ModelParams& params, Score& score);

}  // namespace mesinar
