#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mesinar/estimate.hpp"
#include "mesinar/model.hpp"

namespace mesinar {

struct MCConfig {
    ModelParams truth;
    std::vector<std::size_t> sample_sizes;
    int replications = 100;
    std::uint64_t seed = 0;
    std::vector<FitMethod> methods{FitMethod::cml, FitMethod::yw};
    std::size_t burn_in = 500;
    FitOptions fit;
    int threads = 0;  ///< 0: one per hardware thread

    void validate() const;
};

/// One (n, method) block of the report.
struct MCCell {
    std::size_t n = 0;
    FitMethod method = FitMethod::cml;
    std::vector<std::string> parameters;
    std::vector<double> truth;
    std::vector<double> mean;
    std::vector<double> mse;
    int converged = 0;
    int failures = 0;
    /// estimates[r][j]; empty row for a failed replication.
    std::vector<std::vector<double>> estimates;
};

struct MCReport {
    MCConfig config;
    std::vector<MCCell> cells;

    /// Throws std::out_of_range when the cell was not requested.
    [[nodiscard]] const MCCell& cell(std::size_t n, FitMethod method) const;
};

/// Names reported per method: CML gives all five parameters, YW gives
/// phi, theta1, theta2 and theta1 - theta2.
std::vector<std::string> reported_parameters(FitMethod method);

/**
 * Simulates config.replications series per sample size and fits each
 * requested method. Replication r at size n draws from a stream derived from
 * (seed, n, r) only, so the report does not depend on the thread count.
 * YW uses the same replication's CML p and theta as plug-ins.
 */
MCReport run_study(const MCConfig& config);

struct Shape {
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

/// Moment-based sample skewness and excess kurtosis; needs at least 4 finite values.
Shape shape_statistics(const std::vector<double>& values);

}  // namespace mesinar
