#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mesinar/estimate.hpp"

namespace mesinar::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNonConvergence = 3;

struct DescribeStats {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  ///< divisor n - 1; 0 for a single value
    int minimum = 0;
    double median = 0.0;
    int maximum = 0;
    int range = 0;
};

DescribeStats describe(const IntSeries& series);

/// Lag-one difference; labels of the later observation are kept.
IntSeries difference(const IntSeries& series);

struct CompareRow {
    std::string model;
    int k = 0;
    double loglik = 0.0;
    InfoCriteria criteria;
};

/// Fits each named model ("mesinar", "pdinar") and sorts ascending by AIC.
std::vector<CompareRow> compare_models(const IntSeries& series, const std::vector<std::string>& models,
                                       const FitOptions& options);

/// Entry point of the `mesinar` executable; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mesinar::cli
