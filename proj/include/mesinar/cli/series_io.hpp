#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "mesinar/model.hpp"

namespace mesinar::cli {

/// Bad input file or argument; maps to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Reads an integer series. Accepts a `t,z` CSV, a single column, or any CSV
 * whose header names a `z` column; otherwise the last column is taken.
 * Blank lines and lines starting with '#' are skipped.
 */
IntSeries read_series(std::istream& in, const std::string& source = "<stream>");
IntSeries read_series_file(const std::string& path);

/// Header `t,z`; t is the stored label when present, else 1..n.
void write_series(std::ostream& out, const IntSeries& series);

}  // namespace mesinar::cli
