#include "mesinar/cli/series_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mesinar::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n\"");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n\"");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    const char sep = line.find(',') != std::string::npos ? ',' : (line.find(';') != std::string::npos ? ';' : '\t');
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, sep)) out.push_back(trim(field));
    if (out.size() == 1 && sep == '\t') {
        // whitespace separated
        out.clear();
        std::istringstream ws(line);
        while (ws >> field) out.push_back(trim(field));
    }
    return out;
}

bool parse_integer(const std::string& s, int& value) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc() && ptr == last) return true;
    // integral values written as reals, e.g. "3.0"
    double d = 0.0;
    auto [dptr, dec] = std::from_chars(first, last, d);
    if (dec != std::errc() || dptr != last || !std::isfinite(d) || d != std::floor(d) || std::abs(d) > 1e9)
        return false;
    value = static_cast<int>(d);
    return true;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

IntSeries read_series(std::istream& in, const std::string& source) {
    IntSeries series;
    std::string line;
    std::size_t line_no = 0;
    bool first_data_line = true;
    int value_col = -1;
    int label_col = -1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::vector<std::string> fields = split_fields(t);
        if (first_data_line) {
            first_data_line = false;
            int probe = 0;
            if (!parse_integer(fields.back(), probe)) {
                // header row
                for (std::size_t i = 0; i < fields.size(); ++i) {
                    const std::string name = lower(fields[i]);
                    if (name == "z") value_col = static_cast<int>(i);
                    if (name == "t") label_col = static_cast<int>(i);
                }
                if (value_col < 0) value_col = static_cast<int>(fields.size()) - 1;
                if (label_col < 0 && fields.size() > 1 && value_col != 0) label_col = 0;
                continue;
            }
            value_col = static_cast<int>(fields.size()) - 1;
            label_col = fields.size() > 1 ? 0 : -1;
        }
        if (static_cast<int>(fields.size()) <= value_col)
            throw InputError(source + ":" + std::to_string(line_no) + ": missing value column");
        int v = 0;
        if (!parse_integer(fields[static_cast<std::size_t>(value_col)], v))
            throw InputError(source + ":" + std::to_string(line_no) + ": '" +
                             fields[static_cast<std::size_t>(value_col)] + "' is not an integer");
        series.values.push_back(v);
        if (label_col >= 0 && static_cast<int>(fields.size()) > label_col)
            series.labels.push_back(fields[static_cast<std::size_t>(label_col)]);
    }
    if (series.labels.size() != series.values.size()) series.labels.clear();
    return series;
}

IntSeries read_series_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open series file '" + path + "'");
    return read_series(in, path);
}

void write_series(std::ostream& out, const IntSeries& series) {
    const bool labelled = series.labels.size() == series.values.size();
    out << "t,z\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (labelled) out << series.labels[i];
        else out << (i + 1);
        out << ',' << series[i] << '\n';
    }
}

}  // namespace mesinar::cli
