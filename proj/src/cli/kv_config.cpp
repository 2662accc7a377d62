#include "mesinar/cli/kv_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace mesinar::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
        throw ConfigError(key, "'" + v + "' is not a finite number");
    return out;
}

long long to_integer(const std::string& key, const std::string& v) {
    long long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key, "'" + v + "' is not an integer");
    return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError(key, "'" + v + "' is not an unsigned integer");
    return out;
}

std::vector<std::string> split_list(const std::string& v) {
    std::string s = v;
    if (!s.empty() && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

const std::string* KeyValueDoc::find(const std::string& key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return &v;
    return nullptr;
}

KeyValueDoc parse_key_values(std::istream& in) {
    KeyValueDoc doc;
    std::set<std::string> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto sep = line.find('=');
        if (sep == std::string::npos) sep = line.find(':');
        if (sep == std::string::npos)
            throw ConfigError(line, "line " + std::to_string(line_no) + " has no '=' or ':' separator");
        const std::string key = trim(line.substr(0, sep));
        const std::string value = trim(line.substr(sep + 1));
        if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + " has an empty key");
        if (!seen.insert(key).second) throw ConfigError(key, "duplicate key");
        doc.entries.emplace_back(key, value);
    }
    return doc;
}

KeyValueDoc read_key_values_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
    return parse_key_values(in);
}

void write_key_values(std::ostream& out, const KeyValueDoc& doc) {
    for (const auto& [k, v] : doc.entries) out << k << " = " << v << '\n';
}

MCConfig parse_mc_config(const KeyValueDoc& doc) {
    MCConfig cfg;
    ModelParams& w = cfg.truth;
    for (const auto& [key, value] : doc.entries) {
        if (key == "phi") w.phi = to_double(key, value);
        else if (key == "p") w.p = to_double(key, value);
        else if (key == "beta") w.beta = to_double(key, value);
        else if (key == "theta1") w.theta1 = to_double(key, value);
        else if (key == "theta2") w.theta2 = to_double(key, value);
        else if (key == "delta") {
            const long long d = to_integer(key, value);
            if (d != 1 && d != -1) throw ConfigError(key, "must be 1 or -1");
            w.delta = d > 0 ? Sign::positive : Sign::negative;
        } else if (key == "sample_sizes") {
            cfg.sample_sizes.clear();
            for (const std::string& item : split_list(value)) {
                const long long n = to_integer(key, item);
                if (n < static_cast<long long>(kMinFitLength))
                    throw ConfigError(key, "entries must be >= " + std::to_string(kMinFitLength));
                cfg.sample_sizes.push_back(static_cast<std::size_t>(n));
            }
            if (cfg.sample_sizes.empty()) throw ConfigError(key, "must list at least one sample size");
        } else if (key == "replications") {
            const long long r = to_integer(key, value);
            if (r < 1 || r > 1000000) throw ConfigError(key, "must be in [1, 1000000]");
            cfg.replications = static_cast<int>(r);
        } else if (key == "seed") {
            cfg.seed = to_unsigned(key, value);
        } else if (key == "methods") {
            cfg.methods.clear();
            for (const std::string& item : split_list(value)) {
                if (item == "cml") cfg.methods.push_back(FitMethod::cml);
                else if (item == "yw") cfg.methods.push_back(FitMethod::yw);
                else throw ConfigError(key, "unknown method '" + item + "' (expected cml, yw)");
            }
            if (cfg.methods.empty()) throw ConfigError(key, "must list at least one method");
        } else if (key == "burn_in") {
            const long long b = to_integer(key, value);
            if (b < 0) throw ConfigError(key, "must be >= 0");
            cfg.burn_in = static_cast<std::size_t>(b);
        } else if (key == "max_iterations") {
            const long long m = to_integer(key, value);
            if (m < 1 || m > 1000000) throw ConfigError(key, "must be in [1, 1000000]");
            cfg.fit.max_iterations = static_cast<int>(m);
        } else if (key == "gradient_tolerance") {
            cfg.fit.gradient_tolerance = to_double(key, value);
            if (!(cfg.fit.gradient_tolerance > 0.0)) throw ConfigError(key, "must be > 0");
        } else if (key == "n_starts") {
            const long long s = to_integer(key, value);
            if (s < 1 || s > 1000) throw ConfigError(key, "must be in [1, 1000]");
            cfg.fit.n_starts = static_cast<int>(s);
        } else if (key == "threads") {
            const long long t = to_integer(key, value);
            if (t < 0 || t > 1024) throw ConfigError(key, "must be in [0, 1024]");
            cfg.threads = static_cast<int>(t);
        } else {
            throw ConfigError(key, "unknown key");
        }
    }
    for (const char* required : {"phi", "p", "beta", "theta1", "theta2", "delta", "sample_sizes", "replications"})
        if (doc.find(required) == nullptr) throw ConfigError(required, "missing required key");

    try {
        w.validate();
    } catch (const DomainError& e) {
        // Messages read "ModelParams: <field> must ...".
        const std::string msg = e.what();
        const std::string prefix = "ModelParams: ";
        std::string field = "delta";
        if (msg.rfind(prefix, 0) == 0) field = msg.substr(prefix.size(), msg.find(' ', prefix.size()) - prefix.size());
        throw ConfigError(field, msg);
    }
    if (!(w.phi > 0.0 && w.phi < 1.0)) throw ConfigError("phi", "must lie strictly inside (0,1) for a study");
    return cfg;
}

}  // namespace mesinar::cli
