// Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//
// Usage: mesinar_acceptance [--config-dir DIR] [--data FILE]
// The data file may also be given through MESINAR_BARBADOS_CSV.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "mesinar/cli/commands.hpp"
#include "mesinar/cli/kv_config.hpp"
#include "mesinar/dist.hpp"
#include "mesinar/estimate.hpp"
#include "mesinar/mcstudy.hpp"
#include "mesinar/model.hpp"
#include "mesinar/specfun.hpp"

#ifndef MESINAR_CONFIG_DIR
#define MESINAR_CONFIG_DIR "configs"
#endif

using namespace mesinar;
namespace fs = std::filesystem;

namespace {

// Checks that fail for reasons outside the implementation; they are printed as
// FAIL but do not change the exit status.
const std::map<std::string, std::string> kKnownFailures = {
    {"table2.ii.beta.mean",
     "published n=4000 beta mean 1.4436 has squared bias 0.309 against truth 2, above its own MSE 0.0836"},
};

struct Criterion {
    int id;
    std::string title;
    bool skipped = false;
    std::string skip_reason;
    int checks = 0;
    std::vector<std::pair<std::string, std::string>> failures;  // (check id, detail)

    void check(bool ok, const std::string& key, const std::string& detail) {
        ++checks;
        if (!ok) failures.emplace_back(key, detail);
    }
    [[nodiscard]] bool passed() const { return failures.empty(); }
};

int unexpected = 0;

void report(const Criterion& c, double seconds) {
    const char* status = c.skipped ? "SKIP" : c.passed() ? "PASS" : "FAIL";
    std::string tail = c.skipped ? c.skip_reason : fmt::format("{} checks, {} failed", c.checks, c.failures.size());
    std::cout << fmt::format("criterion {}: {} {} ({}; {:.1f}s)\n", c.id, status, c.title, tail, seconds);
    for (const auto& [key, detail] : c.failures) {
        const auto known = kKnownFailures.find(key);
        if (known == kKnownFailures.end()) {
            ++unexpected;
            std::cout << fmt::format("    {}: {}\n", key, detail);
        } else {
            std::cout << fmt::format("    {}: {} [known: {}]\n", key, detail, known->second);
        }
    }
    std::cout.flush();
}

template <class F>
void run_criterion(int id, const std::string& title, F body) {
    Criterion c{id, title};
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.check(false, "exception", e.what());
    }
    report(c, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

double rel_err(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

const double kRoot5 = std::sqrt(5.0);

std::vector<ModelParams> groups() {
    return {{0.8, 0.5, kRoot5, 10, 10, Sign::positive},
            {0.2, 0.4, 2.0, 9, 7, Sign::positive},
            {0.2, 0.4, kRoot5, 5, 5, Sign::negative},
            {0.2, 0.8, kRoot5, 10, 10, Sign::negative}};
}

// Sum of f(x) pmf(x) over a window wide enough that the omitted mass is negligible.
template <class Pmf, class F>
double wide_sum(Pmf pmf, F f, int lo, int hi) {
    double s = 0.0;
    for (int x = lo; x <= hi; ++x) s += f(x) * pmf(x);
    return s;
}

// ---------------------------------------------------------------- criterion 1

void info_criteria_rows(Criterion& c) {
    struct Row {
        const char* name;
        double ll;
        int k;
        double aic, bic, hqic;
    };
    for (const Row& r : {Row{"pdinar", -679.9163, 3, 1365.8327, 1376.8629, 1365.0418},
                         Row{"mesinar", -516.1203, 5, 1042.2406, 1060.6243, 1040.9225},
                         Row{"third", -610.6668, 4, 1229.3335, 1244.0405, 1228.2790}}) {
        const InfoCriteria ic = info_criteria(r.ll, r.k, 292);
        c.check(std::fabs(ic.aic - r.aic) <= 1e-3, fmt::format("{}.aic", r.name), fmt::format("{:.4f}", ic.aic));
        c.check(std::fabs(ic.bic - r.bic) <= 1e-3, fmt::format("{}.bic", r.name), fmt::format("{:.4f}", ic.bic));
        c.check(std::fabs(ic.hqic - r.hqic) <= 1e-3, fmt::format("{}.hqic", r.name), fmt::format("{:.4f}", ic.hqic));
    }
}

// ---------------------------------------------------------------- criterion 2

void distribution_suite(Criterion& c) {
    const auto one = [](int) { return 1.0; };
    const auto id = [](int x) { return static_cast<double>(x); };
    for (double t1 : {0.5, 3.0, 10.0, 25.0})
        for (double t2 : {0.5, 3.0, 10.0, 25.0}) {
            const SkellamParams sp{t1, t2};
            const auto pmf = [&](int z) { return skellam_pmf(z, sp); };
            const std::string key = fmt::format("skellam({},{})", t1, t2);
            const double total = wide_sum(pmf, one, -200, 200);
            const double m1 = wide_sum(pmf, id, -200, 200);
            const double m2 = wide_sum(pmf, [](int z) { return static_cast<double>(z) * z; }, -200, 200);
            c.check(std::fabs(total - 1.0) <= 1e-10, key + ".total", fmt::format("{:.3e}", total - 1.0));
            c.check(std::fabs(m1 - (t1 - t2)) <= 1e-9, key + ".mean", fmt::format("{:.3e}", m1 - (t1 - t2)));
            const double want2 = t1 + t2 + (t1 - t2) * (t1 - t2);
            c.check(std::fabs(m2 - want2) <= 1e-9 * std::max(1.0, want2), key + ".second",
                    fmt::format("{:.3e}", m2 - want2));
        }

    for (int z = -10; z <= 10; ++z)
        for (double p : {0.2, 0.5, 0.8})
            for (double theta : {0.5, 5.0, 25.0}) {
                const EBParams ep{z, p, theta};
                const auto pmf = [&](int x) { return eb_pmf(x, ep); };
                const std::string key = fmt::format("eb({},{},{})", z, p, theta);
                const double total = wide_sum(pmf, one, -150, 150);
                const double mean = wide_sum(pmf, id, -150, 150);
                const double var =
                    wide_sum(pmf, [&](int x) { return (x - p * z) * (x - p * z); }, -150, 150);
                const double want = p * (1 - p) * z + 2 * p * (1 - p) * theta * hyp_ratio(z, theta);
                c.check(std::fabs(total - 1.0) <= 1e-10, key + ".total", fmt::format("{:.3e}", total - 1.0));
                c.check(std::fabs(mean - p * z) <= 1e-7, key + ".mean", fmt::format("{:.3e}", mean - p * z));
                c.check(std::fabs(var - want) <= 1e-7, key + ".variance", fmt::format("{:.3e}", var - want));
            }

    for (int y = 0; y <= 10; ++y)
        for (double theta : {0.5, 5.0, 25.0}) {
            const BesselParams bp{y, theta};
            const double total = wide_sum([&](int w) { return bessel_pmf(w, bp); }, one, 0, 300);
            c.check(std::fabs(total - 1.0) <= 1e-10, fmt::format("bessel({},{}).total", y, theta),
                    fmt::format("{:.3e}", total - 1.0));
        }

    for (double m : {0.5, 1.0, 5.0, 20.0})
        for (int y = -10; y <= 10; ++y) {
            const double lhs = log_reg_hyp_0f1(y + 1, m).value();
            const double rhs = std::exp(-0.5 * y * std::log(m) + log_bessel_i(y, 2.0 * std::sqrt(m)).log_magnitude);
            c.check(rel_err(lhs, rhs) <= 1e-10, fmt::format("hyp0f1_bessel({},{})", y, m),
                    fmt::format("relative {:.3e}", rel_err(lhs, rhs)));
        }
}

// ---------------------------------------------------------------- criterion 3

template <class Draw, class Pmf>
double sampled_tv(Draw draw, Pmf pmf, int lo, int hi, int n) {
    std::map<int, long> counts;
    for (int i = 0; i < n; ++i) ++counts[draw()];
    double tv = 0.0, covered = 0.0;
    for (int x = lo; x <= hi; ++x) {
        const auto it = counts.find(x);
        const double emp = it == counts.end() ? 0.0 : static_cast<double>(it->second) / n;
        tv += std::fabs(emp - pmf(x));
        covered += emp;
    }
    return 0.5 * (tv + (1.0 - covered));
}

void sampler_fidelity(Criterion& c) {
    constexpr int kDraws = 1000000;
    RandomStream rng = RandomStream::derive(20240, 3);
    for (const SkellamParams sp : {SkellamParams{9, 7}, SkellamParams{0.5, 2.0}}) {
        const double tv = sampled_tv([&] { return skellam_sample(sp, rng); },
                                     [&](int z) { return skellam_pmf(z, sp); }, -80, 80, kDraws);
        c.check(tv < 0.005, fmt::format("skellam({},{})", sp.theta1, sp.theta2), fmt::format("TV {:.5f}", tv));
    }
    for (const BesselParams bp : {BesselParams{5, 9.0}, BesselParams{0, 1.0}}) {
        const double tv = sampled_tv([&] { return bessel_sample(bp, rng); },
                                     [&](int w) { return bessel_pmf(w, bp); }, 0, 120, kDraws);
        c.check(tv < 0.005, fmt::format("bessel({},{})", bp.y, bp.theta), fmt::format("TV {:.5f}", tv));
    }
    struct Thin {
        int z;
        double alpha, theta;
    };
    for (const Thin t : {Thin{4, 0.3, 5.0}, Thin{-6, 0.5, 2.0}}) {
        const double tv = sampled_tv([&] { return eb_thinning_sample(t.z, t.alpha, t.theta, rng); },
                                     [&](int x) { return eb_pmf(x, {t.z, t.alpha, t.theta}); }, -80, 80, kDraws);
        c.check(tv < 0.005, fmt::format("thinning({},{},{})", t.z, t.alpha, t.theta), fmt::format("TV {:.5f}", tv));
    }
}

// ---------------------------------------------------------------- criterion 4

double acf(const std::vector<int>& z, int k) {
    double mean = 0.0;
    for (int v : z) mean += v;
    mean /= static_cast<double>(z.size());
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < z.size(); ++t) {
        const double d = z[t] - mean;
        den += d * d;
        if (t + static_cast<std::size_t>(k) < z.size()) num += d * (z[t + static_cast<std::size_t>(k)] - mean);
    }
    return num / den;
}

void kernel_consistency(Criterion& c) {
    const std::vector<ModelParams> gs = groups();
    for (std::size_t g = 0; g < gs.size(); ++g) {
        const ModelParams& w = gs[g];
        double worst_row = 0.0, worst_form = 0.0, worst_mean = 0.0, worst_var = 0.0;
        for (int a = -25; a <= 25; ++a) {
            worst_row = std::max(worst_row, std::fabs(transition_row(a, w).total() - 1.0));
            double m = 0.0, s2 = 0.0;
            for (int b = a - 150; b <= a + 150; ++b) {
                const double f = transition_pmf(a, b, w);
                const double fb = transition_pmf_bessel(a, b, w);
                worst_form = std::max(worst_form, std::fabs(f - fb) / std::max(f, 1e-300));
                m += b * f;
                s2 += static_cast<double>(b) * b * f;
            }
            worst_mean = std::max(worst_mean, std::fabs(cond_mean(a, w) - m));
            worst_var = std::max(worst_var, std::fabs(cond_var(a, w) - (s2 - m * m)));
        }
        const std::string key = fmt::format("group{}", g + 1);
        c.check(worst_row <= 1e-9, key + ".row_total", fmt::format("{:.3e}", worst_row));
        c.check(worst_form <= 1e-12, key + ".bessel_form", fmt::format("relative {:.3e}", worst_form));
        c.check(worst_mean <= 1e-7, key + ".cond_mean", fmt::format("{:.3e}", worst_mean));
        c.check(worst_var <= 1e-7, key + ".cond_var", fmt::format("{:.3e}", worst_var));

        // lag-k autocorrelation over independent replicate paths
        constexpr int kPaths = 50;
        constexpr std::size_t kLength = 20000;
        std::vector<std::vector<double>> r(3);
        for (int i = 0; i < kPaths; ++i) {
            RandomStream rng = RandomStream::derive(404, g, static_cast<std::uint64_t>(i));
            const IntSeries s = simulate(w, kLength, 500, rng);
            for (int k = 1; k <= 3; ++k) r[static_cast<std::size_t>(k - 1)].push_back(acf(s.values, k));
        }
        for (int k = 1; k <= 3; ++k) {
            const std::vector<double>& v = r[static_cast<std::size_t>(k - 1)];
            double mean = 0.0, ss = 0.0;
            for (double x : v) mean += x;
            mean /= kPaths;
            for (double x : v) ss += (x - mean) * (x - mean);
            const double se = std::sqrt(ss / (kPaths - 1.0) / kPaths);
            const double want = std::pow(w.phi * w.p * w.sign(), k);
            c.check(std::fabs(mean - want) <= 3 * se, fmt::format("{}.acf{}", key, k),
                    fmt::format("mean {:.5f}, want {:.5f}, se {:.5f}", mean, want, se));
        }
    }
}

// ---------------------------------------------------------------- criterion 5

double& component(ModelParams& w, int i) {
    switch (i) {
        case 0: return w.phi;
        case 1: return w.p;
        case 2: return w.beta;
        case 3: return w.theta1;
        default: return w.theta2;
    }
}

void score_correctness(Criterion& c) {
    const char* names[5] = {"phi", "p", "beta", "theta1", "theta2"};
    RandomStream pick(55);
    for (int trial = 0; trial < 20; ++trial) {
        ModelParams w;
        w.phi = 0.1 + 0.8 * pick.uniform();
        w.p = 0.1 + 0.8 * pick.uniform();
        w.beta = 0.5 + 3.0 * pick.uniform();
        w.theta1 = 1.0 + 10.0 * pick.uniform();
        w.theta2 = 1.0 + 10.0 * pick.uniform();
        w.delta = trial % 2 == 0 ? Sign::positive : Sign::negative;
        ModelParams truth = groups()[1];
        truth.delta = w.delta;
        RandomStream rng = RandomStream::derive(505, static_cast<std::uint64_t>(trial));
        const IntSeries s = simulate(truth, 300, 500, rng);
        const Score g = score(s, w);
        for (int i = 0; i < 5; ++i) {
            ModelParams up = w, dn = w;
            const double h = 1e-6 * std::max(1.0, std::fabs(component(up, i)));
            component(up, i) += h;
            component(dn, i) -= h;
            const double fd = -(neg_loglik(s, up) - neg_loglik(s, dn)) / (2 * h);
            const double err = std::fabs(g[static_cast<std::size_t>(i)] - fd) / std::max(1.0, std::fabs(fd));
            c.check(err <= 1e-5, fmt::format("fd.trial{}.{}", trial, names[i]), fmt::format("relative {:.3e}", err));
        }
    }

    constexpr int kSeries = 200;
    const ModelParams truth = groups()[0];
    std::vector<std::array<double, 5>> scores;
    for (int i = 0; i < kSeries; ++i) {
        RandomStream rng = RandomStream::derive(506, static_cast<std::uint64_t>(i));
        scores.push_back(score(simulate(truth, 500, 500, rng), truth));
    }
    for (std::size_t j = 0; j < 5; ++j) {
        double mean = 0.0, ss = 0.0;
        for (const auto& s : scores) mean += s[j];
        mean /= kSeries;
        for (const auto& s : scores) ss += (s[j] - mean) * (s[j] - mean);
        const double se = std::sqrt(ss / (kSeries - 1.0) / kSeries);
        c.check(std::fabs(mean) <= 3 * se, fmt::format("mean_score.{}", names[j]),
                fmt::format("mean {:.4f}, se {:.4f}", mean, se));
    }
}

// ---------------------------------------------------------------- criterion 6

struct PublishedCell {
    double mean[5];
    double mse[5];
};

struct PublishedGroup {
    const char* label;
    const char* config;
    std::map<std::size_t, PublishedCell> cml;
};

std::vector<PublishedGroup> published() {
    return {
        {"i",
         "table2_group1.conf",
         {{200, {{0.8004, 0.5009, 2.2356, 10.5380, 10.3026}, {0.0019, 0.0024, 0.1454, 9.7403, 9.7399}}},
          {400, {{0.7952, 0.4998, 2.2161, 10.1775, 10.1759}, {0.0014, 0.0010, 0.0662, 4.0363, 4.2060}}},
          {800, {{0.7962, 0.5006, 2.2319, 10.0079, 10.0324}, {0.0004, 0.0006, 0.0306, 2.2122, 1.9988}}},
          {4000, {{0.8002, 0.4996, 2.2441, 10.0126, 10.0012}, {0.0001, 0.0001, 0.0079, 0.3718, 0.3577}}}}},
        {"ii",
         "table2_group2.conf",
         {{200, {{0.2304, 0.4192, 1.9630, 9.1064, 7.0075}, {0.0063, 0.0128, 3.7185, 0.9755, 0.9086}}},
          {400, {{0.2125, 0.3956, 1.7688, 9.0346, 7.0050}, {0.0026, 0.0044, 2.5326, 0.5209, 0.4666}}},
          {800, {{0.2043, 0.4060, 1.4135, 9.0057, 6.9987}, {0.0011, 0.0027, 0.3711, 0.2784, 0.2365}}},
          {4000, {{0.1995, 0.3994, 1.4436, 9.0136, 7.0057}, {0.0002, 0.0004, 0.0836, 0.0700, 0.0603}}}}},
        {"iv",
         "table2_group3.conf",
         {{200, {{0.2354, 0.4093, 3.6901, 5.2991, 5.2297}, {0.0196, 0.0326, 26.8456, 2.0729, 1.9893}}},
          {400, {{0.2127, 0.4028, 2.7968, 5.0779, 5.0616}, {0.0091, 0.0120, 7.9427, 0.3761, 0.3408}}},
          {800, {{0.2227, 0.3805, 2.8852, 5.1111, 5.0912}, {0.0067, 0.0058, 4.9466, 0.2222, 0.2192}}},
          {4000, {{0.2026, 0.4002, 2.3019, 4.9971, 5.0057}, {0.0005, 0.0009, 0.2648, 0.0254, 0.0258}}}}},
        {"v",
         "table2_group4.conf",
         {{200, {{0.2150, 0.7982, 2.7313, 9.9927, 10.0072}, {0.0047, 0.0062, 7.8927, 1.5760, 1.4650}}},
          {400, {{0.2067, 0.7956, 2.7468, 9.9741, 9.9550}, {0.0012, 0.0027, 3.0378, 0.5707, 0.6029}}},
          {800, {{0.2028, 0.8006, 2.3352, 9.9443, 9.9523}, {0.0008, 0.0011, 0.7012, 0.3170, 0.3108}}},
          {4000, {{0.2018, 0.8007, 2.3115, 10.0136, 10.0214}, {0.0001, 0.0002, 0.1202, 0.0654, 0.0629}}}}},
    };
}

MCConfig load_config(const fs::path& path) { return cli::parse_mc_config(cli::read_key_values_file(path.string())); }

// Published values carry four decimals, so a printed MSE m stands for [m - 5e-5, m + 5e-5].
constexpr double kHalfUlp = 5e-5;

void table2_reproduction(Criterion& c, const fs::path& config_dir, MCReport& group1) {
    const char* names[5] = {"phi", "p", "beta", "theta1", "theta2"};
    for (const PublishedGroup& pg : published()) {
        MCConfig cfg = load_config(config_dir / pg.config);
        cfg.methods = {FitMethod::cml};
        const MCReport rep = run_study(cfg);
        if (std::string(pg.label) == "i") group1 = rep;
        const std::string g = fmt::format("table2.{}", pg.label);

        const MCCell& big = rep.cell(4000, FitMethod::cml);
        c.check(big.converged >= 90, g + ".converged", fmt::format("{} of {}", big.converged, cfg.replications));
        for (int j = 0; j < 5; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            const PublishedCell& paper = pg.cml.at(4000);
            const double mse_hi = paper.mse[j] + kHalfUlp;
            const double mse_lo = std::max(paper.mse[j] - kHalfUlp, 0.0);
            const double tol = 2.0 * 3.0 * std::sqrt(mse_hi / 100.0);
            c.check(std::fabs(big.mean[jj] - paper.mean[j]) <= tol, fmt::format("{}.{}.mean", g, names[j]),
                    fmt::format("ours {:.4f}, published {:.4f}, tolerance {:.4f}", big.mean[jj], paper.mean[j], tol));
            c.check(big.mse[jj] >= mse_lo / 3.0 && big.mse[jj] <= mse_hi * 3.0, fmt::format("{}.{}.mse", g, names[j]),
                    fmt::format("ours {:.5f}, published {:.4f}", big.mse[jj], paper.mse[j]));

            const MCCell& small = rep.cell(200, FitMethod::cml);
            c.check(big.mse[jj] < small.mse[jj], fmt::format("{}.{}.mse_decrease", g, names[j]),
                    fmt::format("n=200 {:.5f}, n=4000 {:.5f}", small.mse[jj], big.mse[jj]));
            int inversions = 0;
            for (std::size_t k = 1; k < cfg.sample_sizes.size(); ++k)
                if (rep.cell(cfg.sample_sizes[k], FitMethod::cml).mse[jj] >
                    rep.cell(cfg.sample_sizes[k - 1], FitMethod::cml).mse[jj])
                    ++inversions;
            c.check(inversions <= 1, fmt::format("{}.{}.mse_monotone", g, names[j]),
                    fmt::format("{} inversions", inversions));
        }
    }

    // smoke variant
    MCConfig smoke = load_config(config_dir / "table2_group2.conf");
    smoke.sample_sizes = {200, 800};
    smoke.replications = 30;
    const auto t0 = std::chrono::steady_clock::now();
    run_study(smoke);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.check(secs < 300.0, "table2.smoke_runtime", fmt::format("{:.1f}s", secs));
}

// ---------------------------------------------------------------- criterion 7

void normality_shadow(Criterion& c, const MCReport& group1) {
    const MCCell& cell = group1.cell(4000, FitMethod::cml);
    for (std::size_t j = 0; j < cell.parameters.size(); ++j) {
        std::vector<double> v;
        for (const auto& row : cell.estimates)
            if (!row.empty()) v.push_back(row[j]);
        const Shape s = shape_statistics(v);
        c.check(std::fabs(s.skewness) < 0.7, cell.parameters[j] + ".skewness", fmt::format("{:.3f}", s.skewness));
        c.check(std::fabs(s.excess_kurtosis) < 1.5, cell.parameters[j] + ".kurtosis",
                fmt::format("{:.3f}", s.excess_kurtosis));
    }
}

// ---------------------------------------------------------------- criterion 8

void ergodicity(Criterion& c) {
    const std::vector<ModelParams> gs = groups();
    for (std::size_t g = 0; g < gs.size(); ++g) {
        const ModelParams& w = gs[g];
        const std::string key = fmt::format("group{}", g + 1);
        int zero_diag = 0;
        for (int x = -20; x <= 20; ++x)
            if (!(transition_pmf(x, x, w) > 0.0)) ++zero_diag;
        c.check(zero_diag == 0, key + ".diagonal", fmt::format("{} zero entries", zero_diag));

        const StationaryOptions opts;
        const ProbVector pi = stationary_dist(w, opts);
        ProbVector next = pi;
        std::fill(next.masses.begin(), next.masses.end(), 0.0);
        for (int a = pi.lo; a <= pi.hi(); ++a)
            for (int b = pi.lo; b <= pi.hi(); ++b)
                next.masses[static_cast<std::size_t>(b - pi.lo)] += pi.at(a) * transition_pmf(a, b, w);
        const double tv = total_variation(pi, next);
        c.check(tv < opts.tol, key + ".fixed_point", fmt::format("TV {:.3e}", tv));
        c.check(std::fabs(pi.mean() - stationary_mean(w)) <= 10 * opts.tol, key + ".mean",
                fmt::format("{:.3e}", pi.mean() - stationary_mean(w)));
    }
}

// ---------------------------------------------------------------- criterion 9

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun cli_run(std::vector<std::string> args) {
    args.insert(args.begin(), "mesinar");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

double field(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    const cli::KeyValueDoc doc = cli::parse_key_values(in);
    const std::string* v = doc.find(key);
    if (v == nullptr) throw std::runtime_error("report lacks " + key);
    return std::stod(*v);
}

std::string text_field(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    const cli::KeyValueDoc doc = cli::parse_key_values(in);
    const std::string* v = doc.find(key);
    if (v == nullptr) throw std::runtime_error("report lacks " + key);
    return *v;
}

void real_data(Criterion& c, const std::string& data) {
    if (data.empty() || !fs::exists(data)) {
        c.skipped = true;
        c.skip_reason = data.empty() ? "no data file given (MESINAR_BARBADOS_CSV)" : "data file not found: " + data;
        return;
    }
    const fs::path diffed = fs::temp_directory_path() / fmt::format("mesinar_acceptance_{}.csv", std::chrono::steady_clock::now().time_since_epoch().count());
    CliRun r = cli_run({"diff", data, "--output", diffed.string()});
    c.check(r.code == cli::kExitOk, "diff.exit", r.err);
    if (r.code != cli::kExitOk) return;

    r = cli_run({"describe", diffed.string(), "--format", "machine"});
    c.check(r.code == cli::kExitOk, "describe.exit", r.err);
    if (r.code == cli::kExitOk) {
        struct Want {
            const char* key;
            double value;
        };
        for (const Want w : {Want{"n", 291}, Want{"mean", -0.0068}, Want{"variance", 8.4879}, Want{"minimum", -14},
                             Want{"median", 0}, Want{"maximum", 14}, Want{"range", 28}}) {
            const double got = field(r.out, w.key);
            const double tol = std::string(w.key) == "mean" || std::string(w.key) == "variance" ? 1e-3 : 0.0;
            c.check(std::fabs(got - w.value) <= tol + 5e-5, fmt::format("describe.{}", w.key),
                    fmt::format("ours {}, published {}", got, w.value));
        }
    }

    r = cli_run({"fit", diffed.string(), "--format", "machine"});
    c.check(r.code == cli::kExitOk, "fit.exit", r.err);
    if (r.code == cli::kExitOk) {
        c.check(field(r.out, "delta") == -1.0, "fit.delta", text_field(r.out, "delta"));
        const double ll = field(r.out, "loglik");
        c.check(std::fabs(ll - (-516.1203)) <= 0.01, "fit.loglik", fmt::format("{:.4f}", ll));
    }

    r = cli_run({"compare", diffed.string(), "--models", "mesinar,pdinar", "--format", "machine"});
    c.check(r.code == cli::kExitOk, "compare.exit", r.err);
    if (r.code == cli::kExitOk) {
        c.check(text_field(r.out, "rank1.model") == "mesinar", "compare.rank", text_field(r.out, "rank1.model"));
        const bool mesinar_first = text_field(r.out, "rank1.model") == "mesinar";
        const std::string m = mesinar_first ? "rank1." : "rank2.";
        const std::string p = mesinar_first ? "rank2." : "rank1.";
        for (const char* crit : {"aic", "bic", "hqic"})
            c.check(field(r.out, m + crit) < field(r.out, p + crit), fmt::format("compare.{}", crit),
                    fmt::format("mesinar {:.4f}, pdinar {:.4f}", field(r.out, m + crit), field(r.out, p + crit)));
    }
    fs::remove(diffed);
}

}  // namespace

int main(int argc, char** argv) {
    fs::path config_dir = MESINAR_CONFIG_DIR;
    std::string data;
    if (const char* env = std::getenv("MESINAR_BARBADOS_CSV")) data = env;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--config-dir") {
            config_dir = argv[i + 1];
        } else if (flag == "--data") {
            data = argv[i + 1];
        } else {
            std::cerr << "usage: mesinar_acceptance [--config-dir DIR] [--data FILE]\n";
            return 2;
        }
    }

    MCReport group1;
    run_criterion(1, "information criteria", info_criteria_rows);
    run_criterion(2, "distribution identities", distribution_suite);
    run_criterion(3, "sampler fidelity", sampler_fidelity);
    run_criterion(4, "kernel and moment consistency", kernel_consistency);
    run_criterion(5, "score correctness", score_correctness);
    run_criterion(6, "Monte Carlo table reproduction",
                  [&](Criterion& c) { table2_reproduction(c, config_dir, group1); });
    run_criterion(7, "asymptotic normality shadow", [&](Criterion& c) {
        if (group1.cells.empty()) throw std::runtime_error("group (i) study unavailable");
        normality_shadow(c, group1);
    });
    run_criterion(8, "ergodicity", ergodicity);
    run_criterion(9, "real data", [&](Criterion& c) { real_data(c, data); });

    if (unexpected > 0) {
        std::cout << fmt::format("{} unexpected failure(s)\n", unexpected);
        return 1;
    }
    std::cout << "no unexpected failures\n";
    return 0;
}
