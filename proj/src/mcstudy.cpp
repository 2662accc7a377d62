#include "mesinar/mcstudy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace mesinar {

void MCConfig::validate() const {
    truth.validate();
    if (!(truth.phi > 0.0 && truth.phi < 1.0)) throw DomainError("MCConfig: phi must lie strictly inside (0,1)");
    if (sample_sizes.empty()) throw DomainError("MCConfig: sample_sizes must be nonempty");
    for (std::size_t n : sample_sizes)
        if (n < kMinFitLength)
            throw DomainError("MCConfig: sample_sizes entries must be >= " + std::to_string(kMinFitLength));
    if (replications < 1) throw DomainError("MCConfig: replications must be >= 1");
    if (methods.empty()) throw DomainError("MCConfig: methods must be nonempty");
    if (threads < 0) throw DomainError("MCConfig: threads must be >= 0");
    fit.validate();
}

const MCCell& MCReport::cell(std::size_t n, FitMethod method) const {
    for (const MCCell& c : cells)
        if (c.n == n && c.method == method) return c;
    throw std::out_of_range("MCReport: no cell for n = " + std::to_string(n) + ", method " + to_string(method));
}

std::vector<std::string> reported_parameters(FitMethod method) {
    if (method == FitMethod::cml) return {"phi", "p", "beta", "theta1", "theta2"};
    return {"phi", "theta1", "theta2", "theta1-theta2"};
}

namespace {

std::vector<double> project(FitMethod method, const ModelParams& w) {
    if (method == FitMethod::cml) return {w.phi, w.p, w.beta, w.theta1, w.theta2};
    return {w.phi, w.theta1, w.theta2, w.theta1 - w.theta2};
}

struct ReplicationOutcome {
    std::vector<double> cml;  // empty on failure
    std::vector<double> yw;
};

ReplicationOutcome run_replication(const MCConfig& config, std::size_t n, int r) {
    RandomStream rng = RandomStream::derive(config.seed, n, static_cast<std::uint64_t>(r));
    const IntSeries series = simulate(config.truth, n, config.burn_in, rng);
    FitOptions options = config.fit;
    options.parallel_starts = false;
    options.seed = mix64(config.seed ^ mix64(n) ^ mix64(static_cast<std::uint64_t>(r) + 0x9e37ULL));

    ReplicationOutcome out;
    FitResult cml;
    try {
        cml = fit_cml(series, config.truth.delta, options);
    } catch (const NonConvergenceError&) {
        return out;
    } catch (const DomainError&) {
        return out;
    }
    out.cml = project(FitMethod::cml, cml.estimates);
    try {
        const FitResult yw = fit_yw(series, cml.estimates.p, cml.estimates.theta(), config.truth.delta);
        out.yw = project(FitMethod::yw, yw.estimates);
    } catch (const DomainError&) {
    }
    return out;
}

MCCell aggregate(const MCConfig& config, std::size_t n, FitMethod method,
                 const std::vector<ReplicationOutcome>& outcomes) {
    MCCell cell;
    cell.n = n;
    cell.method = method;
    cell.parameters = reported_parameters(method);
    cell.truth = project(method, config.truth);
    const std::size_t k = cell.parameters.size();
    cell.mean.assign(k, 0.0);
    cell.mse.assign(k, 0.0);
    for (const ReplicationOutcome& o : outcomes) {
        const std::vector<double>& est = method == FitMethod::cml ? o.cml : o.yw;
        cell.estimates.push_back(est);
        if (est.empty()) {
            ++cell.failures;
            continue;
        }
        ++cell.converged;
        for (std::size_t j = 0; j < k; ++j) {
            cell.mean[j] += est[j];
            cell.mse[j] += (est[j] - cell.truth[j]) * (est[j] - cell.truth[j]);
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        if (cell.converged > 0) {
            cell.mean[j] /= cell.converged;
            cell.mse[j] /= cell.converged;
        } else {
            cell.mean[j] = std::nan("");
            cell.mse[j] = std::nan("");
        }
    }
    return cell;
}

}  // namespace

MCReport run_study(const MCConfig& config) {
    config.validate();
    const std::size_t reps = static_cast<std::size_t>(config.replications);
    const std::size_t total = config.sample_sizes.size() * reps;
    std::vector<ReplicationOutcome> outcomes(total);

    unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
    workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(std::min<std::size_t>(total, 256)));

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            const std::size_t n = config.sample_sizes[i / reps];
            outcomes[i] = run_replication(config, n, static_cast<int>(i % reps));
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }

    MCReport report;
    report.config = config;
    for (std::size_t s = 0; s < config.sample_sizes.size(); ++s) {
        const std::vector<ReplicationOutcome> block(outcomes.begin() + static_cast<std::ptrdiff_t>(s * reps),
                                                    outcomes.begin() + static_cast<std::ptrdiff_t>((s + 1) * reps));
        for (FitMethod m : config.methods) report.cells.push_back(aggregate(config, config.sample_sizes[s], m, block));
    }
    return report;
}

Shape shape_statistics(const std::vector<double>& values) {
    std::vector<double> v;
    for (double x : values)
        if (std::isfinite(x)) v.push_back(x);
    if (v.size() < 4) throw DomainError("shape_statistics: need at least 4 finite values");
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : v) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (!(m2 > 0.0)) return {};
    return {m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

}  // namespace mesinar
