#include "mesinar/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

#include "mesinar/optim.hpp"

namespace mesinar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMesinarParams = 5;

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double x) { return std::log(x / (1.0 - x)); }

}  // namespace

const char* to_string(FitMethod m) { return m == FitMethod::cml ? "cml" : "yw"; }

InfoCriteria info_criteria(double loglik, int k, std::size_t n) {
    if (n < 2) throw DomainError("info_criteria: n must be >= 2");
    if (k < 1) throw DomainError("info_criteria: k must be >= 1");
    const double ln_n = std::log(static_cast<double>(n));
    return {-2.0 * loglik + 2.0 * k, -2.0 * loglik + k * ln_n, -2.0 * loglik + k * std::log(ln_n)};
}

SampleMoments sample_moments(const IntSeries& series) {
    const std::size_t n = series.size();
    if (n < 2) throw DomainError("sample_moments: need at least two observations");
    double mean = 0.0;
    for (int z : series.values) mean += z;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    double cross = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double dev = series[t] - mean;
        ss += dev * dev;
        if (t + 1 < n) cross += dev * (series[t + 1] - mean);
    }
    if (ss == 0.0) throw DomainError("sample_moments: constant series, lag-one autocorrelation undefined");
    return {mean, ss / static_cast<double>(n), cross / ss, n};
}

Sign detect_delta(const IntSeries& series) {
    return sample_moments(series).acf1 >= 0.0 ? Sign::positive : Sign::negative;
}

double neg_loglik(const IntSeries& series, const ModelParams& params) {
    if (series.size() < 2) throw DomainError("neg_loglik: need at least two observations");
    return -mesinar_loglik(count_transitions(series), params);
}

Score score(const IntSeries& series, const ModelParams& params) {
    if (series.size() < 2) throw DomainError("score: need at least two observations");
    Score s{};
    mesinar_loglik_score(count_transitions(series), params, s);
    return s;
}

// Observed information

namespace {

double& component(ModelParams& w, int i) {
    switch (i) {
        case 0: return w.phi;
        case 1: return w.p;
        case 2: return w.beta;
        case 3: return w.theta1;
        default: return w.theta2;
    }
}

}  // namespace

ObservedInformation observed_information(const TransitionCounts& counts, const ModelParams& params) {
    params.validate();
    if (!(params.phi > 0.0 && params.phi < 1.0))
        throw DomainError("observed_information: phi must lie strictly inside (0,1)");
    if (counts.transitions == 0) throw DomainError("observed_information: no transitions");
    const double n = static_cast<double>(counts.transitions);

    Matrix5 raw;
    for (int v = 0; v < kMesinarParams; ++v) {
        ModelParams up = params;
        ModelParams down = params;
        const double x = component(up, v);
        double h = 1e-5 * std::max(std::abs(x), 1e-2);
        if (v <= 1) h = std::min(h, 0.5 * std::min(x, 1.0 - x));
        else h = std::min(h, 0.5 * x);
        component(up, v) = x + h;
        component(down, v) = x - h;
        Score s_up{};
        Score s_down{};
        mesinar_loglik_score(counts, up, s_up);
        mesinar_loglik_score(counts, down, s_down);
        for (int u = 0; u < kMesinarParams; ++u) raw(u, v) = -(s_up[u] - s_down[u]) / (2.0 * h) / n;
    }
    ObservedInformation out;
    out.asymmetry = (raw - raw.transpose()).cwiseAbs().maxCoeff();
    out.matrix = 0.5 * (raw + raw.transpose());
    out.transitions = counts.transitions;
    return out;
}

ObservedInformation observed_information(const IntSeries& series, const ModelParams& params) {
    return observed_information(count_transitions(series), params);
}

std::array<double, 5> standard_errors(const ObservedInformation& info) {
    const Eigen::SelfAdjointEigenSolver<Matrix5> eig(info.matrix);
    if (eig.info() != Eigen::Success) throw SingularInformationError("information matrix: eigen-decomposition failed");
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 1e-12 * std::max(hi, 1e-300)))
        throw SingularInformationError("information matrix is not positive definite (min eigenvalue " +
                                       std::to_string(lo) + ")");
    const Matrix5 inv = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                        eig.eigenvectors().transpose();
    std::array<double, 5> se{};
    for (int i = 0; i < kMesinarParams; ++i)
        se[static_cast<std::size_t>(i)] = std::sqrt(inv(i, i) / static_cast<double>(info.transitions));
    return se;
}

void FitOptions::validate() const {
    if (max_iterations < 1) throw DomainError("fit options: max_iterations must be >= 1");
    if (!(gradient_tolerance > 0.0)) throw DomainError("fit options: gradient_tolerance must be > 0");
    if (n_starts < 1) throw DomainError("fit options: n_starts must be >= 1");
}

// CML

namespace {

ModelParams from_unconstrained(const Eigen::VectorXd& u, Sign delta) {
    ModelParams w;
    w.phi = sigmoid(u[0]);
    w.p = sigmoid(u[1]);
    w.beta = std::exp(u[2]);
    w.theta1 = std::exp(u[3]);
    w.theta2 = std::exp(u[4]);
    w.delta = delta;
    return w;
}

Eigen::VectorXd to_unconstrained(const ModelParams& w) {
    Eigen::VectorXd u(kMesinarParams);
    u << logit(w.phi), logit(w.p), std::log(w.beta), std::log(w.theta1), std::log(w.theta2);
    return u;
}

bool inside_search_box(const Eigen::VectorXd& u) {
    return std::abs(u[0]) < 30.0 && std::abs(u[1]) < 30.0 && u[2] > -20.0 && u[2] < 12.0 && u[3] > -20.0 &&
           u[3] < 12.0 && u[4] > -20.0 && u[4] < 12.0;
}

struct StartOutcome {
    double initial = kInf;
    optim::Result result;
};

StartOutcome run_start(const TransitionCounts& counts, Sign delta, const ModelParams& init,
                       const FitOptions& options) {
    const double n = static_cast<double>(counts.transitions);
    const optim::Objective objective = [&](const Eigen::VectorXd& u, Eigen::VectorXd* grad) -> double {
        if (!u.allFinite() || !inside_search_box(u)) return kInf;
        const ModelParams w = from_unconstrained(u, delta);
        if (!(w.phi > 0.0 && w.phi < 1.0 && w.p > 0.0 && w.p < 1.0)) return kInf;
        try {
            if (grad == nullptr) return -mesinar_loglik(counts, w) / n;
            Score s{};
            const double ll = mesinar_loglik_score(counts, w, s);
            const double jac[kMesinarParams] = {w.phi * (1.0 - w.phi), w.p * (1.0 - w.p), w.beta, w.theta1,
                                                w.theta2};
            for (int i = 0; i < kMesinarParams; ++i) (*grad)[i] = -s[static_cast<std::size_t>(i)] * jac[i] / n;
            return -ll / n;
        } catch (const DomainError&) {
            return kInf;
        }
    };
    optim::Options opt;
    opt.max_iterations = options.max_iterations;
    opt.gradient_tolerance = options.gradient_tolerance;

    StartOutcome out;
    const Eigen::VectorXd u0 = to_unconstrained(init);
    out.initial = objective(u0, nullptr) * n;
    out.result = optim::minimize_bfgs(objective, u0, opt);
    return out;
}

ModelParams clamp_start(ModelParams w) {
    w.phi = std::clamp(w.phi, 0.05, 0.95);
    w.p = std::clamp(w.p, 0.05, 0.95);
    w.beta = std::clamp(w.beta, 0.1, 50.0);
    w.theta1 = std::clamp(w.theta1, 0.05, 1e3);
    w.theta2 = std::clamp(w.theta2, 0.05, 1e3);
    return w;
}

ModelParams center_start(const IntSeries& series, Sign delta) {
    ModelParams w;
    w.delta = delta;
    w.p = 0.5;
    w.beta = 1.5;
    SampleMoments m;
    try {
        m = sample_moments(series);
    } catch (const DomainError&) {
        m = {series.empty() ? 0.0 : static_cast<double>(series[0]), 0.0, 0.0, series.size()};
    }
    try {
        const FitResult yw =
            fit_yw_from_moments(m, sample_mean_ratio(series, w.theta()), w.p, w.theta(), delta);
        w.phi = yw.estimates.phi;
        w.theta1 = yw.estimates.theta1;
        w.theta2 = yw.estimates.theta2;
    } catch (const DomainError&) {
        const double s = std::max(m.variance, std::abs(m.mean) + 0.2);
        w.phi = 0.5;
        w.theta1 = 0.5 * (s + m.mean);
        w.theta2 = 0.5 * (s - m.mean);
    }
    return clamp_start(w);
}

std::vector<ModelParams> multistart_points(const IntSeries& series, Sign delta, const FitOptions& options) {
    static constexpr double kPGrid[] = {0.25, 0.75, 0.5, 0.15, 0.85, 0.35, 0.65};
    const ModelParams center = center_start(series, delta);
    std::vector<ModelParams> starts{center};
    for (int k = 1; k < options.n_starts; ++k) {
        RandomStream rng = RandomStream::derive(options.seed, 0x5354415254ULL, static_cast<std::uint64_t>(k));
        ModelParams w = center;
        w.phi = sigmoid(logit(center.phi) + 0.7 * rng.normal());
        w.p = kPGrid[(k - 1) % std::size(kPGrid)];
        w.beta = center.beta * std::exp(0.7 * rng.normal());
        w.theta1 = center.theta1 * std::exp(0.3 * rng.normal());
        w.theta2 = center.theta2 * std::exp(0.3 * rng.normal());
        starts.push_back(clamp_start(w));
    }
    return starts;
}

}  // namespace

FitResult fit_cml(const IntSeries& series, Sign delta, const FitOptions& options) {
    options.validate();
    if (series.size() < kMinFitLength)
        throw DomainError("fit_cml: series must have at least " + std::to_string(kMinFitLength) + " observations");
    const TransitionCounts counts = count_transitions(series);
    const std::vector<ModelParams> starts = multistart_points(series, delta, options);

    std::vector<StartOutcome> outcomes(starts.size());
    const bool parallel = options.parallel_starts && std::thread::hardware_concurrency() > 1 && starts.size() > 1;
    if (parallel) {
        std::vector<std::future<StartOutcome>> futures;
        futures.reserve(starts.size());
        for (const ModelParams& s : starts)
            futures.push_back(std::async(std::launch::async, run_start, std::cref(counts), delta, s, options));
        for (std::size_t i = 0; i < futures.size(); ++i) outcomes[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < starts.size(); ++i) outcomes[i] = run_start(counts, delta, starts[i], options);
    }

    // Best converged optimum; ties go to the lowest start index.
    std::size_t best = outcomes.size();
    std::size_t best_any = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const optim::Result& r = outcomes[i].result;
        if (r.f < outcomes[best_any].result.f) best_any = i;
        if (r.converged && std::isfinite(r.f) && (best == outcomes.size() || r.f < outcomes[best].result.f))
            best = i;
    }

    FitResult fit;
    fit.method = FitMethod::cml;
    fit.delta_used = delta;
    fit.n_used = series.size();
    for (const StartOutcome& o : outcomes) {
        fit.start_objectives.push_back(o.initial);
        fit.start_optima.push_back(o.result.f * static_cast<double>(counts.transitions));
    }
    const std::size_t chosen = best < outcomes.size() ? best : best_any;
    const optim::Result& r = outcomes[chosen].result;
    fit.estimates = from_unconstrained(r.x, delta);
    fit.loglik = -r.f * static_cast<double>(counts.transitions);
    fit.criteria = info_criteria(fit.loglik, kMesinarParams, series.size());
    fit.iterations = r.iterations;
    fit.converged = best < outcomes.size();
    fit.message = r.message;

    if (!fit.converged) throw NonConvergenceError("fit_cml: no start converged (" + r.message + ")", fit);

    try {
        fit.std_errors = standard_errors(observed_information(counts, fit.estimates));
    } catch (const SingularInformationError& e) {
        fit.message += "; standard errors unavailable: ";
        fit.message += e.what();
    } catch (const DomainError& e) {
        fit.message += "; standard errors unavailable: ";
        fit.message += e.what();
    }
    return fit;
}

// Yule-Walker

FitResult fit_yw_from_moments(const SampleMoments& moments, double mean_ratio, double p_plugin,
                              double theta_plugin, Sign delta) {
    if (!(p_plugin > 0.0 && p_plugin < 1.0)) throw DomainError("fit_yw: p plug-in must lie in (0,1)");
    if (!(theta_plugin > 0.0)) throw DomainError("fit_yw: theta plug-in must be > 0");

    FitResult fit;
    fit.method = FitMethod::yw;
    fit.delta_used = delta;
    fit.n_used = moments.n;

    const double p = p_plugin;
    const double pq = p * (1.0 - p);
    const int sgn = to_int(delta);
    double phi = sgn * moments.acf1 / p;
    if (phi < 0.0 || phi > 1.0) {
        fit.phi_clamped = true;
        phi = std::clamp(phi, 0.0, 1.0);
    }
    if (phi >= 1.0) throw InfeasibleError("fit_yw: phi estimate reaches 1, innovation equations have no solution");

    const double mean = moments.mean;
    const double second = moments.variance + mean * mean;
    const double diff = mean * (1.0 - phi * p * sgn) / (1.0 - phi);
    const double sum = (second * (1.0 - phi * p * p) - phi * pq * mean - 2.0 * phi * pq * theta_plugin * mean_ratio) /
                           (1.0 - phi) -
                       diff * diff;
    const double theta1 = 0.5 * (sum + diff);
    const double theta2 = 0.5 * (sum - diff);
    if (!(theta1 > 0.0 && theta2 > 0.0))
        throw InfeasibleError("fit_yw: no solution with theta1, theta2 > 0 (theta1 = " + std::to_string(theta1) +
                              ", theta2 = " + std::to_string(theta2) + ")");

    fit.estimates = {phi, p, std::sqrt(theta_plugin), theta1, theta2, delta};
    fit.converged = true;
    fit.message = fit.phi_clamped ? "phi clamped to [0,1]" : "closed form";
    return fit;
}

FitResult fit_yw(const IntSeries& series, double p_plugin, double theta_plugin, Sign delta) {
    if (!(theta_plugin > 0.0)) throw DomainError("fit_yw: theta plug-in must be > 0");
    const SampleMoments m = sample_moments(series);
    FitResult fit = fit_yw_from_moments(m, sample_mean_ratio(series, theta_plugin), p_plugin, theta_plugin, delta);
    fit.loglik = mesinar_loglik(count_transitions(series), fit.estimates);
    fit.criteria = info_criteria(fit.loglik, kMesinarParams, series.size());
    return fit;
}

}  // namespace mesinar
