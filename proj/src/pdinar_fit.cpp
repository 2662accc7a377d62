#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "mesinar/estimate.hpp"
#include "mesinar/optim.hpp"

namespace mesinar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kPdinarParams = 3;

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

// Transitions grouped by previous state.
using GroupedCounts = std::map<int, std::vector<std::pair<int, double>>>;

GroupedCounts group_by_prev(const TransitionCounts& counts) {
    GroupedCounts out;
    for (std::size_t i = 0; i < counts.pairs.size(); ++i)
        out[counts.pairs[i].first].emplace_back(counts.pairs[i].second, counts.counts[i]);
    return out;
}

double pdinar_loglik(const GroupedCounts& groups, const PdinarParams& w) {
    const double theta = w.theta();
    const SkellamParams eps = w.innovation();
    std::unordered_map<int, double> skellam_cache;
    auto innov = [&](int z) {
        auto it = skellam_cache.find(z);
        if (it != skellam_cache.end()) return it->second;
        const double v = skellam_pmf(z, eps);
        skellam_cache.emplace(z, v);
        return v;
    };
    const int sgn = to_int(w.delta);
    double total = 0.0;
    for (const auto& [prev, nexts] : groups) {
        const EBParams eb{prev, w.alpha, theta};
        const auto center = static_cast<int>(std::lround(w.alpha * prev));
        const ProbVector thinned = truncated_pmf([&](int x) { return eb_pmf(x, eb); }, center, 1e-14);
        for (const auto& [next, count] : nexts) {
            double f = 0.0;
            for (std::size_t i = 0; i < thinned.masses.size(); ++i)
                f += thinned.masses[i] * innov(next - sgn * (thinned.lo + static_cast<int>(i)));
            if (!(f > 0.0)) return -kInf;
            total += count * std::log(f);
        }
    }
    return total;
}

PdinarParams pdinar_from_unconstrained(const Eigen::VectorXd& u, Sign delta) {
    return {sigmoid(u[0]), std::exp(u[1]), std::exp(u[2]), delta};
}

}  // namespace

void PdinarParams::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("PdinarParams: alpha must lie in (0,1)");
    if (!(theta1 > 0.0 && std::isfinite(theta1))) throw DomainError("PdinarParams: theta1 must be > 0");
    if (!(theta2 > 0.0 && std::isfinite(theta2))) throw DomainError("PdinarParams: theta2 must be > 0");
}

double pdinar_neg_loglik(const IntSeries& series, const PdinarParams& params) {
    params.validate();
    if (series.size() < 2) throw DomainError("pdinar_neg_loglik: need at least two observations");
    return -pdinar_loglik(group_by_prev(count_transitions(series)), params);
}

PdinarFit fit_pdinar(const IntSeries& series, Sign delta, const FitOptions& options) {
    options.validate();
    if (series.size() < kMinFitLength)
        throw DomainError("fit_pdinar: series must have at least " + std::to_string(kMinFitLength) +
                          " observations");
    const TransitionCounts counts = count_transitions(series);
    const GroupedCounts groups = group_by_prev(counts);
    const double n = static_cast<double>(counts.transitions);

    auto value = [&](const Eigen::VectorXd& u) -> double {
        if (!u.allFinite() || std::abs(u[0]) > 30.0 || std::abs(u[1]) > 12.0 || std::abs(u[2]) > 12.0) return kInf;
        const PdinarParams w = pdinar_from_unconstrained(u, delta);
        if (!(w.alpha > 0.0 && w.alpha < 1.0)) return kInf;
        try {
            const double ll = pdinar_loglik(groups, w);
            return std::isfinite(ll) ? -ll / n : kInf;
        } catch (const DomainError&) {
            return kInf;
        }
    };
    const optim::Objective objective = [&](const Eigen::VectorXd& u, Eigen::VectorXd* grad) -> double {
        const double f = value(u);
        if (grad != nullptr && std::isfinite(f)) {
            constexpr double h = 1e-6;
            for (int i = 0; i < kPdinarParams; ++i) {
                Eigen::VectorXd up = u;
                Eigen::VectorXd dn = u;
                up[i] += h;
                dn[i] -= h;
                (*grad)[i] = (value(up) - value(dn)) / (2.0 * h);
            }
        }
        return f;
    };

    // Starts: innovation rates from the marginal moments, alpha on a grid.
    double mean = 0.0;
    double var = 1.0;
    try {
        const SampleMoments m = sample_moments(series);
        mean = m.mean;
        var = m.variance;
    } catch (const DomainError&) {
    }
    static constexpr double kAlphaGrid[] = {0.3, 0.6, 0.15, 0.8, 0.45};
    optim::Options opt;
    opt.max_iterations = options.max_iterations;
    // Finite-difference gradients carry ~1e-9 noise.
    opt.gradient_tolerance = std::max(options.gradient_tolerance, 1e-6);

    optim::Result best;
    best.f = kInf;
    bool any_converged = false;
    for (int k = 0; k < options.n_starts; ++k) {
        const double alpha = kAlphaGrid[k % std::size(kAlphaGrid)];
        const double s = std::max(var * (1.0 - alpha * alpha), std::abs(mean) + 0.2);
        const double d = mean * (1.0 - alpha * to_int(delta));
        const double t1 = std::max(0.5 * (s + d), 0.05);
        const double t2 = std::max(0.5 * (s - d), 0.05);
        Eigen::VectorXd u0(kPdinarParams);
        u0 << std::log(alpha / (1.0 - alpha)), std::log(t1), std::log(t2);
        optim::Result r = optim::minimize_bfgs(objective, u0, opt);
        const bool better = r.converged ? (!any_converged || r.f < best.f) : (!any_converged && r.f < best.f);
        if (better) {
            any_converged = any_converged || r.converged;
            best = std::move(r);
        }
    }

    PdinarFit fit;
    fit.n_used = series.size();
    fit.estimates = pdinar_from_unconstrained(best.x, delta);
    fit.loglik = -best.f * n;
    fit.criteria = info_criteria(fit.loglik, kPdinarParams, series.size());
    fit.converged = any_converged;
    fit.iterations = best.iterations;
    fit.message = best.message;
    if (!any_converged) {
        FitResult carrier;
        carrier.loglik = fit.loglik;
        carrier.criteria = fit.criteria;
        carrier.n_used = fit.n_used;
        carrier.delta_used = delta;
        carrier.message = fit.message;
        throw NonConvergenceError("fit_pdinar: no start converged (" + best.message + ")", carrier);
    }

    // Standard errors from a finite-difference Hessian in (alpha, theta1, theta2).
    const PdinarParams& e = fit.estimates;
    const double x0[kPdinarParams] = {e.alpha, e.theta1, e.theta2};
    auto nll_at = [&](const double* x) {
        const PdinarParams w{x[0], x[1], x[2], delta};
        if (!(w.alpha > 0.0 && w.alpha < 1.0 && w.theta1 > 0.0 && w.theta2 > 0.0)) return kInf;
        return -pdinar_loglik(groups, w);
    };
    Eigen::Matrix3d hess;
    double h[kPdinarParams];
    for (int i = 0; i < kPdinarParams; ++i) {
        h[i] = 1e-4 * std::max(std::abs(x0[i]), 1e-2);
        if (i == 0) h[i] = std::min(h[i], 0.5 * std::min(x0[0], 1.0 - x0[0]));
        else h[i] = std::min(h[i], 0.5 * x0[i]);
    }
    for (int i = 0; i < kPdinarParams; ++i) {
        for (int j = i; j < kPdinarParams; ++j) {
            double pp[3] = {x0[0], x0[1], x0[2]};
            double pm[3] = {x0[0], x0[1], x0[2]};
            double mp[3] = {x0[0], x0[1], x0[2]};
            double mm[3] = {x0[0], x0[1], x0[2]};
            pp[i] += h[i]; pp[j] += h[j];
            pm[i] += h[i]; pm[j] -= h[j];
            mp[i] -= h[i]; mp[j] += h[j];
            mm[i] -= h[i]; mm[j] -= h[j];
            hess(i, j) = hess(j, i) = (nll_at(pp) - nll_at(pm) - nll_at(mp) + nll_at(mm)) / (4.0 * h[i] * h[j]);
        }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(hess);
    if (eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() > 0.0 && hess.allFinite()) {
        const Eigen::Matrix3d inv = hess.inverse();
        fit.std_errors = std::array<double, 3>{std::sqrt(inv(0, 0)), std::sqrt(inv(1, 1)), std::sqrt(inv(2, 2))};
    } else {
        fit.message += "; standard errors unavailable: information not positive definite";
    }
    return fit;
}

}  // namespace mesinar
