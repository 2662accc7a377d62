#include "mesinar/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>

namespace mesinar {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

TransitionCounts count_transitions(const IntSeries& series) {
    TransitionCounts out;
    std::map<std::pair<int, int>, double> tally;
    for (std::size_t t = 1; t < series.size(); ++t) tally[{series[t - 1], series[t]}] += 1.0;
    for (const auto& [pair, count] : tally) {
        out.pairs.push_back(pair);
        out.counts.push_back(count);
    }
    out.transitions = series.size() > 0 ? series.size() - 1 : 0;
    for (int z : series.values) out.max_abs = std::max(out.max_abs, std::abs(z));
    return out;
}

BesselTable::BesselTable(double x, int max_order) : values_(static_cast<std::size_t>(max_order) + 1) {
    for (int k = 0; k <= max_order; ++k) values_[static_cast<std::size_t>(k)] = log_bessel_i(k, x).log_magnitude;
}

double BesselTable::log_i(int order) const { return values_.at(static_cast<std::size_t>(std::abs(order))); }

double BesselTable::derivative_ratio(int order) const {
    const double center = log_i(order);
    return std::exp(log_i(order - 1) - center) + std::exp(log_i(order + 1) - center);
}

namespace {

struct Tables {
    BesselTable a;  // 2 p beta
    BesselTable b;  // 2 (1-p) beta
    BesselTable c;  // 2 beta
    BesselTable s;  // 2 sqrt(theta1 theta2)

    Tables(const ModelParams& w, int max_order)
        : a(2.0 * w.p * w.beta, max_order),
          b(2.0 * (1.0 - w.p) * w.beta, max_order),
          c(2.0 * w.beta, max_order),
          s(2.0 * std::sqrt(w.theta1 * w.theta2), max_order) {}
};

struct PairTerms {
    double log_thin;   // log T
    double log_innov;  // log S
};

PairTerms pair_terms(const Tables& tab, const ModelParams& w, int prev, int next) {
    const int n = w.sign() * next;
    PairTerms out{};
    out.log_thin = tab.a.log_i(n) + tab.b.log_i(prev - n) - tab.c.log_i(prev);
    out.log_innov = -w.theta1 - w.theta2 + 0.5 * next * std::log(w.theta1 / w.theta2) + tab.s.log_i(next);
    return out;
}

}  // namespace

double mesinar_loglik(const TransitionCounts& counts, const ModelParams& params) {
    params.validate();
    if (counts.pairs.empty()) return 0.0;
    const Tables tab(params, 2 * counts.max_abs + 1);
    const double log_phi = params.phi > 0.0 ? std::log(params.phi) : kNegInf;
    const double log_rest = params.phi < 1.0 ? std::log1p(-params.phi) : kNegInf;
    double total = 0.0;
    for (std::size_t i = 0; i < counts.pairs.size(); ++i) {
        const auto [prev, next] = counts.pairs[i];
        const PairTerms t = pair_terms(tab, params, prev, next);
        const double thin = log_phi > kNegInf ? log_phi + t.log_thin : kNegInf;
        const double innov = log_rest > kNegInf ? log_rest + t.log_innov : kNegInf;
        total += counts.counts[i] * log_add(thin, innov);
    }
    return total;
}

double mesinar_loglik_score(const TransitionCounts& counts, const ModelParams& params, Score& score) {
    params.validate();
    if (!(params.phi > 0.0 && params.phi < 1.0))
        throw DomainError("score: phi must lie strictly inside (0,1)");
    score.fill(0.0);
    if (counts.pairs.empty()) return 0.0;

    const Tables tab(params, 2 * counts.max_abs + 2);
    const double phi = params.phi;
    const double p = params.p;
    const double q = 1.0 - p;
    const double beta = params.beta;
    const double t1 = params.theta1;
    const double t2 = params.theta2;
    const double s_arg = 2.0 * std::sqrt(t1 * t2);
    const double log_phi = std::log(phi);
    const double log_rest = std::log1p(-phi);

    double total = 0.0;
    for (std::size_t i = 0; i < counts.pairs.size(); ++i) {
        const auto [prev, next] = counts.pairs[i];
        const double c = counts.counts[i];
        const int n = params.sign() * next;
        const PairTerms t = pair_terms(tab, params, prev, next);
        const double log_f = log_add(log_phi + t.log_thin, log_rest + t.log_innov);
        total += c * log_f;

        // Posterior weights of the two mixture components.
        const double w_thin = std::exp(log_phi + t.log_thin - log_f);
        const double w_innov = std::exp(log_rest + t.log_innov - log_f);

        const double ra = tab.a.derivative_ratio(n);
        const double rb = tab.b.derivative_ratio(prev - n);
        const double rc = tab.c.derivative_ratio(prev);
        const double rs = tab.s.derivative_ratio(next);

        score[0] += c * (w_thin / phi - w_innov / (1.0 - phi));
        score[1] += c * w_thin * beta * (ra - rb);
        score[2] += c * w_thin * (p * ra + q * rb - rc);
        score[3] += c * w_innov * (-1.0 + next / (2.0 * t1) + t2 * rs / s_arg);
        score[4] += c * w_innov * (-1.0 - next / (2.0 * t2) + t1 * rs / s_arg);
    }
    return total;
}

}  // namespace mesinar
