#include "mesinar/optim.hpp"

#include <cmath>
#include <limits>

namespace mesinar::optim {

namespace {

constexpr double kC1 = 1e-4;
constexpr double kC2 = 0.9;
constexpr int kMaxBracket = 30;
constexpr int kMaxZoom = 40;

struct Point {
    double alpha = 0.0;
    double f = 0.0;
    double slope = 0.0;  // directional derivative
    Eigen::VectorXd grad;
};

class LineSearch {
public:
    LineSearch(const Objective& obj, const Eigen::VectorXd& x, const Eigen::VectorXd& dir, double f0, double d0,
               int& evals)
        : obj_(obj), x_(x), dir_(dir), f0_(f0), d0_(d0), evals_(evals) {}

    // Returns true with `out` holding a point that satisfies the strong Wolfe
    // conditions, or at least sufficient decrease when the bracket collapses.
    bool run(double alpha0, double alpha_max, Point& out) {
        Point prev{0.0, f0_, d0_, {}};
        double alpha = alpha0;
        for (int i = 0; i < kMaxBracket; ++i) {
            Point cur = eval(alpha);
            if (cur.f > f0_ + kC1 * alpha * d0_ || (i > 0 && cur.f >= prev.f)) return zoom(prev, cur, out);
            if (std::abs(cur.slope) <= -kC2 * d0_) {
                out = cur;
                return true;
            }
            if (cur.slope >= 0.0) return zoom(cur, prev, out);
            prev = cur;
            if (alpha >= alpha_max) {
                out = cur;
                return true;
            }
            alpha = std::min(2.0 * alpha, alpha_max);
        }
        out = prev;
        return prev.alpha > 0.0;
    }

private:
    Point eval(double alpha) {
        Point p;
        p.alpha = alpha;
        p.grad.resize(x_.size());
        p.f = obj_(x_ + alpha * dir_, &p.grad);
        ++evals_;
        if (!std::isfinite(p.f) || !p.grad.allFinite()) {
            p.f = std::numeric_limits<double>::infinity();
            p.slope = std::numeric_limits<double>::quiet_NaN();
        } else {
            p.slope = p.grad.dot(dir_);
        }
        return p;
    }

    bool zoom(Point lo, Point hi, Point& out) {
        for (int i = 0; i < kMaxZoom; ++i) {
            const double width = hi.alpha - lo.alpha;
            double alpha = 0.5 * (lo.alpha + hi.alpha);
            if (std::isfinite(hi.f)) {
                // Quadratic through f(lo), f'(lo), f(hi).
                const double denom = 2.0 * (hi.f - lo.f - lo.slope * width);
                if (denom > 0.0) {
                    const double trial = lo.alpha - lo.slope * width * width / denom;
                    const double a = std::min(lo.alpha, hi.alpha);
                    const double b = std::max(lo.alpha, hi.alpha);
                    const double margin = 0.1 * (b - a);
                    if (trial > a + margin && trial < b - margin) alpha = trial;
                }
            }
            Point cur = eval(alpha);
            if (cur.f > f0_ + kC1 * alpha * d0_ || cur.f >= lo.f) {
                hi = cur;
            } else {
                if (std::abs(cur.slope) <= -kC2 * d0_) {
                    out = cur;
                    return true;
                }
                if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
                lo = cur;
            }
            if (std::abs(hi.alpha - lo.alpha) < 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
        }
        // Accept the best sufficient-decrease point found, if any.
        if (lo.alpha > 0.0 && lo.f <= f0_ + kC1 * lo.alpha * d0_) {
            out = lo;
            return true;
        }
        return false;
    }

    const Objective& obj_;
    const Eigen::VectorXd& x_;
    const Eigen::VectorXd& dir_;
    double f0_;
    double d0_;
    int& evals_;
};

}  // namespace

Result minimize_bfgs(const Objective& objective, const Eigen::VectorXd& x0, const Options& options) {
    const Eigen::Index dim = x0.size();
    Result res;
    res.x = x0;
    res.grad.resize(dim);
    res.f = objective(res.x, &res.grad);
    res.evaluations = 1;
    if (!std::isfinite(res.f) || !res.grad.allFinite()) {
        res.message = "objective not finite at the starting point";
        return res;
    }

    Eigen::MatrixXd inv_hess = Eigen::MatrixXd::Identity(dim, dim);
    bool fresh_hessian = true;

    for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
        const double gnorm = res.grad.lpNorm<Eigen::Infinity>();
        if (gnorm < options.gradient_tolerance) {
            res.converged = true;
            res.message = "gradient tolerance reached";
            return res;
        }

        Eigen::VectorXd dir = -inv_hess * res.grad;
        double slope = dir.dot(res.grad);
        if (!(slope < 0.0)) {
            inv_hess.setIdentity();
            fresh_hessian = true;
            dir = -res.grad;
            slope = dir.dot(res.grad);
        }
        const double dir_norm = dir.norm();
        const double alpha_max = options.max_step / dir_norm;
        const double alpha0 = std::min(1.0, alpha_max);

        LineSearch ls(objective, res.x, dir, res.f, slope, res.evaluations);
        Point step;
        if (!ls.run(alpha0, alpha_max, step)) {
            if (!fresh_hessian) {
                inv_hess.setIdentity();
                fresh_hessian = true;
                continue;
            }
            res.converged = gnorm < options.stall_gradient_tolerance;
            res.message = "line search could not decrease the objective";
            return res;
        }

        const Eigen::VectorXd s = step.alpha * dir;
        const Eigen::VectorXd y = step.grad - res.grad;
        res.x += s;
        res.f = step.f;
        res.grad = step.grad;

        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (fresh_hessian) {
                inv_hess *= sy / y.squaredNorm();
                fresh_hessian = false;
            }
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
            inv_hess = (eye - rho * s * y.transpose()) * inv_hess * (eye - rho * y * s.transpose()) +
                       rho * s * s.transpose();
        }
    }
    res.converged = res.grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance;
    res.message = res.converged ? "gradient tolerance reached" : "iteration limit reached";
    return res;
}

}  // namespace mesinar::optim
