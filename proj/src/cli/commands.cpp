#include "mesinar/cli/commands.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "mesinar/cli/kv_config.hpp"
#include "mesinar/cli/series_io.hpp"
#include "mesinar/mcstudy.hpp"

namespace mesinar::cli {

DescribeStats describe(const IntSeries& series) {
    if (series.empty()) throw InputError("describe: series is empty");
    DescribeStats s;
    s.n = series.size();
    const double n = static_cast<double>(s.n);
    double sum = 0.0;
    for (int z : series.values) sum += z;
    s.mean = sum / n;
    double ss = 0.0;
    for (int z : series.values) ss += (z - s.mean) * (z - s.mean);
    s.variance = s.n > 1 ? ss / (n - 1.0) : 0.0;
    std::vector<int> sorted = series.values;
    std::sort(sorted.begin(), sorted.end());
    s.minimum = sorted.front();
    s.maximum = sorted.back();
    s.range = s.maximum - s.minimum;
    const std::size_t mid = sorted.size() / 2;
    s.median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    return s;
}

IntSeries difference(const IntSeries& series) {
    if (series.size() < 2) throw InputError("diff: need at least two observations");
    IntSeries out;
    const bool labelled = series.labels.size() == series.size();
    for (std::size_t t = 1; t < series.size(); ++t) {
        out.values.push_back(series[t] - series[t - 1]);
        if (labelled) out.labels.push_back(series.labels[t]);
    }
    return out;
}

std::vector<CompareRow> compare_models(const IntSeries& series, const std::vector<std::string>& models,
                                       const FitOptions& options) {
    if (models.empty()) throw InputError("compare: no models given");
    for (const std::string& m : models)
        if (m != "mesinar" && m != "pdinar") throw InputError("compare: unknown model '" + m + "'");
    const Sign delta = detect_delta(series);
    std::vector<CompareRow> rows;
    for (const std::string& m : models) {
        CompareRow row;
        row.model = m;
        if (m == "mesinar") {
            const FitResult fit = fit_cml(series, delta, options);
            row.k = 5;
            row.loglik = fit.loglik;
            row.criteria = fit.criteria;
        } else {
            const PdinarFit fit = fit_pdinar(series, delta, options);
            row.k = 3;
            row.loglik = fit.loglik;
            row.criteria = fit.criteria;
        }
        rows.push_back(row);
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const CompareRow& a, const CompareRow& b) { return a.criteria.aic < b.criteria.aic; });
    return rows;
}

namespace {

struct Globals {
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string output;
    std::string format = "text";

    [[nodiscard]] bool machine() const { return format == "machine"; }
};

std::string num(double v) { return fmt::format("{:.10g}", v); }

std::string sign_str(Sign s) { return s == Sign::positive ? "1" : "-1"; }

void emit(const Globals& g, std::ostream& out, const std::function<void(std::ostream&)>& writer) {
    if (g.output.empty()) {
        writer(out);
        return;
    }
    std::ofstream file(g.output);
    if (!file) throw InputError("cannot open output file '" + g.output + "'");
    writer(file);
    if (!file) throw InputError("failed writing '" + g.output + "'");
}

void render(std::ostream& os, const KeyValueDoc& doc, bool machine) {
    if (machine) {
        write_key_values(os, doc);
        return;
    }
    std::size_t width = 0;
    for (const auto& [k, v] : doc.entries) width = std::max(width, k.size());
    for (const auto& [k, v] : doc.entries) os << fmt::format("{:<{}}  {}\n", k, width, v);
}

KeyValueDoc describe_doc(const DescribeStats& s) {
    KeyValueDoc d;
    d.entries = {{"n", std::to_string(s.n)},        {"mean", num(s.mean)},
                 {"variance", num(s.variance)},     {"minimum", std::to_string(s.minimum)},
                 {"median", num(s.median)},         {"maximum", std::to_string(s.maximum)},
                 {"range", std::to_string(s.range)}};
    return d;
}

KeyValueDoc mesinar_fit_doc(const FitResult& fit) {
    const ModelParams& e = fit.estimates;
    KeyValueDoc d;
    auto add = [&](const std::string& k, const std::string& v) { d.entries.emplace_back(k, v); };
    add("model", "mesinar");
    add("method", to_string(fit.method));
    add("delta", sign_str(fit.delta_used));
    add("n", std::to_string(fit.n_used));
    add("phi", num(e.phi));
    add("p", num(e.p));
    add("delta_p", num(to_int(e.delta) * e.p));
    add("beta", num(e.beta));
    add("theta1", num(e.theta1));
    add("theta2", num(e.theta2));
    if (fit.std_errors) {
        const auto& se = *fit.std_errors;
        add("se_phi", num(se[0]));
        add("se_p", num(se[1]));
        add("se_beta", num(se[2]));
        add("se_theta1", num(se[3]));
        add("se_theta2", num(se[4]));
    }
    add("loglik", num(fit.loglik));
    add("aic", num(fit.criteria.aic));
    add("bic", num(fit.criteria.bic));
    add("hqic", num(fit.criteria.hqic));
    add("converged", fit.converged ? "true" : "false");
    add("iterations", std::to_string(fit.iterations));
    if (fit.method == FitMethod::yw) add("phi_clamped", fit.phi_clamped ? "true" : "false");
    add("message", fit.message);
    return d;
}

KeyValueDoc pdinar_fit_doc(const PdinarFit& fit) {
    const PdinarParams& e = fit.estimates;
    KeyValueDoc d;
    auto add = [&](const std::string& k, const std::string& v) { d.entries.emplace_back(k, v); };
    add("model", "pdinar");
    add("method", "cml");
    add("delta", sign_str(e.delta));
    add("n", std::to_string(fit.n_used));
    add("alpha", num(e.alpha));
    add("delta_alpha", num(to_int(e.delta) * e.alpha));
    add("theta1", num(e.theta1));
    add("theta2", num(e.theta2));
    add("theta", num(e.theta()));
    if (fit.std_errors) {
        add("se_alpha", num((*fit.std_errors)[0]));
        add("se_theta1", num((*fit.std_errors)[1]));
        add("se_theta2", num((*fit.std_errors)[2]));
    }
    add("loglik", num(fit.loglik));
    add("aic", num(fit.criteria.aic));
    add("bic", num(fit.criteria.bic));
    add("hqic", num(fit.criteria.hqic));
    add("converged", fit.converged ? "true" : "false");
    add("iterations", std::to_string(fit.iterations));
    add("message", fit.message);
    return d;
}

void render_study(std::ostream& os, const MCReport& report, bool machine) {
    const MCConfig& c = report.config;
    if (machine) {
        KeyValueDoc d;
        auto add = [&](const std::string& k, const std::string& v) { d.entries.emplace_back(k, v); };
        add("replications", std::to_string(c.replications));
        add("seed", std::to_string(c.seed));
        add("burn_in", std::to_string(c.burn_in));
        for (const MCCell& cell : report.cells) {
            const std::string prefix = fmt::format("n{}.{}.", cell.n, to_string(cell.method));
            add(prefix + "converged", std::to_string(cell.converged));
            add(prefix + "failures", std::to_string(cell.failures));
            for (std::size_t j = 0; j < cell.parameters.size(); ++j) {
                add(prefix + cell.parameters[j] + ".mean", num(cell.mean[j]));
                add(prefix + cell.parameters[j] + ".mse", num(cell.mse[j]));
            }
        }
        write_key_values(os, d);
        return;
    }
    const ModelParams& w = c.truth;
    os << fmt::format("truth: phi={} p={} beta={} theta1={} theta2={} delta={}  N={}\n", num(w.phi), num(w.p),
                      num(w.beta), num(w.theta1), num(w.theta2), sign_str(w.delta), c.replications);
    // header
    std::string header = fmt::format("{:<6}", "n");
    for (FitMethod m : c.methods)
        for (const std::string& name : reported_parameters(m))
            header += fmt::format(" {:>14}", name + "_" + to_string(m));
    header += "  failures";
    os << header << '\n';
    for (std::size_t n : c.sample_sizes) {
        std::string means = fmt::format("{:<6}", n);
        std::string mses = fmt::format("{:<6}", "MSE");
        std::string failures;
        for (FitMethod m : c.methods) {
            const MCCell& cell = report.cell(n, m);
            for (std::size_t j = 0; j < cell.parameters.size(); ++j) {
                means += fmt::format(" {:>14.4f}", cell.mean[j]);
                mses += fmt::format(" {:>14.4f}", cell.mse[j]);
            }
            failures += fmt::format(" {}={}", to_string(m), cell.failures);
        }
        os << means << " " << failures << '\n' << mses << '\n';
    }
}

struct SimulateArgs {
    ModelParams params;
    int delta = 1;
    std::size_t n = 0;
    std::size_t burn_in = 500;
};

struct FitArgs {
    std::string input;
    std::string model = "mesinar";
    std::string method = "cml";
    int delta = 0;  // 0: detect from the lag-one autocorrelation
    FitOptions options;
    std::vector<std::string> models{"mesinar", "pdinar"};
};

FitOptions with_seed(FitOptions o, const Globals& g) {
    if (g.seed_given) o.seed = g.seed;
    return o;
}

int cmd_simulate(const SimulateArgs& a, const Globals& g, std::ostream& out) {
    ModelParams w = a.params;
    w.delta = sign_from_int(a.delta);
    w.validate();
    if (a.n == 0) throw InputError("simulate: n must be >= 1");
    RandomStream rng = RandomStream::derive(g.seed, 0x53494dULL);
    const IntSeries series = simulate(w, a.n, a.burn_in, rng);
    emit(g, out, [&](std::ostream& os) { write_series(os, series); });
    return kExitOk;
}

int cmd_diff(const std::string& input, const Globals& g, std::ostream& out) {
    const IntSeries d = difference(read_series_file(input));
    emit(g, out, [&](std::ostream& os) { write_series(os, d); });
    return kExitOk;
}

int cmd_describe(const std::string& input, const Globals& g, std::ostream& out) {
    const DescribeStats s = describe(read_series_file(input));
    emit(g, out, [&](std::ostream& os) { render(os, describe_doc(s), g.machine()); });
    return kExitOk;
}

int cmd_fit(const FitArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
    const IntSeries series = read_series_file(a.input);
    if (series.size() < kMinFitLength)
        throw InputError("fit: series must have at least " + std::to_string(kMinFitLength) + " observations");
    const Sign delta = a.delta == 0 ? detect_delta(series) : sign_from_int(a.delta);
    const FitOptions options = with_seed(a.options, g);
    options.validate();

    if (a.model == "pdinar") {
        if (a.method != "cml") throw InputError("fit: the pdinar model supports --method cml only");
        try {
            const PdinarFit fit = fit_pdinar(series, delta, options);
            emit(g, out, [&](std::ostream& os) { render(os, pdinar_fit_doc(fit), g.machine()); });
            return kExitOk;
        } catch (const NonConvergenceError& e) {
            PdinarFit best;
            best.loglik = e.best().loglik;
            best.criteria = e.best().criteria;
            best.n_used = e.best().n_used;
            best.message = e.what();
            best.estimates.delta = delta;
            emit(g, out, [&](std::ostream& os) { render(os, pdinar_fit_doc(best), g.machine()); });
            err << "error: " << e.what() << '\n';
            return kExitNonConvergence;
        }
    }

    FitResult cml;
    try {
        cml = fit_cml(series, delta, options);
    } catch (const NonConvergenceError& e) {
        emit(g, out, [&](std::ostream& os) { render(os, mesinar_fit_doc(e.best()), g.machine()); });
        err << "error: " << e.what() << '\n';
        return kExitNonConvergence;
    }
    if (a.method == "cml") {
        emit(g, out, [&](std::ostream& os) { render(os, mesinar_fit_doc(cml), g.machine()); });
        return kExitOk;
    }
    try {
        const FitResult yw = fit_yw(series, cml.estimates.p, cml.estimates.theta(), delta);
        emit(g, out, [&](std::ostream& os) { render(os, mesinar_fit_doc(yw), g.machine()); });
        return kExitOk;
    } catch (const InfeasibleError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNonConvergence;
    }
}

int cmd_mcstudy(const std::string& config_path, int threads, const Globals& g, std::ostream& out) {
    MCConfig cfg = parse_mc_config(read_key_values_file(config_path));
    if (g.seed_given) cfg.seed = g.seed;
    if (threads >= 0) cfg.threads = threads;
    const MCReport report = run_study(cfg);
    emit(g, out, [&](std::ostream& os) { render_study(os, report, g.machine()); });
    return kExitOk;
}

int cmd_compare(const FitArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
    const IntSeries series = read_series_file(a.input);
    std::vector<CompareRow> rows;
    try {
        rows = compare_models(series, a.models, with_seed(a.options, g));
    } catch (const NonConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNonConvergence;
    }
    emit(g, out, [&](std::ostream& os) {
        if (g.machine()) {
            KeyValueDoc d;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const std::string prefix = fmt::format("rank{}.", i + 1);
                d.entries.emplace_back(prefix + "model", rows[i].model);
                d.entries.emplace_back(prefix + "k", std::to_string(rows[i].k));
                d.entries.emplace_back(prefix + "loglik", num(rows[i].loglik));
                d.entries.emplace_back(prefix + "aic", num(rows[i].criteria.aic));
                d.entries.emplace_back(prefix + "bic", num(rows[i].criteria.bic));
                d.entries.emplace_back(prefix + "hqic", num(rows[i].criteria.hqic));
            }
            write_key_values(os, d);
            return;
        }
        os << fmt::format("{:<8} {:>2} {:>12} {:>12} {:>12} {:>12}\n", "model", "k", "loglik", "AIC", "BIC", "HQIC");
        for (const CompareRow& r : rows)
            os << fmt::format("{:<8} {:>2} {:>12.4f} {:>12.4f} {:>12.4f} {:>12.4f}\n", r.model, r.k, r.loglik,
                              r.criteria.aic, r.criteria.bic, r.criteria.hqic);
    });
    return kExitOk;
}

void add_fit_options(CLI::App* sub, FitArgs& a) {
    sub->add_option("--max-iter", a.options.max_iterations, "BFGS iteration limit per start")
        ->check(CLI::Range(1, 1000000));
    sub->add_option("--tol", a.options.gradient_tolerance, "gradient tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--starts", a.options.n_starts, "number of optimizer starts")->check(CLI::Range(1, 1000));
    sub->add_option("--delta", a.delta, "sign of the dependence (1 or -1); detected from r1 when omitted")
        ->check(CLI::IsMember({-1, 1}));
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Signed integer autoregression: simulate, fit, study and compare"};
    app.name("mesinar");
    app.require_subcommand(1, 1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "random seed")->each([&](const std::string&) { g.seed_given = true; });
    app.add_option("--output", g.output, "write the result to this file instead of stdout");
    app.add_option("--format", g.format, "text or machine")->check(CLI::IsMember({"text", "machine"}));

    SimulateArgs sim;
    CLI::App* simulate_cmd = app.add_subcommand("simulate", "simulate a series, written as CSV t,z");
    simulate_cmd->add_option("--phi", sim.params.phi)->required();
    simulate_cmd->add_option("--p", sim.params.p)->required();
    simulate_cmd->add_option("--beta", sim.params.beta)->required();
    simulate_cmd->add_option("--theta1", sim.params.theta1)->required();
    simulate_cmd->add_option("--theta2", sim.params.theta2)->required();
    simulate_cmd->add_option("--delta", sim.delta, "1 or -1");
    simulate_cmd->add_option("--n", sim.n, "series length")->required();
    simulate_cmd->add_option("--burn-in", sim.burn_in, "discarded initial steps");

    std::string input;
    CLI::App* diff_cmd = app.add_subcommand("diff", "lag-one difference of a series");
    diff_cmd->add_option("input", input, "series CSV")->required();

    CLI::App* describe_cmd = app.add_subcommand("describe", "n, mean, variance, min, median, max, range");
    describe_cmd->add_option("input", input, "series CSV")->required();

    FitArgs fit;
    CLI::App* fit_cmd = app.add_subcommand("fit", "fit a model to a series");
    fit_cmd->add_option("input", fit.input, "series CSV")->required();
    fit_cmd->add_option("--model", fit.model)->check(CLI::IsMember({"mesinar", "pdinar"}));
    fit_cmd->add_option("--method", fit.method)->check(CLI::IsMember({"cml", "yw"}));
    add_fit_options(fit_cmd, fit);

    std::string config_path;
    int threads = -1;
    CLI::App* study_cmd = app.add_subcommand("mcstudy", "run a Monte Carlo study from a key-value config");
    study_cmd->add_option("config", config_path, "config file")->required();
    study_cmd->add_option("--threads", threads, "worker threads (0: all cores)")->check(CLI::Range(0, 1024));

    FitArgs cmp;
    CLI::App* compare_cmd = app.add_subcommand("compare", "fit several models and rank them by AIC");
    compare_cmd->add_option("input", cmp.input, "series CSV")->required();
    compare_cmd->add_option("--models", cmp.models, "comma separated: mesinar,pdinar")->delimiter(',');
    add_fit_options(compare_cmd, cmp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*simulate_cmd) return cmd_simulate(sim, g, out);
        if (*diff_cmd) return cmd_diff(input, g, out);
        if (*describe_cmd) return cmd_describe(input, g, out);
        if (*fit_cmd) return cmd_fit(fit, g, out, err);
        if (*study_cmd) return cmd_mcstudy(config_path, threads, g, out);
        if (*compare_cmd) {
            if (cmp.delta != 0) throw InputError("compare: --delta is not supported; the sign is detected");
            return cmd_compare(cmp, g, out, err);
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const NonConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNonConvergence;
    }
    return kExitInput;
}

}  // namespace mesinar::cli
