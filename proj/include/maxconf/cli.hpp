#pragma once

// Command-line front end: bounds, certify, simulate, verify.
// Exit codes: 0 success, 1 verification failure, 2 usage or domain error, 3 infeasible rates.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "maxconf/certify.hpp"
#include "maxconf/ensembles.hpp"
#include "maxconf/json_io.hpp"
#include "maxconf/ncmodel.hpp"
#include "maxconf/oracle_suite.hpp"
#include "maxconf/parallel.hpp"
#include "maxconf/simulator.hpp"
#include "maxconf/strategies.hpp"

namespace maxconf::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kInfeasible = 3 };

class UsageError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct SweepSpec {
    std::string variable;
    double start = 0.0;
    double end = 0.0;
    std::size_t steps = 0;

    double at(std::size_t i) const {
        return start + static_cast<double>(i) * (end - start) / static_cast<double>(steps - 1);
    }
};

/// "var:start:end:steps"
inline SweepSpec parse_sweep(const std::string &text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) {
        parts.push_back(item);
    }
    if (parts.size() != 4) {
        throw UsageError("sweep must look like var:start:end:steps");
    }
    SweepSpec s;
    s.variable = parts[0];
    try {
        s.start = std::stod(parts[1]);
        s.end = std::stod(parts[2]);
        const long steps = std::stol(parts[3]);
        if (steps < 2) {
            throw UsageError("sweep needs at least two steps");
        }
        s.steps = static_cast<std::size_t>(steps);
    } catch (const std::logic_error &) {
        throw UsageError("sweep bounds must be numbers: " + text);
    }
    if (s.variable != "c" && s.variable != "p" && s.variable != "eta1") {
        throw UsageError("sweep variable must be one of c, p, eta1");
    }
    if (!(s.start < s.end)) {
        throw UsageError("sweep start must be below its end");
    }
    return s;
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct Row {
    double x = 0.0;
    double quantum = 0.0;
    double noncontextual = 0.0;
    std::string branch;
};

inline std::string render_csv(const std::vector<Row> &rows, bool with_branch) {
    std::string out = with_branch ? "x,quantum,noncontextual,branch\n" : "x,quantum,noncontextual\n";
    for (const auto &r : rows) {
        out += fmt(r.x) + "," + fmt(r.quantum) + "," + fmt(r.noncontextual);
        if (with_branch) {
            out += "," + r.branch;
        }
        out += "\n";
    }
    return out;
}

inline std::vector<Row> compute_rows(std::size_t count, const std::function<Row(std::size_t)> &make) {
    std::vector<Row> rows(count);
    parallel_for(count, [&](std::size_t i) { rows[i] = make(i); });
    return rows;
}

/// Writes to the file named by `path`, or to `out` when the path is empty.
inline void emit(const std::string &text, const std::string &path, std::ostream &out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw UsageError("cannot write " + path);
    }
    f << text;
}

struct Options {
    std::string task;
    std::optional<double> c, p, eta1;
    std::string sweep, out, ensemble, rates, alpha, spec, mode;
    std::optional<std::uint64_t> trials, seed;
    std::optional<double> loss;
    bool certify = false;
    std::size_t samples = 50;
};

inline std::vector<double> parse_list(const std::string &text) {
    std::vector<double> v;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::logic_error &) {
            throw UsageError("not a number: " + item);
        }
    }
    return v;
}

inline double need(const std::optional<double> &v, const char *flag) {
    if (!v) {
        throw UsageError(std::string("missing ") + flag);
    }
    return *v;
}

// ---- bounds ----

inline Row bounds_row(const std::string &task, double c, double p, double x) {
    if (task == "med") {
        return {x, helstrom(make_pure_pair({c, 0.0, 0.5, 0.5})).value, guess_nc(c).value, ""};
    }
    if (task == "ud") {
        return {x, ud_quantum(c).value, ud_noncontextual(c).value, ""};
    }
    return {x, mcm_quantum(c, p).value, mcm_noncontextual(c, p).value, ""};
}

/// Quantum strategies are never worse: higher success and confidence, lower inconclusive rate.
inline bool bounds_dominance(const std::string &task, const Row &r) {
    constexpr double tol = 1e-12;
    return task == "ud" ? r.quantum <= r.noncontextual + tol : r.quantum >= r.noncontextual - tol;
}

inline int cmd_bounds(const Options &o, std::ostream &out, std::ostream &err) {
    if (o.task != "med" && o.task != "ud" && o.task != "mcm") {
        throw UsageError("--task must be med, ud or mcm");
    }
    const bool pair_task = o.task != "mcm";
    if (pair_task && o.p) {
        throw UsageError("--p applies to the mcm task only");
    }
    std::vector<Row> rows;
    if (!o.sweep.empty()) {
        const SweepSpec s = parse_sweep(o.sweep);
        if (s.variable == "eta1" || (pair_task && s.variable != "c")) {
            throw UsageError("cannot sweep " + s.variable + " for task " + o.task);
        }
        const bool over_c = s.variable == "c";
        const double c = over_c ? 0.0 : need(o.c, "--c");
        const double p = (pair_task || !over_c) ? 0.0 : need(o.p, "--p");
        rows = compute_rows(s.steps, [&](std::size_t i) {
            const double x = s.at(i);
            return over_c ? bounds_row(o.task, x, p, x) : bounds_row(o.task, c, x, x);
        });
    } else {
        const double c = need(o.c, "--c");
        const double p = pair_task ? 0.0 : need(o.p, "--p");
        rows.push_back(bounds_row(o.task, c, p, pair_task ? c : p));
    }
    for (const auto &r : rows) {
        if (!bounds_dominance(o.task, r)) {
            err << "dominance check failed at x=" << fmt(r.x) << "\n";
            return kVerifyFailed;
        }
    }
    emit(render_csv(rows, false), o.out, out);
    return kOk;
}

// ---- certify ----

inline int cmd_certify(const Options &o, std::ostream &out, std::ostream &err) {
    if (!o.ensemble.empty()) {
        const Ensemble e = ensemble_from_json(read_json_file(o.ensemble));
        if (o.rates.empty()) {
            throw UsageError("--ensemble needs --rates");
        }
        const auto eta = parse_list(o.rates);
        std::vector<double> alpha = o.alpha.empty() ? std::vector<double>(eta.size(), 0.0) : parse_list(o.alpha);
        if (o.alpha.empty()) {
            alpha[0] = 1.0;
        }
        const auto rep = certify_general(e, WeightVector{alpha}, OutcomeRates::complete(eta));
        emit(general_report_to_json(rep).dump(2) + "\n", o.out, out);
        return kOk;
    }
    const double p = o.p.value_or(0.0);
    if (!o.sweep.empty()) {
        const SweepSpec s = parse_sweep(o.sweep);
        const auto rows = compute_rows(s.steps, [&](std::size_t i) {
            const double x = s.at(i);
            const double c = s.variable == "c" ? x : need(o.c, "--c");
            const double pp = s.variable == "p" ? x : p;
            const double eta = s.variable == "eta1" ? x : need(o.eta1, "--eta1");
            const auto q = certify_qubit(c, pp, eta);
            return Row{x, q.value, nc_certified(c, pp, eta).value, std::string(to_string(q.branch))};
        });
        for (const auto &r : rows) {
            if (r.quantum < r.noncontextual - 1e-12) {
                err << "dominance check failed at x=" << fmt(r.x) << "\n";
                return kVerifyFailed;
            }
        }
        emit(render_csv(rows, true), o.out, out);
        return kOk;
    }
    const double c = need(o.c, "--c");
    const double eta = need(o.eta1, "--eta1");
    const auto rep = certify_qubit(c, p, eta);
    const auto nc = nc_certified(c, p, eta);
    Json j = report_to_json(rep);
    j["c"] = c;
    j["p"] = p;
    j["eta1"] = eta;
    j["noncontextual"] = {{"value", nc.value}, {"branch", nc.branch}};
    emit(j.dump(2) + "\n", o.out, out);
    return kOk;
}

// ---- simulate ----

inline int cmd_simulate(const Options &o, std::ostream &out, std::ostream &) {
    if (o.spec.empty()) {
        throw UsageError("simulate needs --spec");
    }
    ExperimentSpec spec = experiment_from_json(read_json_file(o.spec));
    if (o.trials) spec.trials = *o.trials;
    if (o.seed) spec.seed = *o.seed;
    if (o.loss) spec.loss = *o.loss;
    const Tally t = run(spec);
    Json j = tally_to_json(t);
    if (o.certify) {
        j["certification"] = tally_certification_to_json(certify_from_tally(t, spec.ensemble));
    }
    emit(j.dump(2) + "\n", o.out, out);
    return kOk;
}

// ---- verify ----

inline int cmd_verify(const Options &o, std::ostream &out, std::ostream &) {
    std::ostringstream text;
    bool ok = false;
    if (o.mode == "kkt") {
        const double c = need(o.c, "--c");
        const double p = o.p.value_or(0.0);
        const double eta = need(o.eta1, "--eta1");
        const auto rep = certify_qubit(c, p, eta);
        const auto kkt = verify_kkt(make_pair({c, p, 0.5, 0.5}), WeightVector{{1.0}}, OutcomeRates::complete({eta}),
                                    rep.povm, rep.dual);
        text << "residual,value\n";
        for (const auto &[name, v] : kkt.residuals) {
            text << name << "," << fmt(v) << "\n";
        }
        text << "max," << fmt(kkt.max_residual()) << "\n";
        ok = kkt.ok;
    } else if (o.mode == "oracle") {
        SearchConfig cfg;
        if (o.seed) cfg.seed = *o.seed;
        const auto a = oracle_agreement(o.samples, cfg.seed, cfg);
        text << "oracle,max_abs_difference\n"
             << "guess," << fmt(a.guess) << "\n"
             << "confidence," << fmt(a.confidence) << "\n"
             << "rate_confidence," << fmt(a.rate_confidence) << "\n"
             << "ud," << fmt(a.ud) << "\n"
             << "overshoot," << fmt(a.overshoot) << "\n";
        ok = a.ok();
    } else {
        throw UsageError("--mode must be kkt or oracle");
    }
    text << (ok ? "ok\n" : "FAILED\n");
    emit(text.str(), o.out, out);
    return ok ? kOk : kVerifyFailed;
}

inline int exit_code_for(ErrorKind k) {
    switch (k) {
        case ErrorKind::Infeasible:
        case ErrorKind::InfeasibleRate:
        case ErrorKind::InfeasibleRates: return kInfeasible;
        default: return kUsage;
    }
}

inline int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Quantum and noncontextual bounds for state discrimination and confidence certification",
                 "maxconf"};
    app.require_subcommand(1);
    Options o;

    const auto add_point = [&](CLI::App *sub) {
        sub->add_option("--c", o.c, "confusability |<psi1|psi2>|^2");
        sub->add_option("--p", o.p, "depolarizing noise");
        sub->add_option("--sweep", o.sweep, "var:start:end:steps");
        sub->add_option("--out", o.out, "output file (default stdout)");
    };
    auto *bounds = app.add_subcommand("bounds", "closed-form quantum and noncontextual bounds (CSV)");
    bounds->add_option("--task", o.task, "med | ud | mcm")->required();
    add_point(bounds);

    auto *certify = app.add_subcommand("certify", "certified maximum confidence from an outcome rate");
    add_point(certify);
    certify->add_option("--eta1", o.eta1, "click rate of detector 1");
    certify->add_option("--ensemble", o.ensemble, "ensemble JSON file (general certification)");
    certify->add_option("--rates", o.rates, "comma-separated detector rates");
    certify->add_option("--alpha", o.alpha, "comma-separated confidence weights (default 1,0,...)");

    auto *simulate = app.add_subcommand("simulate", "Monte-Carlo prepare-and-measure run (JSON tally)");
    simulate->add_option("--spec", o.spec, "experiment JSON file")->required();
    simulate->add_option("--trials", o.trials, "override the number of trials");
    simulate->add_option("--seed", o.seed, "override the seed");
    simulate->add_option("--loss", o.loss, "override the loss probability");
    simulate->add_flag("--certify", o.certify, "certify detector 1 from the tally");
    simulate->add_option("--out", o.out, "output file (default stdout)");

    auto *verify = app.add_subcommand("verify", "optimality-condition and oracle checks");
    verify->add_option("--mode", o.mode, "kkt | oracle")->required();
    verify->add_option("--c", o.c);
    verify->add_option("--p", o.p);
    verify->add_option("--eta1", o.eta1);
    verify->add_option("--samples", o.samples, "random instances for the oracle mode");
    verify->add_option("--seed", o.seed);
    verify->add_option("--out", o.out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*bounds) return cmd_bounds(o, out, err);
        if (*certify) return cmd_certify(o, out, err);
        if (*simulate) return cmd_simulate(o, out, err);
        return cmd_verify(o, out, err);
    } catch (const UsageError &e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const Json::exception &e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
}

}  // namespace maxconf::cli
