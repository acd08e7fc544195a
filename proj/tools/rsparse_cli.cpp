// rsparse command-line driver.
//
// Exit codes: 0 success, 2 usage/config error, 3 condition check failed,
// 4 internal numerical failure.

#include "rsparse/rsparse.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rsparse;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitCondition = 3;
constexpr int kExitNumerical = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string config;
    std::string dict;
    std::uint64_t seed = 0;
    std::size_t trials = 1000;
    std::string out = ".";
    unsigned threads = 1;
    bool json = false;
    bool renormalize = false;
};

void add_common(CLI::App* cmd, Common& c, bool experiment) {
    cmd->add_option("--config", c.config, "JSON config file; flags override its fields");
    cmd->add_option("--dict", c.dict, "dictionary file (.dict.json)");
    cmd->add_flag("--renormalize", c.renormalize, "renormalize columns when loading");
    cmd->add_flag("--json", c.json, "print JSON only");
    if (experiment) {
        cmd->add_option("--seed", c.seed, "master seed");
        cmd->add_option("--trials", c.trials, "number of trials")->check(CLI::PositiveNumber);
        cmd->add_option("--out", c.out, "output directory");
        cmd->add_option("--threads", c.threads, "worker threads (0 = all cores)");
    }
}

//! Fills options left unset on the command line from the config file.
void apply_config(CLI::App* cmd, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw UsageError(std::string("malformed config: ") + e.what());
    }
    if (!cfg.is_object()) throw UsageError("config must be a JSON object");
    for (const auto& [key, value] : cfg.items()) {
        CLI::Option* opt = nullptr;
        try {
            opt = cmd->get_option("--" + key);
        } catch (const CLI::OptionNotFound&) {
            throw UsageError("unknown config field '" + key + "'");
        }
        if (opt->count() > 0) continue;
        std::vector<std::string> tokens;
        const auto token = [](const json& v) {
            if (v.is_string()) return v.get<std::string>();
            if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
            return v.dump();
        };
        if (value.is_array())
            for (const auto& v : value) tokens.push_back(token(v));
        else
            tokens.push_back(token(value));
        if (opt->get_type_size() == 0) {  // flag
            if (value.is_boolean() && !value.get<bool>()) continue;
            opt->add_result(std::string("true"));
        } else {
            opt->add_result(tokens);
        }
        opt->run_callback();
    }
}

PartitionedDictionary load(const Common& c) {
    if (c.dict.empty()) throw UsageError("--dict is required");
    if (!fs::exists(c.dict)) throw UsageError("dictionary file not found: " + c.dict);
    LoadOptions lo;
    lo.renormalize = c.renormalize;
    try {
        return load_dictionary(c.dict, lo);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

void require_theorem_domain(const DictionaryStats& st) {
    if (st.N <= 2)
        throw UsageError("refusing: the sparsity theorems assume N > 2, dictionary has N = " +
                         std::to_string(st.N));
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path.string());
    out << content;
}

fs::path ensure_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw UsageError("cannot create output directory " + dir);
    return p;
}

std::string fixed(double v, int digits = 8) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void print_stats(const DictionaryStats& st) {
    std::cout << "m = " << st.m << ", N = " << st.N << ", Na = " << st.Na << ", Nb = " << st.Nb << '\n'
              << "mu    = " << fixed(st.mu) << "   (Welch bound " << fixed(st.welch) << ")\n"
              << "muA   = " << fixed(st.muA) << (st.muAUndefined ? "   (undefined, < 2 columns)" : "") << '\n'
              << "muB   = " << fixed(st.muB) << (st.muBUndefined ? "   (undefined, < 2 columns)" : "") << '\n'
              << "||A|| = " << fixed(st.specA) << "   | ||A||^2 - Na/m | = " << fixed(st.tightDevA, 3) << '\n'
              << "||B|| = " << fixed(st.specB) << "   | ||B||^2 - Nb/m | = " << fixed(st.tightDevB, 3) << '\n'
              << "||D|| = " << fixed(st.specD) << '\n';
}

void print_report(const ConditionReport& r) {
    std::cout << "condition        lhs              rhs              satisfied\n";
    for (const auto& c : r.conditions) {
        char line[160];
        std::snprintf(line, sizeof line, "%-10s %16.9g %16.9g   %s %s\n", condition_name(c.id).c_str(),
                      c.lhs, c.rhs, c.satisfied ? "yes" : "no", c.note.c_str());
        std::cout << line;
    }
    std::cout << "P0 premise: " << (r.p0Premise ? "holds" : "fails")
              << ", P0+P1 premise: " << (r.p0p1Premise ? "holds" : "fails") << '\n';
}

// ---------------------------------------------------------------------------

struct BuildArgs {
    std::size_t mub = 0, twoOnb = 0, simplex = 0;
    std::vector<std::size_t> random;
    std::optional<std::size_t> na;
    std::string output;
};

int cmd_build_dict(const Common& c, const BuildArgs& a) {
    const int chosen = (a.mub > 0) + (a.twoOnb > 0) + (a.simplex > 0) + !a.random.empty();
    if (chosen != 1)
        throw UsageError("choose exactly one of --mub, --two-onb, --random, --simplex");
    auto make = [&]() -> PartitionedDictionary {
        try {
            if (a.mub) return build_mub(a.mub);
            if (a.twoOnb) return build_two_onb(a.twoOnb);
            if (a.simplex) return build_simplex_frame(a.simplex, a.na.value_or(0));
            if (a.random.size() != 2) throw UsageError("--random takes m N");
            return build_random_dictionary(a.random[0], a.random[1], c.seed, a.na.value_or(0));
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    };
    PartitionedDictionary d = make();
    if (a.na && (a.mub || a.twoOnb)) {
        if (*a.na > d.cols()) throw UsageError("--na exceeds N");
        d = d.with_split(*a.na);
    }
    if (!a.output.empty()) save_dictionary(d, a.output);
    const auto st = analyze(d);
    if (c.json)
        std::cout << to_json(st).dump(2) << '\n';
    else
        print_stats(st);
    return kExitOk;
}

int cmd_analyze(const Common& c) {
    const auto d = load(c);
    const auto st = analyze(d);
    json j = to_json(st);
    if (st.N > 2) j["scaling"] = to_json(scaling_report(st));
    if (c.json) {
        std::cout << j.dump(2) << '\n';
    } else {
        print_stats(st);
        if (st.N > 2) {
            const auto sr = scaling_report(st);
            std::cout << "scaling ratios: mu sqrt(m) = " << fixed(sr.r1, 6)
                      << ", muA m/log N = " << fixed(sr.r2, 6) << ", Na log N/m = " << fixed(sr.r3, 6)
                      << ", ||B||^2 m/(Nb log N) = " << fixed(sr.r4, 6)
                      << ", ||A||^2||B||^2 m/(Nb log N) = " << fixed(sr.r5, 6) << '\n';
        }
    }
    return kExitOk;
}

struct CheckArgs {
    std::size_t na = 0, nb = 0;
    double s = 1.0, gamma = 0.5;
    bool maximize = false;
    bool theorem1 = false;
    double c = kTwoOnbConstant;
};

int cmd_check(const Common& c, const CheckArgs& a) {
    const auto d = load(c);
    const auto st = analyze(d);
    require_theorem_domain(st);
    if (a.s < 1.0 || a.gamma < 0.0 || a.gamma > 1.0)
        throw UsageError("need s >= 1 and gamma in [0, 1]");
    json out;
    ConditionReport report;
    if (a.maximize) {
        const auto res = max_sparsity_search(st, a.s, default_gamma_grid());
        report = res.report;
        out["maximize"] = {{"nA", res.best.nA}, {"nB", res.best.nB}, {"gamma", res.best.gamma}};
        json per = json::array();
        for (const auto& p : res.perGamma) per.push_back({{"gamma", p.gamma}, {"nA", p.nA}, {"nB", p.nB}});
        out["per_gamma"] = per;
    } else {
        report = check_theorem2(st, {a.s, a.gamma, a.na, a.nb});
    }
    out["theorem2"] = to_json(report);
    bool ok = report.p0p1Premise;
    if (a.theorem1) {
        if (st.mu <= 0.0) throw UsageError("two-ONB conditions need mu > 0");
        const auto t1 = check_theorem1(st.mu, st.N, {a.s, a.gamma, a.na, a.nb}, a.c);
        out["theorem1"] = to_json(t1);
        ok = ok && t1.p0p1Premise;
    }
    out["dictionary"] = to_json(st);
    if (c.json) {
        std::cout << out.dump(2) << '\n';
    } else {
        if (a.maximize)
            std::cout << "max sparsity: nA = " << out["maximize"]["nA"] << ", nB = " << out["maximize"]["nB"]
                      << ", gamma = " << out["maximize"]["gamma"] << '\n';
        print_report(report);
        std::cout << out.dump(2) << '\n';
    }
    return ok ? kExitOk : kExitCondition;
}

struct ExperimentArgs {
    std::size_t na = 0, nb = 0;
    double s = 1.0;
    double q = 4.0;
    std::string strategy = "first-n";
    bool sweep = false;
    std::size_t naMax = 0, nbMax = 0;
    std::vector<std::string> strategies{"first-n", "random-baseline"};
    std::string magnitude = "half-normal-modulus";
    std::size_t maxIterations = 100000;
};

SupportStrategy strategy_from(const std::string& name, std::uint64_t seed) {
    try {
        return parse_strategy(name, seed);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

int cmd_smin(const Common& c, const ExperimentArgs& a) {
    const auto d = load(c);
    const auto st = analyze(d);
    require_theorem_domain(st);
    if (a.na > st.Na || a.nb > st.Nb || a.na + a.nb == 0)
        throw UsageError("need 1 <= nA + nB, nA <= Na and nB <= Nb");
    if (a.s < 1.0) throw UsageError("s must be >= 1");
    const auto res = run_smin_trials(d, st, strategy_from(a.strategy, c.seed), a.na, a.nb, c.trials,
                                     {a.s, c.seed, c.threads, 20});
    const auto dir = ensure_dir(c.out);
    write_file(dir / "smin_trials.csv", report::smin_csv(res));
    const auto summary = report::smin_summary(res, st);
    write_file(dir / "smin_summary.json", summary.dump(2) + "\n");
    write_file(dir / "smin_histogram.svg", report::smin_svg(res));
    if (c.json) {
        std::cout << summary.dump(2) << '\n';
    } else {
        std::cout << "trials " << c.trials << ", sigma_min <= 1/sqrt(2) in " << res.failures
                  << " (rate " << res.empiricalFailureRate << "), N^-s = " << res.lemma1Bound << '\n'
                  << "conditions on A and B " << (res.conditionsHold ? "hold" : "do not hold")
                  << ", proof-chain violations: ";
        std::size_t v = 0;
        for (auto k : res.violations) v += k;
        std::cout << v << "\nwrote " << (dir / "smin_trials.csv").string() << '\n';
    }
    std::size_t v = 0;
    for (auto k : res.violations) v += k;
    return v == 0 ? kExitOk : kExitNumerical;
}

int cmd_moments(const Common& c, const ExperimentArgs& a) {
    const auto d = load(c);
    const auto st = analyze(d);
    require_theorem_domain(st);
    if (a.na > st.Na || a.nb > st.Nb || a.nb == 0)
        throw UsageError("need 1 <= nB <= Nb and nA <= Na");
    if (a.q < moment_q_floor(a.nb))
        throw UsageError("q below the validity floor " + std::to_string(moment_q_floor(a.nb)));
    if (c.trials < 1000) throw UsageError("moment estimation needs --trials >= 1000");
    const auto res = estimate_moment(d, st, strategy_from(a.strategy, c.seed), a.na, a.nb, a.q,
                                     c.trials, {c.seed, c.threads, 1000});
    const auto dir = ensure_dir(c.out);
    write_file(dir / "moments_trials.csv", report::moments_csv(res));
    const auto summary = report::moments_summary(res, c.seed, st);
    write_file(dir / "moments_summary.json", summary.dump(2) + "\n");
    write_file(dir / "moments.svg", report::moments_svg(res));
    if (c.json) {
        std::cout << summary.dump(2) << '\n';
    } else {
        std::cout << "[E xiB^q]^(1/q) = " << res.xiB.estimate << " (95% up to " << res.xiB.upper95
                  << "), bound " << res.xiB.bound << '\n'
                  << "[E xiX^q]^(1/q) = " << res.xiX.estimate << " (95% up to " << res.xiX.upper95
                  << "), bound " << res.xiX.bound << (res.xiX.boundValid ? "" : " (q below floor)") << '\n';
    }
    return kExitOk;
}

int cmd_recover(const Common& c, const ExperimentArgs& a) {
    const auto d = load(c);
    const auto st = analyze(d);
    std::vector<std::size_t> naRange, nbRange;
    std::vector<SupportStrategy> strategies;
    if (a.sweep) {
        if (a.naMax > st.Na || a.nbMax > st.Nb) throw UsageError("sweep range exceeds Na or Nb");
        for (std::size_t i = 0; i <= a.naMax; ++i) naRange.push_back(i);
        for (std::size_t i = 0; i <= a.nbMax; ++i) nbRange.push_back(i);
        for (const auto& s : a.strategies) strategies.push_back(strategy_from(s, c.seed));
    } else {
        if (a.na > st.Na || a.nb > st.Nb) throw UsageError("nA or nB exceeds the block size");
        naRange = {a.na};
        nbRange = {a.nb};
        strategies.push_back(strategy_from(a.strategy, c.seed));
    }
    SweepOptions opt;
    opt.masterSeed = c.seed;
    opt.threads = c.threads;
    try {
        opt.coeff.magnitudeLaw = parse_magnitude_law(a.magnitude);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    opt.solver.maxIterations = a.maxIterations;
    const auto grid = run_recovery_sweep(d, naRange, nbRange, c.trials, strategies, opt);
    const auto dir = ensure_dir(c.out);
    write_file(dir / "recover_grid.csv", report::grid_csv(grid));
    const auto summary = report::grid_summary(grid, c.seed, st);
    write_file(dir / "recover_summary.json", summary.dump(2) + "\n");
    write_file(dir / "recover.svg", report::grid_svg(grid));
    if (c.json) {
        std::cout << summary.dump(2) << '\n';
    } else {
        for (const auto& cell : grid.cells)
            std::cout << cell.strategy << " nA=" << cell.nA << " nB=" << cell.nB << " rate=" << cell.rate()
                      << '\n';
    }
    return kExitOk;
}

int cmd_report(const Common& c) {
    const fs::path dir(c.out);
    if (!fs::is_directory(dir)) throw UsageError("no such output directory: " + c.out);
    std::string md = "# Experiment report\n\n";
    bool any = false;
    for (const char* name : {"smin_summary.json", "moments_summary.json", "recover_summary.json"}) {
        const auto p = dir / name;
        if (!fs::exists(p)) continue;
        std::ifstream in(p);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw UsageError("malformed " + p.string() + ": " + e.what());
        }
        any = true;
        const std::string exp = j.value("experiment", std::string(name));
        md += "## " + exp + "\n\n| field | value |\n|---|---|\n";
        for (const auto& [k, v] : j.items())
            if (!v.is_object() && !v.is_array()) md += "| " + k + " | " + v.dump() + " |\n";
        for (const char* sub : {"xiB", "xiX"})
            if (j.contains(sub))
                for (const auto& [k, v] : j[sub].items())
                    md += "| " + std::string(sub) + "." + k + " | " + v.dump() + " |\n";
        md += "\n";
    }
    if (!any) throw UsageError("no experiment summaries found in " + c.out);
    write_file(dir / "report.md", md);
    std::cout << md;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rsparse: robust sparsity thresholds, sub-dictionary conditioning and basis pursuit experiments"};
    app.require_subcommand(1);

    Common common;
    BuildArgs build;
    CheckArgs check;
    ExperimentArgs exp;

    auto* cBuild = app.add_subcommand("build-dict", "construct a dictionary and print its statistics");
    add_common(cBuild, common, false);
    cBuild->add_option("--seed", common.seed, "seed for --random");
    cBuild->add_option("--mub", build.mub, "p + 1 mutually unbiased bases of C^p (p odd prime)");
    cBuild->add_option("--two-onb", build.twoOnb, "identity + DFT basis of C^m");
    cBuild->add_option("--random", build.random, "m N: random unit columns")->expected(2);
    cBuild->add_option("--simplex", build.simplex, "harmonic simplex frame, m + 1 columns in C^m");
    cBuild->add_option("--na", build.na, "split point Na (size of A)");
    cBuild->add_option("-o,--output", build.output, "output .dict.json path");

    auto* cAnalyze = app.add_subcommand("analyze", "coherence, spectral norms and scaling ratios");
    add_common(cAnalyze, common, false);

    auto* cCheck = app.add_subcommand("check", "evaluate the sparsity conditions");
    add_common(cCheck, common, false);
    cCheck->add_option("--na", check.na, "nonzeros on A");
    cCheck->add_option("--nb", check.nb, "nonzeros on B");
    cCheck->add_option("--s", check.s, "probability exponent s >= 1");
    cCheck->add_option("--gamma", check.gamma, "split gamma in [0, 1]");
    cCheck->add_flag("--maximize", check.maximize, "search the largest feasible (nA, nB, gamma)");
    cCheck->add_flag("--theorem1", check.theorem1, "also evaluate the two-ONB conditions");
    cCheck->add_option("--c", check.c, "two-ONB constant c");

    auto add_experiment = [&](CLI::App* cmd) {
        add_common(cmd, common, true);
        cmd->add_option("--na", exp.na, "nonzeros on A");
        cmd->add_option("--nb", exp.nb, "nonzeros on B");
        cmd->add_option("--strategy", exp.strategy, "A-support strategy: first-n, spread, random-baseline");
    };
    auto* cSmin = app.add_subcommand("smin", "Monte Carlo smallest singular value and proof chain");
    add_experiment(cSmin);
    cSmin->add_option("--s", exp.s, "probability exponent s >= 1");
    auto* cMoments = app.add_subcommand("moments", "Monte Carlo moments of the hollow Gram norms");
    add_experiment(cMoments);
    cMoments->add_option("--q", exp.q, "moment order");
    auto* cRecover = app.add_subcommand("recover", "basis pursuit recovery experiments");
    add_experiment(cRecover);
    cRecover->add_flag("--sweep", exp.sweep, "sweep nA in [0, na-max] and nB in [0, nb-max]");
    cRecover->add_option("--na-max", exp.naMax, "sweep upper limit for nA");
    cRecover->add_option("--nb-max", exp.nbMax, "sweep upper limit for nB");
    cRecover->add_option("--strategies", exp.strategies, "A-support strategies for the sweep");
    cRecover->add_option("--magnitude", exp.magnitude, "magnitude law: half-normal-modulus, uniform, unit");
    cRecover->add_option("--max-iterations", exp.maxIterations, "ADMM iteration cap");

    auto* cReport = app.add_subcommand("report", "summarize experiment outputs in a directory");
    cReport->add_option("--out", common.out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        apply_config(cmd, common.config);
        if (cmd == cBuild) return cmd_build_dict(common, build);
        if (cmd == cAnalyze) return cmd_analyze(common);
        if (cmd == cCheck) return cmd_check(common, check);
        if (cmd == cSmin) return cmd_smin(common, exp);
        if (cmd == cMoments) return cmd_moments(common, exp);
        if (cmd == cRecover) return cmd_recover(common, exp);
        return cmd_report(common);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}
