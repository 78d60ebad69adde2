#include "t20/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "t20/error.hpp"
#include "t20/profile_store.hpp"
#include "t20/report.hpp"
#include "t20/scenario.hpp"
#include "t20/service.hpp"

namespace t20 {

using json = nlohmann::json;

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kInvalid = 2, kInfeasible = 3 };

struct Options {
    std::string scenario;
    std::string out;
    std::string profiles;
    std::uint64_t seed = 0;
    std::uint64_t sims = kDefaultEvalSims;
    unsigned threads = 0;
    std::string order;
    std::string plan;
    // batting search
    std::uint64_t n1 = BattingSearchConfig{}.n1;
    std::uint64_t n2 = BattingSearchConfig{}.n2;
    std::size_t k = BattingSearchConfig{}.k;
    // bowling search
    SAConfig sa;
    // profiles build
    std::string corpus;
    std::vector<std::string> exclude;
    double n_min = kDefaultMinDeliveries;
    // serve
    std::string bind = "127.0.0.1";
    int port = 8080;
    unsigned workers = 2;
    std::string fixtures;
};

std::optional<ProfileStore> open_store(const Options& o) {
    std::string dir = o.profiles;
    if (dir.empty())
        if (const char* env = std::getenv(kProfileStoreEnv)) dir = env;
    if (dir.empty()) return std::nullopt;
    return load_store(dir);
}

/// A decision is either a comma-separated id list or a file holding a JSON
/// array of ids.
std::vector<std::string> parse_decision(const std::string& text) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(text, ec)) {
        std::ifstream in(text);
        try {
            return json::parse(in).get<std::vector<std::string>>();
        } catch (const json::exception& e) {
            throw ValidationError("decision", text + ": expected a JSON array of ids (" + e.what() + ")");
        }
    }
    std::vector<std::string> ids;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(' ');
        const auto e = item.find_last_not_of(' ');
        ids.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
    }
    return ids;
}

void emit(const json& doc, const Options& o, std::ostream& out) {
    const std::string text = dump_report(doc);
    if (o.out.empty() || o.out == "-") {
        out << text;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw Error("cannot write " + o.out);
    f << text;
}

BattingSearchConfig batting_config(const Options& o) {
    BattingSearchConfig c;
    c.n1 = o.n1;
    c.n2 = o.n2;
    c.k = o.k;
    c.seed = o.seed;
    c.sim.threads = o.threads;
    return c;
}

SAConfig sa_config(const Options& o) {
    SAConfig c = o.sa;
    c.seed = o.seed;
    c.sim.threads = o.threads;
    return c;
}

Scenario scenario_from(const Options& o) {
    const auto store = open_store(o);
    return load_scenario_file(o.scenario, store ? &*store : nullptr);
}

void print_progress(std::ostream& err, const JobProgress& p) {
    if (p.total == 0) return;
    const auto stride = std::max<std::uint64_t>(1, p.total / 10);
    if (p.step % stride == 0 || p.step == p.total)
        err << "  progress " << p.step << "/" << p.total << " best " << p.best_v_hat << '\n';
}

void add_common(CLI::App* cmd, Options& o, bool with_out = true) {
    cmd->add_option("--scenario", o.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Root seed");
    cmd->add_option("--threads", o.threads, "Simulation threads (0 = all cores)");
    cmd->add_option("--profiles", o.profiles, std::string("Profile store directory (default $") + kProfileStoreEnv + ")");
    if (with_out) cmd->add_option("--out", o.out, "Output file (default stdout)");
}

void add_batting_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--n1", o.n1, "Screening simulations per order");
    cmd->add_option("--n2", o.n2, "Refinement simulations per retained order");
    cmd->add_option("--top-k", o.k, "Orders retained for refinement");
}

void add_bowling_flags(CLI::App* cmd, Options& o, bool standalone) {
    cmd->add_option("--steps", o.sa.steps, "Annealing steps");
    cmd->add_option("--t0", o.sa.t0, "Initial temperature");
    cmd->add_option("--eps", o.sa.eps, "Temperature floor");
    cmd->add_option("--n-fast", o.sa.n_fast, "Simulations per proposal");
    cmd->add_option(standalone ? "--sims,--n-refine" : "--n-refine", o.sa.n_refine, "Simulations per refined plan");
    if (standalone) cmd->add_option("--top-k", o.sa.top_k, "Unique plans refined");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"T20 tactical decision engine: evaluate, optimize and audit batting orders and bowling plans",
                 "t20ctl"};
    app.require_subcommand(1);
    Options o;

    auto* profiles = app.add_subcommand("profiles", "Build or fit profile tables");
    profiles->require_subcommand(1);
    auto* build = profiles->add_subcommand("build", "Build blended profiles from a ball-by-ball corpus");
    build->add_option("--corpus", o.corpus, "Delivery CSV")->required()->check(CLI::ExistingFile);
    build->add_option("--exclude", o.exclude, "Match id to leave out (repeatable, or comma-separated)")
        ->delimiter(',');
    build->add_option("--out", o.out, "Output store directory")->required();
    build->add_option("--n-min", o.n_min, "Shrinkage constant");
    auto* fit = profiles->add_subcommand("fit", "Fit a scenario's summary rows into full profile tables");
    fit->add_option("--scenario", o.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    fit->add_option("--out", o.out, "Output directory")->required();
    fit->add_option("--profiles", o.profiles, "Profile store directory");

    auto* evaluate = app.add_subcommand("evaluate", "Estimate the value of one order or plan");
    add_common(evaluate, o);
    evaluate->add_option("--sims", o.sims, "Simulations");
    auto* order_opt = evaluate->add_option("--order", o.order, "Batting order: ids comma-separated or a JSON file");
    evaluate->add_option("--plan", o.plan, "Bowling plan: ids comma-separated or a JSON file")->excludes(order_opt);

    auto* optimize = app.add_subcommand("optimize", "Search for the best decision");
    optimize->require_subcommand(1);
    auto* opt_bat = optimize->add_subcommand("batting", "Exhaustive two-pass batting-order search");
    add_common(opt_bat, o);
    add_batting_flags(opt_bat, o);
    opt_bat->add_option("--sims", o.n2, "Alias for --n2");
    auto* opt_bowl = optimize->add_subcommand("bowling", "Simulated-annealing bowling-plan search");
    add_common(opt_bowl, o);
    add_bowling_flags(opt_bowl, o, true);

    auto* audit = app.add_subcommand("audit", "Compare the actual decision with the optimum");
    add_common(audit, o);
    add_batting_flags(audit, o);
    add_bowling_flags(audit, o, false);
    audit->get_option("--top-k")->description("Retained orders (batting) and refined plans (bowling)");
    audit->add_option("--sims", o.sims, "Refinement simulations for either search (sets --n2 and --n-refine)");

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--bind", o.bind, "Listen address");
    serve->add_option("--port", o.port, "Listen port (0 picks a free port)");
    serve->add_option("--workers", o.workers, "Concurrent optimization jobs")->check(CLI::Range(1u, 64u));
    serve->add_option("--profiles", o.profiles, "Profile store directory");
    serve->add_option("--fixtures", o.fixtures, "Directory scenario_file requests resolve against");
    serve->add_option("--threads", o.threads, "Simulation threads per request (0 = all cores)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (*build) {
            const auto result = build_store_from_corpus(o.corpus, o.exclude, o.n_min);
            save_store(o.out, result.store);
            json errors = json::array();
            for (const auto& e : result.row_errors) errors.push_back({{"line", e.line}, {"message", e.message}});
            out << dump_report(json{{"command", "profiles build"},
                                    {"corpus_hash", result.store.corpus_hash},
                                    {"excluded_matches", result.store.excluded_matches},
                                    {"n_min", result.store.n_min},
                                    {"deliveries", result.deliveries},
                                    {"legal_deliveries", result.legal_deliveries},
                                    {"batsmen", result.store.batting.players().size()},
                                    {"bowlers", result.store.bowling.players().size()},
                                    {"row_errors", errors}});
            return kOk;
        }
        if (*fit) {
            const auto s = scenario_from(o);
            write_fitted_profiles(s, o.out);
            double worst_sr = 0.0, worst_pw = 0.0;
            for (const auto& r : s.fit_log) {
                worst_sr = std::max(worst_sr, std::abs(r.sr_residual));
                worst_pw = std::max(worst_pw, std::abs(r.p_w_residual));
            }
            err << "fitted " << s.fit_log.size() << " player-phase rows for '" << s.name
                << "'; max |sr residual| " << worst_sr << ", max |p_w residual| " << worst_pw << '\n';
            return kOk;
        }
        if (*evaluate) {
            const auto s = scenario_from(o);
            EvaluateRequest req;
            req.sims = o.sims;
            req.seed = o.seed;
            req.sim.threads = o.threads;
            if (!o.order.empty()) {
                if (s.kind != ScenarioKind::Batting) throw ValidationError("order", "--order needs a batting scenario");
                req.decision = parse_decision(o.order);
            }
            if (!o.plan.empty()) {
                if (s.kind != ScenarioKind::Bowling) throw ValidationError("plan", "--plan needs a bowling scenario");
                req.decision = parse_decision(o.plan);
            }
            emit(evaluate_report(s, req), o, out);
            return kOk;
        }
        if (*opt_bat) {
            const auto s = scenario_from(o);
            if (s.kind != ScenarioKind::Batting) throw ValidationError("kind", "scenario is not a batting scenario");
            emit(optimize_batting_report(s, batting_config(o), [&](const JobProgress& p) { print_progress(err, p); }),
                 o, out);
            return kOk;
        }
        if (*opt_bowl) {
            const auto s = scenario_from(o);
            if (s.kind != ScenarioKind::Bowling) throw ValidationError("kind", "scenario is not a bowling scenario");
            emit(optimize_bowling_report(s, sa_config(o), [&](const JobProgress& p) { print_progress(err, p); }), o,
                 out);
            return kOk;
        }
        if (*audit) {
            const auto s = scenario_from(o);
            if (audit->count("--top-k") > 0) o.sa.top_k = o.k;
            if (audit->count("--sims") > 0) {
                o.n2 = o.sims;
                o.sa.n_refine = o.sims;
            }
            emit(audit_report(s, batting_config(o), sa_config(o),
                              [&](const JobProgress& p) { print_progress(err, p); }),
                 o, out);
            return kOk;
        }
        if (*serve) {
            ServiceConfig cfg;
            cfg.workers = o.workers;
            cfg.store = open_store(o);
            cfg.fixtures = o.fixtures;
            cfg.sim.threads = o.threads;
            Service service(std::move(cfg));
            const int port = service.bind(o.bind, o.port);
            if (port < 0) {
                err << "error: cannot listen on " << o.bind << ":" << o.port << '\n';
                return kFailure;
            }
            err << "listening on http://" << o.bind << ":" << port << '\n';
            service.run();
            return kOk;
        }
    } catch (const ValidationError& e) {
        err << "error: invalid input\n";
        for (const auto& issue : e.issues()) err << "  " << (issue.field.empty() ? "<root>" : issue.field) << ": "
                                                 << issue.message << '\n';
        return kInvalid;
    } catch (const InfeasibleError& e) {
        err << "error: infeasible (" << e.constraint() << "): " << e.what() << '\n';
        return kInfeasible;
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    return run_cli(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace t20
