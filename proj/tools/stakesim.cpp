// Copyright (c) 2026 The stakesim developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <stakesim/analysis.hpp>
#include <stakesim/config.hpp>
#include <stakesim/engine.hpp>
#include <stakesim/oracle_check.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace stakesim;

namespace {

constexpr const char* kManifestSchema = "stakesim.manifest/1";

std::string num(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

/**
 * Writes every file or none: contents go to temporaries first, and the
 * renames happen only after all temporaries are complete.
 */
bool write_all(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files)
{
    std::error_code ec;
    const bool existed = fs::exists(dir, ec);
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        std::cerr << "error: cannot create output directory " << dir << "\n";
        return false;
    }
    std::vector<fs::path> temps;
    auto cleanup = [&] {
        for (const auto& t : temps) fs::remove(t, ec);
        if (!existed) fs::remove(dir, ec);
    };
    for (const auto& [name, content] : files) {
        const fs::path tmp = dir / (name + ".partial");
        temps.push_back(tmp);
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.close();
        if (!out) {
            std::cerr << "error: cannot write " << (dir / name) << "\n";
            cleanup();
            return false;
        }
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
        fs::rename(temps[i], dir / files[i].first, ec);
        if (ec) {
            std::cerr << "error: cannot write " << (dir / files[i].first) << "\n";
            cleanup();
            return false;
        }
    }
    return true;
}

struct SimulateArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> slots;
    std::string out;
    std::string format{"text"};
};

int cmd_simulate(const SimulateArgs& a)
{
    SimConfig cfg;
    try {
        cfg = load_config(a.config);
        if (a.seed) cfg.seed = *a.seed;
        if (a.slots) cfg.slots = *a.slots;
        cfg.validate();
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << a.config << ": " << e.what() << "\n";
        return 2;
    }
    const RunLog log = run(cfg);
    const nlohmann::json summary = summary_json(log);
    if (!a.out.empty()) {
        const nlohmann::json manifest = {{"schema", kManifestSchema},
                                         {"config_path", a.config},
                                         {"config", cfg.to_json()},
                                         {"output_dir", a.out},
                                         {"runlog_schema", kRunLogSchema},
                                         {"summary_schema", kSummarySchema}};
        if (!write_all(a.out, {{"manifest.json", manifest.dump(2) + "\n"},
                               {"runlog.jsonl", runlog_jsonl(log)},
                               {"summary.json", summary.dump(2) + "\n"}})) {
            return 1;
        }
    }
    if (a.format == "structured") {
        std::cout << summary.dump(2) << "\n";
    } else {
        std::cout << summary_text(log);
    }
    return 0;
}

struct AnalyzeArgs {
    std::string format{"text"};
    std::string out;
};

int emit(const AnalyzeArgs& a, const nlohmann::json& record, const std::string& text)
{
    if (a.format == "structured") {
        std::cout << record.dump(2) << "\n";
    } else {
        std::cout << text << "\n";
    }
    if (!a.out.empty()) {
        const fs::path p(a.out);
        if (!write_all(p.has_parent_path() ? p.parent_path() : fs::path("."), {{p.filename().string(), record.dump(2) + "\n"}})) {
            return 1;
        }
    }
    return 0;
}

int cmd_sweep(double T, double from, double to, double step, const std::string& out, const std::string& format)
{
    if (!(step > 0.0)) {
        std::cerr << "error: step must be positive\n";
        return 2;
    }
    if (!(from >= 0.0) || !(to >= from) || to > 1.0) {
        std::cerr << "error: the alpha range must satisfy 0 <= from <= to <= 1\n";
        return 2;
    }
    std::vector<double> alphas;
    const auto n = static_cast<std::uint64_t>(std::floor((to - from) / step + 1e-9)) + 1;
    for (std::uint64_t i = 0; i < n; ++i) alphas.push_back(std::round((from + i * step) * 1e12) / 1e12);
    const auto rows = analysis::sweep_alpha(T, alphas);
    const std::string csv = analysis::sweep_csv(rows);
    const std::string json = analysis::sweep_json(T, rows);
    if (!out.empty() && !write_all(out, {{"sweep.csv", csv}, {"sweep.json", json}})) return 1;
    std::cout << (format == "structured" ? json : csv);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"stakesim: proof-of-stake longest-chain simulator and analysis"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "run a configured simulation");
    simulate->add_option("--config", sim.config, "YAML run configuration")->required();
    simulate->add_option("--seed", sim.seed, "override the configured seed");
    simulate->add_option("--slots", sim.slots, "override the configured slot count");
    simulate->add_option("--out", sim.out, "output directory for manifest, run log and summary");
    simulate->add_option("--format", sim.format, "stdout format")->check(CLI::IsMember({"text", "structured"}));

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "closed-form analysis");
    analyze->require_subcommand(1);
    analyze->add_option("--format", an.format, "stdout format")->check(CLI::IsMember({"text", "structured"}));
    analyze->add_option("--out", an.out, "write the structured record to this file");
    double alpha = 0, T = 0, failure = 0, x0 = 1, y0 = 0;
    std::uint64_t ell = 1, blocks = 1, D = 0, lambda = 1, k = 0;
    auto* race = analyze->add_subcommand("race", "attacker win probability of a race of ell blocks");
    race->add_option("alpha", alpha)->required();
    race->add_option("ell", ell)->required();
    auto* window = analyze->add_subcommand("window", "smallest safe race length");
    window->add_option("alpha", alpha)->required();
    window->add_option("T", T)->required();
    auto* threshold = analyze->add_subcommand("threshold", "per-block tolerance from a lifetime policy");
    threshold->add_option("blocks", blocks)->required();
    threshold->add_option("failure", failure)->required();
    auto* unas = analyze->add_subcommand("unas-bound", "undetectable nothing-at-stake rate multiplier");
    unas->add_option("D", D)->required();
    unas->add_option("lambda", lambda)->required();
    auto* fork = analyze->add_subcommand("fork-trajectory", "expected exponential-forking trajectory");
    fork->add_option("alpha", alpha)->required();
    fork->add_option("x0", x0)->required();
    fork->add_option("y0", y0)->required();
    fork->add_option("k", k)->required();

    double sw_T = 2e-16, sw_from = 0.01, sw_to = 0.49, sw_step = 0.01;
    std::string sw_out, sw_format = "text";
    auto* sweep = app.add_subcommand("sweep", "alpha versus smallest safe window");
    sweep->add_option("--threshold", sw_T, "tolerance T");
    sweep->add_option("--from", sw_from, "first alpha");
    sweep->add_option("--to", sw_to, "last alpha");
    sweep->add_option("--step", sw_step, "alpha step");
    sweep->add_option("--out", sw_out, "output directory for sweep.csv and sweep.json");
    sweep->add_option("--format", sw_format, "stdout format")->check(CLI::IsMember({"text", "structured"}));

    OracleCheckOptions oc;
    auto* oracle = app.add_subcommand("oracle-check", "closed forms against independent oracles");
    oracle->add_option("--seed", oc.seed, "seed for the Monte Carlo and engine oracles");
    oracle->add_option("--trials", oc.trials, "Monte Carlo trials per point");
    oracle->add_option("--engine-trials", oc.engine_trials, "double-spend races through the engine");
    oracle->add_option("--corrupt-tolerance", oc.corrupt, "force the named check's tolerance negative")
        ->group(""); // test hook

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) return cmd_simulate(sim);
        if (*analyze) {
            if (*race) {
                const double p = analysis::race_probability(alpha, ell);
                return emit(an, {{"query", "race"}, {"alpha", alpha}, {"ell", ell}, {"probability", p}}, num(p));
            }
            if (*window) {
                const auto w = analysis::min_safe_window(alpha, T);
                nlohmann::json r = {{"query", "window"}, {"alpha", alpha}, {"T", T}};
                r["ell_star"] = w ? nlohmann::json(*w) : nlohmann::json(nullptr);
                if (w) r["p_at_ell_star"] = analysis::race_probability(alpha, *w);
                return emit(an, r, w ? std::to_string(*w) : std::string("unsafe at any window"));
            }
            if (*threshold) {
                const double t = analysis::lifetime_threshold(blocks, failure);
                return emit(an, {{"query", "threshold"}, {"blocks", blocks}, {"failure", failure}, {"T", t}}, num(t));
            }
            if (*unas) {
                const auto b = analysis::unas_rate_bound(D, lambda);
                return emit(an,
                            {{"query", "unas-bound"},
                             {"D", D},
                             {"lambda", lambda},
                             {"multiplier", b.multiplier},
                             {"defense_required", b.defense_required}},
                            num(b.multiplier) + (b.defense_required ? " (defense required: D < lambda/2)" : ""));
            }
            if (*fork) {
                const auto f = analysis::exp_fork_trajectory(alpha, x0, y0, k);
                return emit(an,
                            {{"query", "fork-trajectory"}, {"alpha", alpha}, {"x0", x0}, {"y0", y0}, {"k", k},
                             {"x", f.x}, {"y", f.y}},
                            "x " + num(f.x) + " y " + num(f.y));
            }
        }
        if (*sweep) return cmd_sweep(sw_T, sw_from, sw_to, sw_step, sw_out, sw_format);
        if (*oracle) {
            const auto checks = run_oracle_checks(oc);
            std::cout << oracle_report(checks);
            return std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.pass; }) ? 0 : 1;
        }
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
