#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coswap/engine.hpp"
#include "coswap/errors.hpp"
#include "coswap/scenarios.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFileNotFound = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw coswap::Error("cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void report_events(const coswap::SwapEngine& engine) {
    for (const auto& ev : engine.stats().transfer_events) {
        std::cerr << (ev.accepted ? "applied" : "rejected") << " swap specification "
                  << ev.source_id << " at t=" << ev.time << "\n";
        if (!ev.accepted) std::cerr << ev.diagnostics;
    }
    for (const auto& ev : engine.stats().latch_events)
        std::cerr << ev.condition << " condition for " << ev.target << " latched at t=" << ev.time
                  << "\n";
}

int cmd_run(const std::string& config_path, double start, double end, double step,
            const std::string& out_path, const std::string& transfer_dir, long min_steps,
            long check_every, const std::string& fault_path, const std::string& feed_path,
            const std::vector<std::string>& scheduled) {
    using namespace coswap;

    std::vector<std::string> warnings;
    MultiModelConfig config = parse_multi_model(read_file(config_path), &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

    ModelRegistry registry = builtin_registry();
    ValidationReport report = validate_config(config, registry);
    std::cerr << report.to_string();
    if (!report.ok()) return kExitFailure;

    std::vector<FaultRule> fault_rules;
    if (!fault_path.empty()) fault_rules = parse_fault_rules(read_file(fault_path));

    UnitContext ctx;
    if (!feed_path.empty())
        ctx.feed = std::make_shared<BrokerFeed>(parse_feed_csv(read_file(feed_path)));

    EngineSettings settings{start, end, step, min_steps, check_every};
    SwapEngine engine(std::move(config), registry, settings, ctx, fault_rules);
    if (ctx.feed) engine.add_environment(ctx.feed);

    std::unique_ptr<TransferSource> source;
    ScriptedTransferSource* script = nullptr;
    if (!scheduled.empty()) {
        auto s = std::make_unique<ScriptedTransferSource>();
        script = s.get();
        source = std::move(s);
    } else if (!transfer_dir.empty()) {
        source = std::make_unique<DirectoryTransferSource>(transfer_dir);
    }
    if (script) {
        // --transfer-at TIME=PATH entries; specs are read up front so the
        // run is deterministic, and their columns are pre-declared.
        std::vector<std::string> columns;
        for (const auto& entry : scheduled) {
            auto eq = entry.find('=');
            if (eq == std::string::npos)
                throw Error("--transfer-at wants TIME=PATH, got '" + entry + "'");
            double at = std::stod(entry.substr(0, eq));
            std::string path = entry.substr(eq + 1);
            std::string text = read_file(path);
            MultiModelConfig spec = parse_multi_model(text);
            for (const auto& col : log_columns_for(spec, fault_rules)) columns.push_back(col);
            script->add(at, std::move(text), path);
        }
        engine.predeclare_columns(columns);
    }
    if (source) engine.set_transfer_source(source.get());

    CsvFileSink sink(out_path);
    engine.run(sink);
    report_events(engine);
    std::cerr << engine.stats().iterations << " steps written to " << out_path << "\n";
    return kExitOk;
}

int cmd_validate(const std::string& config_path, const std::string& swap_path) {
    using namespace coswap;

    std::vector<std::string> warnings;
    MultiModelConfig config = parse_multi_model(read_file(config_path), &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

    ModelRegistry registry = builtin_registry();
    ValidationReport report = validate_config(config, registry);
    std::cout << report.to_string();
    bool ok = report.ok();

    if (ok && !swap_path.empty()) {
        // Full check including dry-instantiation, against a freshly
        // initialized context for the base config.
        MultiModelConfig spec = parse_multi_model(read_file(swap_path), &warnings);
        SwapEngine probe(config, registry, {0.0, 1.0, 0.1, 1, 1});
        probe.initialize();
        ValidationReport swap_report = probe.validate_swap_spec(spec);
        std::cout << swap_report.to_string();
        ok = swap_report.ok();
    }

    std::cout << (ok ? "configuration ok\n" : "configuration has errors\n");
    return ok ? kExitOk : kExitFailure;
}

int cmd_scenario(const std::string& name, const std::string& out_path,
                 std::optional<double> transfer_at) {
    using namespace coswap;
    Scenario scenario = build_scenario(name, transfer_at);
    std::cerr << scenario.name << ": " << scenario.summary << "\n";
    auto engine = make_scenario_engine(scenario);
    CsvFileSink sink(out_path);
    engine->run(sink);
    report_events(*engine);
    std::cerr << engine->stats().iterations << " steps written to " << out_path << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coswap: fixed-step Jacobi co-simulation with run-time model swapping"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "execute a multi-model co-simulation");
    std::string config_path, out_path = "run.csv", transfer_dir, fault_path, feed_path;
    double start = 0.0, end = 10.0, step = 0.1;
    long min_steps = 1, check_every = 1;
    std::vector<std::string> scheduled;
    run->add_option("--config", config_path, "multi-model JSON file")->required();
    run->add_option("--start", start, "start time [s]");
    run->add_option("--end", end, "end time [s]")->required();
    run->add_option("--step", step, "fixed step size [s]");
    run->add_option("--out", out_path, "output CSV path");
    run->add_option("--transfer-dir", transfer_dir, "watch folder for swap specifications");
    run->add_option("--min-steps", min_steps, "steps before the first transfer point");
    run->add_option("--check-every", check_every, "transfer-point cadence in steps");
    run->add_option("--fault-rules", fault_path, "fault-rule JSON file");
    run->add_option("--broker-feed", feed_path, "broker feed CSV (timestamp,value)");
    run->add_option("--transfer-at", scheduled,
                    "scripted spec drop TIME=PATH (repeatable; overrides --transfer-dir)");

    // validate
    auto* validate = app.add_subcommand("validate", "static checks for a config and swap spec");
    std::string v_config, v_swap;
    validate->add_option("--config", v_config, "multi-model JSON file")->required();
    validate->add_option("--swap", v_swap, "swap specification JSON file");

    // scenario
    auto* scenario = app.add_subcommand("scenario", "run a bundled scenario");
    std::string s_name, s_out = "scenario.csv";
    double s_transfer_at = -1.0;
    std::string names;
    for (const auto& n : coswap::scenario_names()) names += (names.empty() ? "" : ", ") + n;
    scenario->add_option("name", s_name, "one of: " + names)->required();
    scenario->add_option("--out", s_out, "output CSV path");
    scenario->add_option("--transfer-at", s_transfer_at, "override the spec drop time [s]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed())
            return cmd_run(config_path, start, end, step, out_path, transfer_dir, min_steps,
                           check_every, fault_path, feed_path, scheduled);
        if (validate->parsed()) return cmd_validate(v_config, v_swap);
        if (scenario->parsed())
            return cmd_scenario(s_name, s_out,
                                s_transfer_at >= 0.0 ? std::optional<double>(s_transfer_at)
                                                     : std::nullopt);
    } catch (const coswap::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::string what = e.what();
        if (what.find("cannot open") != std::string::npos) return kExitFileNotFound;
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}
