#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "coswap/broker.hpp"
#include "coswap/builtin_units.hpp"
#include "coswap/condition.hpp"
#include "coswap/dependency_graph.hpp"
#include "coswap/fault_injection.hpp"
#include "coswap/model_config.hpp"
#include "coswap/step_log.hpp"
#include "coswap/transfer_source.hpp"

namespace coswap {

struct EngineSettings {
    double start_time = 0.0;
    double end_time = 0.0;
    double step_size = 0.1;
    long min_steps_before_transfer = 1;
    long check_every_n_steps = 1;
};

// Validated swap specification, ready to install at a transfer point.
struct SwapPlan {
    MultiModelConfig new_config;
    std::map<std::string, std::string> transfers; // old name -> new name
    std::vector<std::string> fresh_instances;
    std::vector<std::string> notes;
};

struct LatchEvent {
    std::string target;
    std::string condition; // "step" or "swap"
    long iteration;
    double time;
};

struct TransferEvent {
    long iteration;
    double time;
    std::string source_id;
    bool accepted;
    std::string diagnostics;
};

// Observation counters for tests and runtime assertions.
struct EngineStats {
    std::map<std::string, long> do_step_counts;          // instance -> total steps
    std::map<std::string, long> sets_this_iteration;     // sink port -> writes
    std::vector<LatchEvent> latch_events;
    std::vector<TransferEvent> transfer_events;
    long iterations = 0;
};

// Fixed-step Jacobi master loop with run-time model swapping.
//
// Each iteration: (1) transfer point — check for, validate and install a
// newly available swap specification; (2) update the latched step/swap
// conditions from last-known values; (3) guarded input setting — an input
// wired from both a replaced instance and its swap instance takes the old
// source until the swap latch fires, the swap source afterwards; a swap
// instance's inputs are only set once its step latch holds; (4) guarded
// stepping — the replaced instance steps while its swap latch is false, the
// swap instance (on its own zero-based clock) once its step latch is true,
// every other instance always; (5) outputs of stepped units are read back
// into the last-known-value scope; (6) time advances by the fixed step.
//
// The loop is single-threaded and owns all units exclusively.
class SwapEngine {
public:
    SwapEngine(MultiModelConfig config, ModelRegistry registry, EngineSettings settings,
               UnitContext unit_context = {}, std::vector<FaultRule> fault_rules = {});

    void set_transfer_source(TransferSource* source) { transfer_source_ = source; }
    void add_environment(std::shared_ptr<Environment> env) { environments_.push_back(std::move(env)); }
    // Extra columns (port ids / latch flags from scheduled swap specs) so the
    // CSV keeps one stable header across a scripted transfer.
    void predeclare_columns(const std::vector<std::string>& columns);
    void set_observer(std::function<void(const SwapEngine&)> after_step) {
        observer_ = std::move(after_step);
    }

    // Instantiate units, apply parameters and run the topological
    // initialization. Throws EngineError (algebraic loop, unit failure).
    void initialize();
    bool initialized() const { return initialized_; }

    bool done() const;
    // One loop iteration; engine must be initialized and not done.
    StepLog execute_step();
    // initialize() if needed, then iterate to the end, streaming rows.
    void run(StepLogSink& sink);

    // Transfer-point machinery (also exercised directly by tests).
    std::optional<SwapPlan> check_transfer_point();
    // Checks a parsed spec against the live context; dry-instantiates fresh
    // units in a sandbox so a bad spec never perturbs the running simulation.
    ValidationReport validate_swap_spec(const MultiModelConfig& new_config,
                                        SwapPlan* plan_out = nullptr) const;
    void apply_transfer(const SwapPlan& plan);

    // Introspection.
    double global_time() const { return settings_.start_time + static_cast<double>(iteration_) * settings_.step_size; }
    long iteration() const { return iteration_; }
    const EngineSettings& settings() const { return settings_; }
    const MultiModelConfig& config() const { return config_; }
    const Scope& scope() const { return scope_; }
    const EngineStats& stats() const { return stats_; }
    const std::vector<std::string>& columns() const { return columns_; }
    const SimulationUnit* find_unit(const std::string& instance) const;
    bool is_swapped_out(const std::string& instance) const { return swapped_out_.count(instance) != 0; }
    double offset_of(const std::string& swap_instance) const;
    bool step_latched(const std::string& target) const;
    bool swap_latched(const std::string& target) const;

private:
    struct SwapState {
        std::string target;
        std::string swap_instance;
        LatchedCondition step;
        LatchedCondition swap;
    };

    // One input port with its guarded source(s).
    struct SinkBinding {
        PortId sink;
        std::optional<PortId> base_source;
        std::optional<PortId> swap_source;
        std::string swap_target;      // swap entry guarding swap_source, if any
        std::string sink_step_target; // swap entry whose swap instance owns the sink, if any
    };

    void instantiate_all(const std::vector<std::string>& fresh,
                         const MultiModelConfig& cfg);
    void apply_parameters(const MultiModelConfig& cfg, const std::set<std::string>& only,
                          std::vector<std::string>* skipped_notes);
    void initialize_fresh(const std::vector<std::string>& fresh, const DependencyGraph& graph);
    void rebuild_wiring();
    void rebuild_columns();
    void advance_environments();
    void update_latches();
    void set_inputs();
    void step_units();
    void collect_outputs(const std::set<std::string>& stepped);
    StepLog make_log_row(double row_time) const;
    void seed_outputs_into_scope(const std::string& instance);
    SwapState* find_swap_state(const std::string& target);
    const SwapState* find_swap_state(const std::string& target) const;

    MultiModelConfig config_;
    ModelRegistry registry_;
    EngineSettings settings_;
    UnitContext unit_context_;
    std::vector<FaultRule> fault_rules_;

    std::map<std::string, UnitPtr> units_;
    Scope scope_;
    std::vector<SwapState> swaps_;
    std::map<std::string, double> offsets_; // swap instance -> local time
    std::set<std::string> swapped_out_;
    std::vector<SinkBinding> bindings_;
    std::vector<std::string> columns_;
    std::set<std::string> predeclared_;
    std::vector<std::string> faulted_input_ports_; // port ids logged via the injector

    TransferSource* transfer_source_ = nullptr;
    std::vector<std::shared_ptr<Environment>> environments_;
    std::function<void(const SwapEngine&)> observer_;

    EngineStats stats_;
    long iteration_ = 0;
    bool initialized_ = false;
    bool columns_announced_ = false;
    StepLogSink* active_sink_ = nullptr;
};

// Convenience wrapper: build, run and collect into `sink`.
void run_simulation(MultiModelConfig config, ModelRegistry registry, EngineSettings settings,
                    StepLogSink& sink, UnitContext unit_context = {},
                    std::vector<FaultRule> fault_rules = {},
                    TransferSource* transfer_source = nullptr);

// Log columns a config produces: connected output ports, fault-injected
// input ports, and the per-swap-entry latch flags, sorted. Scenario
// runners union these over every scheduled spec to keep one stable header.
std::vector<std::string> log_columns_for(const MultiModelConfig& cfg,
                                         const std::vector<FaultRule>& fault_rules);

} // namespace coswap
