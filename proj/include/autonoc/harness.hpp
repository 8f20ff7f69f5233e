#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "autonoc/agent.hpp"
#include "autonoc/control.hpp"
#include "autonoc/failure.hpp"
#include "autonoc/plan.hpp"
#include "autonoc/retriever.hpp"
#include "autonoc/traffic.hpp"

namespace autonoc::harness {

enum class TaskId { Task1 = 1, Task2, Task3, Task4 };
enum class Mode { Autolight, SingleAgent, NaiveMulti };
enum class Variant { Golden, Adversarial };

std::string to_string(TaskId t);
std::string to_string(Mode m);
std::string to_string(Variant v);
TaskId task_from_string(const std::string& s);
Mode mode_from_string(const std::string& s);
Variant variant_from_string(const std::string& s);

// ---- agents and tools --------------------------------------------------

struct AgentRoster {
    std::vector<agent::AgentSpec> agents;

    const agent::AgentSpec* find(const std::string& id) const;
};

AgentRoster make_roster(Mode mode);
control::IsolationPolicy make_isolation_policy(Mode mode);

// Everything the tool closures share within one trial.
struct TrialState {
    control::ControlPlane plane;
    traffic::WorkloadSpec workload;
    std::uint64_t seed = 0;
    int epoch = 0;
    bool coi_enabled = true;
    const AgentRoster* roster = nullptr;
    const retriever::Index* kb = nullptr;
    std::string current_agent;   // caller id for controller RPCs
    std::string current_identity;

    std::optional<traffic::DemandMatrix> demands;
    std::optional<traffic::FlowAllocation> allocation;
    std::optional<failure::Anomaly> anomaly;
    std::optional<plan::PlanTable> table;
    std::vector<nlohmann::ordered_json> plan_revisions;

    TrialState(failure::World world, control::IsolationPolicy policy)
        : plane(std::move(world), std::move(policy)) {}
};

// The shared tool registry: controller RPCs per domain, traffic/diagnosis
// helpers, knowledge retrieval, plan-table ops, and the handoff tool.
agent::ToolRegistry make_tool_registry(TrialState& state);

// The shipped troubleshooting corpus (data/corpus), ingested once.
const retriever::Index& knowledge_base();

// ---- trial logs and results ----------------------------------------------

struct TrialLog {
    std::vector<agent::Message> messages;
    std::vector<nlohmann::ordered_json> plan_revisions;
    nlohmann::ordered_json world_snapshot;
    nlohmann::ordered_json ground_truth;
    std::vector<std::string> terminations; // one per activation
    std::string final_answer;

    std::string to_jsonl() const;
    static TrialLog from_jsonl(const std::string& text);
};

nlohmann::ordered_json world_snapshot(const failure::World& world);

struct Checkpoint {
    std::string id;          // "c1".."c5"
    std::string description;
    bool pass = false;
};

// Post-hoc predicates over the persisted log only; nothing self-reported.
std::vector<Checkpoint> evaluate_checkpoints(const TrialLog& log, TaskId task);

// Fraction of handoff-delivered activations opening with a valid declaration.
double declaration_pass_rate(const TrialLog& log, const AgentRoster& roster);

struct TrialResult {
    TaskId task = TaskId::Task1;
    int trial_index = 0;
    std::uint64_t seed = 0;
    Mode mode = Mode::Autolight;
    std::vector<Checkpoint> checkpoints;
    bool completed = false;
    int total_steps = 0;
    std::vector<std::string> terminations;
    TrialLog log;

    nlohmann::ordered_json to_json() const; // without the full log
};

struct RunOptions {
    int max_steps = 40;       // per activation
    int max_activations = 48; // per trial
    int trial_index = 0;
    std::string transcript_dir; // empty: do not persist
};

TrialResult run_task(TaskId task, Mode mode, agent::Backend& backend, std::uint64_t seed,
                     const RunOptions& options = {});

std::vector<TrialResult> run_trials(TaskId task, Mode mode, int n, std::uint64_t base_seed,
                                    agent::Backend& backend, const RunOptions& options = {});

// Scripted decision policies for every agent of (task, mode). Golden sets
// complete all checkpoints; adversarial sets drop identities and skip work.
agent::ScriptedBackend make_scripted_backend(TaskId task, Mode mode, Variant variant);

// report.json, summary.csv, l4_checklist.json under out_dir.
void emit_report(const std::vector<TrialResult>& results, const std::string& out_dir,
                 const std::string& backend_label);

} // namespace autonoc::harness
