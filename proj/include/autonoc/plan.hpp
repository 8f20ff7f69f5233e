#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "autonoc/coi.hpp"
#include "autonoc/errors.hpp"
#include "autonoc/messages.hpp"

namespace autonoc::plan {

enum class Status { Pending, InProgress, Done, Failed };

std::string to_string(Status s);

struct PlanStep {
    int step_id = 0; // 1-based position
    std::string description;
    std::string assigned_agent;
    Status status = Status::Pending;
    std::optional<std::string> result_summary; // present iff done or failed
    int attempts = 0;                          // times the step was started
};

// Immutable value: mutations return a new table with revision + 1.
struct PlanTable {
    std::string goal;
    std::vector<PlanStep> steps;
    int revision = 0;

    bool complete() const;
    const PlanStep* find(int step_id) const;
    nlohmann::ordered_json to_json() const;
};

struct StepSpec {
    std::string description;
    std::string assigned_agent;
};

PlanTable create_plan(const std::string& goal, const std::vector<StepSpec>& specs,
                      const std::vector<std::string>& registered_agents);

struct Outcome {
    bool done = false; // false → failed
    std::string summary;
};

PlanTable advance_plan(const PlanTable& table, int step_id, const Outcome& outcome);

enum class ActionKind { Start, Wait, Replan, Finish };

std::string to_string(ActionKind k);

struct Dispatch {
    ActionKind kind = ActionKind::Wait;
    int step_id = -1;         // start/replan only
    std::string agent;        // start only
    bool success = false;     // finish only: all steps done
    PlanTable table;          // table after the action
};

struct DispatchPolicy {
    int retries = 1; // extra starts allowed per step after a failure
};

// Planner decision procedure. Start marks the first pending step in_progress;
// Replan resets a retryable failed step to pending; Finish is emitted once
// nothing is dispatchable (success iff every step is done).
Dispatch next_action(const PlanTable& table, const DispatchPolicy& policy = {});

// Handoff a Start dispatch sends to the step's agent.
coi::Handoff make_step_handoff(const PlanTable& table, const PlanStep& step,
                               const agent::AgentSpec& target);

} // namespace autonoc::plan
