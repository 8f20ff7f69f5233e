#include "autonoc/plan.hpp"

#include <algorithm>

namespace autonoc::plan {

std::string to_string(Status s) {
    switch (s) {
    case Status::Pending: return "pending";
    case Status::InProgress: return "in_progress";
    case Status::Done: return "done";
    case Status::Failed: return "failed";
    }
    return "?";
}

std::string to_string(ActionKind k) {
    switch (k) {
    case ActionKind::Start: return "start";
    case ActionKind::Wait: return "wait";
    case ActionKind::Replan: return "replan";
    case ActionKind::Finish: return "finish";
    }
    return "?";
}

bool PlanTable::complete() const {
    return std::all_of(steps.begin(), steps.end(),
                       [](const PlanStep& s) { return s.status == Status::Done; });
}

const PlanStep* PlanTable::find(int step_id) const {
    for (const auto& s : steps)
        if (s.step_id == step_id) return &s;
    return nullptr;
}

nlohmann::ordered_json PlanTable::to_json() const {
    nlohmann::ordered_json j;
    j["goal"] = goal;
    j["revision"] = revision;
    auto steps_json = nlohmann::ordered_json::array();
    for (const auto& s : steps) {
        nlohmann::ordered_json js;
        js["step_id"] = s.step_id;
        js["description"] = s.description;
        js["assigned_agent"] = s.assigned_agent;
        js["status"] = to_string(s.status);
        if (s.result_summary) js["result_summary"] = *s.result_summary;
        js["attempts"] = s.attempts;
        steps_json.push_back(js);
    }
    j["steps"] = steps_json;
    return j;
}

PlanTable create_plan(const std::string& goal, const std::vector<StepSpec>& specs,
                      const std::vector<std::string>& registered_agents) {
    if (specs.empty()) throw ConfigError("plan needs at least one step");
    PlanTable table;
    table.goal = goal;
    int id = 1;
    for (const auto& spec : specs) {
        if (std::find(registered_agents.begin(), registered_agents.end(), spec.assigned_agent) ==
            registered_agents.end())
            throw ConfigError("unknown agent: " + spec.assigned_agent);
        PlanStep step;
        step.step_id = id++;
        step.description = spec.description;
        step.assigned_agent = spec.assigned_agent;
        table.steps.push_back(std::move(step));
    }
    return table;
}

PlanTable advance_plan(const PlanTable& table, int step_id, const Outcome& outcome) {
    PlanTable next = table;
    bool found = false;
    for (auto& s : next.steps) {
        if (s.step_id != step_id) continue;
        found = true;
        if (s.status != Status::InProgress)
            throw IllegalTransitionError("step " + std::to_string(step_id) + " is " +
                                         to_string(s.status) + ", not in_progress");
        s.status = outcome.done ? Status::Done : Status::Failed;
        s.result_summary = outcome.summary;
    }
    if (!found) throw NotFoundError("no step with id " + std::to_string(step_id));
    ++next.revision;
    return next;
}

Dispatch next_action(const PlanTable& table, const DispatchPolicy& policy) {
    Dispatch d;
    d.table = table;
    for (const auto& s : table.steps) {
        if (s.status == Status::InProgress) {
            d.kind = ActionKind::Wait;
            d.step_id = s.step_id;
            return d;
        }
    }
    for (auto& s : d.table.steps) {
        if (s.status == Status::Pending) {
            d.kind = ActionKind::Start;
            d.step_id = s.step_id;
            d.agent = s.assigned_agent;
            s.status = Status::InProgress;
            ++s.attempts;
            ++d.table.revision;
            return d;
        }
    }
    for (auto& s : d.table.steps) {
        if (s.status == Status::Failed && s.attempts <= policy.retries) {
            d.kind = ActionKind::Replan;
            d.step_id = s.step_id;
            s.status = Status::Pending;
            s.result_summary.reset();
            ++d.table.revision;
            return d;
        }
    }
    d.kind = ActionKind::Finish;
    d.success = table.complete();
    return d;
}

coi::Handoff make_step_handoff(const PlanTable& table, const PlanStep& step,
                               const agent::AgentSpec& target) {
    coi::Handoff h;
    h.to = target.id;
    h.greeting = "Hello " + target.identity_name + ", the planner assigns you a step.";
    h.query = step.description;
    h.params["goal"] = table.goal;
    h.params["step_id"] = std::to_string(step.step_id);
    return h;
}

} // namespace autonoc::plan
