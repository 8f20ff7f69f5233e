#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "autonoc/harness.hpp"

namespace autonoc::harness {

namespace {

using agent::Message;
using agent::Role;

struct ToolEvent {
    std::string name;
    nlohmann::json args;
    std::string result;
    size_t message_index = 0; // of the tool message

    std::optional<nlohmann::json> json() const {
        if (!nlohmann::json::accept(result)) return std::nullopt;
        return nlohmann::json::parse(result);
    }
    bool rpc_ok() const {
        auto j = json();
        return j && j->value("ok", false);
    }
};

std::vector<ToolEvent> tool_events(const TrialLog& log) {
    std::map<std::string, std::pair<std::string, nlohmann::json>> calls; // id -> (name, args)
    std::vector<ToolEvent> events;
    for (size_t i = 0; i < log.messages.size(); ++i) {
        const Message& m = log.messages[i];
        if (m.role == Role::Assistant) {
            for (const auto& c : m.tool_calls) calls[c.id] = {c.name, c.args};
        } else if (m.role == Role::Tool && calls.count(m.tool_call_id)) {
            const auto& [name, args] = calls[m.tool_call_id];
            events.push_back({name, args, m.content, i});
        }
    }
    return events;
}

const ToolEvent* last_event(const std::vector<ToolEvent>& events, const std::string& name) {
    const ToolEvent* found = nullptr;
    for (const auto& e : events)
        if (e.name == name) found = &e;
    return found;
}

bool any_ok(const std::vector<ToolEvent>& events, const std::string& name) {
    for (const auto& e : events)
        if (e.name == name && e.rpc_ok()) return true;
    return false;
}

// Handoff blocks recovered from the persisted tool messages.
std::vector<coi::Handoff> handoffs_in(const TrialLog& log) {
    std::vector<coi::Handoff> out;
    for (const auto& m : log.messages) {
        if (m.role != Role::Tool) continue;
        try {
            out.push_back(coi::parse_handoff(m.content));
        } catch (const std::exception&) {
        }
    }
    return out;
}

// Recomputes per-link loads from the flow list using the snapshot's fabric
// wiring; returns nullopt if a flow references an unknown link.
std::optional<std::map<std::string, double>> loads_of(const nlohmann::json& flows,
                                                      const nlohmann::json& fabric) {
    std::map<std::pair<int, int>, std::string> wiring; // (leaf, spine) -> link id
    std::map<std::string, double> loads;
    for (const auto& l : fabric.at("links")) {
        wiring[{l.at("leaf").get<int>(), l.at("spine").get<int>()}] =
            l.at("id").get<std::string>();
        loads[l.at("id").get<std::string>()] = 0.0;
    }
    for (const auto& f : flows) {
        int spine = f.at("spine").get<int>();
        auto up = wiring.find({f.at("src").get<int>(), spine});
        auto down = wiring.find({f.at("dst").get<int>(), spine});
        if (up == wiring.end() || down == wiring.end()) return std::nullopt;
        loads[up->second] += f.at("gbps").get<double>();
        loads[down->second] += f.at("gbps").get<double>();
    }
    return loads;
}

bool within_capacity(const std::map<std::string, double>& loads, const nlohmann::json& fabric) {
    for (const auto& l : fabric.at("links")) {
        if (loads.at(l.at("id").get<std::string>()) >
            l.at("capacity_gbps").get<double>() + 1e-9)
            return false;
    }
    return true;
}

std::vector<Checkpoint> task1(const TrialLog& log, const std::vector<ToolEvent>& events) {
    std::vector<Checkpoint> cps = {
        {"c1", "epoch demand matrix ingested", false},
        {"c2", "plan created", false},
        {"c3", "allocation within every link capacity", false},
        {"c4", "allocation applied through the controller", false},
        {"c5", "controller read-back matches the allocation", false},
    };
    const auto* demands = last_event(events, "dc.generate_demands");
    cps[0].pass = demands && demands->json() && demands->json()->contains("table");
    cps[1].pass = !log.plan_revisions.empty() &&
                  !log.plan_revisions.front().at("steps").empty();
    const auto* alloc = last_event(events, "dc.allocate");
    const auto& fabric = log.world_snapshot.at("fabric");
    std::optional<std::map<std::string, double>> loads;
    if (alloc && alloc->json() && alloc->json()->contains("flows"))
        loads = loads_of(alloc->json()->at("flows"), fabric);
    cps[2].pass = loads && within_capacity(*loads, fabric);
    cps[3].pass = any_ok(events, "dc.apply_allocation");
    if (loads && cps[3].pass) {
        bool match = true;
        for (const auto& l : fabric.at("links")) {
            double committed = l.at("load_gbps").get<double>();
            if (std::abs(committed - loads->at(l.at("id").get<std::string>())) > 1e-9)
                match = false;
        }
        cps[4].pass = match;
    }
    return cps;
}

std::vector<Checkpoint> task2(const TrialLog& log, const std::vector<ToolEvent>& events) {
    std::vector<Checkpoint> cps = {
        {"c1", "capacity request handoff reached the planner", false},
        {"c2", "free channel found end to end", false},
        {"c3", "both end transponders configured", false},
        {"c4", "power and OSNR meet thresholds", false},
        {"c5", "completion handoff returned to the requester", false},
    };
    for (const auto& h : handoffs_in(log)) {
        if (h.to == "planner" && h.params.count("gbps")) cps[0].pass = true;
        if (h.to == "dc-operator" && h.params.count("channel")) cps[4].pass = true;
    }
    cps[4].pass = cps[4].pass && !log.final_answer.empty();

    std::vector<int> initially_held;
    for (const auto& c : log.ground_truth.at("initially_held_channels"))
        initially_held.push_back(c.get<int>());
    std::map<std::string, int> configured; // transponder -> channel
    std::map<std::string, int> rates;
    for (const auto& t : log.world_snapshot.at("backbone").at("transponders")) {
        if (!t.contains("channel")) continue;
        configured[t.at("id").get<std::string>()] = t.at("channel").get<int>();
        rates[t.at("id").get<std::string>()] = t.at("rate_gbps").get<int>();
    }
    int channel = -1;
    if (configured.count("t3") && configured.count("t6") &&
        configured["t3"] == configured["t6"]) {
        channel = configured["t3"];
    }
    bool fresh = channel >= 0 && std::find(initially_held.begin(), initially_held.end(),
                                           channel) == initially_held.end();
    cps[1].pass = fresh && any_ok(events, "backbone_a.list_channels");
    cps[2].pass = fresh && any_ok(events, "backbone_a.configure_transponder") &&
                  any_ok(events, "backbone_b.configure_transponder") && rates["t3"] > 0 &&
                  rates["t6"] > 0;

    if (channel >= 0) {
        double osnr = -1.0;
        for (const auto& c : log.world_snapshot.at("backbone").at("channels")) {
            if (c.at("index").get<int>() == channel && c.contains("osnr_db"))
                osnr = c.at("osnr_db").get<double>();
        }
        double min_dbm = 1e9;
        for (const auto& m : log.world_snapshot.at("backbone").at("monitors"))
            min_dbm = std::min(min_dbm, m.at("total_power_dbm").get<double>());
        cps[3].pass = osnr >= 20.0 && min_dbm >= -30.0;
    }
    return cps;
}

std::vector<Checkpoint> task3(const TrialLog& log, const std::vector<ToolEvent>& events) {
    std::vector<Checkpoint> cps = {
        {"c1", "quality anomaly detected", false},
        {"c2", "failure classified as Interference", false},
        {"c3", "degraded link localized", false},
        {"c4", "reroute computed avoiding the link", false},
        {"c5", "reroute applied, fabric clean", false},
    };
    std::string element = log.ground_truth.at("element").get<std::string>();

    const auto* detect = last_event(events, "diagnose.detect");
    auto detected = detect ? detect->json() : std::nullopt;
    if (detected && detected->value("found", false)) {
        for (const auto& e : detected->at("evidence")) {
            if (e.at("kind") == "quality" && e.at("element") == element) cps[0].pass = true;
        }
    }
    const auto* classify = last_event(events, "diagnose.classify");
    cps[1].pass = classify && classify->json() &&
                  classify->json()->value("label", std::string()) == "Interference";

    const auto* alloc = last_event(events, "dc.allocate");
    cps[2].pass = alloc && alloc->args.value("avoid_link", std::string()) == element;

    const auto& fabric = log.world_snapshot.at("fabric");
    std::optional<std::map<std::string, double>> loads;
    if (alloc && alloc->json() && alloc->json()->contains("flows"))
        loads = loads_of(alloc->json()->at("flows"), fabric);
    cps[3].pass = cps[2].pass && loads && within_capacity(*loads, fabric) &&
                  std::abs(loads->at(element)) < 1e-9;

    if (cps[3].pass && any_ok(events, "dc.apply_allocation")) {
        bool clean = true;
        for (const auto& l : fabric.at("links")) {
            double load = l.at("load_gbps").get<double>();
            if (load > l.at("capacity_gbps").get<double>() + 1e-9) clean = false;
            if (l.at("id") == element && std::abs(load) > 1e-9) clean = false;
        }
        cps[4].pass = clean;
    }
    return cps;
}

std::vector<Checkpoint> task4(const TrialLog& log, const std::vector<ToolEvent>& events) {
    std::vector<Checkpoint> cps = {
        {"c1", "cross-domain plan created", false},
        {"c2", "domain-A monitors queried", false},
        {"c3", "domain-B monitors queried", false},
        {"c4", "fiber-aging guide retrieved", false},
        {"c5", "failing span named in the final answer", false},
    };
    if (!log.plan_revisions.empty()) {
        bool has_a = false, has_b = false;
        for (const auto& s : log.plan_revisions.front().at("steps")) {
            std::string agent = s.at("assigned_agent").get<std::string>();
            if (agent == "backbone-a-operator") has_a = true;
            if (agent == "backbone-b-operator") has_b = true;
        }
        cps[0].pass = has_a && has_b;
    }
    cps[1].pass = any_ok(events, "backbone_a.get_monitors");
    cps[2].pass = any_ok(events, "backbone_b.get_monitors");
    for (const auto& e : events) {
        if (e.name != "kb.retrieve" || !e.json()) continue;
        for (const auto& r : e.json()->value("results", nlohmann::json::array()))
            if (r.at("doc") == "fiber-aging-guide.md") cps[3].pass = true;
    }
    std::string span = log.ground_truth.at("expected_span").get<std::string>();
    cps[4].pass = !log.final_answer.empty() && log.final_answer.find(span) != std::string::npos;
    return cps;
}

} // namespace

std::vector<Checkpoint> evaluate_checkpoints(const TrialLog& log, TaskId task) {
    auto events = tool_events(log);
    switch (task) {
    case TaskId::Task1: return task1(log, events);
    case TaskId::Task2: return task2(log, events);
    case TaskId::Task3: return task3(log, events);
    case TaskId::Task4: return task4(log, events);
    }
    throw InputError("unknown task");
}

double declaration_pass_rate(const TrialLog& log, const AgentRoster& roster) {
    int total = 0, passed = 0;
    for (size_t i = 0; i < log.messages.size(); ++i) {
        const Message& m = log.messages[i];
        if (m.role != Role::Tool) continue;
        coi::Handoff h;
        try {
            h = coi::parse_handoff(m.content);
        } catch (const std::exception&) {
            continue;
        }
        const auto* target = roster.find(h.to);
        if (!target) continue;
        // Sender = the agent whose tool call produced this message.
        std::string sender;
        for (size_t k = i; k-- > 0;) {
            if (log.messages[k].role != Role::Assistant) continue;
            for (const auto& c : log.messages[k].tool_calls) {
                if (c.id == m.tool_call_id) {
                    const auto* spec = roster.find(log.messages[k].agent_id);
                    if (spec) sender = spec->identity_name;
                }
            }
            if (!sender.empty()) break;
        }
        // First assistant message by the target after the delivery.
        for (size_t k = i + 1; k < log.messages.size(); ++k) {
            const Message& next = log.messages[k];
            if (next.role != Role::Assistant || next.agent_id != target->id) continue;
            ++total;
            if (coi::validate_declaration(next, {target->identity_name, sender}).pass) ++passed;
            break;
        }
    }
    return total == 0 ? 1.0 : double(passed) / total;
}

} // namespace autonoc::harness
