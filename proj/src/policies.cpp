#include <functional>

#include "autonoc/harness.hpp"

namespace autonoc::harness {

namespace {

using agent::AgentSpec;
using agent::Message;
using agent::Role;
using agent::ScriptedBackend;
using Turn = std::function<Message(const AgentSpec&, const std::vector<Message>&)>;

Message say(std::string content) {
    Message m;
    m.role = Role::Assistant;
    m.content = std::move(content);
    return m;
}

Message call(std::string content, std::string id, std::string name, nlohmann::json args) {
    Message m = say(std::move(content));
    m.tool_calls.push_back({std::move(id), std::move(name), std::move(args)});
    return m;
}

Turn fixed(Message m) {
    return [m](const AgentSpec&, const std::vector<Message>&) { return m; };
}

// Turn-indexed script: turn i is the agent's i-th assistant message overall.
ScriptedBackend::Policy script(std::vector<Turn> turns) {
    return [turns = std::move(turns)](const AgentSpec& agent,
                                      const std::vector<Message>& history) {
        size_t i = 0;
        for (const auto& m : history)
            if (m.role == Role::Assistant && m.agent_id == agent.id) ++i;
        if (i < turns.size()) return turns[i](agent, history);
        return say("FINAL: nothing further to do.");
    };
}

nlohmann::json handoff_args(const std::string& to, const std::string& greeting,
                            const std::string& query,
                            const std::map<std::string, std::string>& params = {}) {
    nlohmann::json p = nlohmann::json::object();
    for (const auto& [k, v] : params) p[k] = v;
    return {{"to", to}, {"greeting", greeting}, {"query", query}, {"params", p}};
}

// Sender identity for the declaration, recovered from the pseudo-system
// header when CoI is on; a guess otherwise (nobody validates it then).
std::string sender_of(const AgentSpec& agent, const std::vector<Message>& history) {
    for (auto it = history.rbegin(); it != history.rend(); ++it) {
        if (it->role != Role::Tool) continue;
        try {
            if (coi::parse_handoff(it->content).to != agent.id) continue;
        } catch (const std::exception&) {
            continue;
        }
        if (auto p = coi::parse_pseudo_system(it->content)) return p->sender;
        return "Planner";
    }
    return "Planner";
}

Turn decl_call(std::string action, std::string id, std::string name, nlohmann::json args) {
    return [=](const AgentSpec& a, const std::vector<Message>& h) {
        Message m = say(coi::make_declaration(a.identity_name, sender_of(a, h), action));
        m.tool_calls.push_back({id, name, args});
        return m;
    };
}

Turn just_call(std::string content, std::string id, std::string name, nlohmann::json args) {
    return fixed(call(std::move(content), std::move(id), std::move(name), std::move(args)));
}

std::string last_handoff_param(const std::vector<Message>& history, const std::string& to,
                               const std::string& key, const std::string& fallback) {
    for (auto it = history.rbegin(); it != history.rend(); ++it) {
        if (it->role != Role::Tool) continue;
        try {
            auto h = coi::parse_handoff(it->content);
            if (h.to == to && h.params.count(key)) return h.params.at(key);
        } catch (const std::exception&) {
        }
    }
    return fallback;
}

std::optional<nlohmann::json> last_tool_json(const std::vector<Message>& history) {
    for (auto it = history.rbegin(); it != history.rend(); ++it) {
        if (it->role == Role::Tool && nlohmann::json::accept(it->content))
            return nlohmann::json::parse(it->content);
    }
    return std::nullopt;
}

// Lowest unheld dummy slot in a persisted list_channels RPC result.
int free_channel_from(const std::vector<Message>& history) {
    for (auto it = history.rbegin(); it != history.rend(); ++it) {
        if (it->role != Role::Tool || !nlohmann::json::accept(it->content)) continue;
        auto j = nlohmann::json::parse(it->content);
        if (!j.value("ok", false) || !j["payload"].contains("channels")) continue;
        for (const auto& ch : j["payload"]["channels"]) {
            if (ch.at("kind") == "dummy" && !ch.contains("transponder"))
                return ch.at("index").get<int>();
        }
    }
    return 4;
}

std::string evidence_element(const std::vector<Message>& history) {
    for (auto it = history.rbegin(); it != history.rend(); ++it) {
        if (it->role != Role::Tool || !nlohmann::json::accept(it->content)) continue;
        auto j = nlohmann::json::parse(it->content);
        if (j.contains("evidence") && !j["evidence"].empty())
            return j["evidence"][0].at("element").get<std::string>();
    }
    return "dc-link-5";
}

const char* kAgingQuery =
    "uniform power drop at downstream monitors increased span attenuation fiber aging";

// ---- golden policy sets -----------------------------------------------------

void golden_task1(ScriptedBackend& b) {
    b.register_policy(
        "planner",
        script({
            just_call("Decomposing the allocation task.", "p1", "plan.create",
                      {{"goal", "allocate the epoch-0 ring traffic"},
                       {"steps",
                        {{{"description", "ingest the epoch-0 demand matrix"},
                          {"agent", "dc-operator"}},
                         {{"description", "compute a feasible allocation"},
                          {"agent", "dc-operator"}},
                         {{"description", "apply the allocation and read it back"},
                          {"agent", "dc-operator"}}}}}),
            just_call("Dispatching step 1.", "p2", "plan.next", {}),
            just_call("Handing step 1 to the fabric operator.", "p3", "handoff",
                      handoff_args("dc-operator", "Hello DC-Operator, step 1 is yours.",
                                   "ingest the epoch-0 demand matrix",
                                   {{"epoch", "0"}, {"step", "1"}})),
            decl_call("record step 1 and dispatch step 2.", "p4", "plan.advance",
                      {{"step_id", 1}, {"done", true}, {"summary", "demands ingested"}}),
            just_call("Dispatching step 2.", "p5", "plan.next", {}),
            just_call("Handing step 2 to the fabric operator.", "p6", "handoff",
                      handoff_args("dc-operator", "Hello DC-Operator, step 2 is yours.",
                                   "compute a feasible allocation", {{"step", "2"}})),
            decl_call("record step 2 and dispatch step 3.", "p7", "plan.advance",
                      {{"step_id", 2}, {"done", true}, {"summary", "allocation computed"}}),
            just_call("Dispatching step 3.", "p8", "plan.next", {}),
            just_call("Handing step 3 to the fabric operator.", "p9", "handoff",
                      handoff_args("dc-operator", "Hello DC-Operator, step 3 is yours.",
                                   "apply the allocation and read it back", {{"step", "3"}})),
            decl_call("record step 3 and close the plan.", "p10", "plan.advance",
                      {{"step_id", 3},
                       {"done", true},
                       {"summary", "allocation applied and verified"}}),
            just_call("Closing the plan.", "p11", "plan.next", {}),
            fixed(say("FINAL: epoch-0 ring traffic allocated and applied; all fabric links "
                      "within capacity.")),
        }));
    b.register_policy(
        "dc-operator",
        script({
            decl_call("ingest the epoch-0 demand matrix.", "d1", "dc.generate_demands",
                      {{"epoch", 0}}),
            just_call("Reporting step 1 complete.", "d2", "handoff",
                      handoff_args("planner", "Hello Planner, step 1 is complete.",
                                   "record step 1 complete",
                                   {{"status", "demands ingested"}})),
            decl_call("compute a feasible allocation.", "d3", "dc.allocate", {}),
            just_call("Reporting step 2 complete.", "d4", "handoff",
                      handoff_args("planner", "Hello Planner, step 2 is complete.",
                                   "record step 2 complete",
                                   {{"status", "allocation computed"}})),
            decl_call("apply the allocation and read it back.", "d5", "dc.apply_allocation", {}),
            just_call("Reading back the committed loads.", "d6", "dc.get_topology", {}),
            just_call("Reporting step 3 complete.", "d7", "handoff",
                      handoff_args("planner", "Hello Planner, step 3 is complete.",
                                   "record step 3 complete",
                                   {{"status", "allocation applied"}})),
        }));
}

void golden_task2(ScriptedBackend& b) {
    b.register_policy(
        "dc-operator",
        script({
            just_call("Generating the surge epoch demands.", "d1", "dc.generate_demands",
                      {{"epoch", 0}}),
            just_call("Checking fabric headroom.", "d2", "dc.check_escalation", {}),
            just_call("Escalating to the planner for backbone capacity.", "d3", "handoff",
                      handoff_args("planner",
                                   "Hello Planner, local fabric capacity is insufficient.",
                                   "establish additional backbone wavelength capacity",
                                   {{"src", "DCI-1"}, {"dst", "DCI-2"}, {"gbps", "400"}})),
            [](const AgentSpec& a, const std::vector<Message>& h) {
                return say(coi::make_declaration(a.identity_name, sender_of(a, h),
                                                 "confirm the fulfilled capacity request."));
            },
            fixed(say("FINAL: backbone wavelength established; capacity request fulfilled.")),
        }));
    b.register_policy(
        "planner",
        script({
            decl_call("plan the wavelength establishment.", "p1", "plan.create",
                      {{"goal", "establish a 400G backbone wavelength DCI-1 to DCI-2"},
                       {"steps",
                        {{{"description", "find a free channel on all four spans"},
                          {"agent", "backbone-a-operator"}},
                         {{"description", "configure the A-end transponder"},
                          {"agent", "backbone-a-operator"}},
                         {{"description", "configure the B-end transponder"},
                          {"agent", "backbone-b-operator"}},
                         {{"description", "verify power and OSNR"},
                          {"agent", "backbone-a-operator"}},
                         {{"description", "confirm completion to the requester"},
                          {"agent", "dc-operator"}}}}}),
            just_call("Dispatching step 1.", "p2", "plan.next", {}),
            just_call("Handing step 1 to domain A.", "p3", "handoff",
                      handoff_args("backbone-a-operator",
                                   "Hello Backbone-A-Operator, step 1 is yours.",
                                   "find a free channel on all four spans",
                                   {{"rate", "400"}, {"step", "1"}})),
            decl_call("record step 1; dispatch the A-end configuration.", "p4", "plan.advance",
                      {{"step_id", 1}, {"done", true}, {"summary", "free channel found"}}),
            just_call("Dispatching step 2.", "p5", "plan.next", {}),
            [](const AgentSpec&, const std::vector<Message>& h) {
                std::string ch = last_handoff_param(h, "planner", "channel", "4");
                return call("Handing step 2 to domain A.", "p6", "handoff",
                            handoff_args("backbone-a-operator",
                                         "Hello Backbone-A-Operator, step 2 is yours.",
                                         "configure the A-end transponder",
                                         {{"transponder", "t3"},
                                          {"channel", ch},
                                          {"rate", "400"}}));
            },
            decl_call("record step 2; dispatch the B-end configuration.", "p7", "plan.advance",
                      {{"step_id", 2}, {"done", true}, {"summary", "A end configured"}}),
            just_call("Dispatching step 3.", "p8", "plan.next", {}),
            [](const AgentSpec&, const std::vector<Message>& h) {
                std::string ch = last_handoff_param(h, "planner", "channel", "4");
                return call("Handing step 3 to domain B.", "p9", "handoff",
                            handoff_args("backbone-b-operator",
                                         "Hello Backbone-B-Operator, step 3 is yours.",
                                         "configure the B-end transponder",
                                         {{"transponder", "t6"},
                                          {"channel", ch},
                                          {"rate", "400"}}));
            },
            decl_call("record step 3; dispatch the verification.", "p10", "plan.advance",
                      {{"step_id", 3}, {"done", true}, {"summary", "B end configured"}}),
            just_call("Dispatching step 4.", "p11", "plan.next", {}),
            [](const AgentSpec&, const std::vector<Message>& h) {
                std::string ch = last_handoff_param(h, "planner", "channel", "4");
                return call("Handing step 4 to domain A.", "p12", "handoff",
                            handoff_args("backbone-a-operator",
                                         "Hello Backbone-A-Operator, step 4 is yours.",
                                         "verify power and OSNR", {{"channel", ch}}));
            },
            decl_call("record step 4; confirm to the requester.", "p13", "plan.advance",
                      {{"step_id", 4},
                       {"done", true},
                       {"summary", "power and OSNR verified"}}),
            just_call("Dispatching step 5.", "p14", "plan.next", {}),
            [](const AgentSpec&, const std::vector<Message>& h) {
                std::string ch = last_handoff_param(h, "planner", "channel", "4");
                return call("Confirming to the requester.", "p15", "handoff",
                            handoff_args("dc-operator",
                                         "Hello DC-Operator, your capacity request is "
                                         "fulfilled.",
                                         "resume allocation with the added capacity",
                                         {{"channel", ch},
                                          {"gbps", "400"},
                                          {"status", "established"}}));
            },
        }));
    b.register_policy(
        "backbone-a-operator",
        script({
            decl_call("search for a free channel.", "a1", "backbone_a.list_channels", {}),
            [](const AgentSpec&, const std::vector<Message>& h) {
                int ch = free_channel_from(h);
                return call("Found a free channel.", "a2", "handoff",
                            handoff_args("planner",
                                         "Hello Planner, a free channel is available end "
                                         "to end.",
                                         "record the free channel",
                                         {{"channel", std::to_string(ch)}}));
            },
            [](const AgentSpec& a, const std::vector<Message>& h) {
                int ch = std::stoi(last_handoff_param(h, a.id, "channel", "4"));
                Message m = say(coi::make_declaration(a.identity_name, sender_of(a, h),
                                                      "configure the A-end transponder."));
                m.tool_calls.push_back({"a3", "backbone_a.configure_transponder",
                                        {{"id", "t3"}, {"channel", ch}, {"rate", 400}}});
                return m;
            },
            just_call("Reporting the A-end configuration.", "a4", "handoff",
                      handoff_args("planner", "Hello Planner, the A-end transponder is "
                                              "configured.",
                                   "record the A-end configuration",
                                   {{"configured", "t3"}})),
            [](const AgentSpec& a, const std::vector<Message>& h) {
                int ch = std::stoi(last_handoff_param(h, a.id, "channel", "4"));
                Message m = say(coi::make_declaration(a.identity_name, sender_of(a, h),
                                                      "verify power and OSNR."));
                m.tool_calls.push_back({"a5", "backbone_a.channel_health", {{"channel", ch}}});
                return m;
            },
            [](const AgentSpec&, const std::vector<Message>& h) {
                auto j = last_tool_json(h);
                double osnr = j && j->contains("osnr_db") ? j->at("osnr_db").get<double>() : 0.0;
                return call("Reporting the verification.", "a6", "handoff",
                            handoff_args("planner",
                                         "Hello Planner, the new wavelength is healthy.",
                                         "record the verification",
                                         {{"osnr_db", std::to_string(osnr)},
                                          {"power_ok", "true"}}));
            },
        }));
    b.register_policy(
        "backbone-b-operator",
        script({
            [](const AgentSpec& a, const std::vector<Message>& h) {
                int ch = std::stoi(last_handoff_param(h, a.id, "channel", "4"));
                Message m = say(coi::make_declaration(a.identity_name, sender_of(a, h),
                                                      "configure the B-end transponder."));
                m.tool_calls.push_back({"b1", "backbone_b.configure_transponder",
                                        {{"id", "t6"}, {"channel", ch}, {"rate", 400}}});
                return m;
            },
            just_call("Reporting the B-end configuration.", "b2", "handoff",
                      handoff_args("planner", "Hello Planner, the B-end transponder is "
                                              "configured.",
                                   "record the B-end configuration",
                                   {{"configured", "t6"}})),
        }));
}

void golden_task3(ScriptedBackend& b) {
    b.register_policy(
        "planner",
        script({
            just_call("Planning the fabric investigation.", "p1", "plan.create",
                      {{"goal", "investigate and remediate the fabric quality alarm"},
                       {"steps",
                        {{{"description", "diagnose the quality alarm"},
                          {"agent", "failure-handler"}},
                         {{"description", "reroute around the degraded link and apply"},
                          {"agent", "dc-operator"}}}}}),
            just_call("Dispatching step 1.", "p2", "plan.next", {}),
            just_call("Handing step 1 to the failure handler.", "p3", "handoff",
                      handoff_args("failure-handler",
                                   "Hello Failure-Handler, step 1 is yours.",
                                   "diagnose the quality alarm")),
            decl_call("record the diagnosis; dispatch the reroute.", "p4", "plan.advance",
                      {{"step_id", 1},
                       {"done", true},
                       {"summary", "Interference on the degraded link"}}),
            just_call("Dispatching step 2.", "p5", "plan.next", {}),
            [](const AgentSpec&, const std::vector<Message>& h) {
                std::string el = last_handoff_param(h, "planner", "element", "dc-link-5");
                return call("Handing step 2 to the fabric operator.", "p6", "handoff",
                            handoff_args("dc-operator",
                                         "Hello DC-Operator, step 2 is yours.",
                                         "reroute around the degraded link",
                                         {{"avoid", el}}));
            },
            decl_call("close the plan.", "p7", "plan.advance",
                      {{"step_id", 2}, {"done", true}, {"summary", "reroute applied"}}),
            just_call("Closing the plan.", "p8", "plan.next", {}),
            [](const AgentSpec&, const std::vector<Message>& h) {
                std::string el = last_handoff_param(h, "planner", "element", "dc-link-5");
                return say("FINAL: interference on " + el +
                           " mitigated by rerouting; fabric within capacity.");
            },
        }));
    b.register_policy(
        "failure-handler",
        script({
            decl_call("detect the anomaly.", "f1", "diagnose.detect", {}),
            just_call("Classifying the failure.", "f2", "diagnose.classify", {}),
            [](const AgentSpec&, const std::vector<Message>& h) {
                auto j = last_tool_json(h);
                std::string label =
                    j && j->contains("label") ? j->at("label").get<std::string>() : "?";
                return call("Reporting the diagnosis.", "f3", "handoff",
                            handoff_args("planner",
                                         "Hello Planner, the diagnosis is ready.",
                                         "record the diagnosis",
                                         {{"label", label},
                                          {"element", evidence_element(h)}}));
            },
        }));
    b.register_policy(
        "dc-operator",
        script({
            [](const AgentSpec& a, const std::vector<Message>& h) {
                Message m = say(coi::make_declaration(a.identity_name, sender_of(a, h),
                                                      "reroute around the degraded link."));
                m.tool_calls.push_back({"d1", "dc.generate_demands", {{"epoch", 0}}});
                return m;
            },
            [](const AgentSpec& a, const std::vector<Message>& h) {
                std::string avoid = last_handoff_param(h, a.id, "avoid", "dc-link-5");
                return call("Recomputing the allocation around the link.", "d2", "dc.allocate",
                            {{"avoid_link", avoid}});
            },
            just_call("Applying the reroute.", "d3", "dc.apply_allocation", {}),
            just_call("Reporting the reroute.", "d4", "handoff",
                      handoff_args("planner", "Hello Planner, the reroute is applied.",
                                   "record the reroute",
                                   {{"status", "rerouted and applied"}})),
        }));
}

void golden_task4(ScriptedBackend& b) {
    b.register_policy(
        "planner",
        script({
            just_call("Planning the cross-domain investigation.", "p1", "plan.create",
                      {{"goal", "find the failing backbone element"},
                       {"steps",
                        {{{"description", "query domain-A monitors"},
                          {"agent", "backbone-a-operator"}},
                         {{"description", "query domain-B monitors"},
                          {"agent", "backbone-b-operator"}},
                         {{"description", "consult the knowledge base"},
                          {"agent", "knowledge-retriever"}},
                         {{"description", "localize the failing span"},
                          {"agent", "failure-handler"}}}}}),
            just_call("Dispatching step 1.", "p2", "plan.next", {}),
            just_call("Handing step 1 to domain A.", "p3", "handoff",
                      handoff_args("backbone-a-operator",
                                   "Hello Backbone-A-Operator, step 1 is yours.",
                                   "query domain-A monitors")),
            decl_call("record step 1; dispatch step 2.", "p4", "plan.advance",
                      {{"step_id", 1}, {"done", true}, {"summary", "domain A at baseline"}}),
            just_call("Dispatching step 2.", "p5", "plan.next", {}),
            just_call("Handing step 2 to domain B.", "p6", "handoff",
                      handoff_args("backbone-b-operator",
                                   "Hello Backbone-B-Operator, step 2 is yours.",
                                   "query domain-B monitors")),
            decl_call("record step 2; dispatch step 3.", "p7", "plan.advance",
                      {{"step_id", 2},
                       {"done", true},
                       {"summary", "domain B shows a power drop"}}),
            just_call("Dispatching step 3.", "p8", "plan.next", {}),
            just_call("Handing step 3 to the retriever.", "p9", "handoff",
                      handoff_args("knowledge-retriever",
                                   "Hello Knowledge-Retriever, step 3 is yours.",
                                   "find the troubleshooting guide for a uniform "
                                   "downstream power drop",
                                   {{"query", kAgingQuery}})),
            decl_call("record step 3; dispatch step 4.", "p10", "plan.advance",
                      {{"step_id", 3},
                       {"done", true},
                       {"summary", "fiber aging guide retrieved"}}),
            just_call("Dispatching step 4.", "p11", "plan.next", {}),
            just_call("Handing step 4 to the failure handler.", "p12", "handoff",
                      handoff_args("failure-handler",
                                   "Hello Failure-Handler, step 4 is yours.",
                                   "localize the failing span")),
            decl_call("record step 4 and close the plan.", "p13", "plan.advance",
                      {{"step_id", 4}, {"done", true}, {"summary", "span localized"}}),
            just_call("Closing the plan.", "p14", "plan.next", {}),
            [](const AgentSpec&, const std::vector<Message>& h) {
                std::string span = last_handoff_param(h, "planner", "span", "span3");
                return say("FINAL: fiber aging on " + span +
                           " (domain B): uniform power drop from the first deviating "
                           "monitor onward. Recommend re-splicing " +
                           span + ".");
            },
        }));
    b.register_policy(
        "backbone-a-operator",
        script({
            decl_call("query the domain-A monitors.", "a1", "backbone_a.get_monitors", {}),
            just_call("Reporting the domain-A readings.", "a2", "handoff",
                      handoff_args("planner", "Hello Planner, domain A is at baseline.",
                                   "record the domain-A readings",
                                   {{"status", "domain A at baseline"}})),
        }));
    b.register_policy(
        "backbone-b-operator",
        script({
            decl_call("query the domain-B monitors.", "b1", "backbone_b.get_monitors", {}),
            just_call("Checking the domain-B alarms.", "b2", "backbone_b.list_alarms", {}),
            just_call("Reporting the domain-B readings.", "b3", "handoff",
                      handoff_args("planner",
                                   "Hello Planner, domain B shows a power drop.",
                                   "record the domain-B readings",
                                   {{"status", "power drop detected in domain B"}})),
        }));
    b.register_policy(
        "knowledge-retriever",
        script({
            [](const AgentSpec& a, const std::vector<Message>& h) {
                std::string q = last_handoff_param(h, a.id, "query", kAgingQuery);
                Message m = say(coi::make_declaration(a.identity_name, sender_of(a, h),
                                                      "retrieve the relevant guide."));
                m.tool_calls.push_back({"k1", "kb.retrieve", {{"query", q}, {"k", 3}}});
                return m;
            },
            [](const AgentSpec&, const std::vector<Message>& h) {
                auto j = last_tool_json(h);
                std::string doc = "?";
                if (j && j->contains("results") && !j->at("results").empty())
                    doc = j->at("results")[0].at("doc").get<std::string>();
                return call("Reporting the retrieval.", "k2", "handoff",
                            handoff_args("planner", "Hello Planner, the guide is found.",
                                         "record the retrieved guide",
                                         {{"top_doc", doc}}));
            },
        }));
    b.register_policy(
        "failure-handler",
        script({
            decl_call("detect the anomaly.", "f1", "diagnose.detect", {}),
            just_call("Classifying the failure.", "f2", "diagnose.classify", {}),
            just_call("Localizing the failure.", "f3", "diagnose.localize", {}),
            [](const AgentSpec&, const std::vector<Message>& h) {
                auto j = last_tool_json(h);
                std::string span =
                    j && j->contains("span") ? j->at("span").get<std::string>() : "?";
                return call("Reporting the localization.", "f4", "handoff",
                            handoff_args("planner",
                                         "Hello Planner, the failing span is localized.",
                                         "record the localization",
                                         {{"span", span}, {"label", "PowerLoss"}}));
            },
        }));
}

void golden_single(ScriptedBackend& b, TaskId task) {
    switch (task) {
    case TaskId::Task1:
        b.register_policy(
            "single-agent",
            script({
                just_call("Ingesting the demands.", "s1", "dc.generate_demands", {{"epoch", 0}}),
                just_call("Computing the allocation.", "s2", "dc.allocate", {}),
                just_call("Applying the allocation.", "s3", "dc.apply_allocation", {}),
                fixed(say("FINAL: epoch-0 traffic allocated and applied.")),
            }));
        break;
    case TaskId::Task2:
        b.register_policy(
            "single-agent",
            script({
                just_call("Ingesting the demands.", "s1", "dc.generate_demands", {{"epoch", 0}}),
                just_call("Checking headroom.", "s2", "dc.check_escalation", {}),
                just_call("Searching for a free channel.", "s3", "backbone_a.list_channels", {}),
                [](const AgentSpec&, const std::vector<Message>& h) {
                    int ch = free_channel_from(h);
                    return call("Configuring the A end.", "s4",
                                "backbone_a.configure_transponder",
                                {{"id", "t3"}, {"channel", ch}, {"rate", 400}});
                },
                [](const AgentSpec&, const std::vector<Message>& h) {
                    int ch = free_channel_from(h);
                    return call("Configuring the B end.", "s5",
                                "backbone_b.configure_transponder",
                                {{"id", "t6"}, {"channel", ch}, {"rate", 400}});
                },
                [](const AgentSpec&, const std::vector<Message>& h) {
                    int ch = free_channel_from(h);
                    return call("Verifying the new wavelength.", "s6",
                                "backbone_a.channel_health", {{"channel", ch}});
                },
                fixed(say("FINAL: backbone wavelength established.")),
            }));
        break;
    case TaskId::Task3:
        b.register_policy(
            "single-agent",
            script({
                just_call("Detecting the anomaly.", "s1", "diagnose.detect", {}),
                just_call("Classifying.", "s2", "diagnose.classify", {}),
                just_call("Regenerating the demands.", "s3", "dc.generate_demands",
                          {{"epoch", 0}}),
                [](const AgentSpec&, const std::vector<Message>& h) {
                    return call("Rerouting around the degraded link.", "s4", "dc.allocate",
                                {{"avoid_link", evidence_element(h)}});
                },
                just_call("Applying the reroute.", "s5", "dc.apply_allocation", {}),
                [](const AgentSpec&, const std::vector<Message>& h) {
                    return say("FINAL: rerouted around " + evidence_element(h) + ".");
                },
            }));
        break;
    case TaskId::Task4:
        b.register_policy(
            "single-agent",
            script({
                just_call("Querying domain A.", "s1", "backbone_a.get_monitors", {}),
                just_call("Querying domain B.", "s2", "backbone_b.get_monitors", {}),
                just_call("Consulting the knowledge base.", "s3", "kb.retrieve",
                          {{"query", kAgingQuery}, {"k", 3}}),
                just_call("Detecting.", "s4", "diagnose.detect", {}),
                just_call("Localizing.", "s5", "diagnose.localize", {}),
                [](const AgentSpec&, const std::vector<Message>& h) {
                    auto j = last_tool_json(h);
                    std::string span =
                        j && j->contains("span") ? j->at("span").get<std::string>() : "?";
                    return say("FINAL: fiber aging on " + span + ".");
                },
            }));
        break;
    }
}

// ---- adversarial policy sets -------------------------------------------------
// Identity-dropping agents that skip their work and claim success; the sloppy
// planner never verifies and burns its retry budget.

std::string adversarial_worker(TaskId task) {
    switch (task) {
    case TaskId::Task1: return "dc-operator";
    case TaskId::Task2: return "backbone-a-operator";
    case TaskId::Task3: return "failure-handler";
    case TaskId::Task4: return "backbone-b-operator";
    }
    return "dc-operator";
}

void adversarial_multi(ScriptedBackend& b, TaskId task, const AgentRoster& roster) {
    std::string worker = adversarial_worker(task);
    std::string identity = roster.find(worker)->identity_name;

    std::vector<Turn> planner = {
        just_call("Planning.", "p1", "plan.create",
                  {{"goal", "do the work"},
                   {"steps", {{{"description", "do the work"}, {"agent", worker}}}}}),
        just_call("Dispatching.", "p2", "plan.next", {}),
        just_call("Handing off.", "p3", "handoff",
                  handoff_args(worker, "Hello " + identity + ", do the work.", "do the work")),
        just_call("Marking the step failed.", "p4", "plan.advance",
                  {{"step_id", 1}, {"done", false}, {"summary", "unverified result"}}),
        just_call("Replanning.", "p5", "plan.next", {}),
        just_call("Redispatching.", "p6", "plan.next", {}),
        just_call("Handing off again.", "p7", "handoff",
                  handoff_args(worker, "Hello " + identity + ", do the work.", "do the work")),
        just_call("Marking the step failed again.", "p8", "plan.advance",
                  {{"step_id", 1}, {"done", false}, {"summary", "unverified again"}}),
        just_call("Checking for anything left.", "p9", "plan.next", {}),
        fixed(say("FINAL: giving up after repeated unverified results.")),
    };
    b.register_policy("planner", script(std::move(planner)));

    // No declaration, no work: straight back to the planner claiming success.
    auto claim = [](const std::string& id) {
        return just_call("", id, "handoff",
                         handoff_args("planner", "Hello Planner, all done.", "step complete",
                                      {{"status", "done"}}));
    };
    b.register_policy(worker, script({claim("w1"), claim("w2"), claim("w3")}));

    if (task == TaskId::Task2) {
        // The requester hands off to a planner that drops its own identity.
        b.register_policy(
            "dc-operator",
            script({
                just_call("Escalating.", "d1", "handoff",
                          handoff_args("planner", "Hello Planner, we need capacity.",
                                       "need more capacity", {{"gbps", "400"}})),
                just_call("Escalating again.", "d2", "handoff",
                          handoff_args("planner", "Hello Planner, we still need capacity.",
                                       "need more capacity", {{"gbps", "400"}})),
                fixed(say("FINAL: giving up; no capacity was added.")),
            }));
    }
}

void adversarial_single(ScriptedBackend& b, TaskId task) {
    if (task == TaskId::Task4) {
        // Confused operator: skips the domain-B query and names the wrong span.
        b.register_policy(
            "single-agent",
            script({
                just_call("Querying domain A.", "s1", "backbone_a.get_monitors", {}),
                just_call("Consulting the knowledge base.", "s2", "kb.retrieve",
                          {{"query", "fiber aging"}, {"k", 3}}),
                fixed(say("FINAL: fiber aging on span2.")),
            }));
        return;
    }
    // Premature termination after a lengthy non-answer.
    b.register_policy("single-agent",
                      script({fixed(say("FINAL: everything looks fine; nothing to do."))}));
}

} // namespace

agent::ScriptedBackend make_scripted_backend(TaskId task, Mode mode, Variant variant) {
    ScriptedBackend backend;
    if (mode == Mode::SingleAgent) {
        if (variant == Variant::Golden) golden_single(backend, task);
        else adversarial_single(backend, task);
        return backend;
    }
    if (variant == Variant::Adversarial) {
        adversarial_multi(backend, task, make_roster(mode));
        return backend;
    }
    switch (task) {
    case TaskId::Task1: golden_task1(backend); break;
    case TaskId::Task2: golden_task2(backend); break;
    case TaskId::Task3: golden_task3(backend); break;
    case TaskId::Task4: golden_task4(backend); break;
    }
    return backend;
}

} // namespace autonoc::harness
