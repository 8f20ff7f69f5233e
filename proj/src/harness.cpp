#include "autonoc/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifndef AUTONOC_DATA_DIR
#define AUTONOC_DATA_DIR "data"
#endif

namespace autonoc::harness {

using agent::Message;
using agent::Role;
using agent::ToolOutcome;

std::string to_string(TaskId t) { return "task" + std::to_string(static_cast<int>(t)); }

std::string to_string(Mode m) {
    switch (m) {
    case Mode::Autolight: return "autolight";
    case Mode::SingleAgent: return "single_agent";
    case Mode::NaiveMulti: return "naive_multi";
    }
    return "?";
}

std::string to_string(Variant v) {
    return v == Variant::Golden ? "golden" : "adversarial";
}

TaskId task_from_string(const std::string& s) {
    for (int i = 1; i <= 4; ++i) {
        auto t = static_cast<TaskId>(i);
        if (s == to_string(t) || s == std::to_string(i)) return t;
    }
    throw ConfigError("unknown task: " + s);
}

Mode mode_from_string(const std::string& s) {
    if (s == "autolight") return Mode::Autolight;
    if (s == "single" || s == "single_agent") return Mode::SingleAgent;
    if (s == "naive" || s == "naive_multi") return Mode::NaiveMulti;
    throw ConfigError("unknown mode: " + s);
}

Variant variant_from_string(const std::string& s) {
    if (s == "golden") return Variant::Golden;
    if (s == "adversarial") return Variant::Adversarial;
    throw ConfigError("unknown variant: " + s);
}

// ---- roster ---------------------------------------------------------------

const agent::AgentSpec* AgentRoster::find(const std::string& id) const {
    for (const auto& a : agents)
        if (a.id == id) return &a;
    return nullptr;
}

namespace {

agent::AgentSpec make_agent(std::string id, std::string identity, std::string responsibility,
                            agent::AgentCategory cat, std::vector<std::string> tools) {
    agent::AgentSpec spec;
    spec.id = std::move(id);
    spec.identity_name = std::move(identity);
    spec.core_responsibility = std::move(responsibility);
    spec.category = cat;
    spec.tool_names = std::move(tools);
    spec.system_prompt = "You are " + spec.identity_name + ". " + spec.core_responsibility +
                         ". Declare your identity after every handoff before acting.";
    return spec;
}

std::vector<agent::AgentSpec> task_agents() {
    using Cat = agent::AgentCategory;
    return {
        make_agent("backbone-a-operator", "Backbone-A-Operator",
                   "operate the domain-A half of the 440 km backbone", Cat::Task,
                   {"backbone_a.get_monitors", "backbone_a.list_channels", "backbone_a.set_channel",
                    "backbone_a.configure_transponder", "backbone_a.list_alarms",
                    "backbone_a.get_topology", "backbone_a.channel_health", "handoff"}),
        make_agent("backbone-b-operator", "Backbone-B-Operator",
                   "operate the domain-B half of the 440 km backbone", Cat::Task,
                   {"backbone_b.get_monitors", "backbone_b.list_channels", "backbone_b.set_channel",
                    "backbone_b.configure_transponder", "backbone_b.list_alarms",
                    "backbone_b.get_topology", "backbone_b.channel_health", "handoff"}),
        make_agent("metro-operator", "Metro-Operator", "route lightpaths over the DCI metro ring",
                   Cat::Task,
                   {"metro.get_topology", "metro.list_alarms", "metro.rwa_assign", "handoff"}),
        make_agent("dc-operator", "DC-Operator", "operate the intra-DC spine-leaf fabric",
                   Cat::Task,
                   {"dc.get_topology", "dc.list_alarms", "dc.apply_allocation",
                    "dc.get_link_quality", "dc.generate_demands", "dc.allocate",
                    "dc.check_escalation", "handoff"}),
        make_agent("failure-handler", "Failure-Handler",
                   "detect, classify, and localize physical-layer failures", Cat::Task,
                   {"diagnose.detect", "diagnose.classify", "diagnose.localize", "handoff"}),
        make_agent("knowledge-retriever", "Knowledge-Retriever",
                   "retrieve operational documents for the other agents", Cat::Task,
                   {"kb.retrieve", "handoff"}),
    };
}

} // namespace

AgentRoster make_roster(Mode mode) {
    AgentRoster roster;
    if (mode == Mode::SingleAgent) {
        std::vector<std::string> all_tools;
        for (const auto& a : task_agents()) {
            for (const auto& t : a.tool_names) {
                if (std::find(all_tools.begin(), all_tools.end(), t) == all_tools.end())
                    all_tools.push_back(t);
            }
        }
        roster.agents.push_back(make_agent("single-agent", "Single-Agent",
                                           "operate every domain of the network alone",
                                           agent::AgentCategory::Task, std::move(all_tools)));
        return roster;
    }
    roster.agents.push_back(make_agent("planner", "Planner",
                                       "problem decomposition and execution orchestration",
                                       agent::AgentCategory::Planner,
                                       {"plan.create", "plan.advance", "plan.next", "handoff"}));
    for (auto& a : task_agents()) roster.agents.push_back(std::move(a));
    return roster;
}

control::IsolationPolicy make_isolation_policy(Mode mode) {
    control::IsolationPolicy policy;
    if (mode == Mode::SingleAgent) {
        policy.grants["single-agent"] = {Domain::BackboneA, Domain::BackboneB, Domain::DciMetro,
                                         Domain::IntraDc};
        return policy;
    }
    policy.grants["planner"] = {};
    policy.grants["backbone-a-operator"] = {Domain::BackboneA};
    policy.grants["backbone-b-operator"] = {Domain::BackboneB};
    policy.grants["metro-operator"] = {Domain::DciMetro};
    policy.grants["dc-operator"] = {Domain::IntraDc};
    policy.grants["failure-handler"] = {};
    policy.grants["knowledge-retriever"] = {};
    return policy;
}

const retriever::Index& knowledge_base() {
    static const retriever::Index index =
        retriever::ingest_directory(std::string(AUTONOC_DATA_DIR) + "/corpus");
    return index;
}

// ---- tools ------------------------------------------------------------------

namespace {

ToolOutcome rpc(TrialState& state, Domain domain, const std::string& verb,
                const nlohmann::json& args) {
    auto resp = state.plane.rpc_call(domain, state.current_agent, {verb, args});
    return {resp.to_json().dump(), std::nullopt};
}

void add_rpc_tools(agent::ToolRegistry& reg, TrialState& state, const std::string& prefix,
                   Domain domain, const std::vector<std::string>& verbs) {
    for (const auto& verb : verbs) {
        reg.add(prefix + "." + verb, [&state, domain, verb](const nlohmann::json& args) {
            return rpc(state, domain, verb, args);
        });
    }
}

nlohmann::ordered_json flows_json(const traffic::FlowAllocation& alloc) {
    auto flows = nlohmann::ordered_json::array();
    for (const auto& f : alloc.flows)
        flows.push_back({{"src", f.src}, {"dst", f.dst}, {"spine", f.spine}, {"gbps", f.gbps}});
    return flows;
}

} // namespace

agent::ToolRegistry make_tool_registry(TrialState& state) {
    agent::ToolRegistry reg;
    const std::vector<std::string> backbone_verbs = {
        "get_monitors", "list_channels", "set_channel",
        "configure_transponder", "list_alarms", "get_topology"};
    add_rpc_tools(reg, state, "backbone_a", Domain::BackboneA, backbone_verbs);
    add_rpc_tools(reg, state, "backbone_b", Domain::BackboneB, backbone_verbs);
    add_rpc_tools(reg, state, "metro", Domain::DciMetro, {"get_topology", "list_alarms"});
    add_rpc_tools(reg, state, "dc", Domain::IntraDc,
                  {"get_topology", "list_alarms", "get_link_quality"});

    auto channel_health = [&state](const nlohmann::json& args) {
        int ch = args.at("channel").get<int>();
        double osnr = optical::compute_osnr(state.plane.world().backbone, ch);
        auto profile = optical::compute_power_profile(state.plane.world().backbone);
        double min_dbm = profile.empty() ? optical::kPowerFloorDbm
                                         : profile.front().total_power_dbm;
        for (const auto& r : profile) min_dbm = std::min(min_dbm, r.total_power_dbm);
        nlohmann::ordered_json j = {
            {"channel", ch}, {"osnr_db", osnr}, {"min_monitor_dbm", min_dbm}};
        return ToolOutcome{j.dump(), std::nullopt};
    };
    reg.add("backbone_a.channel_health", channel_health);
    reg.add("backbone_b.channel_health", channel_health);

    reg.add("metro.rwa_assign", [&state](const nlohmann::json& args) {
        traffic::LightpathDemand demand;
        demand.id = args.value("id", std::string("lp"));
        demand.src = args.at("src").get<int>();
        demand.dst = args.at("dst").get<int>();
        demand.gbps = args.value("gbps", 0.0);
        auto world = state.plane.world();
        auto assigned = traffic::rwa_first_fit(demand, world.metro);
        nlohmann::ordered_json j;
        j["assigned"] = assigned.has_value();
        if (assigned) {
            state.plane.set_world(std::move(world));
            j["path"] = assigned->path;
            j["wavelength"] = assigned->wavelength;
        }
        return ToolOutcome{j.dump(), std::nullopt};
    });

    reg.add("dc.generate_demands", [&state](const nlohmann::json& args) {
        int epoch = args.value("epoch", state.epoch);
        state.demands = traffic::generate_demands(state.workload, epoch, state.seed);
        double total = 0.0;
        for (double g : state.demands->gbps) total += g;
        nlohmann::ordered_json j = {{"epoch", epoch},
                                    {"groups", state.demands->n},
                                    {"total_gbps", total},
                                    {"table", state.demands->to_table()}};
        return ToolOutcome{j.dump(), std::nullopt};
    });

    reg.add("dc.allocate", [&state](const nlohmann::json& args) {
        if (!state.demands) throw InputError("no demand matrix: run dc.generate_demands first");
        const auto& fabric = state.plane.world().fabric;
        std::string avoid = args.value("avoid_link", std::string());
        state.allocation = avoid.empty()
                               ? traffic::allocate_intra_dc(*state.demands, fabric)
                               : traffic::allocate_intra_dc_avoiding(*state.demands, fabric, avoid);
        nlohmann::ordered_json j;
        j["flows"] = flows_json(*state.allocation);
        j["link_loads"] = state.allocation->link_loads;
        j["violations"] = state.allocation->violations.size();
        if (!avoid.empty()) j["avoid_link"] = avoid;
        return ToolOutcome{j.dump(), std::nullopt};
    });

    reg.add("dc.apply_allocation", [&state](const nlohmann::json&) {
        if (!state.allocation) throw InputError("no allocation: run dc.allocate first");
        nlohmann::json args = {{"flows", flows_json(*state.allocation)}};
        return rpc(state, Domain::IntraDc, "apply_allocation", args);
    });

    reg.add("dc.check_escalation", [&state](const nlohmann::json&) {
        if (!state.demands) throw InputError("no demand matrix: run dc.generate_demands first");
        const auto& fabric = state.plane.world().fabric;
        double aggregate = 0.0;
        for (double g : state.demands->gbps) aggregate += g;
        double bisection = 0.0;
        for (const auto& l : fabric.links) bisection += l.capacity_gbps;
        bisection /= 2.0;
        nlohmann::ordered_json j = {
            {"needs_backbone", traffic::needs_backbone_spectrum(*state.demands, fabric)},
            {"aggregate_gbps", aggregate},
            {"bisection_gbps", bisection}};
        return ToolOutcome{j.dump(), std::nullopt};
    });

    reg.add("diagnose.detect", [&state](const nlohmann::json&) {
        state.anomaly = failure::detect_world(state.plane.world(), state.plane.baseline());
        nlohmann::ordered_json j;
        j["found"] = state.anomaly.has_value();
        if (state.anomaly) {
            j["first_affected"] = state.anomaly->first_affected;
            auto evidence = nlohmann::ordered_json::array();
            for (const auto& e : state.anomaly->evidence) {
                nlohmann::ordered_json je;
                je["kind"] = e.kind == failure::EvidenceKind::Power     ? "power"
                             : e.kind == failure::EvidenceKind::Quality ? "quality"
                                                                        : "channel";
                je["element"] = e.element_id;
                if (e.kind == failure::EvidenceKind::Power)
                    je["port"] = e.port == optical::Port::Input ? "input" : "output";
                je["observed"] = e.observed;
                je["baseline"] = e.baseline;
                je["delta"] = e.delta;
                evidence.push_back(je);
            }
            j["evidence"] = evidence;
        }
        return ToolOutcome{j.dump(), std::nullopt};
    });

    reg.add("diagnose.classify", [&state](const nlohmann::json&) {
        if (!state.anomaly) throw InputError("no anomaly: run diagnose.detect first");
        std::vector<std::pair<std::string, optical::QualityReport>> reports;
        for (const auto& link : state.plane.world().fabric.imdd_links) {
            auto q = optical::imdd_quality(link);
            if (q.penalty_db > 0.0) reports.emplace_back(link.link_id, q);
        }
        auto cls = failure::classify_failure(*state.anomaly, reports);
        nlohmann::ordered_json j = {{"label", failure::to_string(cls.label)},
                                    {"confidence", cls.confidence}};
        return ToolOutcome{j.dump(), std::nullopt};
    });

    reg.add("diagnose.localize", [&state](const nlohmann::json&) {
        if (!state.anomaly) throw InputError("no anomaly: run diagnose.detect first");
        auto span = failure::localize_failure(*state.anomaly, state.plane.world().backbone);
        nlohmann::ordered_json j = {{"span", span}};
        return ToolOutcome{j.dump(), std::nullopt};
    });

    reg.add("kb.retrieve", [&state](const nlohmann::json& args) {
        auto hits =
            retriever::retrieve(*state.kb, args.at("query").get<std::string>(),
                                args.value("k", 3));
        auto results = nlohmann::ordered_json::array();
        for (const auto& h : hits) {
            results.push_back(
                {{"doc", h.chunk.doc_id}, {"heading", h.chunk.heading}, {"score", h.score}});
        }
        nlohmann::ordered_json j = {{"results", results}};
        return ToolOutcome{j.dump(), std::nullopt};
    });

    reg.add("plan.create", [&state](const nlohmann::json& args) {
        std::vector<plan::StepSpec> specs;
        for (const auto& s : args.at("steps")) {
            specs.push_back({s.at("description").get<std::string>(),
                             s.at("agent").get<std::string>()});
        }
        std::vector<std::string> registered;
        for (const auto& a : state.roster->agents) registered.push_back(a.id);
        state.table = plan::create_plan(args.at("goal").get<std::string>(), specs, registered);
        state.plan_revisions.push_back(state.table->to_json());
        return ToolOutcome{state.table->to_json().dump(), std::nullopt};
    });

    reg.add("plan.advance", [&state](const nlohmann::json& args) {
        if (!state.table) throw InputError("no plan: run plan.create first");
        plan::Outcome outcome{args.at("done").get<bool>(),
                              args.value("summary", std::string())};
        state.table = plan::advance_plan(*state.table, args.at("step_id").get<int>(), outcome);
        state.plan_revisions.push_back(state.table->to_json());
        return ToolOutcome{state.table->to_json().dump(), std::nullopt};
    });

    reg.add("plan.next", [&state](const nlohmann::json&) {
        if (!state.table) throw InputError("no plan: run plan.create first");
        auto d = plan::next_action(*state.table);
        bool mutated = d.table.revision != state.table->revision;
        state.table = d.table;
        if (mutated) state.plan_revisions.push_back(state.table->to_json());
        nlohmann::ordered_json j = {{"action", plan::to_string(d.kind)}};
        if (d.step_id >= 0) j["step_id"] = d.step_id;
        if (!d.agent.empty()) j["agent"] = d.agent;
        if (d.kind == plan::ActionKind::Finish) j["success"] = d.success;
        return ToolOutcome{j.dump(), std::nullopt};
    });

    reg.add("handoff", [&state](const nlohmann::json& args) {
        coi::Handoff h;
        h.to = args.at("to").get<std::string>();
        h.greeting = args.at("greeting").get<std::string>();
        h.query = args.at("query").get<std::string>();
        if (args.contains("params")) {
            for (const auto& [k, v] : args.at("params").items())
                h.params[k] = v.get<std::string>();
        }
        const auto* target = state.roster->find(h.to);
        if (!target) throw NotFoundError("unknown handoff target: " + h.to);
        auto msg =
            coi::make_handoff_tool_result(h, state.current_identity, *target, state.coi_enabled);
        return ToolOutcome{msg.content, h};
    });

    return reg;
}

// ---- logs -------------------------------------------------------------------

std::string TrialLog::to_jsonl() const {
    std::ostringstream out;
    auto line = [&out](const char* type, const nlohmann::ordered_json& data) {
        nlohmann::ordered_json j;
        j["type"] = type;
        j["data"] = data;
        out << j.dump() << "\n";
    };
    for (const auto& m : messages) line("message", m.to_json());
    for (const auto& p : plan_revisions) line("plan_revision", p);
    line("world", world_snapshot);
    line("ground_truth", ground_truth);
    for (const auto& t : terminations) line("termination", t);
    line("final", final_answer);
    return out.str();
}

TrialLog TrialLog::from_jsonl(const std::string& text) {
    TrialLog log;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::ordered_json::parse(line);
        std::string type = j.at("type").get<std::string>();
        if (type == "message") log.messages.push_back(Message::from_json(j.at("data")));
        else if (type == "plan_revision") log.plan_revisions.push_back(j.at("data"));
        else if (type == "world") log.world_snapshot = j.at("data");
        else if (type == "ground_truth") log.ground_truth = j.at("data");
        else if (type == "termination") log.terminations.push_back(j.at("data").get<std::string>());
        else if (type == "final") log.final_answer = j.at("data").get<std::string>();
        else throw InputError("unknown trial-log record: " + type);
    }
    return log;
}

nlohmann::ordered_json world_snapshot(const failure::World& world) {
    nlohmann::ordered_json j;

    nlohmann::ordered_json backbone;
    auto channels = nlohmann::ordered_json::array();
    for (const auto& ch : world.backbone.channels) {
        nlohmann::ordered_json jc;
        jc["index"] = ch.index;
        jc["kind"] = ch.kind == optical::ChannelKind::Live ? "live" : "dummy";
        jc["bitrate_gbps"] = ch.bitrate_gbps;
        jc["active"] = ch.active;
        if (ch.kind == optical::ChannelKind::Live && ch.active)
            jc["osnr_db"] = optical::compute_osnr(world.backbone, ch.index);
        channels.push_back(jc);
    }
    backbone["channels"] = channels;
    auto transponders = nlohmann::ordered_json::array();
    for (const auto& t : world.backbone.transponders) {
        nlohmann::ordered_json jt;
        jt["id"] = t.id;
        jt["domain"] = to_string(t.domain);
        if (t.channel) {
            jt["channel"] = *t.channel;
            jt["rate_gbps"] = t.rate_gbps;
        }
        transponders.push_back(jt);
    }
    backbone["transponders"] = transponders;
    auto monitors = nlohmann::ordered_json::array();
    for (const auto& r : optical::compute_power_profile(world.backbone)) {
        monitors.push_back({{"element", r.element_id},
                            {"port", r.port == optical::Port::Input ? "input" : "output"},
                            {"total_power_dbm", r.total_power_dbm}});
    }
    backbone["monitors"] = monitors;
    j["backbone"] = backbone;

    nlohmann::ordered_json fabric;
    fabric["num_spines"] = world.fabric.num_spines;
    auto links = nlohmann::ordered_json::array();
    for (const auto& l : world.fabric.links) {
        links.push_back({{"id", l.id},
                         {"leaf", l.leaf},
                         {"spine", l.spine},
                         {"capacity_gbps", l.capacity_gbps},
                         {"load_gbps", l.load_gbps}});
    }
    fabric["links"] = links;
    auto imdd = nlohmann::ordered_json::array();
    for (const auto& l : world.fabric.imdd_links) {
        nlohmann::ordered_json jl;
        jl["link"] = l.link_id;
        if (l.mpi_ratio_db) jl["mpi_ratio_db"] = *l.mpi_ratio_db;
        jl["penalty_db"] = optical::imdd_quality(l).penalty_db;
        imdd.push_back(jl);
    }
    fabric["imdd"] = imdd;
    j["fabric"] = fabric;

    int used = 0;
    for (const auto& e : world.metro.edges)
        for (int dir = 0; dir < 2; ++dir)
            for (int c : e.occupancy[dir])
                if (c > 0) ++used;
    j["metro"] = {{"name", world.metro.name}, {"used_wavelengths", used}};

    auto failures = nlohmann::ordered_json::array();
    for (const auto& f : world.active_failures)
        failures.push_back(nlohmann::ordered_json::parse(f.to_json().dump()));
    j["active_failures"] = failures;
    return j;
}

// ---- trial runner -------------------------------------------------------------

namespace {

struct Scenario {
    failure::World world;
    traffic::WorkloadSpec workload;
    std::optional<failure::FailureSpec> injection;
    nlohmann::ordered_json ground_truth;
    std::string entry_agent;
    std::string goal;
};

Scenario make_scenario(TaskId task, Mode mode, std::uint64_t seed) {
    Scenario s;
    s.entry_agent = mode == Mode::SingleAgent ? "single-agent"
                    : task == TaskId::Task2   ? "dc-operator"
                                              : "planner";
    switch (task) {
    case TaskId::Task1:
        s.world = failure::World::standard();
        s.workload = {traffic::WorkloadSpec::Kind::RingAllReduce, 100.0, 0.0, 8};
        s.ground_truth = {{"task", "task1"}, {"workload", "ring"}, {"payload_gbps", 100.0},
                          {"epoch", 0}, {"seed", seed}};
        s.goal = "Allocate the epoch-0 ring all-reduce traffic (payload 100 Gbps per adjacent "
                 "group pair) across the intra-DC fabric and apply it.";
        break;
    case TaskId::Task2:
        s.world = failure::World::standard(4);
        s.workload = {traffic::WorkloadSpec::Kind::RingAllReduce, 700.0, 0.0, 8};
        s.ground_truth = {{"task", "task2"},
                          {"initially_held_channels", {0, 1, 2, 3}},
                          {"free_transponders", {"t3", "t6"}},
                          {"requested_gbps", 400}};
        s.goal = "Epoch demand surge: ring all-reduce payload 700 Gbps. Check local fabric "
                 "capacity and escalate to the backbone if it is insufficient.";
        break;
    case TaskId::Task3: {
        s.world = failure::World::standard();
        failure::FailureSpec f;
        f.kind = failure::FailureSpec::Kind::Mpi;
        f.element_id = "dc-link-5";
        f.ratio_db = -20.0;
        s.injection = f;
        s.workload = {traffic::WorkloadSpec::Kind::RingAllReduce, 100.0, 0.0, 8};
        s.ground_truth = {{"task", "task3"}, {"failure", f.to_json()},
                          {"element", "dc-link-5"}};
        s.goal = "A quality alarm fired in the intra-DC fabric. Investigate, classify the "
                 "failure, and remediate it.";
        break;
    }
    case TaskId::Task4: {
        s.world = failure::World::standard();
        failure::FailureSpec f;
        f.kind = failure::FailureSpec::Kind::FiberAging;
        f.element_id = "span3";
        f.delta_db = 3.0;
        s.injection = f;
        s.workload = {traffic::WorkloadSpec::Kind::RingAllReduce, 100.0, 0.0, 8};
        s.ground_truth = {{"task", "task4"}, {"failure", f.to_json()},
                          {"expected_span", "span3"}};
        s.goal = "Power alarms along the 440 km backbone. Identify the failing element across "
                 "domains and name the culprit.";
        break;
    }
    }
    return s;
}

} // namespace

TrialResult run_task(TaskId task, Mode mode, agent::Backend& backend, std::uint64_t seed,
                     const RunOptions& options) {
    Scenario scenario = make_scenario(task, mode, seed);
    AgentRoster roster = make_roster(mode);
    if (!roster.find(scenario.entry_agent)) throw SetupError("entry agent missing from roster");

    TrialState state(std::move(scenario.world), make_isolation_policy(mode));
    if (scenario.injection)
        state.plane.set_world(failure::inject_failure(state.plane.world(), *scenario.injection));
    state.workload = scenario.workload;
    state.seed = seed;
    state.coi_enabled = mode == Mode::Autolight;
    state.roster = &roster;
    state.kb = &knowledge_base();
    auto registry = make_tool_registry(state);

    TrialResult result;
    result.task = task;
    result.trial_index = options.trial_index;
    result.seed = seed;
    result.mode = mode;

    Message goal;
    goal.role = Role::User;
    goal.content = scenario.goal;

    std::vector<Message> thread = {goal};
    const agent::AgentSpec* current = roster.find(scenario.entry_agent);
    std::optional<coi::ExpectedDeclaration> expected;
    std::string final_answer;

    for (int activation = 0; activation < options.max_activations; ++activation) {
        state.current_agent = current->id;
        state.current_identity = current->identity_name;
        agent::LoopOptions loop;
        loop.max_steps = options.max_steps;
        loop.coi = mode == Mode::Autolight ? agent::CoiMode::Strict : agent::CoiMode::Off;
        loop.expected_declaration = expected;
        expected.reset();

        auto t = agent::run_react_loop(*current, thread, backend, registry, loop);
        thread = t.messages;
        result.total_steps += t.step_count;
        result.terminations.push_back(agent::to_string(t.termination));

        if (t.outgoing) {
            const auto* target = roster.find(t.outgoing->to);
            if (!target) { // error tool message already in thread; return to entry
                current = roster.find(scenario.entry_agent);
                continue;
            }
            expected = coi::ExpectedDeclaration{target->identity_name, current->identity_name};
            current = target;
            continue;
        }
        if (t.termination == agent::Termination::FinalAnswer) {
            if (current->id == scenario.entry_agent) {
                final_answer = thread.back().content;
                break;
            }
            Message note;
            note.role = Role::User;
            note.content = "[coordinator] agent " + current->id + " finished without a handoff.";
            thread.push_back(note);
            current = roster.find(scenario.entry_agent);
            continue;
        }
        // step_limit, validation_abort, backend_error
        Message note;
        note.role = Role::User;
        note.content = "[coordinator] activation of " + current->id +
                       " ended: " + agent::to_string(t.termination);
        thread.push_back(note);
        if (current->id == scenario.entry_agent) break; // the coordinator itself is stuck
        current = roster.find(scenario.entry_agent);
    }

    result.log.messages = std::move(thread);
    result.log.plan_revisions = state.plan_revisions;
    result.log.world_snapshot = world_snapshot(state.plane.world());
    result.log.ground_truth = scenario.ground_truth;
    result.log.terminations = result.terminations;
    result.log.final_answer = final_answer;
    result.checkpoints = evaluate_checkpoints(result.log, task);
    result.completed = !final_answer.empty() &&
                       std::all_of(result.checkpoints.begin(), result.checkpoints.end(),
                                   [](const Checkpoint& c) { return c.pass; });

    if (!options.transcript_dir.empty()) {
        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(options.transcript_dir, ec);
        auto path = fs::path(options.transcript_dir) /
                    (to_string(task) + "-" + to_string(mode) + "-trial" +
                     std::to_string(options.trial_index) + ".jsonl");
        std::ofstream out(path);
        if (!out) throw IoError("cannot write " + path.string());
        out << result.log.to_jsonl();
    }
    return result;
}

std::vector<TrialResult> run_trials(TaskId task, Mode mode, int n, std::uint64_t base_seed,
                                    agent::Backend& backend, const RunOptions& options) {
    if (n < 1) throw InputError("trials: must be >= 1");
    std::vector<TrialResult> results;
    for (int i = 0; i < n; ++i) {
        RunOptions opt = options;
        opt.trial_index = i;
        results.push_back(run_task(task, mode, backend, base_seed + i, opt));
    }
    return results;
}

nlohmann::ordered_json TrialResult::to_json() const {
    nlohmann::ordered_json j;
    j["task"] = harness::to_string(task);
    j["trial_index"] = trial_index;
    j["seed"] = seed;
    j["mode"] = harness::to_string(mode);
    auto cps = nlohmann::ordered_json::array();
    for (const auto& c : checkpoints)
        cps.push_back({{"id", c.id}, {"description", c.description}, {"pass", c.pass}});
    j["checkpoints"] = cps;
    j["completed"] = completed;
    j["total_steps"] = total_steps;
    j["terminations"] = terminations;
    return j;
}

} // namespace autonoc::harness
