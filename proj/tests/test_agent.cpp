#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "autonoc/agent.hpp"
#include "autonoc/control.hpp"

using namespace autonoc;
using namespace autonoc::agent;

namespace {

AgentSpec operator_agent() {
    AgentSpec spec;
    spec.id = "backbone-a-operator";
    spec.identity_name = "Backbone-A-Operator";
    spec.core_responsibility = "operate backbone domain A";
    spec.category = AgentCategory::Task;
    spec.tool_names = {"get_monitors", "handoff"};
    spec.system_prompt = "You operate backbone domain A.";
    return spec;
}

Message assistant(const std::string& content) {
    Message m;
    m.role = Role::Assistant;
    m.content = content;
    return m;
}

ScriptedBackend::Policy echo_declaration() {
    return [](const AgentSpec& agent, const std::vector<Message>&) {
        return assistant("FINAL: I am " + agent.identity_name + ", standing by.");
    };
}

} // namespace

TEST_CASE("scripted backend is a pure function of the history") {
    ScriptedBackend backend;
    backend.register_policy("backbone-a-operator", echo_declaration());
    auto spec = operator_agent();
    std::vector<Message> history = {assistant("prior context")};
    auto a = run_agent_turn(spec, history, backend);
    auto b = run_agent_turn(spec, history, backend);
    CHECK(a.to_json() == b.to_json());
    CHECK(a.content == "FINAL: I am Backbone-A-Operator, standing by.");
    CHECK(a.agent_id == "backbone-a-operator");

    AgentSpec other = spec;
    other.id = "ghost";
    CHECK_THROWS_AS(run_agent_turn(other, history, backend), BackendError);
}

TEST_CASE("remote backend surfaces transport failure after retries") {
    RemoteConfig cfg;
    cfg.url = "http://127.0.0.1:1/v1/chat";
    cfg.retries = 0;
    RemoteBackend backend(cfg);
    CHECK_THROWS_AS(backend.next(operator_agent(), {assistant("hi")}), BackendError);
}

TEST_CASE("remote backend speaks the documented wire contract") {
    nlohmann::json captured;
    httplib::Server server;
    server.Post("/v1/chat", [&](const httplib::Request& req, httplib::Response& res) {
        captured = nlohmann::json::parse(req.body);
        nlohmann::json reply = {
            {"message",
             {{"content", "checking monitors"},
              {"tool_calls",
               nlohmann::json::array(
                   {{{"id", "c1"}, {"name", "get_monitors"}, {"args", nlohmann::json::object()}}})}}}};
        res.set_content(reply.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread serve([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    RemoteConfig cfg;
    cfg.url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat";
    cfg.model = "test-model";
    cfg.api_key = "k";
    RemoteBackend backend(cfg);
    auto spec = operator_agent();
    Message goal;
    goal.role = Role::User;
    goal.content = "check the amplifiers";
    auto msg = backend.next(spec, {goal});
    server.stop();
    serve.join();

    CHECK(msg.content == "checking monitors");
    REQUIRE(msg.tool_calls.size() == 1);
    CHECK(msg.tool_calls[0].name == "get_monitors");
    CHECK(captured["model"] == "test-model");
    REQUIRE(captured["messages"].size() == 1);
    CHECK(captured["messages"][0]["role"] == "user");
    CHECK(captured["tools"] == nlohmann::json::array({{{"name", "get_monitors"}},
                                                      {{"name", "handoff"}}}));
}

TEST_CASE("execute_tool dispatches registered tools and reports unknown ones") {
    control::IsolationPolicy policy;
    policy.grants["backbone-a-operator"] = {Domain::BackboneA};
    control::ControlPlane plane(failure::World::standard(), policy);

    ToolRegistry registry;
    registry.add("get_monitors", [&](const nlohmann::json&) {
        auto resp = plane.rpc_call(Domain::BackboneA, "backbone-a-operator",
                                   {"get_monitors", {}});
        return ToolOutcome{resp.to_json().dump(), std::nullopt};
    });

    auto spec = operator_agent();
    auto exec = execute_tool(registry, spec, {"c1", "get_monitors", {}});
    CHECK(exec.message.role == Role::Tool);
    CHECK(exec.message.tool_call_id == "c1");
    // The tool message carries exactly the controller's RPC output.
    auto direct = plane.rpc_call(Domain::BackboneA, "backbone-a-operator", {"get_monitors", {}});
    CHECK(nlohmann::json::parse(exec.message.content) == direct.to_json());

    auto missing = execute_tool(registry, spec, {"c2", "apply_allocation", {}});
    CHECK(missing.message.content == "tool-not-available: apply_allocation");

    registry.add("boom", [](const nlohmann::json&) -> ToolOutcome {
        throw InputError("bad args");
    });
    spec.tool_names.push_back("boom");
    auto failed = execute_tool(registry, spec, {"c3", "boom", {}});
    CHECK(failed.message.content == "error: bad args");
}

TEST_CASE("handoff tools end the activation and deliver a pseudo-system message") {
    AgentSpec target;
    target.id = "failure-handler";
    target.identity_name = "Failure-Handler";
    target.core_responsibility = "investigate failures";

    ToolRegistry registry;
    registry.add("handoff", [&](const nlohmann::json& args) {
        coi::Handoff h;
        h.to = args.at("to").get<std::string>();
        h.greeting = args.at("greeting").get<std::string>();
        h.query = args.at("query").get<std::string>();
        auto msg = coi::make_handoff_tool_result(h, "Backbone-A-Operator", target, true);
        return ToolOutcome{msg.content, h};
    });

    ScriptedBackend backend;
    backend.register_policy("backbone-a-operator",
                            [](const AgentSpec&, const std::vector<Message>&) {
                                Message m;
                                m.role = Role::Assistant;
                                m.content = "escalating";
                                m.tool_calls.push_back(
                                    {"c1", "handoff",
                                     {{"to", "failure-handler"},
                                      {"greeting", "Hello Failure-Handler"},
                                      {"query", "investigate"}}});
                                return m;
                            });

    Message goal;
    goal.role = Role::User;
    goal.content = "something is off";
    auto t = run_react_loop(operator_agent(), goal, backend, registry);
    CHECK(t.termination == Termination::FinalAnswer);
    REQUIRE(t.outgoing);
    CHECK(t.outgoing->to == "failure-handler");
    // goal + assistant + tool result
    REQUIRE(t.messages.size() == 3);
    CHECK(coi::parse_pseudo_system(t.messages.back().content));
    CHECK(t.messages.back().tool_call_id == "c1");
}

TEST_CASE("react loop terminations") {
    ToolRegistry registry;
    registry.add("noop", [](const nlohmann::json&) { return ToolOutcome{"ok", std::nullopt}; });
    AgentSpec spec = operator_agent();
    spec.tool_names = {"noop"};
    Message goal;
    goal.role = Role::User;
    goal.content = "go";

    SUBCASE("final answer on step 1") {
        ScriptedBackend backend;
        backend.register_policy(spec.id, [](const AgentSpec&, const std::vector<Message>&) {
            return assistant("FINAL: done.");
        });
        auto t = run_react_loop(spec, goal, backend, registry);
        CHECK(t.termination == Termination::FinalAnswer);
        CHECK(t.step_count == 1);
        CHECK(t.messages.size() == 2); // goal + final assistant message
    }
    SUBCASE("endless tool loop hits the step budget") {
        ScriptedBackend backend;
        backend.register_policy(spec.id, [](const AgentSpec&, const std::vector<Message>&) {
            Message m = assistant("looping");
            m.tool_calls.push_back({"c", "noop", {}});
            return m;
        });
        LoopOptions options;
        options.max_steps = 5;
        auto t = run_react_loop(spec, goal, backend, registry, options);
        CHECK(t.termination == Termination::StepLimit);
        CHECK(t.step_count == 5);
    }
    SUBCASE("backend failure is recorded, not thrown") {
        ScriptedBackend backend; // no policy registered
        auto t = run_react_loop(spec, goal, backend, registry);
        CHECK(t.termination == Termination::BackendError);
        CHECK(!t.error.empty());
        CHECK(t.step_count == 0);
    }
}

TEST_CASE("strict CoI aborts on a bad declaration; monitor mode records it") {
    ToolRegistry registry;
    registry.add("noop", [](const nlohmann::json&) { return ToolOutcome{"ok", std::nullopt}; });
    AgentSpec spec = operator_agent();
    spec.tool_names = {"noop"};

    ScriptedBackend backend;
    backend.register_policy(spec.id, [](const AgentSpec&, const std::vector<Message>& history) {
        bool first = history.back().role != Role::Tool;
        if (first) {
            Message m = assistant("I am Somebody-Else. Proceeding."); // wrong identity
            m.tool_calls.push_back({"c1", "noop", {}});
            return m;
        }
        return assistant("FINAL: wrapped up.");
    });

    Message goal;
    goal.role = Role::Tool;
    goal.content = "handoff payload";
    LoopOptions options;
    options.expected_declaration = coi::ExpectedDeclaration{"Backbone-A-Operator", "Planner"};

    options.coi = CoiMode::Strict;
    auto strict = run_react_loop(spec, goal, backend, registry, options);
    CHECK(strict.termination == Termination::ValidationAbort);
    REQUIRE(strict.declaration);
    CHECK(!strict.declaration->pass);
    // No tool message follows the aborted activation's assistant turn.
    CHECK(strict.messages.back().role == Role::Assistant);

    options.coi = CoiMode::Monitor;
    auto monitor = run_react_loop(spec, goal, backend, registry, options);
    CHECK(monitor.termination == Termination::FinalAnswer);
    REQUIRE(monitor.declaration);
    CHECK(!monitor.declaration->pass);

    // A compliant declaration passes under strict mode.
    ScriptedBackend good;
    good.register_policy(spec.id, [](const AgentSpec& a, const std::vector<Message>& history) {
        if (history.back().role == Role::Tool)
            return assistant(coi::make_declaration(a.identity_name, "Planner", "nothing to do."));
        return assistant("FINAL: done.");
    });
    options.coi = CoiMode::Strict;
    auto ok = run_react_loop(spec, goal, good, registry, options);
    CHECK(ok.termination == Termination::FinalAnswer);
    CHECK(ok.declaration->pass);
}

TEST_CASE("every tool message matches an earlier tool call and replay reproduces the run") {
    ToolRegistry registry;
    int counter = 0;
    registry.add("tick", [&](const nlohmann::json&) {
        return ToolOutcome{"count=" + std::to_string(++counter), std::nullopt};
    });
    AgentSpec spec = operator_agent();
    spec.tool_names = {"tick"};

    ScriptedBackend backend;
    backend.register_policy(spec.id, [](const AgentSpec&, const std::vector<Message>& history) {
        int turns = 0;
        for (const auto& m : history)
            if (m.role == Role::Assistant) ++turns;
        if (turns < 3) {
            Message m = assistant("step " + std::to_string(turns));
            m.tool_calls.push_back({"call-" + std::to_string(turns), "tick", {}});
            return m;
        }
        return assistant("FINAL: counted.");
    });

    Message goal;
    goal.role = Role::User;
    goal.content = "count three times";
    auto t = run_react_loop(spec, goal, backend, registry);
    CHECK(t.termination == Termination::FinalAnswer);
    CHECK(t.step_count == 4);

    std::vector<std::string> seen_ids;
    for (const auto& m : t.messages) {
        if (m.role == Role::Assistant)
            for (const auto& c : m.tool_calls) seen_ids.push_back(c.id);
        if (m.role == Role::Tool) {
            CHECK(std::find(seen_ids.begin(), seen_ids.end(), m.tool_call_id) != seen_ids.end());
        }
    }

    // Replaying the recorded assistant messages reproduces the tool-call sequence.
    std::vector<Message> recorded;
    for (const auto& m : t.messages)
        if (m.role == Role::Assistant) recorded.push_back(m);
    ScriptedBackend replay;
    replay.register_policy(spec.id, replay_policy(recorded));
    counter = 0;
    auto again = run_react_loop(spec, goal, replay, registry);
    REQUIRE(again.messages.size() == t.messages.size());
    for (size_t i = 0; i < t.messages.size(); ++i) {
        CHECK(again.messages[i].to_json() == t.messages[i].to_json());
    }
}
