#include "autonoc/agent.hpp"

#include <cstdlib>

#include <httplib.h>

#include "autonoc/errors.hpp"

namespace autonoc::agent {

Message ScriptedBackend::next(const AgentSpec& agent, const std::vector<Message>& history) {
    auto it = policies_.find(agent.id);
    if (it == policies_.end()) throw BackendError("no scripted policy for agent " + agent.id);
    Message msg = it->second(agent, history);
    msg.role = Role::Assistant;
    msg.agent_id = agent.id;
    return msg;
}

ScriptedBackend::Policy replay_policy(std::vector<Message> recorded) {
    return [recorded = std::move(recorded)](const AgentSpec& agent,
                                            const std::vector<Message>& history) {
        size_t seen = 0;
        for (const auto& m : history) {
            if (m.role == Role::Assistant && m.agent_id == agent.id) ++seen;
        }
        if (seen >= recorded.size())
            throw BackendError("replay exhausted after " + std::to_string(recorded.size()) +
                               " messages");
        return recorded[seen];
    };
}

RemoteConfig RemoteConfig::from_env() {
    RemoteConfig cfg;
    if (const char* url = std::getenv("AUTONOC_LLM_URL")) cfg.url = url;
    if (const char* key = std::getenv("AUTONOC_LLM_KEY")) cfg.api_key = key;
    if (cfg.url.empty()) throw ConfigError("AUTONOC_LLM_URL is not set");
    return cfg;
}

nlohmann::ordered_json RemoteBackend::build_request(const AgentSpec& agent,
                                                    const std::string& model,
                                                    const std::vector<Message>& history) {
    nlohmann::ordered_json req;
    req["model"] = model;
    auto msgs = nlohmann::ordered_json::array();
    for (const Message& m : history) {
        auto j = m.to_json();
        j.erase("agent"); // trial-local attribution stays off the wire
        msgs.push_back(j);
    }
    req["messages"] = msgs;
    auto tools = nlohmann::ordered_json::array();
    for (const auto& name : agent.tool_names) tools.push_back({{"name", name}});
    req["tools"] = tools;
    return req;
}

Message RemoteBackend::parse_response(const nlohmann::json& body) {
    const auto& jm = body.at("message");
    Message msg;
    msg.role = Role::Assistant;
    msg.content = jm.value("content", std::string());
    if (jm.contains("tool_calls")) {
        for (const auto& jc : jm["tool_calls"]) {
            ToolCall c;
            c.id = jc.at("id").get<std::string>();
            c.name = jc.at("name").get<std::string>();
            c.args = jc.value("args", nlohmann::json::object());
            msg.tool_calls.push_back(c);
        }
    }
    return msg;
}

Message RemoteBackend::next(const AgentSpec& agent, const std::vector<Message>& history) {
    auto scheme_end = config_.url.find("://");
    if (scheme_end == std::string::npos) throw BackendError("malformed endpoint " + config_.url);
    auto path_start = config_.url.find('/', scheme_end + 3);
    std::string origin = config_.url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : config_.url.substr(path_start);

    std::string body = build_request(agent, config_.model, history).dump();
    std::string last_error;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        httplib::Client client(origin);
        client.set_connection_timeout(5);
        client.set_read_timeout(30);
        httplib::Headers headers;
        if (!config_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        auto res = client.Post(path, headers, body, "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        try {
            Message msg = parse_response(nlohmann::json::parse(res->body));
            msg.agent_id = agent.id;
            return msg;
        } catch (const std::exception& e) {
            last_error = std::string("malformed response: ") + e.what();
        }
    }
    throw BackendError(last_error.empty() ? "remote backend failed" : last_error);
}

Message run_agent_turn(const AgentSpec& agent, const std::vector<Message>& history,
                       Backend& backend) {
    return backend.next(agent, history);
}

ToolExecution execute_tool(const ToolRegistry& registry, const AgentSpec& agent,
                           const ToolCall& call) {
    ToolExecution exec;
    exec.message.role = Role::Tool;
    exec.message.tool_call_id = call.id;
    exec.message.agent_id = agent.id;
    auto it = registry.tools.find(call.name);
    if (!agent.has_tool(call.name) || it == registry.tools.end()) {
        exec.message.content = "tool-not-available: " + call.name;
        return exec;
    }
    try {
        // Backends may send null for "no arguments"; tools expect an object.
        ToolOutcome out =
            it->second(call.args.is_null() ? nlohmann::json::object() : call.args);
        exec.message.content = out.content;
        exec.handoff = out.handoff;
    } catch (const std::exception& e) {
        exec.message.content = std::string("error: ") + e.what();
    }
    return exec;
}

namespace {

bool starts_with_final(const std::string& content) {
    return content.rfind(kFinalMarker, 0) == 0;
}

} // namespace

Transcript run_react_loop(const AgentSpec& agent, std::vector<Message> seed, Backend& backend,
                          const ToolRegistry& registry, const LoopOptions& options) {
    if (options.max_steps < 1) throw InputError("max_steps: must be >= 1");

    Transcript t;
    t.messages = std::move(seed);

    Message system;
    system.role = Role::System;
    system.content = agent.system_prompt;
    system.agent_id = agent.id;
    std::vector<Message> history;
    history.reserve(t.messages.size() + 1);
    history.push_back(system);
    history.insert(history.end(), t.messages.begin(), t.messages.end());

    while (true) {
        Message msg;
        try {
            msg = run_agent_turn(agent, history, backend);
        } catch (const std::exception& e) {
            t.termination = Termination::BackendError;
            t.error = e.what();
            return t;
        }
        ++t.step_count;
        t.messages.push_back(msg);
        history.push_back(msg);

        if (t.step_count == 1 && options.expected_declaration && options.coi != CoiMode::Off) {
            t.declaration = coi::validate_declaration(msg, *options.expected_declaration);
            if (!t.declaration->pass && options.coi == CoiMode::Strict) {
                t.termination = Termination::ValidationAbort;
                return t;
            }
        }

        if (starts_with_final(msg.content)) {
            t.termination = Termination::FinalAnswer;
            return t;
        }

        for (const ToolCall& call : msg.tool_calls) {
            ToolExecution exec = execute_tool(registry, agent, call);
            t.messages.push_back(exec.message);
            history.push_back(exec.message);
            if (exec.handoff) {
                t.outgoing = exec.handoff;
                t.termination = Termination::FinalAnswer;
                return t;
            }
        }

        if (t.step_count >= options.max_steps) {
            t.termination = Termination::StepLimit;
            return t;
        }
    }
}

Transcript run_react_loop(const AgentSpec& agent, const Message& goal, Backend& backend,
                          const ToolRegistry& registry, const LoopOptions& options) {
    return run_react_loop(agent, std::vector<Message>{goal}, backend, registry, options);
}

} // namespace autonoc::agent
