#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "autonoc/coi.hpp"
#include "autonoc/messages.hpp"

namespace autonoc::agent {

enum class Termination { FinalAnswer, StepLimit, BackendError, ValidationAbort };

inline std::string to_string(Termination t) {
    switch (t) {
    case Termination::FinalAnswer: return "final_answer";
    case Termination::StepLimit: return "step_limit";
    case Termination::BackendError: return "backend_error";
    case Termination::ValidationAbort: return "validation_abort";
    }
    return "?";
}

struct Transcript {
    std::vector<Message> messages; // seed conversation plus everything produced
    int step_count = 0;            // assistant turns taken
    Termination termination = Termination::FinalAnswer;
    std::optional<coi::ValidationResult> declaration; // set when a declaration was expected
    std::optional<coi::Handoff> outgoing;             // handoff that ended the activation
    std::string error;                                // backend_error detail
};

// Decision backend: produces the next assistant message from the visible
// history. Scripted backends must be pure functions of (agent, history).
class Backend {
public:
    virtual ~Backend() = default;
    virtual Message next(const AgentSpec& agent, const std::vector<Message>& history) = 0;
};

class ScriptedBackend : public Backend {
public:
    using Policy = std::function<Message(const AgentSpec&, const std::vector<Message>&)>;

    void register_policy(const std::string& agent_id, Policy policy) {
        policies_[agent_id] = std::move(policy);
    }
    bool has_policy(const std::string& agent_id) const { return policies_.count(agent_id) > 0; }

    Message next(const AgentSpec& agent, const std::vector<Message>& history) override;

private:
    std::map<std::string, Policy> policies_;
};

// Replays a recorded assistant-message sequence: the i-th call (counted by
// assistant messages already visible in history) returns recorded[i].
ScriptedBackend::Policy replay_policy(std::vector<Message> recorded);

struct RemoteConfig {
    std::string url;   // e.g. http://host:port/v1/chat
    std::string model = "default";
    std::string api_key;
    int retries = 2;

    static RemoteConfig from_env(); // AUTONOC_LLM_URL / AUTONOC_LLM_KEY
};

// Chat-completions style HTTP backend. POSTs {model, messages, tools} and
// expects {message: {content, tool_calls: [{id, name, args}]}}.
class RemoteBackend : public Backend {
public:
    explicit RemoteBackend(RemoteConfig config) : config_(std::move(config)) {}

    Message next(const AgentSpec& agent, const std::vector<Message>& history) override;

    static nlohmann::ordered_json build_request(const AgentSpec& agent, const std::string& model,
                                                const std::vector<Message>& history);
    static Message parse_response(const nlohmann::json& body);

private:
    RemoteConfig config_;
};

struct ToolOutcome {
    std::string content;
    std::optional<coi::Handoff> handoff; // set by handoff tools; ends the activation
};

using ToolFn = std::function<ToolOutcome(const nlohmann::json& args)>;

struct ToolRegistry {
    std::map<std::string, ToolFn> tools;

    void add(const std::string& name, ToolFn fn) { tools[name] = std::move(fn); }
};

struct ToolExecution {
    Message message; // role=tool, carries the originating tool_call_id
    std::optional<coi::Handoff> handoff;
};

// Runs one tool call on behalf of an agent. Unknown or unavailable tools and
// tool exceptions surface as tool-message text, never as thrown errors.
ToolExecution execute_tool(const ToolRegistry& registry, const AgentSpec& agent,
                           const ToolCall& call);

enum class CoiMode { Off, Monitor, Strict };

struct LoopOptions {
    int max_steps = 40;
    CoiMode coi = CoiMode::Off;
    // When set, the first assistant message must carry a valid declaration.
    std::optional<coi::ExpectedDeclaration> expected_declaration;
};

inline constexpr const char* kFinalMarker = "FINAL:";

Message run_agent_turn(const AgentSpec& agent, const std::vector<Message>& history,
                       Backend& backend);

// ReAct loop over a seed conversation (the agent's system message is added
// internally and is not part of the returned transcript).
Transcript run_react_loop(const AgentSpec& agent, std::vector<Message> seed, Backend& backend,
                          const ToolRegistry& registry, const LoopOptions& options = {});

Transcript run_react_loop(const AgentSpec& agent, const Message& goal, Backend& backend,
                          const ToolRegistry& registry, const LoopOptions& options = {});

} // namespace autonoc::agent
