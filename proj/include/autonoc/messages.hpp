#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "autonoc/errors.hpp"

namespace autonoc::agent {

enum class Role { System, User, Assistant, Tool };

inline std::string to_string(Role r) {
    switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
    case Role::Tool: return "tool";
    }
    return "?";
}

inline Role role_from_string(const std::string& s) {
    if (s == "system") return Role::System;
    if (s == "user") return Role::User;
    if (s == "assistant") return Role::Assistant;
    if (s == "tool") return Role::Tool;
    throw InputError("unknown role: " + s);
}

struct ToolCall {
    std::string id;
    std::string name;
    nlohmann::json args = nlohmann::json::object();
};

struct Message {
    Role role = Role::User;
    std::string content;
    std::vector<ToolCall> tool_calls;
    std::string tool_call_id; // tool messages only
    std::string agent_id;     // attribution within a trial transcript

    nlohmann::ordered_json to_json() const;
    static Message from_json(const nlohmann::json& j);
};

enum class AgentCategory { Planner, Task };

struct AgentSpec {
    std::string id;
    std::string identity_name;
    std::string core_responsibility;
    AgentCategory category = AgentCategory::Task;
    std::vector<std::string> tool_names;
    std::string system_prompt;

    bool has_tool(const std::string& name) const {
        for (const auto& t : tool_names)
            if (t == name) return true;
        return false;
    }
};

} // namespace autonoc::agent
