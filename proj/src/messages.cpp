#include "autonoc/messages.hpp"

namespace autonoc::agent {

nlohmann::ordered_json Message::to_json() const {
    nlohmann::ordered_json j;
    j["role"] = to_string(role);
    j["content"] = content;
    if (!tool_calls.empty()) {
        auto calls = nlohmann::ordered_json::array();
        for (const ToolCall& c : tool_calls) {
            calls.push_back({{"id", c.id}, {"name", c.name}, {"args", c.args}});
        }
        j["tool_calls"] = calls;
    }
    if (!tool_call_id.empty()) j["tool_call_id"] = tool_call_id;
    if (!agent_id.empty()) j["agent"] = agent_id;
    return j;
}

Message Message::from_json(const nlohmann::json& j) {
    Message m;
    m.role = role_from_string(j.at("role").get<std::string>());
    m.content = j.value("content", std::string());
    if (j.contains("tool_calls")) {
        for (const auto& jc : j["tool_calls"]) {
            ToolCall c;
            c.id = jc.at("id").get<std::string>();
            c.name = jc.at("name").get<std::string>();
            c.args = jc.value("args", nlohmann::json::object());
            m.tool_calls.push_back(c);
        }
    }
    m.tool_call_id = j.value("tool_call_id", std::string());
    m.agent_id = j.value("agent", std::string());
    return m;
}

} // namespace autonoc::agent
