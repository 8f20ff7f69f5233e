#include "autonoc/coi.hpp"

#include <sstream>

namespace autonoc::coi {

static std::string escape_value(const std::string& v) {
    std::string out;
    out.reserve(v.size());
    for (char c : v) {
        if (c == '\\') out += "\\\\";
        else if (c == '\n') out += "\\n";
        else out += c;
    }
    return out;
}

static std::string unescape_value(const std::string& v, int line) {
    std::string out;
    out.reserve(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        if (v[i] != '\\') {
            out += v[i];
            continue;
        }
        if (i + 1 >= v.size()) throw HandoffParseError("dangling escape", line);
        ++i;
        if (v[i] == 'n') out += '\n';
        else if (v[i] == '\\') out += '\\';
        else throw HandoffParseError("unknown escape \\" + std::string(1, v[i]), line);
    }
    return out;
}

std::string encode_handoff(const Handoff& h, std::string_view target_identity) {
    if (h.to.empty()) throw EncodingError("to: target agent id is empty");
    if (h.to.find('\n') != std::string::npos || h.to.find(' ') != std::string::npos)
        throw EncodingError("to: agent id must not contain spaces or newlines");
    if (h.query.empty()) throw EncodingError("query: must be nonempty");
    if (!target_identity.empty() && h.greeting.find(target_identity) == std::string::npos)
        throw EncodingError("greeting: must name the target agent \"" +
                            std::string(target_identity) + "\"");
    for (const auto& [key, value] : h.params) {
        if (key.empty()) throw EncodingError("params: empty key");
        if (key.find('=') != std::string::npos || key.find('\n') != std::string::npos ||
            key.find(' ') != std::string::npos)
            throw EncodingError("params: key \"" + key + "\" contains '=', space or newline");
        (void)value;
    }

    std::ostringstream out;
    out << "@handoff to=" << h.to << '\n';
    out << "greeting: " << escape_value(h.greeting) << '\n';
    out << "query: " << escape_value(h.query) << '\n';
    out << "params:" << '\n';
    for (const auto& [key, value] : h.params) {
        out << "  " << key << '=' << escape_value(value) << '\n';
    }
    out << "@end";
    return out.str();
}

static std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    lines.push_back(cur);
    return lines;
}

Handoff parse_handoff(const std::string& text) {
    const auto lines = split_lines(text);
    size_t start = lines.size();
    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].rfind("@handoff to=", 0) == 0) {
            start = i;
            break;
        }
    }
    if (start == lines.size()) throw NotAHandoffError("no @handoff block found");

    auto line_no = [&](size_t i) { return static_cast<int>(i) + 1; };
    Handoff h;
    h.to = lines[start].substr(std::string("@handoff to=").size());
    if (h.to.empty()) throw HandoffParseError("empty target agent id", line_no(start));

    size_t i = start + 1;
    if (i >= lines.size() || lines[i].rfind("greeting: ", 0) != 0)
        throw HandoffParseError("expected \"greeting: \" line", line_no(i));
    h.greeting = unescape_value(lines[i].substr(10), line_no(i));
    ++i;
    if (i >= lines.size() || lines[i].rfind("query: ", 0) != 0)
        throw HandoffParseError("expected \"query: \" line", line_no(i));
    h.query = unescape_value(lines[i].substr(7), line_no(i));
    if (h.query.empty()) throw HandoffParseError("query must be nonempty", line_no(i));
    ++i;
    if (i >= lines.size() || lines[i] != "params:")
        throw HandoffParseError("expected \"params:\" line", line_no(i));
    ++i;
    while (i < lines.size() && lines[i].rfind("  ", 0) == 0) {
        const std::string entry = lines[i].substr(2);
        size_t eq = entry.find('=');
        if (eq == std::string::npos || eq == 0)
            throw HandoffParseError("expected \"<key>=<value>\" param entry", line_no(i));
        std::string key = entry.substr(0, eq);
        if (h.params.count(key))
            throw HandoffParseError("duplicate param key \"" + key + "\"", line_no(i));
        h.params[key] = unescape_value(entry.substr(eq + 1), line_no(i));
        ++i;
    }
    if (i >= lines.size() || lines[i] != "@end")
        throw HandoffParseError("expected \"@end\" terminator", line_no(i));
    return h;
}

agent::Message make_handoff_tool_result(const Handoff& h, const std::string& sender_identity,
                                        const agent::AgentSpec& target, bool coi_enabled,
                                        const std::string& tool_call_id) {
    if (h.to != target.id)
        throw RoutingError("handoff addressed to \"" + h.to + "\" but target agent is \"" +
                           target.id + "\"");
    agent::Message msg;
    msg.role = agent::Role::Tool;
    msg.tool_call_id = tool_call_id;
    std::string block = encode_handoff(h, target.identity_name);
    if (coi_enabled) {
        msg.content = std::string(kPseudoSystemTag) + " You are " + target.identity_name +
                      ". Core responsibility: " + target.core_responsibility +
                      ". You have received a handoff from " + sender_identity + ".\n" + block;
    } else {
        msg.content = block;
    }
    return msg;
}

std::optional<PseudoSystemBlock> parse_pseudo_system(const std::string& content) {
    const std::string tag = std::string(kPseudoSystemTag) + " You are ";
    if (content.rfind(tag, 0) != 0) return std::nullopt;
    const std::string resp_marker = ". Core responsibility: ";
    const std::string sender_marker = ". You have received a handoff from ";
    size_t resp_at = content.find(resp_marker, tag.size());
    if (resp_at == std::string::npos) return std::nullopt;
    size_t sender_at = content.find(sender_marker, resp_at + resp_marker.size());
    if (sender_at == std::string::npos) return std::nullopt;
    size_t end = content.find(".\n", sender_at + sender_marker.size());
    if (end == std::string::npos) end = content.rfind('.');
    PseudoSystemBlock block;
    block.target_identity = content.substr(tag.size(), resp_at - tag.size());
    block.core_responsibility =
        content.substr(resp_at + resp_marker.size(), sender_at - resp_at - resp_marker.size());
    block.sender = content.substr(sender_at + sender_marker.size(),
                                  end - sender_at - sender_marker.size());
    return block;
}

std::string make_declaration(const std::string& identity, const std::string& sender,
                             const std::string& planned_action) {
    return "I am " + identity + ". Handoff from " + sender +
           " received and verified. Proceeding: " + planned_action;
}

ValidationResult validate_declaration(const agent::Message& first_assistant,
                                      const ExpectedDeclaration& expected) {
    ValidationResult result;
    const std::string& content = first_assistant.content;
    if (content.rfind("I am ", 0) != 0) {
        result.reasons.push_back("missing declaration");
        return result;
    }
    size_t dot = content.find('.', 5);
    if (dot == std::string::npos) {
        result.reasons.push_back("missing declaration");
        return result;
    }
    std::string stated = content.substr(5, dot - 5);
    if (stated != expected.identity) result.reasons.push_back("identity mismatch");

    const std::string from_marker = " Handoff from ";
    const std::string ack_marker = " received and verified.";
    size_t from_at = content.find(from_marker, dot);
    size_t ack_at = content.find(ack_marker, dot);
    if (from_at == std::string::npos || ack_at == std::string::npos || ack_at < from_at) {
        result.reasons.push_back("missing acknowledgement");
    } else {
        std::string sender =
            content.substr(from_at + from_marker.size(), ack_at - from_at - from_marker.size());
        if (sender != expected.sender) result.reasons.push_back("sender mismatch");
    }
    result.pass = result.reasons.empty();
    return result;
}

} // namespace autonoc::coi
