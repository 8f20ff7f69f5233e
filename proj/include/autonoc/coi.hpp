#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autonoc/messages.hpp"

namespace autonoc::coi {

// Structured inter-agent transfer: greeting naming the target, a query, and
// the essential arguments.
struct Handoff {
    std::string to; // target agent id
    std::string greeting;
    std::string query;
    std::map<std::string, std::string> params;

    bool operator==(const Handoff&) const = default;
};

// The @handoff block grammar, the normative inter-agent wire format:
//
//   @handoff to=<agent-id>
//   greeting: <text>
//   query: <text>
//   params:
//     <key>=<value>
//   @end
//
// Values are single-line with \n and \\ escapes; params are emitted in
// lexicographic key order.
std::string encode_handoff(const Handoff& h, std::string_view target_identity);

// Inverse of encode on its image. Tolerates surrounding prose and extracts
// the first @handoff...@end block.
Handoff parse_handoff(const std::string& text);

struct PseudoSystemBlock {
    std::string target_identity;
    std::string core_responsibility;
    std::string sender;
};

inline constexpr const char* kPseudoSystemTag = "[PSEUDO-SYSTEM]";

// Tool message delivered to the target agent. With CoI enabled the encoded
// handoff is preceded by the pseudo-system header restating the target's
// identity and core responsibility; without CoI only the block is sent.
agent::Message make_handoff_tool_result(const Handoff& h, const std::string& sender_identity,
                                        const agent::AgentSpec& target, bool coi_enabled = true,
                                        const std::string& tool_call_id = "");

std::optional<PseudoSystemBlock> parse_pseudo_system(const std::string& content);

// Canonical pre-execution declaration sentence.
std::string make_declaration(const std::string& identity, const std::string& sender,
                             const std::string& planned_action);

struct ValidationResult {
    bool pass = false;
    std::vector<std::string> reasons; // empty iff pass
};

struct ExpectedDeclaration {
    std::string identity;
    std::string sender;
};

// Checks the first assistant message after a handoff delivery: it must open
// with "I am <identity>. Handoff from <sender> received and verified."
// before any tool call.
ValidationResult validate_declaration(const agent::Message& first_assistant,
                                      const ExpectedDeclaration& expected);

} // namespace autonoc::coi
