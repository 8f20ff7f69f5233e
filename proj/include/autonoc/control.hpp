#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "autonoc/failure.hpp"

namespace autonoc::control {

using AgentId = std::string;

struct RpcRequest {
    std::string verb;
    nlohmann::json args = nlohmann::json::object();
};

struct RpcResponse {
    bool ok = false;
    nlohmann::json payload = nlohmann::json::object();
    std::string error;

    nlohmann::ordered_json to_json() const;
};

// Maps each agent to the domains it may call. Planner agents are registered
// with no device domains at all.
struct IsolationPolicy {
    std::map<AgentId, std::vector<Domain>> grants;

    bool registered(const AgentId& agent) const { return grants.count(agent) > 0; }
};

struct Decision {
    bool allow = false;
    std::string reason;
};

Decision enforce_isolation(const AgentId& caller, Domain domain, const IsolationPolicy& policy);

struct AuditRecord {
    std::uint64_t tick = 0;
    AgentId caller;
    Domain domain = Domain::BackboneA;
    std::string verb;
    bool ok = false;
    std::string error;

    nlohmann::ordered_json to_json() const;
};

// One controller per domain, multiplexed over the shared world value. RPCs
// are serialized; state-changing verbs apply atomically or not at all.
class ControlPlane {
public:
    ControlPlane(failure::World world, IsolationPolicy policy,
                 failure::Tolerances tolerances = {});

    RpcResponse rpc_call(Domain domain, const AgentId& caller, const RpcRequest& req);

    const failure::World& world() const { return world_; }
    const failure::World& baseline() const { return baseline_; }
    const IsolationPolicy& policy() const { return policy_; }
    const std::vector<AuditRecord>& audit_log() const { return audit_; }
    std::uint64_t tick() const { return tick_; }

    // Out-of-band plant changes (scenario setup, failure injection).
    void set_world(failure::World world) { world_ = std::move(world); }

    static const std::vector<std::string>& verbs_for(Domain domain);
    static const std::vector<std::string>& all_verbs();

private:
    RpcResponse dispatch(Domain domain, const RpcRequest& req);
    RpcResponse get_monitors(Domain domain);
    RpcResponse list_channels(Domain domain);
    RpcResponse set_channel(const nlohmann::json& args);
    RpcResponse configure_transponder(Domain domain, const nlohmann::json& args);
    RpcResponse list_alarms(Domain domain);
    RpcResponse get_topology(Domain domain);
    RpcResponse apply_allocation(const nlohmann::json& args);
    RpcResponse get_link_quality(const nlohmann::json& args);

    failure::World world_;
    failure::World baseline_;
    IsolationPolicy policy_;
    failure::Tolerances tolerances_;
    std::vector<AuditRecord> audit_;
    std::uint64_t tick_ = 0;
};

} // namespace autonoc::control
