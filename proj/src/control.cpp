#include "autonoc/control.hpp"

#include <algorithm>

#include "autonoc/traffic.hpp"

namespace autonoc::control {

using failure::World;
using optical::ChannelKind;
using optical::Port;

nlohmann::ordered_json RpcResponse::to_json() const {
    nlohmann::ordered_json j;
    j["ok"] = ok;
    if (ok) j["payload"] = payload;
    else j["error"] = error;
    return j;
}

nlohmann::ordered_json AuditRecord::to_json() const {
    nlohmann::ordered_json j;
    j["tick"] = tick;
    j["caller"] = caller;
    j["domain"] = to_string(domain);
    j["verb"] = verb;
    j["outcome"] = ok ? "ok" : error;
    return j;
}

Decision enforce_isolation(const AgentId& caller, Domain domain,
                           const IsolationPolicy& policy) {
    auto it = policy.grants.find(caller);
    if (it == policy.grants.end()) return {false, "unknown-caller"};
    if (std::find(it->second.begin(), it->second.end(), domain) != it->second.end())
        return {true, ""};
    return {false, "not granted for " + to_string(domain)};
}

const std::vector<std::string>& ControlPlane::verbs_for(Domain domain) {
    static const std::vector<std::string> backbone = {
        "get_monitors", "list_channels", "set_channel",
        "configure_transponder", "list_alarms", "get_topology"};
    static const std::vector<std::string> metro = {"get_topology", "list_alarms"};
    static const std::vector<std::string> dc = {"get_topology", "list_alarms",
                                                "apply_allocation", "get_link_quality"};
    switch (domain) {
    case Domain::BackboneA:
    case Domain::BackboneB: return backbone;
    case Domain::DciMetro: return metro;
    case Domain::IntraDc: return dc;
    }
    return backbone;
}

const std::vector<std::string>& ControlPlane::all_verbs() {
    static const std::vector<std::string> verbs = {
        "get_monitors", "list_channels",    "set_channel", "configure_transponder",
        "list_alarms",  "apply_allocation", "get_link_quality", "get_topology"};
    return verbs;
}

ControlPlane::ControlPlane(World world, IsolationPolicy policy, failure::Tolerances tolerances)
    : world_(std::move(world)), baseline_(world_), policy_(std::move(policy)),
      tolerances_(tolerances) {
    baseline_.active_failures.clear();
}

RpcResponse ControlPlane::rpc_call(Domain domain, const AgentId& caller,
                                   const RpcRequest& req) {
    RpcResponse resp;
    Decision decision = enforce_isolation(caller, domain, policy_);
    if (!decision.allow) {
        resp.error = "access-denied: " + decision.reason;
    } else {
        const auto& verbs = verbs_for(domain);
        if (std::find(verbs.begin(), verbs.end(), req.verb) == verbs.end()) {
            resp.error = "unsupported-verb: " + req.verb + " on " + to_string(domain);
        } else {
            try {
                resp = dispatch(domain, req);
            } catch (const NotFoundError& e) {
                resp = {false, {}, std::string("not-found: ") + e.what()};
            } catch (const ConflictError& e) {
                resp = {false, {}, std::string("conflict: ") + e.what()};
            } catch (const std::exception& e) {
                resp = {false, {}, std::string("invalid-args: ") + e.what()};
            }
        }
    }
    audit_.push_back({tick_, caller, domain, req.verb, resp.ok, resp.error});
    return resp;
}

RpcResponse ControlPlane::dispatch(Domain domain, const RpcRequest& req) {
    if (req.verb == "get_monitors") return get_monitors(domain);
    if (req.verb == "list_channels") return list_channels(domain);
    if (req.verb == "set_channel") return set_channel(req.args);
    if (req.verb == "configure_transponder") return configure_transponder(domain, req.args);
    if (req.verb == "list_alarms") return list_alarms(domain);
    if (req.verb == "get_topology") return get_topology(domain);
    if (req.verb == "apply_allocation") return apply_allocation(req.args);
    if (req.verb == "get_link_quality") return get_link_quality(req.args);
    return {false, {}, "unsupported-verb: " + req.verb};
}

RpcResponse ControlPlane::get_monitors(Domain domain) {
    RpcResponse resp;
    auto profile = optical::compute_power_profile(world_.backbone);
    auto monitors = nlohmann::json::array();
    for (const auto& r : profile) {
        int idx = world_.backbone.edfa_index(r.element_id);
        if (world_.backbone.edfas[idx].domain != domain) continue;
        monitors.push_back({{"element", r.element_id},
                            {"port", r.port == Port::Input ? "input" : "output"},
                            {"total_power_dbm", r.total_power_dbm},
                            {"tick", tick_}});
    }
    resp.ok = true;
    resp.payload["monitors"] = monitors;
    return resp;
}

RpcResponse ControlPlane::list_channels(Domain domain) {
    RpcResponse resp;
    auto channels = nlohmann::json::array();
    for (const auto& ch : world_.backbone.channels) {
        nlohmann::json jc = {{"index", ch.index},
                             {"kind", ch.kind == ChannelKind::Live ? "live" : "dummy"},
                             {"active", ch.active}};
        if (ch.kind == ChannelKind::Live) {
            jc["bitrate_gbps"] = ch.bitrate_gbps;
            jc["baud_gbd"] = ch.baud_gbd;
        }
        for (const auto& t : world_.backbone.transponders) {
            if (t.domain == domain && t.channel && *t.channel == ch.index)
                jc["transponder"] = t.id;
        }
        channels.push_back(jc);
    }
    auto transponders = nlohmann::json::array();
    for (const auto& t : world_.backbone.transponders) {
        if (t.domain != domain) continue;
        nlohmann::json jt = {{"id", t.id}, {"configured", t.channel.has_value()}};
        if (t.channel) {
            jt["channel"] = *t.channel;
            jt["rate_gbps"] = t.rate_gbps;
        }
        transponders.push_back(jt);
    }
    resp.ok = true;
    resp.payload["channels"] = channels;
    resp.payload["transponders"] = transponders;
    return resp;
}

RpcResponse ControlPlane::set_channel(const nlohmann::json& args) {
    int index = args.at("index").get<int>();
    std::string state = args.at("state").get<std::string>();
    if (state != "live" && state != "dummy") throw InputError("state: must be live or dummy");
    int pos = world_.backbone.channel_pos(index);
    if (pos < 0) throw NotFoundError("no channel with index " + std::to_string(index));
    auto& ch = world_.backbone.channels[pos];
    if (state == "live") {
        ch.kind = ChannelKind::Live;
        if (ch.bitrate_gbps == 0) ch.bitrate_gbps = 400;
        if (ch.baud_gbd == 0.0) ch.baud_gbd = 63.9;
    } else {
        for (const auto& t : world_.backbone.transponders) {
            if (t.channel && *t.channel == index)
                throw ConflictError("channel " + std::to_string(index) + " held by " + t.id);
        }
        ch.kind = ChannelKind::Dummy;
        ch.bitrate_gbps = 0;
        ch.baud_gbd = 0.0;
    }
    ++tick_;
    RpcResponse resp;
    resp.ok = true;
    resp.payload = {{"index", index}, {"state", state}};
    return resp;
}

RpcResponse ControlPlane::configure_transponder(Domain domain, const nlohmann::json& args) {
    std::string id = args.at("id").get<std::string>();
    int channel = args.at("channel").get<int>();
    int rate = args.at("rate").get<int>();
    if (rate != 400 && rate != 200) throw InputError("rate: must be 400 or 200");
    int ti = world_.backbone.transponder_index(id);
    if (ti < 0) throw NotFoundError("no transponder named " + id);
    if (world_.backbone.transponders[ti].domain != domain)
        throw NotFoundError("transponder " + id + " is not in " + to_string(domain));
    int pos = world_.backbone.channel_pos(channel);
    if (pos < 0) throw NotFoundError("no channel with index " + std::to_string(channel));
    for (const auto& t : world_.backbone.transponders) {
        if (t.id != id && t.domain == domain && t.channel && *t.channel == channel)
            throw ConflictError("channel " + std::to_string(channel) + " already held by " +
                                t.id + " in " + to_string(domain));
    }
    auto& ch = world_.backbone.channels[pos];
    auto& t = world_.backbone.transponders[ti];
    t.channel = channel;
    t.rate_gbps = rate;
    ch.kind = ChannelKind::Live;
    ch.bitrate_gbps = rate;
    ch.baud_gbd = 63.9;
    ch.active = true;
    ++tick_;
    RpcResponse resp;
    resp.ok = true;
    resp.payload = {{"id", id}, {"channel", channel}, {"rate", rate}};
    return resp;
}

RpcResponse ControlPlane::list_alarms(Domain domain) {
    RpcResponse resp;
    auto alarms = nlohmann::json::array();
    if (domain == Domain::BackboneA || domain == Domain::BackboneB) {
        // Alarms derive from this domain's own monitors only.
        auto now = optical::compute_power_profile(world_.backbone);
        auto base = optical::compute_power_profile(baseline_.backbone);
        for (size_t i = 0; i < now.size(); ++i) {
            int idx = world_.backbone.edfa_index(now[i].element_id);
            if (world_.backbone.edfas[idx].domain != domain) continue;
            double delta = now[i].total_power_dbm - base[i].total_power_dbm;
            if (std::abs(delta) > tolerances_.tol_db) {
                alarms.push_back({{"kind", "power"},
                                  {"element", now[i].element_id},
                                  {"port", now[i].port == Port::Input ? "input" : "output"},
                                  {"observed_dbm", now[i].total_power_dbm},
                                  {"baseline_dbm", base[i].total_power_dbm},
                                  {"delta_db", delta}});
            }
        }
        for (const auto& ch : world_.backbone.channels) {
            if (ch.kind == ChannelKind::Live && !ch.active) {
                alarms.push_back({{"kind", "channel"},
                                  {"element", "ch" + std::to_string(ch.index)},
                                  {"detail", "live channel dark"}});
            }
        }
    } else if (domain == Domain::IntraDc) {
        for (const auto& link : world_.fabric.imdd_links) {
            double penalty = optical::imdd_quality(link).penalty_db;
            if (penalty > tolerances_.quality_tol_db) {
                alarms.push_back({{"kind", "quality"},
                                  {"element", link.link_id},
                                  {"penalty_db", penalty}});
            }
        }
    } else {
        for (const auto& v : traffic::capacity_check(world_.metro)) {
            alarms.push_back({{"kind", v.kind},
                              {"element", v.element_id},
                              {"wavelength", v.wavelength},
                              {"detail", v.detail}});
        }
    }
    resp.ok = true;
    resp.payload["alarms"] = alarms;
    return resp;
}

RpcResponse ControlPlane::get_topology(Domain domain) {
    RpcResponse resp;
    resp.ok = true;
    switch (domain) {
    case Domain::BackboneA:
    case Domain::BackboneB: {
        auto spans = nlohmann::json::array();
        for (const auto& s : world_.backbone.spans) {
            if (s.domain != domain) continue;
            spans.push_back({{"id", s.id},
                             {"length_km", s.length_km},
                             {"loss_db", s.loss_db()}});
        }
        auto edfas = nlohmann::json::array();
        for (const auto& e : world_.backbone.edfas) {
            if (e.domain != domain) continue;
            edfas.push_back({{"id", e.id}, {"gain_db", e.gain_db}, {"nf_db", e.nf_db}});
        }
        resp.payload = {{"spans", spans}, {"edfas", edfas}};
        break;
    }
    case Domain::DciMetro: {
        resp.payload = world_.metro.to_json();
        auto usage = nlohmann::json::array();
        for (const auto& e : world_.metro.edges) {
            int used = 0;
            for (int dir = 0; dir < 2; ++dir)
                for (int c : e.occupancy[dir])
                    if (c > 0) ++used;
            usage.push_back({{"a", world_.metro.nodes[e.a]},
                             {"b", world_.metro.nodes[e.b]},
                             {"used_wavelengths", used}});
        }
        resp.payload["occupancy"] = usage;
        break;
    }
    case Domain::IntraDc: {
        auto links = nlohmann::json::array();
        for (const auto& l : world_.fabric.links) {
            links.push_back({{"id", l.id},
                             {"leaf", l.leaf},
                             {"spine", l.spine},
                             {"capacity_gbps", l.capacity_gbps},
                             {"load_gbps", l.load_gbps}});
        }
        resp.payload = {{"leaves", world_.fabric.num_leaves},
                        {"spines", world_.fabric.num_spines},
                        {"servers_per_leaf", world_.fabric.servers_per_leaf},
                        {"links", links}};
        break;
    }
    }
    return resp;
}

RpcResponse ControlPlane::apply_allocation(const nlohmann::json& args) {
    const auto& flows = args.at("flows");
    // Stage the full load map first so a failing apply changes nothing.
    std::vector<double> loads(world_.fabric.links.size(), 0.0);
    for (const auto& f : flows) {
        int src = f.at("src").get<int>();
        int dst = f.at("dst").get<int>();
        int spine = f.at("spine").get<int>();
        double gbps = f.at("gbps").get<double>();
        int up = world_.fabric.link_index(src, spine);
        int down = world_.fabric.link_index(dst, spine);
        if (up < 0 || down < 0) throw NotFoundError("flow references an unknown leaf or spine");
        loads[up] += gbps;
        loads[down] += gbps;
    }
    for (size_t i = 0; i < loads.size(); ++i) {
        if (loads[i] > world_.fabric.links[i].capacity_gbps)
            throw ConflictError("allocation overloads " + world_.fabric.links[i].id);
    }
    for (size_t i = 0; i < loads.size(); ++i) world_.fabric.links[i].load_gbps = loads[i];
    ++tick_;
    RpcResponse resp;
    resp.ok = true;
    resp.payload = {{"applied_flows", flows.size()}};
    return resp;
}

RpcResponse ControlPlane::get_link_quality(const nlohmann::json& args) {
    std::string link = args.at("link").get<std::string>();
    int idx = world_.fabric.link_index_by_id(link);
    if (idx < 0) throw NotFoundError("no IMDD link named " + link);
    const auto& state = world_.fabric.imdd_links[idx];
    RpcResponse resp;
    resp.ok = true;
    resp.payload = {{"link", link},
                    {"bitrate_gbps", state.bitrate_gbps},
                    {"mpi_present", state.mpi_ratio_db.has_value()},
                    {"penalty_db", optical::imdd_quality(state).penalty_db}};
    return resp;
}

} // namespace autonoc::control
