#include "autonoc/failure.hpp"

#include <algorithm>
#include <cmath>

namespace autonoc::failure {

using optical::BackboneModel;
using optical::ChainElement;
using optical::MonitorReading;
using optical::Port;

nlohmann::json FailureSpec::to_json() const {
    nlohmann::json j;
    switch (kind) {
    case Kind::FiberAging:
        j["kind"] = "FiberAging";
        j["span_id"] = element_id;
        j["delta_db"] = delta_db;
        break;
    case Kind::Mpi:
        j["kind"] = "Mpi";
        j["link_id"] = element_id;
        j["ratio_db"] = ratio_db;
        break;
    case Kind::TransponderOutage:
        j["kind"] = "TransponderOutage";
        j["transponder_id"] = element_id;
        break;
    }
    return j;
}

FailureSpec FailureSpec::from_json(const nlohmann::json& j) {
    FailureSpec s;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "FiberAging") {
        s.kind = Kind::FiberAging;
        s.element_id = j.at("span_id").get<std::string>();
        s.delta_db = j.at("delta_db").get<double>();
    } else if (kind == "Mpi") {
        s.kind = Kind::Mpi;
        s.element_id = j.at("link_id").get<std::string>();
        s.ratio_db = j.at("ratio_db").get<double>();
    } else if (kind == "TransponderOutage") {
        s.kind = Kind::TransponderOutage;
        s.element_id = j.at("transponder_id").get<std::string>();
    } else {
        throw ConfigError("kind: unknown failure kind " + kind);
    }
    return s;
}

World World::standard(int live_channels) {
    World w;
    w.backbone = optical::build_backbone(optical::BackboneConfig::standard(live_channels));
    w.metro = optical::MetroTopology::standard14();
    w.fabric = optical::Fabric::standard();
    return w;
}

static bool same_failure(const FailureSpec& a, const FailureSpec& b) {
    return a.kind == b.kind && a.element_id == b.element_id;
}

World inject_failure(const World& world, const FailureSpec& spec) {
    for (const FailureSpec& f : world.active_failures) {
        if (same_failure(f, spec))
            throw ConflictError("failure already active on " + spec.element_id);
    }
    World next = world;
    switch (spec.kind) {
    case FailureSpec::Kind::FiberAging: {
        if (spec.delta_db <= 0) throw ConfigError("delta_db: must be > 0");
        int idx = next.backbone.span_index(spec.element_id);
        if (idx < 0) throw NotFoundError("no span named " + spec.element_id);
        next.backbone.spans[idx].extra_loss_db += spec.delta_db;
        break;
    }
    case FailureSpec::Kind::Mpi: {
        if (spec.ratio_db >= 0) throw ConfigError("ratio_db: must be < 0 dB");
        int idx = next.fabric.link_index_by_id(spec.element_id);
        if (idx < 0) throw NotFoundError("no IMDD link named " + spec.element_id);
        if (next.fabric.imdd_links[idx].mpi_ratio_db)
            throw ConflictError("MPI already injected on " + spec.element_id);
        next.fabric.imdd_links[idx].mpi_ratio_db = spec.ratio_db;
        break;
    }
    case FailureSpec::Kind::TransponderOutage: {
        int ti = next.backbone.transponder_index(spec.element_id);
        if (ti < 0) throw NotFoundError("no transponder named " + spec.element_id);
        const auto& t = next.backbone.transponders[ti];
        if (!t.channel) throw ConflictError("transponder " + spec.element_id + " carries no channel");
        int pos = next.backbone.channel_pos(*t.channel);
        next.backbone.channels[pos].active = false;
        break;
    }
    }
    next.active_failures.push_back(spec);
    return next;
}

World remove_failure(const World& world, const FailureSpec& spec) {
    auto it = std::find_if(world.active_failures.begin(), world.active_failures.end(),
                           [&](const FailureSpec& f) { return same_failure(f, spec); });
    if (it == world.active_failures.end())
        throw NotFoundError("no active failure on " + spec.element_id);
    World next = world;
    switch (spec.kind) {
    case FailureSpec::Kind::FiberAging: {
        int idx = next.backbone.span_index(spec.element_id);
        next.backbone.spans[idx].extra_loss_db -= it->delta_db;
        break;
    }
    case FailureSpec::Kind::Mpi: {
        int idx = next.fabric.link_index_by_id(spec.element_id);
        next.fabric.imdd_links[idx].mpi_ratio_db.reset();
        break;
    }
    case FailureSpec::Kind::TransponderOutage: {
        int ti = next.backbone.transponder_index(spec.element_id);
        int pos = next.backbone.channel_pos(*next.backbone.transponders[ti].channel);
        next.backbone.channels[pos].active = true;
        break;
    }
    }
    next.active_failures.erase(next.active_failures.begin() +
                               (it - world.active_failures.begin()));
    return next;
}

std::optional<Anomaly> detect_anomaly(const std::vector<MonitorReading>& readings,
                                      const std::vector<MonitorReading>& baseline,
                                      double tol_db) {
    if (tol_db <= 0) throw InputError("tol_db: must be > 0");
    if (readings.size() != baseline.size())
        throw InputError("readings and baseline cover different monitor sets");
    for (size_t i = 0; i < readings.size(); ++i) {
        if (readings[i].element_id != baseline[i].element_id ||
            readings[i].port != baseline[i].port)
            throw InputError("readings and baseline cover different monitor sets");
    }
    Anomaly a;
    for (size_t i = 0; i < readings.size(); ++i) {
        double delta = readings[i].total_power_dbm - baseline[i].total_power_dbm;
        if (std::abs(delta) > tol_db) {
            if (a.first_affected < 0) a.first_affected = static_cast<int>(i);
            a.evidence.push_back({EvidenceKind::Power, readings[i].element_id,
                                  readings[i].port, readings[i].total_power_dbm,
                                  baseline[i].total_power_dbm, delta});
        }
    }
    if (a.evidence.empty()) return std::nullopt;
    return a;
}

std::optional<Anomaly> detect_world(const World& world, const World& baseline,
                                    const Tolerances& tol) {
    auto now = optical::compute_power_profile(world.backbone);
    auto base = optical::compute_power_profile(baseline.backbone);
    Anomaly a;
    if (auto power = detect_anomaly(now, base, tol.tol_db)) {
        a = *power;
    }
    for (size_t i = 0; i < world.fabric.imdd_links.size(); ++i) {
        double penalty = optical::imdd_quality(world.fabric.imdd_links[i]).penalty_db;
        double base_penalty =
            i < baseline.fabric.imdd_links.size()
                ? optical::imdd_quality(baseline.fabric.imdd_links[i]).penalty_db
                : 0.0;
        if (penalty - base_penalty > tol.quality_tol_db) {
            a.evidence.push_back({EvidenceKind::Quality, world.fabric.imdd_links[i].link_id,
                                  Port::Output, penalty, base_penalty, penalty - base_penalty});
        }
    }
    for (const auto& ch : baseline.backbone.channels) {
        if (ch.kind != optical::ChannelKind::Live || !ch.active) continue;
        int pos = world.backbone.channel_pos(ch.index);
        if (pos < 0 || !world.backbone.channels[pos].active) {
            a.evidence.push_back({EvidenceKind::Channel, "ch" + std::to_string(ch.index),
                                  Port::Output, 0.0, 1.0, -1.0});
        }
    }
    if (a.evidence.empty()) return std::nullopt;
    return a;
}

FailureClass classify_failure(
    const Anomaly& anomaly,
    const std::vector<std::pair<std::string, optical::QualityReport>>& imdd_reports) {
    bool power = false, quality = false, channel = false;
    for (const Evidence& e : anomaly.evidence) {
        if (e.kind == EvidenceKind::Power) power = true;
        if (e.kind == EvidenceKind::Quality) quality = true;
        if (e.kind == EvidenceKind::Channel) channel = true;
    }
    for (const auto& [id, report] : imdd_reports) {
        if (report.penalty_db > 0) quality = true;
    }
    if (!power && !quality && !channel)
        throw InputError("empty anomaly: nothing to classify");
    if (power && quality && channel)
        throw AmbiguousClassificationError(
            "evidence matches PowerLoss, Interference and TransmitterFault");
    if (power) return {FailureLabel::PowerLoss, 1.0};
    if (quality) return {FailureLabel::Interference, 1.0};
    return {FailureLabel::TransmitterFault, 1.0};
}

std::string localize_failure(const Anomaly& anomaly, const BackboneModel& model) {
    const Evidence* first = nullptr;
    for (const Evidence& e : anomaly.evidence) {
        if (e.kind == EvidenceKind::Power) {
            first = &e;
            break;
        }
    }
    if (!first || anomaly.first_affected < 0)
        throw CannotLocalizeError("no monitor deviation to localize from");

    // Walk the chain, counting monitor ports, until we hit the deviating one;
    // the suspect is the nearest span behind it.
    int ordinal = 0;
    int last_span = -1;
    for (const ChainElement& el : model.chain) {
        if (el.kind == ChainElement::Kind::Span) {
            last_span = el.index;
            continue;
        }
        for (int port = 0; port < 2; ++port) {
            if (ordinal == anomaly.first_affected) {
                if (last_span < 0)
                    throw CannotLocalizeError("deviation upstream of the first span");
                return model.spans[last_span].id;
            }
            ++ordinal;
        }
    }
    throw CannotLocalizeError("monitor ordinal out of range");
}

} // namespace autonoc::failure
