#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "autonoc/optical.hpp"

namespace autonoc::failure {

struct FailureSpec {
    enum class Kind { FiberAging, Mpi, TransponderOutage };
    Kind kind = Kind::FiberAging;
    std::string element_id; // span id, IMDD link id, or transponder id
    double delta_db = 0.0;  // FiberAging: added span loss, > 0
    double ratio_db = 0.0;  // Mpi: reflected-to-signal ratio, < 0

    nlohmann::json to_json() const;
    static FailureSpec from_json(const nlohmann::json& j);
};

// The complete simulated plant one trial operates on.
struct World {
    optical::BackboneModel backbone;
    optical::MetroTopology metro;
    optical::Fabric fabric;
    std::vector<FailureSpec> active_failures;

    static World standard(int live_channels = 6);
};

// Returns a new world with the failure applied; the input is untouched.
World inject_failure(const World& world, const FailureSpec& spec);
// Inverse of inject_failure for an active failure.
World remove_failure(const World& world, const FailureSpec& spec);

enum class EvidenceKind { Power, Quality, Channel };

struct Evidence {
    EvidenceKind kind = EvidenceKind::Power;
    std::string element_id;
    optical::Port port = optical::Port::Input;
    double observed = 0.0;
    double baseline = 0.0;
    double delta = 0.0;
};

struct Anomaly {
    std::vector<Evidence> evidence; // propagation order for power evidence
    int first_affected = -1;        // monitor ordinal of first power deviation
};

struct Tolerances {
    double tol_db = 1.0;         // monitor power deviation
    double quality_tol_db = 0.5; // IMDD penalty
};

// Power-only scan of monitor readings against a baseline profile.
std::optional<Anomaly> detect_anomaly(const std::vector<optical::MonitorReading>& readings,
                                      const std::vector<optical::MonitorReading>& baseline,
                                      double tol_db);

// Full sweep: monitor powers, IMDD penalties, and live-channel presence.
std::optional<Anomaly> detect_world(const World& world, const World& baseline,
                                    const Tolerances& tol = {});

enum class FailureLabel { PowerLoss, Interference, TransmitterFault };

inline std::string to_string(FailureLabel l) {
    switch (l) {
    case FailureLabel::PowerLoss: return "PowerLoss";
    case FailureLabel::Interference: return "Interference";
    case FailureLabel::TransmitterFault: return "TransmitterFault";
    }
    return "?";
}

struct FailureClass {
    FailureLabel label = FailureLabel::PowerLoss;
    double confidence = 0.0;
};

// Decision table over the evidence signatures. Extra IMDD reports may be
// passed alongside an anomaly that only carries power evidence.
FailureClass classify_failure(
    const Anomaly& anomaly,
    const std::vector<std::pair<std::string, optical::QualityReport>>& imdd_reports = {});

// Span immediately upstream of the first deviating monitor.
std::string localize_failure(const Anomaly& anomaly, const optical::BackboneModel& model);

} // namespace autonoc::failure
