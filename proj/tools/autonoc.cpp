#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "autonoc/harness.hpp"

using namespace autonoc;
using namespace autonoc::harness;

namespace {

std::vector<TaskId> parse_tasks(const std::string& s) {
    if (s == "all")
        return {TaskId::Task1, TaskId::Task2, TaskId::Task3, TaskId::Task4};
    return {task_from_string(s)};
}

std::vector<Mode> parse_modes(const std::string& s) {
    if (s == "all") return {Mode::Autolight, Mode::SingleAgent, Mode::NaiveMulti};
    return {mode_from_string(s)};
}

int cmd_run(const std::string& task_arg, const std::string& mode_arg, int trials,
            std::uint64_t seed, const std::string& backend_arg, const std::string& variant_arg,
            const std::string& out_dir, bool transcripts) {
    Variant variant = variant_from_string(variant_arg);
    RunOptions options;
    if (transcripts) options.transcript_dir = out_dir + "/transcripts";

    std::vector<TrialResult> results;
    for (TaskId task : parse_tasks(task_arg)) {
        for (Mode mode : parse_modes(mode_arg)) {
            std::unique_ptr<agent::Backend> backend;
            if (backend_arg == "remote")
                backend = std::make_unique<agent::RemoteBackend>(agent::RemoteConfig::from_env());
            else
                backend = std::make_unique<agent::ScriptedBackend>(
                    make_scripted_backend(task, mode, variant));
            auto batch = run_trials(task, mode, trials, seed, *backend, options);
            for (auto& r : batch) {
                int ok = 0;
                for (const auto& c : r.checkpoints) ok += c.pass ? 1 : 0;
                std::cout << to_string(task) << "/" << to_string(mode) << " trial "
                          << r.trial_index << " seed " << r.seed << ": " << ok << "/"
                          << r.checkpoints.size() << " checkpoints, "
                          << (r.completed ? "completed" : "incomplete") << "\n";
                results.push_back(std::move(r));
            }
        }
    }
    emit_report(results, out_dir, backend_arg);
    std::cout << "report written to " << out_dir << "\n";
    return 0;
}

int cmd_inject(const std::string& spec_path) {
    std::ifstream in(spec_path);
    if (!in) throw IoError("cannot read " + spec_path);
    auto spec = failure::FailureSpec::from_json(nlohmann::json::parse(in));

    auto baseline = failure::World::standard();
    auto world = failure::inject_failure(baseline, spec);
    auto anomaly = failure::detect_world(world, baseline);
    nlohmann::ordered_json out;
    out["injected"] = nlohmann::ordered_json::parse(spec.to_json().dump());
    out["detected"] = anomaly.has_value();
    if (anomaly) {
        std::vector<std::pair<std::string, optical::QualityReport>> imdd;
        for (const auto& l : world.fabric.imdd_links) {
            auto q = optical::imdd_quality(l);
            if (q.penalty_db > 0) imdd.emplace_back(l.link_id, q);
        }
        auto cls = failure::classify_failure(*anomaly, imdd);
        out["label"] = failure::to_string(cls.label);
        out["confidence"] = cls.confidence;
        if (cls.label == failure::FailureLabel::PowerLoss)
            out["localized_span"] = failure::localize_failure(*anomaly, world.backbone);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_topo() {
    auto world = failure::World::standard();
    nlohmann::ordered_json out;
    double km = 0;
    for (const auto& s : world.backbone.spans) km += s.length_km;
    out["backbone"] = {{"spans", world.backbone.spans.size()},
                       {"edfas", world.backbone.edfas.size()},
                       {"length_km", km},
                       {"channels", world.backbone.channels.size()},
                       {"transponders", world.backbone.transponders.size()}};
    out["metro"] = {{"name", world.metro.name},
                    {"nodes", world.metro.nodes.size()},
                    {"edges", world.metro.edges.size()},
                    {"wavelengths", world.metro.num_wavelengths}};
    out["fabric"] = {{"leaves", world.fabric.num_leaves},
                     {"spines", world.fabric.num_spines},
                     {"links", world.fabric.links.size()},
                     {"capacity_gbps", world.fabric.links.front().capacity_gbps}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_report(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".jsonl") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "no transcripts in " << dir << "\n";
        return 1;
    }
    for (const auto& path : files) {
        // <task>-<mode>-trial<i>.jsonl
        auto stem = path.stem().string();
        auto d1 = stem.find('-');
        auto d2 = stem.rfind("-trial");
        if (d1 == std::string::npos || d2 == std::string::npos || d2 <= d1) continue;
        TaskId task = task_from_string(stem.substr(0, d1));
        std::ifstream in(path);
        std::string text((std::istreambuf_iterator<char>(in)), {});
        auto log = TrialLog::from_jsonl(text);
        std::cout << stem << ":";
        for (const auto& c : evaluate_checkpoints(log, task))
            std::cout << " " << c.id << "=" << (c.pass ? "pass" : "fail");
        std::cout << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"autonoc: deterministic optical-network agent harness"};
    app.require_subcommand(1);

    std::string task = "all", mode = "all", backend = "scripted", variant = "golden";
    std::string out_dir = "out", spec_path, report_dir;
    int trials = 1;
    std::uint64_t seed = 7;
    bool transcripts = false;

    auto* run = app.add_subcommand("run", "run lifecycle trials and emit a report");
    run->add_option("--task", task, "task1..task4 or all");
    run->add_option("--mode", mode, "autolight, single, naive, or all");
    run->add_option("--trials", trials, "trials per cell")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "base seed");
    run->add_option("--backend", backend)->check(CLI::IsMember({"scripted", "remote"}));
    run->add_option("--variant", variant)->check(CLI::IsMember({"golden", "adversarial"}));
    run->add_option("--out", out_dir, "report output directory");
    run->add_flag("--transcripts", transcripts, "persist per-trial JSONL transcripts");

    auto* inject = app.add_subcommand("inject-failure", "inject a failure and diagnose it");
    inject->add_option("--spec", spec_path, "failure spec JSON file")->required();

    auto* topo = app.add_subcommand("topo", "topology inspection");
    topo->add_subcommand("show", "print the standard world topology");

    auto* report = app.add_subcommand("report", "re-evaluate persisted transcripts");
    report->add_option("dir", report_dir, "transcript directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(task, mode, trials, seed, backend, variant, out_dir, transcripts);
        if (inject->parsed()) return cmd_inject(spec_path);
        if (topo->parsed()) return cmd_topo();
        if (report->parsed()) return cmd_report(report_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
