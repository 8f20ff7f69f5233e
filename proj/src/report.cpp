#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "autonoc/harness.hpp"

namespace autonoc::harness {

namespace {

struct RateAcc {
    int pass = 0;
    int total = 0;

    void add(bool ok) {
        pass += ok ? 1 : 0;
        ++total;
    }
    double rate() const { return total == 0 ? 0.0 : double(pass) / total; }
};

std::string cell(TaskId t, Mode m) { return to_string(t) + "/" + to_string(m); }

// Which passing checkpoints evidence each L4 capability.
const std::vector<std::pair<std::string, std::vector<std::pair<TaskId, std::string>>>>
    kL4Map = {
        {"execution",
         {{TaskId::Task1, "c4"}, {TaskId::Task1, "c5"}, {TaskId::Task2, "c3"}}},
        {"awareness",
         {{TaskId::Task3, "c1"}, {TaskId::Task4, "c2"}, {TaskId::Task4, "c3"}}},
        {"analysis", {{TaskId::Task3, "c2"}, {TaskId::Task4, "c4"}}},
        {"decision",
         {{TaskId::Task3, "c3"}, {TaskId::Task3, "c4"}, {TaskId::Task2, "c2"}}},
        {"intent_experience", {{TaskId::Task1, "c2"}, {TaskId::Task2, "c1"}}},
        {"cross_domain",
         {{TaskId::Task4, "c1"}, {TaskId::Task4, "c3"}, {TaskId::Task2, "c5"}}},
};

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out.flush()) throw IoError("write failed for " + path.string());
}

} // namespace

void emit_report(const std::vector<TrialResult>& results, const std::string& out_dir,
                 const std::string& backend_label) {
    std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());

    std::map<std::string, RateAcc> completion;
    std::map<std::string, RateAcc> checkpoints;
    std::map<std::string, RateAcc> declarations;
    std::map<Mode, RateAcc> by_mode;
    std::map<Mode, AgentRoster> rosters;

    for (const auto& r : results) {
        completion[cell(r.task, r.mode)].add(r.completed);
        by_mode[r.mode].add(r.completed);
        for (const auto& c : r.checkpoints)
            checkpoints[cell(r.task, r.mode) + "/" + c.id].add(c.pass);
        if (!rosters.count(r.mode)) rosters[r.mode] = make_roster(r.mode);
        double rate = declaration_pass_rate(r.log, rosters[r.mode]);
        auto& acc = declarations[cell(r.task, r.mode)];
        acc.pass += int(rate * 1000 + 0.5);
        acc.total += 1000;
    }

    nlohmann::ordered_json report;
    report["backend"] = backend_label;
    report["trials"] = nlohmann::ordered_json::array();
    for (const auto& r : results) report["trials"].push_back(r.to_json());
    report["completion_rates"] = nlohmann::ordered_json::object();
    for (const auto& [k, acc] : completion) report["completion_rates"][k] = acc.rate();
    report["checkpoint_rates"] = nlohmann::ordered_json::object();
    for (const auto& [k, acc] : checkpoints) report["checkpoint_rates"][k] = acc.rate();
    report["declaration_pass_rates"] = nlohmann::ordered_json::object();
    for (const auto& [k, acc] : declarations)
        report["declaration_pass_rates"][k] = acc.rate();

    nlohmann::ordered_json headline;
    headline["autolight_completion"] = by_mode[Mode::Autolight].rate();
    headline["single_agent_completion"] = by_mode[Mode::SingleAgent].rate();
    headline["naive_multi_completion"] = by_mode[Mode::NaiveMulti].rate();
    if (backend_label == "remote") {
        double base = std::max(by_mode[Mode::SingleAgent].rate(),
                               by_mode[Mode::NaiveMulti].rate());
        std::ostringstream imp;
        imp.precision(3);
        imp << (by_mode[Mode::Autolight].rate() - base);
        headline["improvement"] = imp.str();
    } else {
        headline["improvement"] = "n/a (scripted)";
    }
    report["headline"] = headline;
    write_file(dir / "report.json", report.dump(2) + "\n");

    std::ostringstream csv;
    csv << "kind,task,mode,checkpoint,value\n";
    for (const auto& r : results) {
        // De-duplicated below via the rate maps; emit aggregate rows only.
        (void)r;
    }
    for (const auto& [k, acc] : completion) {
        auto slash = k.find('/');
        csv << "completion," << k.substr(0, slash) << "," << k.substr(slash + 1) << ",,"
            << acc.rate() << "\n";
    }
    for (const auto& [k, acc] : checkpoints) {
        auto s1 = k.find('/');
        auto s2 = k.find('/', s1 + 1);
        csv << "checkpoint," << k.substr(0, s1) << "," << k.substr(s1 + 1, s2 - s1 - 1)
            << "," << k.substr(s2 + 1) << "," << acc.rate() << "\n";
    }
    for (const auto& [k, acc] : declarations) {
        auto slash = k.find('/');
        csv << "declaration," << k.substr(0, slash) << "," << k.substr(slash + 1) << ",,"
            << acc.rate() << "\n";
    }
    write_file(dir / "summary.csv", csv.str());

    nlohmann::ordered_json l4;
    for (const auto& [criterion, sources] : kL4Map) {
        auto evidence = nlohmann::ordered_json::array();
        for (const auto& r : results) {
            for (const auto& c : r.checkpoints) {
                if (!c.pass) continue;
                for (const auto& [task, cid] : sources) {
                    if (r.task == task && c.id == cid)
                        evidence.push_back(to_string(r.task) + "/" + to_string(r.mode) +
                                           "/trial" + std::to_string(r.trial_index) + "/" +
                                           c.id);
                }
            }
        }
        l4[criterion] = evidence;
    }
    write_file(dir / "l4_checklist.json", l4.dump(2) + "\n");
}

} // namespace autonoc::harness
