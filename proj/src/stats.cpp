#include "forge/stats.hpp"

#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string_view>

#include "forge/error.hpp"

namespace forge {

namespace fs = std::filesystem;

namespace {

std::size_t count_records(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ForgeError("cannot open " + path.string());
    }
    std::size_t n = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            ++n;
        }
    }
    return n;
}

struct StageFiles {
    const char* stage;
    const char* report;
    const char* output;  // nullptr when the stage has no sample output
};

constexpr StageFiles kStages[] = {
    {"ingest", run_files::kIngestReport, run_files::kSamples},
    {"filter-modules", run_files::kFilterReport, run_files::kKept},
    {"dedup", run_files::kDedupDecisions, run_files::kUnique},
    {"compile-gate", run_files::kCompileReport, run_files::kCompiled},
    {"label", run_files::kLabelReport, run_files::kLabeled},
    {"layer", run_files::kLayerReport, run_files::kLayered},
    {"manifest", run_files::kManifestReport, run_files::kManifest},
};

}  // namespace

nlohmann::ordered_json stage_counts_json(std::size_t in, std::size_t out, std::size_t dropped) {
    return {{"in", in}, {"out", out}, {"dropped", dropped}};
}

PipelineReport summarize(const StageArtifacts& artifacts) {
    PipelineReport report;
    for (std::size_t i = 0; i < artifacts.stages.size(); ++i) {
        const auto& s = artifacts.stages[i];
        if (s.in != s.out + s.dropped) {
            throw IntegrityError("stage " + s.stage + " does not conserve samples: in=" + std::to_string(s.in) +
                                 " out=" + std::to_string(s.out) + " dropped=" + std::to_string(s.dropped));
        }
        if (i > 0 && artifacts.stages[i - 1].out != s.in) {
            const auto& prev = artifacts.stages[i - 1];
            throw IntegrityError("stage " + s.stage + " consumed " + std::to_string(s.in) + " samples but " +
                                 prev.stage + " produced " + std::to_string(prev.out));
        }
        report.stage_counts.push_back(s);
    }

    for (auto size : artifacts.dedup_group_sizes) {
        ++report.dedup_group_sizes[size];
    }

    std::size_t ranked = 0;
    for (const auto& s : artifacts.layered) {
        if (s.rank) {
            ++report.rank_histogram[static_cast<std::size_t>(*s.rank)];
            ++ranked;
        }
    }
    report.layers = layer_report(artifacts.layered);
    if (std::accumulate(report.rank_histogram.begin(), report.rank_histogram.end(), std::size_t{0}) != ranked) {
        throw IntegrityError("rank histogram does not sum to the ranked sample count");
    }
    if (artifacts.layer_report) {
        if (artifacts.layer_report->layer_counts != report.layers.layer_counts ||
            artifacts.layer_report->tier_counts != report.layers.tier_counts) {
            throw IntegrityError("recorded layer report disagrees with the layered samples");
        }
    }
    return report;
}

StageArtifacts load_run_artifacts(const fs::path& run_dir) {
    if (!fs::is_directory(run_dir)) {
        throw ForgeError("run directory not found: " + run_dir.string());
    }
    StageArtifacts artifacts;
    for (const auto& files : kStages) {
        const fs::path report_path = run_dir / files.report;
        if (!fs::exists(report_path)) {
            continue;
        }
        const auto j = read_json_file(report_path);
        const auto it = j.find("counts");
        if (it == j.end()) {
            throw IntegrityError(report_path.string() + " has no \"counts\" block");
        }
        StageCount count{files.stage, it->at("in").get<std::size_t>(), it->at("out").get<std::size_t>(),
                         it->at("dropped").get<std::size_t>()};
        if (files.output && fs::exists(run_dir / files.output)) {
            const auto records = count_records(run_dir / files.output);
            if (records != count.out) {
                throw IntegrityError(std::string(files.output) + " holds " + std::to_string(records) +
                                     " records but " + files.report + " reports " + std::to_string(count.out));
            }
        }
        if (std::string_view(files.report) == run_files::kDedupDecisions) {
            for (const auto& group : j.value("groups", nlohmann::json::array())) {
                artifacts.dedup_group_sizes.push_back(1 + group.at("dropped").size());
            }
        }
        artifacts.stages.push_back(std::move(count));
    }
    if (fs::exists(run_dir / run_files::kLayered)) {
        artifacts.layered = read_samples(run_dir / run_files::kLayered);
    }
    if (fs::exists(run_dir / run_files::kLayerReport)) {
        const auto j = read_json_file(run_dir / run_files::kLayerReport);
        LayerReport lr;
        for (const auto& layer : j.at("layers")) {
            const auto l = layer.at("layer").get<std::size_t>() - 1;
            if (l >= static_cast<std::size_t>(kLayerCount)) {
                throw IntegrityError("layer report names a layer outside [1, 6]");
            }
            lr.layer_counts[l] = layer.at("count").get<std::size_t>();
            for (Complexity tier : kAllComplexities) {
                lr.tier_counts[l][tier_index(tier)] = layer.at("tiers").at(std::string(to_string(tier))).get<std::size_t>();
            }
        }
        lr.unknown_tier = j.value("unknown_tier", std::size_t{0});
        artifacts.layer_report = lr;
    }
    return artifacts;
}

nlohmann::ordered_json PipelineReport::to_json() const {
    nlohmann::ordered_json stages = nlohmann::ordered_json::array();
    for (const auto& s : stage_counts) {
        stages.push_back({{"stage", s.stage}, {"in", s.in}, {"out", s.out}, {"dropped", s.dropped}});
    }
    nlohmann::ordered_json reference_counts = nlohmann::ordered_json::array();
    for (auto c : kReferenceLayerCounts) {
        reference_counts.push_back(c);
    }
    nlohmann::ordered_json groups = nlohmann::ordered_json::object();
    for (const auto& [size, n] : dedup_group_sizes) {
        groups[std::to_string(size)] = n;
    }
    return {{"stages", std::move(stages)},
            {"dedup_group_sizes", std::move(groups)},
            {"rank_histogram", rank_histogram},
            {"layers", layers.to_json()},
            {"reference",
             {{"note", "layer sizes published for the original corpus; orientation only, not reproducible from this run"},
              {"layer_counts", std::move(reference_counts)},
              {"total", std::accumulate(kReferenceLayerCounts.begin(), kReferenceLayerCounts.end(), std::size_t{0})}}}};
}

std::string PipelineReport::render() const {
    std::ostringstream out;
    out << "stage             in      out  dropped\n";
    for (const auto& s : stage_counts) {
        out << std::left << std::setw(14) << s.stage << std::right << std::setw(6) << s.in << std::setw(9)
            << s.out << std::setw(9) << s.dropped << '\n';
    }
    if (!dedup_group_sizes.empty()) {
        out << "\nduplicate groups (size: count)";
        for (const auto& [size, n] : dedup_group_sizes) {
            out << ' ' << size << ": " << n;
        }
        out << '\n';
    }
    out << "\nrank histogram\n";
    for (std::size_t r = 0; r < rank_histogram.size(); ++r) {
        if (rank_histogram[r] > 0) {
            out << std::setw(4) << r << "  " << rank_histogram[r] << '\n';
        }
    }
    out << '\n' << layers.render();
    out << "\nreference layer sizes (original corpus, not this run):";
    for (auto c : kReferenceLayerCounts) {
        out << ' ' << c;
    }
    out << '\n';
    return out.str();
}

}  // namespace forge
