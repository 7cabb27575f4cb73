#include "forge/pipeline.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>

#include "forge/error.hpp"
#include "forge/ingest.hpp"
#include "forge/layering.hpp"
#include "forge/log.hpp"
#include "forge/manifest.hpp"
#include "forge/stats.hpp"
#include "forge/verilog_lex.hpp"

namespace forge {

namespace fs = std::filesystem;

void PipelineConfig::validate() const {
    if (corpus_root.empty()) {
        throw ConfigError("corpus_root is required");
    }
    if (output_dir.empty()) {
        throw ConfigError("output_dir is required");
    }
    dedup.validate();
    if (!(compile.timeout_s > 0.0)) {
        throw ConfigError("compile timeout must be positive");
    }
    if (compile.tool.empty()) {
        throw ConfigError("compile tool is required");
    }
    if (label.client != "mock" && label.client != "http") {
        throw ConfigError("unknown label client '" + label.client + "' (expected mock or http)");
    }
    if (label.client == "http" && label.endpoint.empty()) {
        throw ConfigError("the http client needs label.endpoint");
    }
    if (epochs < 1) {
        throw ConfigError("epochs must be >= 1");
    }
}

nlohmann::ordered_json PipelineConfig::to_json() const {
    return {{"corpus_root", corpus_root},
            {"output_dir", output_dir},
            {"jobs", jobs},
            {"dedup",
             {{"threshold", dedup.threshold},
              {"shingle_k", dedup.shingle_k},
              {"perms", dedup.perms},
              {"bands", dedup.bands},
              {"rows", dedup.rows},
              {"seed", dedup.seed},
              {"jobs", dedup.jobs}}},
            {"compile",
             {{"tool", compile.tool},
              {"tool_args", compile.tool_args},
              {"timeout_s", compile.timeout_s},
              {"jobs", compile.jobs},
              {"rules", compile.rules}}},
            {"label",
             {{"client", label.client},
              {"mock_table", label.mock_table},
              {"seed", label.seed},
              {"endpoint", label.endpoint},
              {"jobs", label.jobs}}},
            {"manifest", {{"epochs", epochs}, {"seed", manifest_seed}}}};
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
    PipelineConfig c;
    try {
        c.corpus_root = j.value("corpus_root", c.corpus_root);
        c.output_dir = j.value("output_dir", c.output_dir);
        c.jobs = j.value("jobs", c.jobs);
        if (auto it = j.find("dedup"); it != j.end()) {
            auto& d = c.dedup;
            d.threshold = it->value("threshold", d.threshold);
            d.shingle_k = it->value("shingle_k", d.shingle_k);
            d.perms = it->value("perms", d.perms);
            d.bands = it->value("bands", d.bands);
            d.rows = d.bands == 0 ? 0 : d.perms / d.bands;
            d.rows = it->value("rows", d.rows);
            d.seed = it->value("seed", d.seed);
            d.jobs = it->value("jobs", d.jobs);
        }
        if (auto it = j.find("compile"); it != j.end()) {
            auto& cc = c.compile;
            cc.tool = it->value("tool", cc.tool);
            cc.tool_args = it->value("tool_args", cc.tool_args);
            cc.timeout_s = it->value("timeout_s", cc.timeout_s);
            cc.jobs = it->value("jobs", cc.jobs);
            cc.rules = it->value("rules", cc.rules);
        }
        if (auto it = j.find("label"); it != j.end()) {
            auto& l = c.label;
            l.client = it->value("client", l.client);
            l.mock_table = it->value("mock_table", l.mock_table);
            l.seed = it->value("seed", l.seed);
            l.endpoint = it->value("endpoint", l.endpoint);
            l.jobs = it->value("jobs", l.jobs);
        }
        if (auto it = j.find("manifest"); it != j.end()) {
            c.epochs = it->value("epochs", c.epochs);
            c.manifest_seed = it->value("seed", c.manifest_seed);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad pipeline config: ") + e.what());
    }
    return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
    try {
        return from_json(read_json_file(path));
    } catch (const FormatError& e) {
        throw ConfigError(e.what());
    }
}

std::unique_ptr<CompletionClient> make_client(const LabelConfig& config) {
    if (config.client == "mock") {
        if (config.mock_table.empty()) {
            return std::make_unique<MockClient>(config.seed);
        }
        return std::make_unique<MockClient>(MockClient::load(config.mock_table, config.seed));
    }
    if (config.client == "http") {
        const char* token = std::getenv(kApiTokenEnv);
        return std::make_unique<HttpClient>(config.endpoint, token ? token : "");
    }
    throw ConfigError("unknown label client '" + config.client + "'");
}

ToolConfig make_tool_config(const CompileConfig& config) {
    ToolConfig tool;
    tool.tool = config.tool;
    tool.args = config.tool_args;
    tool.timeout = std::chrono::milliseconds(static_cast<long long>(std::llround(config.timeout_s * 1000.0)));
    return tool;
}

DiagnosticRules load_rules(const CompileConfig& config) {
    return config.rules.empty() ? DiagnosticRules::icarus_defaults() : DiagnosticRules::load(config.rules);
}

namespace {

template <typename Json>
nlohmann::ordered_json with_counts(Json report, std::size_t in, std::size_t out) {
    nlohmann::ordered_json j = std::move(report);
    j["counts"] = stage_counts_json(in, out, in - out);
    return j;
}

void emit_report(const fs::path& path, const nlohmann::ordered_json& report) {
    if (path.empty()) {
        std::cout << report.dump(2) << '\n';
    } else {
        write_json_file(path, report);
    }
}

}  // namespace

void run_ingest_stage(const fs::path& root, const fs::path& out, const fs::path& report, std::size_t jobs) {
    auto result = ingest_corpus(root, jobs);
    write_samples(out, result.samples);
    emit_report(report, with_counts(result.report.to_json(), result.report.files_seen, result.samples.size()));
}

void run_filter_stage(const fs::path& in, const fs::path& out, const fs::path& report) {
    auto result = filter_no_module(read_samples(in));
    write_samples(out, result.kept);
    emit_report(report, with_counts(result.report.to_json(), result.report.in, result.kept.size()));
}

void run_dedup_stage(const fs::path& in, const fs::path& out, const fs::path& decisions,
                     const DedupParams& params) {
    params.validate();
    auto samples = read_samples(in);
    const auto n = samples.size();
    auto result = dedup(std::move(samples), params);
    write_samples(out, result.kept);
    emit_report(decisions, with_counts(decisions_to_json(result, params, n), n, result.kept.size()));
}

void run_compile_stage(const fs::path& in, const fs::path& out, const fs::path& report,
                       const CompileConfig& config) {
    const auto tool = make_tool_config(config);
    const auto rules = load_rules(config);
    auto samples = read_samples(in);
    std::set<std::string> ids;
    for (const auto& s : samples) {
        if (!ids.insert(s.id).second) {
            log_warn("compile-gate: input contains duplicate id " + s.id.substr(0, 12) +
                     "; it does not look deduplicated");
            break;
        }
    }
    const auto n = samples.size();
    const auto reports = compile_all(samples, tool, rules, config.jobs);
    auto result = gate(std::move(samples), reports);

    std::size_t clean = 0;
    std::size_t dependency = 0;
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        clean += r.status == CompileStatus::Clean;
        dependency += r.status == CompileStatus::DependencyIssue;
        entries.push_back(r.to_json());
    }
    nlohmann::ordered_json j = {{"tool", config.tool},
                                {"tool_args", config.tool_args},
                                {"status_counts",
                                 {{"Clean", clean},
                                  {"DependencyIssue", dependency},
                                  {"SyntaxError", reports.size() - clean - dependency}}},
                                {"reports", std::move(entries)}};
    write_samples(out, result.kept);
    emit_report(report, with_counts(std::move(j), n, result.kept.size()));
}

void run_label_stage(const fs::path& in, const fs::path& out, const fs::path& quarantine, const fs::path& report,
                     const LabelConfig& config) {
    const auto client = make_client(config);
    auto samples = read_samples(in);
    const auto n = samples.size();
    auto result = label_samples(std::move(samples), *client, config.jobs);

    std::string lines;
    nlohmann::ordered_json reasons = nlohmann::ordered_json::array();
    for (const auto& q : result.quarantined) {
        auto j = to_json(q.sample);
        j["reason"] = q.reason;
        lines += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + '\n';
        reasons.push_back({{"id", q.sample.id}, {"source_path", q.sample.source_path}, {"reason", q.reason}});
    }
    write_samples(out, result.labeled);
    if (!quarantine.empty()) {
        write_file_atomic(quarantine, lines);
    } else if (!result.quarantined.empty()) {
        log_warn(std::to_string(result.quarantined.size()) + " samples quarantined; pass --quarantine to keep them");
    }
    nlohmann::ordered_json j = {{"client", config.client},
                                {"labeled", result.labeled.size()},
                                {"quarantined", std::move(reasons)}};
    emit_report(report, with_counts(std::move(j), n, result.labeled.size()));
}

void run_layer_stage(const fs::path& in, const fs::path& out, const fs::path& report) {
    auto samples = read_samples(in);
    apply_layers(samples);
    const auto lr = layer_report(samples);
    write_samples(out, samples);
    emit_report(report, with_counts(lr.to_json(), samples.size(), samples.size()));
}

void run_manifest_stage(const fs::path& in, const fs::path& out, const fs::path& report, int epochs,
                        std::uint64_t seed) {
    const auto samples = read_samples(in);
    const auto entries = build_manifest(samples, epochs, seed);
    std::array<std::size_t, kPhaseCount> per_phase{};
    for (const auto& e : entries) {
        ++per_phase[static_cast<std::size_t>(e.phase)];
    }
    nlohmann::ordered_json phases = nlohmann::ordered_json::array();
    for (std::size_t p = 0; p < per_phase.size(); ++p) {
        if (per_phase[p] > 0) {
            phases.push_back({{"phase", p}, {"count", per_phase[p]}});
        }
    }
    write_manifest(out, entries);
    nlohmann::ordered_json j = {{"epochs", epochs}, {"seed", seed}, {"phases", std::move(phases)}};
    emit_report(report, with_counts(std::move(j), samples.size(), entries.size()));
}

const std::vector<std::string>& pipeline_stages() {
    static const std::vector<std::string> stages = {"ingest", "filter-modules", "dedup", "compile-gate",
                                                    "label",  "layer",          "manifest", "stats"};
    return stages;
}

namespace {

void run_stage(const std::string& stage, const PipelineConfig& c, const fs::path& dir) {
    using namespace run_files;
    if (stage == "ingest") {
        run_ingest_stage(c.corpus_root, dir / kSamples, dir / kIngestReport, c.jobs);
    } else if (stage == "filter-modules") {
        run_filter_stage(dir / kSamples, dir / kKept, dir / kFilterReport);
    } else if (stage == "dedup") {
        run_dedup_stage(dir / kKept, dir / kUnique, dir / kDedupDecisions, c.dedup);
    } else if (stage == "compile-gate") {
        run_compile_stage(dir / kUnique, dir / kCompiled, dir / kCompileReport, c.compile);
    } else if (stage == "label") {
        run_label_stage(dir / kCompiled, dir / kLabeled, dir / kQuarantine, dir / kLabelReport, c.label);
    } else if (stage == "layer") {
        run_layer_stage(dir / kLabeled, dir / kLayered, dir / kLayerReport);
    } else if (stage == "manifest") {
        run_manifest_stage(dir / kLayered, dir / kManifest, dir / kManifestReport, c.epochs, c.manifest_seed);
    } else if (stage == "stats") {
        write_json_file(dir / kPipelineReport, summarize(load_run_artifacts(dir)).to_json());
    } else {
        throw ForgeError("unknown stage " + stage);
    }
}

}  // namespace

PipelineOutcome run_pipeline(const PipelineConfig& config, bool force) {
    config.validate();
    resolve_tool(make_tool_config(config.compile));
    if (!fs::is_directory(config.corpus_root)) {
        throw ForgeError("corpus root is not a directory: " + config.corpus_root);
    }

    const fs::path dir = config.output_dir;
    const fs::path state = dir / ".forge";
    const fs::path stored_config = dir / "pipeline_config.json";
    const auto config_json = config.to_json();

    if (fs::exists(stored_config)) {
        const auto previous = read_json_file(stored_config);
        if (previous != nlohmann::json::parse(config_json.dump())) {
            if (!force) {
                throw ConfigError("run directory " + dir.string() +
                                  " was produced with a different configuration (use --force to restart)");
            }
            log_warn("configuration changed; discarding previous progress in " + dir.string());
            fs::remove_all(state);
        }
    }
    fs::create_directories(state);
    write_json_file(stored_config, config_json);
    fs::remove(state / "FAILED");

    PipelineOutcome outcome;
    for (const auto& stage : pipeline_stages()) {
        const fs::path marker = state / ("stage-" + stage + ".done");
        if (fs::exists(marker)) {
            outcome.skipped.push_back(stage);
            continue;
        }
        try {
            log_info("running " + stage);
            run_stage(stage, config, dir);
        } catch (const std::exception& e) {
            outcome.exit_code = 1;
            outcome.failed_stage = stage;
            outcome.message = e.what();
            write_file_atomic(state / "FAILED", stage + ": " + e.what() + "\n");
            return outcome;
        }
        write_file_atomic(marker, "");
        outcome.ran.push_back(stage);
    }
    return outcome;
}

}  // namespace forge
