#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/compile_gate.hpp"
#include "forge/dedup.hpp"
#include "forge/labeler.hpp"

namespace forge {

struct LabelConfig {
    std::string client = "mock";  // mock | http
    std::string mock_table;       // optional lookup table for the mock client
    std::uint64_t seed = 0;
    std::string endpoint;         // http client URL
    std::size_t jobs = 0;
};

struct CompileConfig {
    std::string tool = "iverilog";
    std::vector<std::string> tool_args = {"-t", "null"};
    double timeout_s = 10.0;
    std::size_t jobs = 0;
    std::string rules;  // optional diagnostic-rule file; empty: built-in Icarus table
};

struct PipelineConfig {
    std::string corpus_root;
    std::string output_dir;
    DedupParams dedup;
    CompileConfig compile;
    LabelConfig label;
    int epochs = 1;
    std::uint64_t manifest_seed = 7;
    std::size_t jobs = 0;  // ingest / filter parallelism

    /// Throws ConfigError: B*R != P, threshold outside (0, 1], empty paths,
    /// unknown client kind, non-positive timeout or epochs.
    void validate() const;

    nlohmann::ordered_json to_json() const;
    /// Missing keys keep their defaults. `dedup.rows` defaults to perms / bands.
    static PipelineConfig from_json(const nlohmann::json& j);
    static PipelineConfig load(const std::filesystem::path& path);
};

/// Builds the configured completion client. The http client reads its
/// token from FORGE_API_TOKEN.
std::unique_ptr<CompletionClient> make_client(const LabelConfig& config);

ToolConfig make_tool_config(const CompileConfig& config);
DiagnosticRules load_rules(const CompileConfig& config);

// Individual stages. Each reads its input file and writes its output plus
// a JSON report carrying a {"in", "out", "dropped"} "counts" block.
void run_ingest_stage(const std::filesystem::path& root, const std::filesystem::path& out,
                      const std::filesystem::path& report, std::size_t jobs);
void run_filter_stage(const std::filesystem::path& in, const std::filesystem::path& out,
                      const std::filesystem::path& report);
void run_dedup_stage(const std::filesystem::path& in, const std::filesystem::path& out,
                     const std::filesystem::path& decisions, const DedupParams& params);
void run_compile_stage(const std::filesystem::path& in, const std::filesystem::path& out,
                       const std::filesystem::path& report, const CompileConfig& config);
void run_label_stage(const std::filesystem::path& in, const std::filesystem::path& out,
                     const std::filesystem::path& quarantine, const std::filesystem::path& report,
                     const LabelConfig& config);
void run_layer_stage(const std::filesystem::path& in, const std::filesystem::path& out,
                     const std::filesystem::path& report);
void run_manifest_stage(const std::filesystem::path& in, const std::filesystem::path& out,
                        const std::filesystem::path& report, int epochs, std::uint64_t seed);

/// Names in execution order: ingest, filter-modules, dedup, compile-gate,
/// label, layer, manifest, stats.
const std::vector<std::string>& pipeline_stages();

struct PipelineOutcome {
    int exit_code = 0;
    std::vector<std::string> ran;      // stages executed in this invocation
    std::vector<std::string> skipped;  // already complete from an earlier run
    std::string failed_stage;
    std::string message;
};

/// Runs every stage in order inside config.output_dir. Completed stages
/// leave a marker under .forge/ and are skipped on the next run with the
/// same configuration; a failure writes .forge/FAILED and stops. A run
/// directory produced with a different configuration is refused unless
/// `force` is set, which discards the old markers.
PipelineOutcome run_pipeline(const PipelineConfig& config, bool force = false);

}  // namespace forge
