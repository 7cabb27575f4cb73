#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "forge/error.hpp"
#include "forge/labeler.hpp"
#include "forge/log.hpp"
#include "forge/manifest.hpp"
#include "forge/pipeline.hpp"
#include "forge/stats.hpp"

namespace {

std::vector<std::string> split_args(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> out;
    for (std::string word; in >> word;) {
        out.push_back(word);
    }
    return out;
}

void add_client_options(CLI::App* cmd, forge::LabelConfig& label) {
    cmd->add_option("--client", label.client, "completion backend")
        ->check(CLI::IsMember({"mock", "http"}))
        ->capture_default_str();
    cmd->add_option("--mock-table", label.mock_table, "JSON answer table for the mock client");
    cmd->add_option("--endpoint", label.endpoint, "completion URL for the http client");
    cmd->add_option("--label-seed", label.seed, "seed for mock fallbacks")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"forge: Verilog dataset curation pipeline"};
    app.require_subcommand(1);

    std::string in, out, report, root;
    std::size_t jobs = 0;

    auto* ingest = app.add_subcommand("ingest", "collect Verilog files into samples.jsonl");
    ingest->add_option("--root", root, "corpus directory")->required();
    ingest->add_option("--out", out, "output JSONL")->required();
    ingest->add_option("--report", report, "report JSON (default: stdout)");
    ingest->add_option("--jobs", jobs, "worker threads (0: all cores)");

    auto* filter = app.add_subcommand("filter-modules", "drop samples without a module declaration");
    filter->add_option("--in", in)->required();
    filter->add_option("--out", out)->required();
    filter->add_option("--report", report, "report JSON (default: stdout)");

    forge::DedupParams dp;
    std::size_t rows = 0;
    auto* dedup_cmd = app.add_subcommand("dedup", "MinHash/LSH near-duplicate removal");
    dedup_cmd->add_option("--in", in)->required();
    dedup_cmd->add_option("--out", out)->required();
    dedup_cmd->add_option("--decisions", report, "decision log JSON (default: stdout)");
    dedup_cmd->add_option("--threshold", dp.threshold)->capture_default_str();
    dedup_cmd->add_option("--shingle-k", dp.shingle_k)->capture_default_str();
    dedup_cmd->add_option("--perms", dp.perms)->capture_default_str();
    dedup_cmd->add_option("--bands", dp.bands)->capture_default_str();
    dedup_cmd->add_option("--rows", rows, "rows per band (default: perms / bands)");
    dedup_cmd->add_option("--seed", dp.seed)->capture_default_str();
    dedup_cmd->add_option("--jobs", dp.jobs);

    forge::CompileConfig cc;
    std::string tool_args;
    auto* compile = app.add_subcommand("compile-gate", "classify samples with an external Verilog compiler");
    compile->add_option("--in", in)->required();
    compile->add_option("--out", out)->required();
    compile->add_option("--report", report, "report JSON (default: stdout)");
    compile->add_option("--tool", cc.tool)->capture_default_str();
    compile->add_option("--tool-args", tool_args, "whitespace-separated flags (default: -t null)");
    compile->add_option("--timeout", cc.timeout_s, "seconds per sample")->capture_default_str();
    compile->add_option("--rules", cc.rules, "diagnostic rule table JSON");
    compile->add_option("--jobs", cc.jobs);

    forge::LabelConfig lc;
    std::string quarantine;
    auto* label = app.add_subcommand("label", "rank, classify and describe samples");
    label->add_option("--in", in)->required();
    label->add_option("--out", out)->required();
    label->add_option("--quarantine", quarantine, "JSONL for samples whose responses could not be parsed");
    label->add_option("--report", report, "report JSON (default: stdout)");
    label->add_option("--jobs", lc.jobs);
    add_client_options(label, lc);

    std::string keywords;
    std::size_t n_queries = 10;
    auto* synth = app.add_subcommand("synthesize", "generate samples from a keyword table");
    synth->add_option("--keywords", keywords)->required();
    synth->add_option("--out", out)->required();
    synth->add_option("--n-queries", n_queries, "requests per expansion")->capture_default_str();
    add_client_options(synth, lc);

    auto* layer = app.add_subcommand("layer", "assign pyramid layers");
    layer->add_option("--in", in)->required();
    layer->add_option("--out", out)->required();
    layer->add_option("--report", report, "report JSON (default: stdout)");

    int epochs = 1;
    std::uint64_t seed = 7;
    bool replay = false;
    auto* manifest = app.add_subcommand("manifest", "emit the curriculum training manifest");
    manifest->add_option("--in", in)->required();
    manifest->add_option("--out", out)->required();
    manifest->add_option("--report", report, "report JSON (default: stdout)");
    manifest->add_option("--epochs", epochs)->capture_default_str();
    manifest->add_option("--seed", seed)->capture_default_str();
    manifest->add_flag("--replay", replay, "revisit earlier phases (reserved, not implemented)");

    std::uint64_t corrupt_seed = 13;
    auto* corrupt = app.add_subcommand("corrupt", "mismatch code, descriptions and ranks across samples");
    corrupt->add_option("--in", in)->required();
    corrupt->add_option("--out", out)->required();
    corrupt->add_option("--seed", corrupt_seed)->capture_default_str();

    std::string run_dir;
    auto* stats = app.add_subcommand("stats", "check and summarize a pipeline run directory");
    stats->add_option("--run-dir", run_dir)->required();
    stats->add_option("--out", out, "report JSON (default: stdout)");

    std::string config_path, out_dir, tool;
    bool force = false;
    auto* pipeline = app.add_subcommand("pipeline", "run every stage in order, resuming completed ones");
    pipeline->add_option("--config", config_path, "pipeline config JSON");
    pipeline->add_option("--root", root, "override corpus_root");
    pipeline->add_option("--out-dir", out_dir, "override output_dir");
    pipeline->add_option("--tool", tool, "override compile.tool");
    pipeline->add_flag("--force", force, "restart a run directory created with another config");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) {
            forge::run_ingest_stage(root, out, report, jobs);
        } else if (filter->parsed()) {
            forge::run_filter_stage(in, out, report);
        } else if (dedup_cmd->parsed()) {
            dp.rows = rows != 0 ? rows : (dp.bands == 0 ? 0 : dp.perms / dp.bands);
            forge::run_dedup_stage(in, out, report, dp);
        } else if (compile->parsed()) {
            if (compile->count("--tool-args") > 0) {
                cc.tool_args = split_args(tool_args);
            }
            forge::run_compile_stage(in, out, report, cc);
        } else if (label->parsed()) {
            forge::run_label_stage(in, out, quarantine, report, lc);
        } else if (synth->parsed()) {
            const auto client = forge::make_client(lc);
            const auto result = forge::synthesize_samples(forge::load_keywords(keywords), *client, n_queries);
            forge::write_samples(out, result.samples);
            forge::log_info("synthesized " + std::to_string(result.samples.size()) + " samples from " +
                            std::to_string(result.requests) + " requests (" + std::to_string(result.failures) +
                            " failed)");
        } else if (layer->parsed()) {
            forge::run_layer_stage(in, out, report);
        } else if (manifest->parsed()) {
            if (replay) {
                throw forge::ConfigError("--replay is reserved and not implemented; phases are disjoint");
            }
            forge::run_manifest_stage(in, out, report, epochs, seed);
        } else if (corrupt->parsed()) {
            forge::write_samples(out, forge::corrupt_dataset(forge::read_samples(in), corrupt_seed));
        } else if (stats->parsed()) {
            const auto summary = forge::summarize(forge::load_run_artifacts(run_dir));
            if (out.empty()) {
                std::cout << summary.render();
            } else {
                forge::write_json_file(out, summary.to_json());
            }
        } else if (pipeline->parsed()) {
            auto config = config_path.empty() ? forge::PipelineConfig{} : forge::PipelineConfig::load(config_path);
            if (!root.empty()) {
                config.corpus_root = root;
            }
            if (!out_dir.empty()) {
                config.output_dir = out_dir;
            }
            if (!tool.empty()) {
                config.compile.tool = tool;
            }
            const auto outcome = forge::run_pipeline(config, force);
            if (outcome.exit_code != 0) {
                std::cerr << "forge: stage " << outcome.failed_stage << " failed: " << outcome.message << '\n';
                return outcome.exit_code;
            }
            if (outcome.ran.empty()) {
                forge::log_info("nothing to do; all stages already complete");
            }
        }
    } catch (const forge::ConfigError& e) {
        std::cerr << "forge: configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "forge: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
