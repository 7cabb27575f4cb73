#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/sample.hpp"

namespace forge {

enum class DiagnosticKind {
    Note,        // informational output that is not an error
    Dependency,  // unresolved module, missing include, unbound identifier
    Syntax,      // any other error
};

std::string_view to_string(DiagnosticKind kind);

struct Diagnostic {
    std::optional<std::size_t> line;
    std::string text;
    DiagnosticKind kind = DiagnosticKind::Note;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Ordered pattern table for compiler output lines. The first rule whose
/// regex matches a line decides its kind; `ignore` rules drop the line and
/// lines that match nothing are notes. Loaded from JSON so the taxonomy can
/// be edited without a rebuild.
class DiagnosticRules {
public:
    struct Rule {
        std::string pattern;
        std::optional<DiagnosticKind> kind;  // nullopt: ignore
        std::regex regex;
    };

    /// {"rules": [{"pattern": "...", "kind": "ignore|dependency|syntax"}, ...]}
    static DiagnosticRules from_json(const nlohmann::json& j);
    static DiagnosticRules load(const std::filesystem::path& path);
    /// Taxonomy for Icarus Verilog output.
    static DiagnosticRules icarus_defaults();

    nlohmann::ordered_json to_json() const;
    /// nullopt when the line is ignored.
    std::optional<DiagnosticKind> classify_line(std::string_view line) const;

private:
    std::vector<Rule> rules_;
};

struct CompileReport {
    std::string sample_id;
    CompileStatus status = CompileStatus::SyntaxError;
    std::vector<Diagnostic> diagnostics;
    int tool_exit_code = -1;

    nlohmann::ordered_json to_json() const;
    static CompileReport from_json(const nlohmann::json& j);
};

/// Pure classification of one tool run:
///   exit 0                                  -> Clean
///   nonzero, every error is a Dependency    -> DependencyIssue
///   anything else (incl. no parsed errors)  -> SyntaxError
/// `scratch_path` occurrences in the output are replaced by `display_path`.
CompileReport classify_output(std::string sample_id, int exit_code, std::string_view output,
                              const DiagnosticRules& rules, std::string_view scratch_path = {},
                              std::string_view display_path = {});

struct ToolConfig {
    std::string tool = "iverilog";
    std::vector<std::string> args = {"-t", "null"};  // elaborate without code generation
    std::chrono::milliseconds timeout{10'000};
    std::filesystem::path scratch_dir;  // empty: system temp directory
};

/// Throws ToolMissing when the configured tool cannot be executed.
std::filesystem::path resolve_tool(const ToolConfig& config);

/// Writes the sample to a scratch file, runs the tool on it alone and
/// classifies the result. A timeout is a SyntaxError report, not an error.
CompileReport compile_check(const Sample& sample, const ToolConfig& config,
                            const DiagnosticRules& rules);

/// Runs compile_check over all samples with `jobs` workers. Reports are
/// sorted by sample id.
std::vector<CompileReport> compile_all(const std::vector<Sample>& samples, const ToolConfig& config,
                                       const DiagnosticRules& rules, std::size_t jobs);

struct GateResult {
    std::vector<Sample> kept;  // Clean or DependencyIssue, status annotated, order preserved
    std::size_t discarded = 0;
};

/// Throws ConsistencyError when a sample has no report.
GateResult gate(std::vector<Sample> samples, const std::vector<CompileReport>& reports);

}  // namespace forge
