#include "forge/compile_gate.hpp"

#include <algorithm>
#include <atomic>
#include <unordered_map>

#include <unistd.h>

#include "forge/error.hpp"
#include "forge/parallel.hpp"
#include "forge/subprocess.hpp"

namespace forge {

namespace fs = std::filesystem;

namespace {

std::optional<DiagnosticKind> parse_rule_kind(std::string_view text, bool& ok) {
    ok = true;
    if (text == "ignore") return std::nullopt;
    if (text == "dependency") return DiagnosticKind::Dependency;
    if (text == "syntax") return DiagnosticKind::Syntax;
    if (text == "note") return DiagnosticKind::Note;
    ok = false;
    return std::nullopt;
}

std::string rule_kind_name(const std::optional<DiagnosticKind>& kind) {
    if (!kind) {
        return "ignore";
    }
    switch (*kind) {
        case DiagnosticKind::Dependency: return "dependency";
        case DiagnosticKind::Syntax: return "syntax";
        case DiagnosticKind::Note: return "note";
    }
    return "note";
}

void replace_all(std::string& text, std::string_view from, std::string_view to) {
    if (from.empty()) {
        return;
    }
    for (std::size_t pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
        text.replace(pos, from.size(), to);
    }
}

std::optional<std::size_t> diagnostic_line(const std::string& text) {
    static const std::regex location(R"(^[^:\s]*:(\d+):)");
    std::smatch m;
    if (std::regex_search(text, m, location)) {
        return static_cast<std::size_t>(std::stoul(m[1].str()));
    }
    return std::nullopt;
}

bool is_error(const Diagnostic& d) { return d.kind != DiagnosticKind::Note; }

std::atomic<unsigned long> scratch_counter{0};

}  // namespace

std::string_view to_string(DiagnosticKind kind) {
    switch (kind) {
        case DiagnosticKind::Note: return "note";
        case DiagnosticKind::Dependency: return "dependency";
        case DiagnosticKind::Syntax: return "syntax";
    }
    return "note";
}

DiagnosticRules DiagnosticRules::from_json(const nlohmann::json& j) {
    DiagnosticRules rules;
    const auto it = j.find("rules");
    if (it == j.end() || !it->is_array()) {
        throw FormatError("diagnostic rules: expected an object with a \"rules\" array");
    }
    for (const auto& entry : *it) {
        const auto pattern = entry.at("pattern").get<std::string>();
        bool ok = false;
        auto kind = parse_rule_kind(entry.at("kind").get<std::string>(), ok);
        if (!ok) {
            throw FormatError("diagnostic rules: unknown kind for pattern " + pattern);
        }
        try {
            rules.rules_.push_back({pattern, kind, std::regex(pattern, std::regex::ECMAScript)});
        } catch (const std::regex_error& e) {
            throw FormatError("diagnostic rules: bad regex '" + pattern + "': " + e.what());
        }
    }
    return rules;
}

DiagnosticRules DiagnosticRules::load(const fs::path& path) { return from_json(read_json_file(path)); }

DiagnosticRules DiagnosticRules::icarus_defaults() {
    static const nlohmann::json table = {
        {"rules",
         {
             // summaries, warnings and continuation notes
             {{"pattern", R"(^\s*$)"}, {"kind", "ignore"}},
             {{"pattern", R"(^\s*\d+ error\(s\))"}, {"kind", "ignore"}},
             {{"pattern", R"(^\*\*\* These modules were missing:)"}, {"kind", "ignore"}},
             {{"pattern", R"(^\s+\S+ referenced \d+ times\.)"}, {"kind", "ignore"}},
             {{"pattern", R"(^\*\*\*\s*$)"}, {"kind", "ignore"}},
             {{"pattern", R"([Ww]arning:)"}, {"kind", "ignore"}},
             {{"pattern", R"(^[^:\s]*:\d+:\s+: )"}, {"kind", "ignore"}},
             {{"pattern", R"(^Elaboration failed)"}, {"kind", "ignore"}},
             // unresolved instantiation / missing include / undefined symbol
             {{"pattern", R"(Unknown module type)"}, {"kind", "dependency"}},
             {{"pattern", R"(Include file .* not found)"}, {"kind", "dependency"}},
             {{"pattern", R"(Unable to bind )"}, {"kind", "dependency"}},
             {{"pattern", R"(Unable to elaborate r-value)"}, {"kind", "dependency"}},
             {{"pattern", R"(Could not find variable)"}, {"kind", "dependency"}},
             {{"pattern", R"(No function named .* found)"}, {"kind", "dependency"}},
             {{"pattern", R"([Ee]nable of unknown task)"}, {"kind", "dependency"}},
             {{"pattern", R"(Unable to find )"}, {"kind", "dependency"}},
             // everything else that looks like a failure
             {{"pattern", R"(syntax error)"}, {"kind", "syntax"}},
             {{"pattern", R"([Ee]rror)"}, {"kind", "syntax"}},
             {{"pattern", R"(I give up)"}, {"kind", "syntax"}},
             {{"pattern", R"(sorry:)"}, {"kind", "syntax"}},
             {{"pattern", R"(No top level modules)"}, {"kind", "syntax"}},
             {{"pattern", R"(exec failed)"}, {"kind", "syntax"}},
         }}};
    return from_json(table);
}

nlohmann::ordered_json DiagnosticRules::to_json() const {
    nlohmann::ordered_json rules = nlohmann::ordered_json::array();
    for (const auto& r : rules_) {
        rules.push_back({{"pattern", r.pattern}, {"kind", rule_kind_name(r.kind)}});
    }
    return {{"rules", std::move(rules)}};
}

std::optional<DiagnosticKind> DiagnosticRules::classify_line(std::string_view line) const {
    for (const auto& r : rules_) {
        if (std::regex_search(line.begin(), line.end(), r.regex)) {
            return r.kind;
        }
    }
    return DiagnosticKind::Note;
}

nlohmann::ordered_json CompileReport::to_json() const {
    nlohmann::ordered_json diags = nlohmann::ordered_json::array();
    for (const auto& d : diagnostics) {
        diags.push_back({{"line", d.line ? nlohmann::ordered_json(*d.line) : nlohmann::ordered_json(nullptr)},
                         {"text", d.text},
                         {"kind", std::string(to_string(d.kind))}});
    }
    return {{"sample_id", sample_id},
            {"status", std::string(forge::to_string(status))},
            {"tool_exit_code", tool_exit_code},
            {"diagnostics", std::move(diags)}};
}

CompileReport CompileReport::from_json(const nlohmann::json& j) {
    CompileReport r;
    r.sample_id = j.at("sample_id").get<std::string>();
    auto status = parse_compile_status(j.at("status").get<std::string>());
    if (!status) {
        throw FormatError("compile report for " + r.sample_id + ": unknown status");
    }
    r.status = *status;
    r.tool_exit_code = j.at("tool_exit_code").get<int>();
    for (const auto& d : j.at("diagnostics")) {
        Diagnostic diag;
        if (!d.at("line").is_null()) {
            diag.line = d.at("line").get<std::size_t>();
        }
        diag.text = d.at("text").get<std::string>();
        const auto kind = d.at("kind").get<std::string>();
        diag.kind = kind == "dependency" ? DiagnosticKind::Dependency
                    : kind == "syntax"   ? DiagnosticKind::Syntax
                                         : DiagnosticKind::Note;
        r.diagnostics.push_back(std::move(diag));
    }
    return r;
}

CompileReport classify_output(std::string sample_id, int exit_code, std::string_view output,
                              const DiagnosticRules& rules, std::string_view scratch_path,
                              std::string_view display_path) {
    CompileReport report;
    report.sample_id = std::move(sample_id);
    report.tool_exit_code = exit_code;

    std::string text(output);
    replace_all(text, scratch_path, display_path);
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) {
            end = text.size();
        }
        std::string line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        start = end + 1;
        if (auto kind = rules.classify_line(line)) {
            report.diagnostics.push_back({diagnostic_line(line), std::move(line), *kind});
        }
    }

    if (exit_code == 0) {
        report.status = CompileStatus::Clean;
        for (auto& d : report.diagnostics) {
            d.kind = DiagnosticKind::Note;
        }
        return report;
    }

    const bool any_error = std::any_of(report.diagnostics.begin(), report.diagnostics.end(), is_error);
    if (!any_error) {
        report.diagnostics.push_back({std::nullopt,
                                      "tool exited with status " + std::to_string(exit_code) +
                                          " without reporting an error",
                                      DiagnosticKind::Syntax});
    }
    const bool all_dependency = std::all_of(report.diagnostics.begin(), report.diagnostics.end(),
                                            [](const Diagnostic& d) {
                                                return !is_error(d) || d.kind == DiagnosticKind::Dependency;
                                            });
    report.status = all_dependency ? CompileStatus::DependencyIssue : CompileStatus::SyntaxError;
    return report;
}

fs::path resolve_tool(const ToolConfig& config) {
    auto path = find_executable(config.tool);
    if (!path) {
        throw ToolMissing("compiler '" + config.tool + "' not found or not executable");
    }
    return fs::absolute(*path);
}

CompileReport compile_check(const Sample& sample, const ToolConfig& config, const DiagnosticRules& rules) {
    if (config.timeout.count() <= 0) {
        throw ConfigError("compile timeout must be positive");
    }
    const fs::path tool = resolve_tool(config);

    const fs::path dir = config.scratch_dir.empty() ? fs::temp_directory_path() : config.scratch_dir;
    fs::create_directories(dir);
    std::string ext = fs::path(sample.source_path).extension().string();
    if (ext.empty()) {
        ext = ".v";
    }
    const fs::path scratch = dir / ("forge-" + std::to_string(::getpid()) + "-" +
                                    std::to_string(scratch_counter.fetch_add(1)) + "-" +
                                    sample.id.substr(0, 12) + ext);
    write_file_atomic(scratch, sample.code);

    std::vector<std::string> argv{tool.string()};
    argv.insert(argv.end(), config.args.begin(), config.args.end());
    argv.push_back(scratch.string());

    ProcessResult run;
    try {
        run = run_process(argv, config.timeout);
    } catch (...) {
        std::error_code ec;
        fs::remove(scratch, ec);
        throw;
    }
    std::error_code ec;
    fs::remove(scratch, ec);

    if (run.timed_out) {
        CompileReport report;
        report.sample_id = sample.id;
        report.status = CompileStatus::SyntaxError;
        report.tool_exit_code = -1;
        report.diagnostics.push_back(
            {std::nullopt,
             "timed out after " + std::to_string(config.timeout.count()) + " ms",
             DiagnosticKind::Syntax});
        return report;
    }
    return classify_output(sample.id, run.exit_code, run.output, rules, scratch.string(), sample.source_path);
}

std::vector<CompileReport> compile_all(const std::vector<Sample>& samples, const ToolConfig& config,
                                       const DiagnosticRules& rules, std::size_t jobs) {
    ToolConfig resolved = config;
    resolved.tool = resolve_tool(config).string();  // ToolMissing before any sample runs

    std::vector<CompileReport> reports(samples.size());
    parallel_for(samples.size(), jobs == 0 ? default_jobs() : jobs,
                 [&](std::size_t i) { reports[i] = compile_check(samples[i], resolved, rules); });
    std::stable_sort(reports.begin(), reports.end(),
                     [](const auto& a, const auto& b) { return a.sample_id < b.sample_id; });
    return reports;
}

GateResult gate(std::vector<Sample> samples, const std::vector<CompileReport>& reports) {
    std::unordered_map<std::string_view, const CompileReport*> by_id;
    for (const auto& r : reports) {
        by_id.emplace(r.sample_id, &r);
    }
    GateResult result;
    for (auto& s : samples) {
        const auto it = by_id.find(s.id);
        if (it == by_id.end()) {
            throw ConsistencyError("no compile report for sample " + s.id + " (" + s.source_path + ")");
        }
        if (it->second->status == CompileStatus::SyntaxError) {
            ++result.discarded;
            continue;
        }
        s.compile_status = it->second->status;
        result.kept.push_back(std::move(s));
    }
    return result;
}

}  // namespace forge
