#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/sample.hpp"

namespace forge {

/// Text-completion backend. Implementations must be safe to call from
/// several threads at once.
class CompletionClient {
public:
    virtual ~CompletionClient() = default;
    virtual std::string complete(const std::string& prompt, double temperature) const = 0;
};

enum class LabelKind { Rank, Complexity, Describe };

struct LabelRequest {
    std::string sample_id;
    LabelKind kind;
    std::string prompt;
    double temperature = 0.0;
};

LabelRequest make_label_request(const Sample& sample, LabelKind kind, double temperature = 0.0);

std::string rank_prompt(std::string_view code);
std::string complexity_prompt(std::string_view code);
std::string describe_prompt(std::string_view code);

enum class CircuitClass { Combinational, Sequential };

struct KeywordEntry {
    std::string keyword;
    CircuitClass circuit_class = CircuitClass::Combinational;
    std::vector<std::string> expansions;
};

std::string synthesis_prompt(const KeywordEntry& entry, std::string_view expansion);

/// Reads a JSON array of {"keyword", "circuit_class", "expansions"} rows.
std::vector<KeywordEntry> load_keywords(const std::filesystem::path& path);

/// Structural counts behind the mock complexity tier. Not a reproduction of
/// any published rubric; it only gives the offline client stable answers.
struct ComplexityScore {
    std::size_t modules = 0;
    std::size_t always_blocks = 0;
    std::size_t instantiations = 0;

    std::size_t total() const { return modules + always_blocks + instantiations; }
};

/// Counts over the lexed code; code that does not lex scores zero.
ComplexityScore complexity_score(std::string_view code);
/// 0-1 Basic, 2-4 Intermediate, 5-9 Advanced, 10+ Expert.
Complexity heuristic_tier(const ComplexityScore& score);

/// Offline client. Recognizes the prompts built above, recovers the code,
/// and answers from a per-sample table keyed by content id. Without a
/// table entry it falls back to a seeded rank, the structural complexity
/// tier, and a template description. Synthesis prompts get a small
/// deterministic module.
class MockClient : public CompletionClient {
public:
    struct Entry {
        std::optional<std::string> rank;
        std::optional<std::string> complexity;
        std::optional<std::string> describe;
    };

    explicit MockClient(std::uint64_t seed = 0, std::map<std::string, Entry> table = {});

    /// {"<sample id>": {"rank": "Score: 20 out of 20.", "complexity": "...", "describe": "..."}}
    static MockClient load(const std::filesystem::path& table_path, std::uint64_t seed);

    std::string complete(const std::string& prompt, double temperature) const override;

private:
    std::string synthesize(std::string_view prompt, double temperature) const;

    std::uint64_t seed_;
    std::map<std::string, Entry> table_;
};

/// POSTs {"prompt", "temperature"} as JSON and reads "text" from the JSON
/// reply. The bearer token is sent when non-empty.
class HttpClient : public CompletionClient {
public:
    HttpClient(std::string url, std::string token,
               std::chrono::seconds timeout = std::chrono::seconds(60));

    std::string complete(const std::string& prompt, double temperature) const override;

private:
    std::string base_;  // scheme://host[:port]
    std::string path_;
    std::string token_;
    std::chrono::seconds timeout_;
};

inline constexpr const char* kApiTokenEnv = "FORGE_API_TOKEN";

/// First integer in [0, 20] in the text ("Score: 20 out of 20." -> 20,
/// "7/20" -> 7).
std::optional<int> parse_rank(std::string_view response);
/// Earliest tier name appearing as a whole word, case-insensitive.
std::optional<Complexity> parse_complexity_response(std::string_view response);
/// Collapses whitespace runs to single spaces; empty when nothing is left.
std::string single_paragraph(std::string_view response);

inline constexpr int kLabelRetries = 3;

/// Throws LabelParseError after 1 + kLabelRetries unusable responses.
int rank_sample(const Sample& sample, const CompletionClient& client);
Complexity classify_complexity(const Sample& sample, const CompletionClient& client);
std::string describe_sample(const Sample& sample, const CompletionClient& client);

struct QuarantinedSample {
    Sample sample;
    std::string reason;
};

struct LabelResult {
    std::vector<Sample> labeled;  // input order
    std::vector<QuarantinedSample> quarantined;
};

/// Ranks, classifies and describes every sample; samples whose responses
/// cannot be parsed are quarantined instead of labeled.
LabelResult label_samples(std::vector<Sample> samples, const CompletionClient& client, std::size_t jobs);

/// n evenly spaced temperatures over [0.1, 1.0]; n == 1 gives {0.1}.
std::vector<double> temperature_schedule(std::size_t n);

/// Body of the first ``` fenced block, or the whole response when it has
/// no fence but mentions `module`; empty otherwise.
std::string extract_code_block(std::string_view response);

struct SynthesisResult {
    std::vector<Sample> samples;
    std::size_t requests = 0;
    std::size_t failures = 0;
};

/// n_queries requests per expansion at temperature_schedule(n_queries).
/// Failed or code-less responses are logged and skipped.
SynthesisResult synthesize_samples(const std::vector<KeywordEntry>& keywords,
                                   const CompletionClient& client, std::size_t n_queries = 10);

}  // namespace forge
