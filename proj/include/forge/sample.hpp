#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace forge {

enum class Origin { Collected, Synthesized };

enum class Complexity { Basic = 0, Intermediate = 1, Advanced = 2, Expert = 3 };

enum class CompileStatus { Clean, DependencyIssue, SyntaxError };

inline constexpr std::array<Complexity, 4> kAllComplexities = {
    Complexity::Basic, Complexity::Intermediate, Complexity::Advanced, Complexity::Expert};

inline constexpr int kMinRank = 0;
inline constexpr int kMaxRank = 20;
inline constexpr int kLayerCount = 6;

std::string_view to_string(Origin origin);
std::string_view to_string(Complexity tier);
std::string_view to_string(CompileStatus status);

std::optional<Origin> parse_origin(std::string_view text);
/// Case-insensitive.
std::optional<Complexity> parse_complexity(std::string_view text);
std::optional<CompileStatus> parse_compile_status(std::string_view text);

inline int tier_index(Complexity tier) { return static_cast<int>(tier); }

/// One Verilog source unit moving through the pipeline.
struct Sample {
    std::string id;           // hex SHA-256 of the normalized code
    std::string source_path;  // relative to the corpus root, '/' separated
    Origin origin = Origin::Collected;
    std::string code;         // normalized UTF-8 text
    std::optional<int> rank;
    std::optional<Complexity> complexity;
    std::optional<std::string> description;
    std::optional<CompileStatus> compile_status;
    std::optional<int> layer;

    friend bool operator==(const Sample&, const Sample&) = default;
};

/// CRLF -> LF, strips a leading UTF-8 BOM and trailing whitespace on every line.
std::string normalize_code(std::string_view text);

/// Lowercase hex SHA-256 of `bytes`.
std::string hex_digest(std::string_view bytes);

/// Builds a Sample from raw text: normalizes and assigns the content id.
Sample make_sample(std::string source_path, Origin origin, std::string_view raw_code);

bool is_valid_utf8(std::string_view bytes);

nlohmann::ordered_json to_json(const Sample& sample);
/// Throws FormatError on missing fields or out-of-range labels.
Sample sample_from_json(const nlohmann::json& j);

/// Reads a JSON-lines file of samples. Blank lines are skipped.
std::vector<Sample> read_samples(const std::filesystem::path& path);
void write_samples(const std::filesystem::path& path, const std::vector<Sample>& samples);

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

void write_json_file(const std::filesystem::path& path, const nlohmann::ordered_json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace forge
