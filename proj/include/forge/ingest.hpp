#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/sample.hpp"

namespace forge {

enum class RejectReason { EncodingError, Empty, NonVerilogExtension };

struct IngestReport {
    std::size_t files_seen = 0;
    std::size_t admitted = 0;
    std::size_t encoding_error = 0;
    std::size_t empty = 0;
    std::size_t non_verilog_extension = 0;

    std::size_t rejected() const { return encoding_error + empty + non_verilog_extension; }
    nlohmann::ordered_json to_json() const;
    static IngestReport from_json(const nlohmann::json& j);
};

struct IngestResult {
    std::vector<Sample> samples;  // sorted by source_path
    IngestReport report;
};

/// .v, .sv and .vh, case-insensitive.
bool has_verilog_extension(const std::filesystem::path& path);

/// Walks `root` recursively and admits every readable, UTF-8, non-empty
/// Verilog file as a Collected sample. Per-file problems are counted, never
/// thrown; a missing or unreadable root throws ForgeError.
IngestResult ingest_corpus(const std::filesystem::path& root, std::size_t jobs = 0);

}  // namespace forge
