#include "forge/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <system_error>

#include "forge/error.hpp"
#include "forge/parallel.hpp"

namespace forge {

namespace fs = std::filesystem;

namespace {

struct FileOutcome {
    std::optional<Sample> sample;
    std::optional<RejectReason> rejected;
};

FileOutcome ingest_file(const fs::path& file, const std::string& relative) {
    if (!has_verilog_extension(file)) {
        return {std::nullopt, RejectReason::NonVerilogExtension};
    }
    std::string bytes;
    try {
        bytes = read_file(file);
    } catch (const ForgeError&) {
        // unreadable counts with undecodable: both mean the bytes never made it in
        return {std::nullopt, RejectReason::EncodingError};
    }
    if (!is_valid_utf8(bytes)) {
        return {std::nullopt, RejectReason::EncodingError};
    }
    Sample sample = make_sample(relative, Origin::Collected, bytes);
    if (sample.code.find_first_not_of(" \t\n\r\f\v") == std::string::npos) {
        return {std::nullopt, RejectReason::Empty};
    }
    return {std::move(sample), std::nullopt};
}

}  // namespace

nlohmann::ordered_json IngestReport::to_json() const {
    return {{"files_seen", files_seen},
            {"admitted", admitted},
            {"rejected",
             {{"EncodingError", encoding_error},
              {"Empty", empty},
              {"NonVerilogExtension", non_verilog_extension}}}};
}

IngestReport IngestReport::from_json(const nlohmann::json& j) {
    IngestReport r;
    r.files_seen = j.at("files_seen").get<std::size_t>();
    r.admitted = j.at("admitted").get<std::size_t>();
    const auto& rej = j.at("rejected");
    r.encoding_error = rej.at("EncodingError").get<std::size_t>();
    r.empty = rej.at("Empty").get<std::size_t>();
    r.non_verilog_extension = rej.at("NonVerilogExtension").get<std::size_t>();
    return r;
}

bool has_verilog_extension(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".v" || ext == ".sv" || ext == ".vh";
}

IngestResult ingest_corpus(const fs::path& root, std::size_t jobs) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        throw ForgeError("corpus root is not a readable directory: " + root.string());
    }

    std::vector<std::pair<std::string, fs::path>> files;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) {
        throw ForgeError("cannot read corpus root " + root.string() + ": " + ec.message());
    }
    for (const fs::recursive_directory_iterator end; it != end; it.increment(ec)) {
        if (ec) {
            throw ForgeError("error walking " + root.string() + ": " + ec.message());
        }
        if (it->is_regular_file(ec)) {
            files.emplace_back(fs::relative(it->path(), root).generic_string(), it->path());
        }
    }
    std::sort(files.begin(), files.end());

    std::vector<FileOutcome> outcomes(files.size());
    parallel_for(files.size(), jobs == 0 ? default_jobs() : jobs, [&](std::size_t i) {
        outcomes[i] = ingest_file(files[i].second, files[i].first);
    });

    IngestResult result;
    result.report.files_seen = files.size();
    for (auto& outcome : outcomes) {
        if (outcome.sample) {
            result.samples.push_back(std::move(*outcome.sample));
            continue;
        }
        switch (*outcome.rejected) {
            case RejectReason::EncodingError: ++result.report.encoding_error; break;
            case RejectReason::Empty: ++result.report.empty; break;
            case RejectReason::NonVerilogExtension: ++result.report.non_verilog_extension; break;
        }
    }
    result.report.admitted = result.samples.size();
    return result;
}

}  // namespace forge
