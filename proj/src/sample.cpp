#include "forge/sample.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "forge/error.hpp"

namespace forge {

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_trailing_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
}

template <typename T>
nlohmann::ordered_json optional_json(const std::optional<T>& value) {
    if (!value) {
        return nullptr;
    }
    if constexpr (std::is_enum_v<T>) {
        return std::string(to_string(*value));
    } else {
        return *value;
    }
}

}  // namespace

std::string_view to_string(Origin origin) {
    return origin == Origin::Collected ? "Collected" : "Synthesized";
}

std::string_view to_string(Complexity tier) {
    switch (tier) {
        case Complexity::Basic: return "Basic";
        case Complexity::Intermediate: return "Intermediate";
        case Complexity::Advanced: return "Advanced";
        case Complexity::Expert: return "Expert";
    }
    return "?";
}

std::string_view to_string(CompileStatus status) {
    switch (status) {
        case CompileStatus::Clean: return "Clean";
        case CompileStatus::DependencyIssue: return "DependencyIssue";
        case CompileStatus::SyntaxError: return "SyntaxError";
    }
    return "?";
}

std::optional<Origin> parse_origin(std::string_view text) {
    if (text == "Collected") return Origin::Collected;
    if (text == "Synthesized") return Origin::Synthesized;
    return std::nullopt;
}

std::optional<Complexity> parse_complexity(std::string_view text) {
    const std::string key = lower(text);
    for (Complexity tier : kAllComplexities) {
        if (key == lower(to_string(tier))) {
            return tier;
        }
    }
    return std::nullopt;
}

std::optional<CompileStatus> parse_compile_status(std::string_view text) {
    for (auto status : {CompileStatus::Clean, CompileStatus::DependencyIssue, CompileStatus::SyntaxError}) {
        if (text == to_string(status)) {
            return status;
        }
    }
    return std::nullopt;
}

std::string normalize_code(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) {
        text.remove_prefix(3);
    }
    std::string out;
    out.reserve(text.size());
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        const bool last = end == std::string_view::npos;
        if (last) {
            end = text.size();
        }
        std::string_view line = text.substr(start, end - start);
        while (!line.empty() && is_trailing_space(line.back())) {
            line.remove_suffix(1);
        }
        out.append(line);
        if (last) {
            break;
        }
        out.push_back('\n');
        start = end + 1;
    }
    return out;
}

std::string hex_digest(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw ForgeError("SHA-256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[md[i] >> 4]);
        out.push_back(kHex[md[i] & 0xF]);
    }
    return out;
}

Sample make_sample(std::string source_path, Origin origin, std::string_view raw_code) {
    Sample s;
    s.code = normalize_code(raw_code);
    s.id = hex_digest(s.code);
    s.source_path = std::move(source_path);
    s.origin = origin;
    return s;
}

bool is_valid_utf8(std::string_view bytes) {
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const auto* end = p + bytes.size();
    while (p < end) {
        const unsigned char c = *p;
        std::size_t extra = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++p;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            extra = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (static_cast<std::size_t>(end - p) <= extra) {
            return false;
        }
        for (std::size_t k = 1; k <= extra; ++k) {
            if ((p[k] & 0xC0) != 0x80) {
                return false;
            }
            cp = (cp << 6) | (p[k] & 0x3F);
        }
        // overlong forms, surrogates, beyond U+10FFFF
        static constexpr std::uint32_t kMinForLength[] = {0, 0x80, 0x800, 0x10000};
        if (cp < kMinForLength[extra] || (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
            return false;
        }
        p += extra + 1;
    }
    return true;
}

nlohmann::ordered_json to_json(const Sample& s) {
    nlohmann::ordered_json j;
    j["id"] = s.id;
    j["source_path"] = s.source_path;
    j["origin"] = std::string(to_string(s.origin));
    j["code"] = s.code;
    j["rank"] = optional_json(s.rank);
    j["complexity"] = optional_json(s.complexity);
    j["description"] = optional_json(s.description);
    j["compile_status"] = optional_json(s.compile_status);
    j["layer"] = optional_json(s.layer);
    return j;
}

Sample sample_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw FormatError("sample record is not a JSON object");
    }
    auto require_string = [&](const char* key) -> std::string {
        auto it = j.find(key);
        if (it == j.end() || !it->is_string()) {
            throw FormatError(std::string("sample record missing string field '") + key + "'");
        }
        return it->get<std::string>();
    };
    auto optional_field = [&](const char* key) -> const nlohmann::json* {
        auto it = j.find(key);
        return (it == j.end() || it->is_null()) ? nullptr : &*it;
    };

    Sample s;
    s.id = require_string("id");
    s.source_path = require_string("source_path");
    s.code = require_string("code");
    auto origin = parse_origin(require_string("origin"));
    if (!origin) {
        throw FormatError("sample " + s.id + ": unknown origin");
    }
    s.origin = *origin;

    if (const auto* v = optional_field("rank")) {
        if (!v->is_number_integer()) {
            throw FormatError("sample " + s.id + ": rank is not an integer");
        }
        const int rank = v->get<int>();
        if (rank < kMinRank || rank > kMaxRank) {
            throw FormatError("sample " + s.id + ": rank " + std::to_string(rank) + " outside [0, 20]");
        }
        s.rank = rank;
    }
    if (const auto* v = optional_field("complexity")) {
        auto tier = v->is_string() ? parse_complexity(v->get<std::string>()) : std::nullopt;
        if (!tier) {
            throw FormatError("sample " + s.id + ": unknown complexity");
        }
        s.complexity = tier;
    }
    if (const auto* v = optional_field("description")) {
        if (!v->is_string()) {
            throw FormatError("sample " + s.id + ": description is not a string");
        }
        s.description = v->get<std::string>();
    }
    if (const auto* v = optional_field("compile_status")) {
        auto status = v->is_string() ? parse_compile_status(v->get<std::string>()) : std::nullopt;
        if (!status) {
            throw FormatError("sample " + s.id + ": unknown compile_status");
        }
        s.compile_status = status;
    }
    if (const auto* v = optional_field("layer")) {
        if (!v->is_number_integer()) {
            throw FormatError("sample " + s.id + ": layer is not an integer");
        }
        const int layer = v->get<int>();
        if (layer < 1 || layer > kLayerCount) {
            throw FormatError("sample " + s.id + ": layer " + std::to_string(layer) + " outside [1, 6]");
        }
        s.layer = layer;
    }
    return s;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ForgeError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw ForgeError("read failed: " + path.string());
    }
    return std::move(buf).str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ForgeError("cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw ForgeError("write failed: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::vector<Sample> read_samples(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ForgeError("cannot open " + path.string());
    }
    std::vector<Sample> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            samples.push_back(sample_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const FormatError& e) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return samples;
}

void write_samples(const std::filesystem::path& path, const std::vector<Sample>& samples) {
    std::string out;
    for (const auto& s : samples) {
        out += to_json(s).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        out += '\n';
    }
    write_file_atomic(path, out);
}

void write_json_file(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    write_file_atomic(path, j.dump(2) + "\n");
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

}  // namespace forge
