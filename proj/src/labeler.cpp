#include "forge/labeler.hpp"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <sstream>

#include "forge/error.hpp"
#include "forge/log.hpp"
#include "forge/parallel.hpp"
#include "forge/random.hpp"
#include "forge/verilog_lex.hpp"

namespace forge {

namespace {

// Ranking instruction as used when the dataset was labeled.
constexpr std::string_view kRankInstruction =
    "Act as a teacher and rank the quality of this Verilog code in scale of 0 to 20, with 0 being "
    "syntactically incorrect and 20 being a good Verilog code in terms of efficiency and coding style:";
constexpr std::string_view kRankTrailer = "Just give me the score only.";

constexpr std::string_view kComplexityInstruction =
    "Classify the design complexity of this Verilog code as exactly one of Basic, Intermediate, "
    "Advanced or Expert:";
constexpr std::string_view kComplexityTrailer = "Answer with the tier name only.";

constexpr std::string_view kDescribeInstruction =
    "Describe what this Verilog design does in one concise paragraph that could serve as the "
    "specification for re-implementing it:";
constexpr std::string_view kDescribeTrailer = "Reply with the description only.";

constexpr std::string_view kSynthesisLead = "Write a complete, synthesizable Verilog implementation of a ";
constexpr std::string_view kSynthesisClassLead = ". It is a ";

std::string wrap(std::string_view instruction, std::string_view code, std::string_view trailer) {
    std::string out;
    out.reserve(instruction.size() + code.size() + trailer.size() + 2);
    out.append(instruction).append("\n").append(code).append("\n").append(trailer);
    return out;
}

/// Recovers the code from a prompt built by wrap(); nullopt if it does not match.
std::optional<std::string_view> unwrap(std::string_view prompt, std::string_view instruction,
                                       std::string_view trailer) {
    if (prompt.size() < instruction.size() + trailer.size() + 2 || !prompt.starts_with(instruction) ||
        prompt[instruction.size()] != '\n' || !prompt.ends_with(trailer) ||
        prompt[prompt.size() - trailer.size() - 1] != '\n') {
        return std::nullopt;
    }
    return prompt.substr(instruction.size() + 1, prompt.size() - instruction.size() - trailer.size() - 2);
}

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string slug(std::string_view text) {
    std::string out;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            out.push_back(static_cast<char>(std::tolower(c)));
        } else if (!out.empty() && out.back() != '_') {
            out.push_back('_');
        }
    }
    while (!out.empty() && out.back() == '_') {
        out.pop_back();
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front()))) {
        out.insert(out.begin(), 'm');
    }
    return out;
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h = (h ^ c) * 0x100000001B3ULL;
    }
    return h;
}

std::string module_names(std::string_view code) {
    std::vector<ModuleInfo> modules;
    try {
        modules = find_modules(lex(code));
    } catch (const LexError&) {
    }
    if (modules.empty()) {
        return "(none)";
    }
    std::string out;
    for (const auto& m : modules) {
        if (!out.empty()) {
            out += ", ";
        }
        out += m.name;
    }
    return out;
}

template <typename Parse>
auto ask_until_parsed(const LabelRequest& request, const CompletionClient& client, Parse parse,
                      std::string_view what) {
    std::string last;
    for (int attempt = 0; attempt <= kLabelRetries; ++attempt) {
        last = client.complete(request.prompt, request.temperature);
        if (auto value = parse(last)) {
            return *value;
        }
    }
    throw LabelParseError("no usable " + std::string(what) + " for sample " + request.sample_id +
                          " after " + std::to_string(kLabelRetries + 1) + " attempts; last response: \"" +
                          last.substr(0, 120) + "\"");
}

std::optional<std::string> optional_string(const nlohmann::json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return std::nullopt;
    }
    if (key == std::string_view("rank") && it->is_number_integer()) {
        return "Score: " + std::to_string(it->get<int>()) + " out of 20.";
    }
    return it->get<std::string>();
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::string rank_prompt(std::string_view code) { return wrap(kRankInstruction, code, kRankTrailer); }
std::string complexity_prompt(std::string_view code) {
    return wrap(kComplexityInstruction, code, kComplexityTrailer);
}
std::string describe_prompt(std::string_view code) { return wrap(kDescribeInstruction, code, kDescribeTrailer); }

LabelRequest make_label_request(const Sample& sample, LabelKind kind, double temperature) {
    if (sample.code.empty()) {
        throw ConfigError("cannot label sample " + sample.id + " with empty code");
    }
    LabelRequest req{sample.id, kind, {}, temperature};
    switch (kind) {
        case LabelKind::Rank: req.prompt = rank_prompt(sample.code); break;
        case LabelKind::Complexity: req.prompt = complexity_prompt(sample.code); break;
        case LabelKind::Describe: req.prompt = describe_prompt(sample.code); break;
    }
    return req;
}

std::string synthesis_prompt(const KeywordEntry& entry, std::string_view expansion) {
    std::string out(kSynthesisLead);
    out.append(expansion).append(kSynthesisClassLead);
    out.append(entry.circuit_class == CircuitClass::Sequential ? "sequential" : "combinational");
    out.append(" circuit from the \"").append(entry.keyword).append("\" family. ");
    out.append(
        "Give the module descriptive port names, document the ports briefly, keep it to a single "
        "top-level module, and return only the code inside one ```verilog fenced block.");
    return out;
}

std::vector<KeywordEntry> load_keywords(const std::filesystem::path& path) {
    const auto j = read_json_file(path);
    if (!j.is_array()) {
        throw FormatError(path.string() + ": keyword database must be a JSON array");
    }
    std::vector<KeywordEntry> entries;
    for (const auto& row : j) {
        KeywordEntry e;
        e.keyword = row.at("keyword").get<std::string>();
        const auto cls = row.at("circuit_class").get<std::string>();
        if (cls == "Combinational") {
            e.circuit_class = CircuitClass::Combinational;
        } else if (cls == "Sequential") {
            e.circuit_class = CircuitClass::Sequential;
        } else {
            throw FormatError(path.string() + ": unknown circuit_class '" + cls + "'");
        }
        e.expansions = row.value("expansions", std::vector<std::string>{});
        entries.push_back(std::move(e));
    }
    return entries;
}

ComplexityScore complexity_score(std::string_view code) {
    std::vector<Token> tokens;
    try {
        tokens = lex(code);
    } catch (const LexError&) {
        return {};
    }
    ComplexityScore score;
    score.modules = find_modules(tokens).size();

    auto is_item_start = [&](std::size_t i) {
        if (i == 0) {
            return true;
        }
        const Token& prev = tokens[i - 1];
        return (prev.kind == TokenKind::Punct && prev.text == ";") ||
               (prev.kind == TokenKind::Keyword &&
                (prev.text == "begin" || prev.text == "end" || prev.text == "generate" || prev.text == "else"));
    };
    auto punct = [&](std::size_t i, std::string_view text) {
        return i < tokens.size() && tokens[i].kind == TokenKind::Punct && tokens[i].text == text;
    };

    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const Token& tok = tokens[i];
        if (tok.kind == TokenKind::Keyword &&
            (tok.text == "always" || tok.text == "always_ff" || tok.text == "always_comb" ||
             tok.text == "always_latch")) {
            ++score.always_blocks;
            continue;
        }
        // <module type> [#( ... )] <instance name> (
        if (tok.kind != TokenKind::Identifier || tok.text.front() == '$' || tok.text.front() == '`' ||
            !is_item_start(i)) {
            continue;
        }
        std::size_t j = i + 1;
        if (punct(j, "#") && punct(j + 1, "(")) {
            int depth = 0;
            for (j = j + 1; j < tokens.size(); ++j) {
                if (punct(j, "(")) ++depth;
                if (punct(j, ")") && --depth == 0) break;
            }
            ++j;
        }
        if (j + 1 < tokens.size() && tokens[j].kind == TokenKind::Identifier && punct(j + 1, "(")) {
            ++score.instantiations;
        }
    }
    return score;
}

Complexity heuristic_tier(const ComplexityScore& score) {
    const auto total = score.total();
    if (total <= 1) return Complexity::Basic;
    if (total <= 4) return Complexity::Intermediate;
    if (total <= 9) return Complexity::Advanced;
    return Complexity::Expert;
}

MockClient::MockClient(std::uint64_t seed, std::map<std::string, Entry> table)
    : seed_(seed), table_(std::move(table)) {}

MockClient MockClient::load(const std::filesystem::path& table_path, std::uint64_t seed) {
    const auto j = read_json_file(table_path);
    if (!j.is_object()) {
        throw FormatError(table_path.string() + ": mock table must be a JSON object keyed by sample id");
    }
    std::map<std::string, Entry> table;
    for (const auto& [id, row] : j.items()) {
        table[id] = Entry{optional_string(row, "rank"), optional_string(row, "complexity"),
                          optional_string(row, "describe")};
    }
    return MockClient(seed, std::move(table));
}

std::string MockClient::complete(const std::string& prompt, double temperature) const {
    auto lookup = [&](std::string_view code) -> const Entry* {
        const auto it = table_.find(hex_digest(normalize_code(code)));
        return it == table_.end() ? nullptr : &it->second;
    };

    if (auto code = unwrap(prompt, kRankInstruction, kRankTrailer)) {
        const Entry* e = lookup(*code);
        if (e && e->rank) {
            return *e->rank;
        }
        const auto id = hex_digest(normalize_code(*code));
        const auto score = splitmix64(seed_ ^ fnv1a(id)) % 21;
        return "Score: " + std::to_string(score) + " out of 20.";
    }
    if (auto code = unwrap(prompt, kComplexityInstruction, kComplexityTrailer)) {
        const Entry* e = lookup(*code);
        if (e && e->complexity) {
            return *e->complexity;
        }
        return "Tier: " + std::string(to_string(heuristic_tier(complexity_score(*code))));
    }
    if (auto code = unwrap(prompt, kDescribeInstruction, kDescribeTrailer)) {
        const Entry* e = lookup(*code);
        if (e && e->describe) {
            return *e->describe;
        }
        return "Verilog design containing modules: " + module_names(*code);
    }
    if (std::string_view(prompt).starts_with(kSynthesisLead)) {
        return synthesize(prompt, temperature);
    }
    return "I can only help with Verilog ranking, classification, description and generation prompts.";
}

std::string MockClient::synthesize(std::string_view prompt, double temperature) const {
    std::string_view rest = prompt.substr(kSynthesisLead.size());
    const auto cut = rest.find(kSynthesisClassLead);
    const std::string_view expansion = rest.substr(0, cut);
    const bool sequential =
        cut != std::string_view::npos && rest.substr(cut + kSynthesisClassLead.size()).starts_with("sequential");

    std::ostringstream temp;
    temp << std::fixed << std::setprecision(2) << temperature;
    const std::uint64_t h = splitmix64(seed_ ^ fnv1a(prompt) ^ fnv1a(temp.str()));
    const int width = 2 + static_cast<int>(h % 15);
    static constexpr std::string_view kOps[] = {"+", "-", "^", "&", "|"};
    const std::string_view op = kOps[(h >> 8) % std::size(kOps)];
    const std::string name = slug(expansion) + "_" + std::to_string((h >> 16) % 1000);

    std::ostringstream code;
    code << "```verilog\n";
    code << "// " << expansion << "\n";
    code << "module " << name << " #(parameter WIDTH = " << width << ") (\n";
    if (sequential) {
        code << "    input  wire             clk,\n";
        code << "    input  wire             rst,\n";
    }
    code << "    input  wire [WIDTH-1:0] a,\n";
    code << "    input  wire [WIDTH-1:0] b,\n";
    code << "    output " << (sequential ? "reg " : "wire") << " [WIDTH-1:0] y\n";
    code << ");\n";
    if (sequential) {
        code << "    always @(posedge clk) begin\n";
        code << "        if (rst)\n";
        code << "            y <= {WIDTH{1'b0}};\n";
        code << "        else\n";
        code << "            y <= a " << op << " b;\n";
        code << "    end\n";
    } else {
        code << "    assign y = a " << op << " b;\n";
    }
    code << "endmodule\n";
    code << "```\n";
    return code.str();
}

std::optional<int> parse_rank(std::string_view response) {
    for (std::size_t i = 0; i < response.size();) {
        if (!std::isdigit(static_cast<unsigned char>(response[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < response.size() && std::isdigit(static_cast<unsigned char>(response[j]))) {
            ++j;
        }
        const std::string_view digits = response.substr(i, j - i);
        if (digits.size() <= 2) {
            const int value = std::stoi(std::string(digits));
            if (value >= kMinRank && value <= kMaxRank) {
                return value;
            }
        }
        i = j;
    }
    return std::nullopt;
}

std::optional<Complexity> parse_complexity_response(std::string_view response) {
    const std::string text = lower(response);
    std::optional<Complexity> best;
    std::size_t best_pos = std::string::npos;
    for (Complexity tier : kAllComplexities) {
        const std::string name = lower(to_string(tier));
        for (std::size_t pos = text.find(name); pos != std::string::npos; pos = text.find(name, pos + 1)) {
            const bool left = pos == 0 || !is_word_char(text[pos - 1]);
            const bool right = pos + name.size() >= text.size() || !is_word_char(text[pos + name.size()]);
            if (left && right) {
                if (pos < best_pos) {
                    best_pos = pos;
                    best = tier;
                }
                break;
            }
        }
    }
    return best;
}

std::string single_paragraph(std::string_view response) {
    std::string out;
    bool pending_space = false;
    for (unsigned char c : response) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(c));
    }
    return out;
}

int rank_sample(const Sample& sample, const CompletionClient& client) {
    return ask_until_parsed(make_label_request(sample, LabelKind::Rank), client, parse_rank, "rank");
}

Complexity classify_complexity(const Sample& sample, const CompletionClient& client) {
    return ask_until_parsed(make_label_request(sample, LabelKind::Complexity), client,
                            parse_complexity_response, "complexity tier");
}

std::string describe_sample(const Sample& sample, const CompletionClient& client) {
    return ask_until_parsed(
        make_label_request(sample, LabelKind::Describe), client,
        [](std::string_view text) -> std::optional<std::string> {
            auto para = single_paragraph(text);
            return para.empty() ? std::nullopt : std::optional<std::string>(std::move(para));
        },
        "description");
}

LabelResult label_samples(std::vector<Sample> samples, const CompletionClient& client, std::size_t jobs) {
    std::vector<std::optional<std::string>> failures(samples.size());
    parallel_for(samples.size(), jobs == 0 ? default_jobs() : jobs, [&](std::size_t i) {
        Sample& s = samples[i];
        try {
            s.rank = rank_sample(s, client);
            s.complexity = classify_complexity(s, client);
            s.description = describe_sample(s, client);
        } catch (const LabelParseError& e) {
            failures[i] = e.what();
        } catch (const std::exception& e) {
            failures[i] = std::string("client failure: ") + e.what();
        }
    });

    LabelResult result;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (failures[i]) {
            samples[i].rank.reset();
            samples[i].complexity.reset();
            samples[i].description.reset();
            result.quarantined.push_back({std::move(samples[i]), std::move(*failures[i])});
        } else {
            result.labeled.push_back(std::move(samples[i]));
        }
    }
    return result;
}

std::vector<double> temperature_schedule(std::size_t n) {
    std::vector<double> temps;
    if (n == 0) {
        return temps;
    }
    if (n == 1) {
        return {0.1};
    }
    for (std::size_t i = 0; i < n; ++i) {
        temps.push_back(0.1 + 0.9 * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return temps;
}

std::string extract_code_block(std::string_view response) {
    const auto open = response.find("```");
    if (open != std::string_view::npos) {
        const auto body = response.find('\n', open);
        if (body != std::string_view::npos) {
            const auto close = response.find("```", body + 1);
            return std::string(response.substr(body + 1, close == std::string_view::npos
                                                             ? std::string_view::npos
                                                             : close - body - 1));
        }
        return {};
    }
    return response.find("module") != std::string_view::npos ? std::string(response) : std::string{};
}

SynthesisResult synthesize_samples(const std::vector<KeywordEntry>& keywords, const CompletionClient& client,
                                   std::size_t n_queries) {
    if (n_queries < 1) {
        throw ConfigError("synthesis needs at least one query per expansion");
    }
    const auto temps = temperature_schedule(n_queries);
    SynthesisResult result;
    for (const auto& entry : keywords) {
        for (const auto& expansion : entry.expansions) {
            const std::string prompt = synthesis_prompt(entry, expansion);
            for (std::size_t q = 0; q < temps.size(); ++q) {
                ++result.requests;
                std::ostringstream path;
                path << "synthesized/" << slug(entry.keyword) << "/" << slug(expansion) << "/q"
                     << std::setw(2) << std::setfill('0') << q << ".v";
                std::string response;
                try {
                    response = client.complete(prompt, temps[q]);
                } catch (const std::exception& e) {
                    ++result.failures;
                    log_warn("synthesis request failed for " + path.str() + ": " + e.what());
                    continue;
                }
                const std::string code = extract_code_block(response);
                if (code.find_first_not_of(" \t\r\n") == std::string::npos || !is_valid_utf8(code)) {
                    ++result.failures;
                    log_warn("synthesis response for " + path.str() + " contained no code");
                    continue;
                }
                result.samples.push_back(make_sample(path.str(), Origin::Synthesized, code));
            }
        }
    }
    return result;
}

}  // namespace forge
