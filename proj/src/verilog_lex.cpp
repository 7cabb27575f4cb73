#include "forge/verilog_lex.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

#include "forge/error.hpp"
#include "forge/parallel.hpp"

namespace forge {

namespace {

const std::unordered_set<std::string_view>& keyword_table() {
    static const std::unordered_set<std::string_view> table = {
        // IEEE 1364-2005
        "always", "and", "assign", "automatic", "begin", "buf", "bufif0", "bufif1", "case", "casex",
        "casez", "cell", "cmos", "config", "deassign", "default", "defparam", "design", "disable",
        "edge", "else", "end", "endcase", "endconfig", "endfunction", "endgenerate", "endmodule",
        "endprimitive", "endspecify", "endtable", "endtask", "event", "for", "force", "forever",
        "fork", "function", "generate", "genvar", "highz0", "highz1", "if", "ifnone", "incdir",
        "include", "initial", "inout", "input", "instance", "integer", "join", "large", "liblist",
        "library", "localparam", "macromodule", "medium", "module", "nand", "negedge", "nmos",
        "nor", "noshowcancelled", "not", "notif0", "notif1", "or", "output", "parameter", "pmos",
        "posedge", "primitive", "pull0", "pull1", "pulldown", "pullup", "pulsestyle_onevent",
        "pulsestyle_ondetect", "rcmos", "real", "realtime", "reg", "release", "repeat", "rnmos",
        "rpmos", "rtran", "rtranif0", "rtranif1", "scalared", "showcancelled", "signed", "small",
        "specify", "specparam", "strong0", "strong1", "supply0", "supply1", "table", "task",
        "time", "tran", "tranif0", "tranif1", "tri", "tri0", "tri1", "triand", "trior", "trireg",
        "unsigned", "use", "uwire", "vectored", "wait", "wand", "weak0", "weak1", "while", "wire",
        "wor", "xnor", "xor",
        // common SystemVerilog additions
        "always_comb", "always_ff", "always_latch", "assert", "assume", "bit", "break", "byte",
        "class", "const", "continue", "cover", "do", "endclass", "endinterface", "endpackage",
        "endprogram", "endproperty", "enum", "export", "extends", "final", "foreach", "import",
        "int", "interface", "logic", "longint", "modport", "package", "priority", "program",
        "property", "return", "shortint", "static", "string", "struct", "typedef", "union",
        "unique", "var", "virtual", "void",
    };
    return table;
}

const std::unordered_set<std::string_view>& directive_table() {
    static const std::unordered_set<std::string_view> table = {
        "begin_keywords", "celldefine", "default_nettype", "define", "else", "elsif",
        "end_keywords", "endcelldefine", "endif", "ifdef", "ifndef", "include", "line",
        "nounconnected_drive", "pragma", "resetall", "timescale", "unconnected_drive", "undef",
        "undefineall",
    };
    return table;
}

// Longest first so the first match is the maximal munch.
constexpr std::array<std::string_view, 50> kOperators = {
    "<<<=", ">>>=", "===", "!==", "==?", "!=?", "<<<", ">>>", "<<=", ">>=", "<->", "|->", "|=>",
    "->>", "&&&", "==", "!=", "<=", ">=", "&&", "||", "**", "<<", ">>", "~&", "~|", "~^", "^~",
    "+:", "-:", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "->", "+", "-", "*",
    "/", "%", "=", "<", ">", "!",
};
constexpr std::string_view kSingleOperators = "~&|^?:";
constexpr std::array<std::string_view, 3> kMultiPunct = {"::", ".*", "##"};
constexpr std::string_view kSinglePunct = "()[]{};,.#@'`$";

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_decimal_char(char c) { return is_digit(c) || c == '_'; }
bool is_based_digit(char c) {
    return std::isxdigit(static_cast<unsigned char>(c)) || c == 'x' || c == 'X' || c == 'z' ||
           c == 'Z' || c == '?' || c == '_';
}
bool is_base_char(char c) {
    switch (c) {
        case 'd': case 'D': case 'b': case 'B': case 'o': case 'O': case 'h': case 'H': return true;
        default: return false;
    }
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> tokens;
        for (;;) {
            skip_trivia();
            if (pos_ >= src_.size()) {
                return tokens;
            }
            tokens.push_back(next_token());
        }
    }

private:
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance(std::size_t n = 1) {
        for (std::size_t k = 0; k < n && pos_ < src_.size(); ++k) {
            if (src_[pos_++] == '\n') {
                ++line_;
            }
        }
    }

    void skip_trivia() {
        while (pos_ < src_.size()) {
            const char c = peek();
            if (is_space(c)) {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n') {
                    advance();
                }
            } else if (c == '/' && peek(1) == '*') {
                const std::size_t start_line = line_;
                const std::size_t close = src_.find("*/", pos_ + 2);
                if (close == std::string_view::npos) {
                    throw LexError(start_line, "unterminated block comment");
                }
                advance(close + 2 - pos_);
            } else {
                return;
            }
        }
    }

    Token make(TokenKind kind, std::size_t start, std::size_t line) const {
        return Token{kind, std::string(src_.substr(start, pos_ - start)), line};
    }

    Token next_token() {
        const std::size_t start = pos_;
        const std::size_t line = line_;
        const char c = peek();

        if (is_ident_start(c)) {
            while (is_ident_char(peek())) {
                advance();
            }
            Token tok = make(TokenKind::Identifier, start, line);
            if (is_keyword(tok.text)) {
                tok.kind = TokenKind::Keyword;
            }
            return tok;
        }
        if (c == '$' && is_ident_char(peek(1))) {
            advance();
            while (is_ident_char(peek())) {
                advance();
            }
            return make(TokenKind::Identifier, start, line);
        }
        if (c == '`' && is_ident_start(peek(1))) {
            advance();
            while (is_ident_char(peek())) {
                advance();
            }
            Token tok = make(TokenKind::Identifier, start, line);
            if (directive_table().contains(std::string_view(tok.text).substr(1))) {
                tok.kind = TokenKind::Keyword;
            }
            return tok;
        }
        if (c == '\\') {
            advance();
            while (pos_ < src_.size() && !is_space(peek())) {
                advance();
            }
            if (pos_ - start == 1) {
                throw LexError(line, "empty escaped identifier");
            }
            return make(TokenKind::Identifier, start, line);
        }
        if (c == '"') {
            return string_literal(start, line);
        }
        if (is_digit(c)) {
            return number(start, line);
        }
        if (c == '\'') {
            if (auto tok = based_tail(line, std::string{})) {
                return std::move(*tok);
            }
        }
        for (std::string_view p : kMultiPunct) {
            if (src_.substr(pos_).starts_with(p)) {
                advance(p.size());
                return make(TokenKind::Punct, start, line);
            }
        }
        for (std::string_view op : kOperators) {
            if (src_.substr(pos_).starts_with(op)) {
                advance(op.size());
                return make(TokenKind::Operator, start, line);
            }
        }
        if (kSingleOperators.find(c) != std::string_view::npos) {
            advance();
            return make(TokenKind::Operator, start, line);
        }
        if (kSinglePunct.find(c) != std::string_view::npos) {
            advance();
            return make(TokenKind::Punct, start, line);
        }
        throw LexError(line, "unexpected character (byte 0x" + hex_byte(c) + ")");
    }

    static std::string hex_byte(char c) {
        static constexpr char kHex[] = "0123456789abcdef";
        const auto u = static_cast<unsigned char>(c);
        return {kHex[u >> 4], kHex[u & 0xF]};
    }

    Token string_literal(std::size_t start, std::size_t line) {
        advance();
        for (;;) {
            if (pos_ >= src_.size() || peek() == '\n') {
                throw LexError(line, "unterminated string literal");
            }
            const char c = peek();
            if (c == '\\') {
                if (pos_ + 1 >= src_.size()) {
                    throw LexError(line, "unterminated string literal");
                }
                advance(2);
            } else if (c == '"') {
                advance();
                return make(TokenKind::String, start, line);
            } else {
                advance();
            }
        }
    }

    // Decimal or real literal, optionally followed by a based tail (8'hFF).
    Token number(std::size_t start, std::size_t line) {
        while (is_decimal_char(peek())) {
            advance();
        }
        bool real = false;
        if (peek() == '.' && is_digit(peek(1))) {
            real = true;
            advance();
            while (is_decimal_char(peek())) {
                advance();
            }
        }
        if (peek() == 'e' || peek() == 'E') {
            const std::size_t sign = (peek(1) == '+' || peek(1) == '-') ? 1 : 0;
            if (is_digit(peek(1 + sign))) {
                real = true;
                advance(1 + sign);
                while (is_decimal_char(peek())) {
                    advance();
                }
            }
        }
        std::string text(src_.substr(start, pos_ - start));
        if (!real && peek() == '\'') {
            if (auto tok = based_tail(line, std::move(text))) {
                return std::move(*tok);
            }
            text.assign(src_.substr(start, pos_ - start));
        }
        return Token{TokenKind::Number, std::move(text), line};
    }

    // Positioned on a quote. Consumes 'b0101, 'sh ff, '0, '1, 'x, 'z and
    // returns them appended to `size`; leaves the position untouched and
    // returns nothing when the quote does not start a literal.
    std::optional<Token> based_tail(std::size_t line, std::string size) {
        std::size_t k = 1;
        if (peek(k) == 's' || peek(k) == 'S') {
            ++k;
        }
        if (is_base_char(peek(k))) {
            const std::size_t prefix_end = pos_ + k + 1;
            std::size_t digits = prefix_end;
            while (digits < src_.size() && (src_[digits] == ' ' || src_[digits] == '\t')) {
                ++digits;
            }
            std::string text = std::move(size);
            text.append(src_.substr(pos_, k + 1));
            if (digits < src_.size() && is_based_digit(src_[digits])) {
                advance(digits - pos_);
                const std::size_t first = pos_;
                while (is_based_digit(peek())) {
                    advance();
                }
                text.append(src_.substr(first, pos_ - first));
            } else {
                advance(k + 1);
            }
            return Token{TokenKind::Number, std::move(text), line};
        }
        if (size.empty() && std::string_view("01xXzZ").find(peek(1)) != std::string_view::npos &&
            peek(1) != '\0' && !is_ident_char(peek(2))) {
            advance(2);
            return Token{TokenKind::Number, std::string(src_.substr(pos_ - 2, 2)), line};
        }
        return std::nullopt;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

}  // namespace

std::string_view to_string(TokenKind kind) {
    switch (kind) {
        case TokenKind::Keyword: return "Keyword";
        case TokenKind::Identifier: return "Identifier";
        case TokenKind::Operator: return "Operator";
        case TokenKind::Punct: return "Punct";
        case TokenKind::Number: return "Number";
        case TokenKind::String: return "String";
    }
    return "?";
}

bool is_keyword(std::string_view word) { return keyword_table().contains(word); }

std::vector<Token> lex(std::string_view code) { return Lexer(code).run(); }

std::vector<ModuleInfo> find_modules(const std::vector<Token>& tokens) {
    std::vector<ModuleInfo> modules;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const Token& tok = tokens[i];
        if (tok.kind != TokenKind::Keyword || (tok.text != "module" && tok.text != "macromodule")) {
            continue;
        }
        std::size_t j = i + 1;
        if (j < tokens.size() && tokens[j].kind == TokenKind::Keyword &&
            (tokens[j].text == "automatic" || tokens[j].text == "static")) {
            ++j;
        }
        if (j < tokens.size() && tokens[j].kind == TokenKind::Identifier &&
            is_ident_start(tokens[j].text.front())) {
            modules.push_back(ModuleInfo{tokens[j].text, tok.line});
        }
    }
    return modules;
}

nlohmann::ordered_json ModuleFilterReport::to_json() const {
    return {{"in", in},
            {"kept", kept},
            {"dropped", {{"NoModule", dropped_no_module}, {"LexError", dropped_lex_error}}}};
}

ModuleFilterReport ModuleFilterReport::from_json(const nlohmann::json& j) {
    ModuleFilterReport r;
    r.in = j.at("in").get<std::size_t>();
    r.kept = j.at("kept").get<std::size_t>();
    r.dropped_no_module = j.at("dropped").at("NoModule").get<std::size_t>();
    r.dropped_lex_error = j.at("dropped").at("LexError").get<std::size_t>();
    return r;
}

ModuleFilterResult filter_no_module(std::vector<Sample> samples) {
    enum class Verdict : unsigned char { Keep, NoModule, LexFailure };
    std::vector<Verdict> verdicts(samples.size());
    parallel_for(samples.size(), default_jobs(), [&](std::size_t i) {
        try {
            verdicts[i] = find_modules(lex(samples[i].code)).empty() ? Verdict::NoModule : Verdict::Keep;
        } catch (const LexError&) {
            verdicts[i] = Verdict::LexFailure;
        }
    });

    ModuleFilterResult result;
    result.report.in = samples.size();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        switch (verdicts[i]) {
            case Verdict::Keep: result.kept.push_back(std::move(samples[i])); break;
            case Verdict::NoModule: ++result.report.dropped_no_module; break;
            case Verdict::LexFailure: ++result.report.dropped_lex_error; break;
        }
    }
    result.report.kept = result.kept.size();
    return result;
}

}  // namespace forge
