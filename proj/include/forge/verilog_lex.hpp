#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/sample.hpp"

namespace forge {

enum class TokenKind { Keyword, Identifier, Operator, Punct, Number, String };

std::string_view to_string(TokenKind kind);

struct Token {
    TokenKind kind;
    std::string text;
    std::size_t line;  // 1-based

    friend bool operator==(const Token&, const Token&) = default;
};

struct ModuleInfo {
    std::string name;
    std::size_t decl_line;

    friend bool operator==(const ModuleInfo&, const ModuleInfo&) = default;
};

/// Verilog-2005 / SystemVerilog reserved words, plus `macromodule`.
bool is_keyword(std::string_view word);

/// Tokenizes Verilog source. Whitespace and `//`, `/* */` comments are
/// dropped; `(* *)` attributes are not comments and come out as ordinary
/// tokens. Compiler directives (`` `define ``) are single Keyword tokens and
/// macro uses are single Identifier tokens. Throws LexError on an
/// unterminated comment or string, or on a character that cannot begin a
/// token.
std::vector<Token> lex(std::string_view code);

/// One entry per `module`/`macromodule` keyword followed by a plain
/// identifier (an optional `automatic`/`static` lifetime is skipped).
std::vector<ModuleInfo> find_modules(const std::vector<Token>& tokens);

struct ModuleFilterReport {
    std::size_t in = 0;
    std::size_t kept = 0;
    std::size_t dropped_no_module = 0;
    std::size_t dropped_lex_error = 0;

    std::size_t dropped() const { return dropped_no_module + dropped_lex_error; }
    nlohmann::ordered_json to_json() const;
    static ModuleFilterReport from_json(const nlohmann::json& j);
};

struct ModuleFilterResult {
    std::vector<Sample> kept;
    ModuleFilterReport report;
};

/// Keeps samples that lex cleanly and declare at least one module; order is preserved.
ModuleFilterResult filter_no_module(std::vector<Sample> samples);

}  // namespace forge
