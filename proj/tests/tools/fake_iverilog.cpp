// Stand-in for `iverilog -t null <file>` used by the tests when the real
// compiler is not installed. It reproduces the output shapes of Icarus for
// three situations: syntax errors, missing include files and instantiations
// of undefined modules. Detection is structural and deliberately shallow.
//
// A source line containing "fake-iverilog: hang" makes it sleep for a minute.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "forge/error.hpp"
#include "forge/verilog_lex.hpp"

namespace {

int syntax_error(const std::string& file, std::size_t line) {
    std::cerr << file << ":" << line << ": syntax error\n";
    std::cerr << "I give up.\n";
    return 1;
}

bool is_port_direction(const std::string& t) { return t == "input" || t == "output" || t == "inout"; }

}  // namespace

int main(int argc, char** argv) {
    std::string file;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "-t" || a == "-o" || a == "-s" || a == "-g") {
            ++i;
        } else if (!a.empty() && a[0] != '-') {
            file = a;
        }
    }
    if (file.empty()) {
        std::cerr << "fake_iverilog: no input files.\n";
        return 1;
    }
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        std::cerr << file << ": No such file or directory\n";
        return 1;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string code = buffer.str();

    if (code.find("fake-iverilog: hang") != std::string::npos) {
        std::this_thread::sleep_for(std::chrono::seconds(60));
    }

    std::vector<forge::Token> tokens;
    try {
        tokens = forge::lex(code);
    } catch (const forge::LexError& e) {
        return syntax_error(file, e.line());
    }

    // `include "x": resolved next to the source file.
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (tokens[i].text == "`include" && tokens[i + 1].kind == forge::TokenKind::String) {
            std::string name = tokens[i + 1].text;
            name = name.substr(1, name.size() - 2);
            const auto path = std::filesystem::path(file).parent_path() / name;
            if (!std::filesystem::exists(path)) {
                std::cerr << file << ":" << tokens[i].line << ": Include file " << name << " not found\n";
                std::cerr << "No such file or directory\n";
                return 1;
            }
        }
    }

    // Bracket balance.
    std::vector<const forge::Token*> stack;
    const std::map<std::string, std::string> closer = {{")", "("}, {"]", "["}, {"}", "{"}};
    for (const auto& t : tokens) {
        if (t.text == "(" || t.text == "[" || t.text == "{") {
            stack.push_back(&t);
        } else if (auto it = closer.find(t.text); it != closer.end()) {
            if (stack.empty() || stack.back()->text != it->second) {
                return syntax_error(file, t.line);
            }
            stack.pop_back();
        }
    }
    if (!stack.empty()) {
        return syntax_error(file, stack.back()->line);
    }

    // module / endmodule pairing.
    int depth = 0;
    for (const auto& t : tokens) {
        if (t.text == "module" || t.text == "macromodule") {
            if (depth++ != 0) {
                return syntax_error(file, t.line);
            }
        } else if (t.text == "endmodule") {
            if (--depth != 0) {
                return syntax_error(file, t.line);
            }
        }
    }
    if (depth != 0) {
        return syntax_error(file, tokens.empty() ? 1 : tokens.back().line);
    }

    // Empty list entries and port directions without a name.
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        const auto& a = tokens[i].text;
        const auto& b = tokens[i + 1].text;
        if ((a == "," && (b == "," || b == ")")) || (a == "(" && b == ",")) {
            return syntax_error(file, tokens[i + 1].line);
        }
        if (is_port_direction(a) && (b == "," || b == ")" || b == ";")) {
            return syntax_error(file, tokens[i + 1].line);
        }
    }

    // Instantiations: <type> [#(...)] <name> ( ... at statement start.
    const auto modules = forge::find_modules(tokens);
    std::set<std::string> defined;
    for (const auto& m : modules) {
        defined.insert(m.name);
    }
    std::map<std::string, std::vector<std::size_t>> missing;
    std::vector<std::string> order;
    for (std::size_t i = 0; i + 2 < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if (t.kind != forge::TokenKind::Identifier || t.text.front() == '`' || t.text.front() == '$') {
            continue;
        }
        const bool at_statement_start = i > 0 && (tokens[i - 1].text == ";" || tokens[i - 1].text == ")" ||
                                                  tokens[i - 1].text == "end" || tokens[i - 1].text == "begin");
        const auto& next = tokens[i + 1];
        const bool named = next.kind == forge::TokenKind::Identifier && tokens[i + 2].text == "(";
        const bool parameterized = next.text == "#";
        if (!at_statement_start || !(named || parameterized) || defined.count(t.text) > 0) {
            continue;
        }
        if (missing.find(t.text) == missing.end()) {
            order.push_back(t.text);
        }
        missing[t.text].push_back(t.line);
    }
    if (!missing.empty()) {
        std::size_t errors = 0;
        for (const auto& name : order) {
            for (auto line : missing[name]) {
                std::cerr << file << ":" << line << ": error: Unknown module type: " << name << '\n';
                ++errors;
            }
        }
        std::cerr << errors << " error(s) during elaboration.\n";
        std::cerr << "*** These modules were missing:\n";
        for (const auto& name : order) {
            std::cerr << "        " << name << " referenced " << missing[name].size() << " times.\n";
        }
        std::cerr << "***\n";
        return 1;
    }
    return 0;
}
