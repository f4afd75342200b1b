#include "confound/dag_dsl.hpp"

#include <cctype>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "confound/error.hpp"

namespace confound::graph {

namespace {

enum class TokenKind { word, quoted, arrow };

struct Token {
    TokenKind kind;
    std::string text;
    std::size_t column;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool is_identifier(std::string_view s) {
    if (s.empty() || !is_ident_start(s.front())) return false;
    for (char c : s) {
        if (!is_ident_char(c)) return false;
    }
    return true;
}

std::vector<Token> tokenize(std::string_view line, std::size_t line_no) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (c == '#') break;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t column = i + 1;
        if (c == '"') {
            std::string text;
            ++i;
            bool closed = false;
            while (i < line.size()) {
                if (line[i] == '\\' && i + 1 < line.size()) {
                    text += line[i + 1];
                    i += 2;
                    continue;
                }
                if (line[i] == '"') {
                    closed = true;
                    ++i;
                    break;
                }
                text += line[i++];
            }
            if (!closed) throw ParseError("unterminated string literal", line_no, column);
            tokens.push_back({TokenKind::quoted, std::move(text), column});
        } else if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
            tokens.push_back({TokenKind::arrow, "->", column});
            i += 2;
        } else {
            std::size_t end = i;
            while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end])) &&
                   line[end] != '"' && line[end] != '#' &&
                   !(line[end] == '-' && end + 1 < line.size() && line[end + 1] == '>')) {
                ++end;
            }
            tokens.push_back({TokenKind::word, std::string(line.substr(i, end - i)), column});
            i = end;
        }
    }
    return tokens;
}

const Token& expect_identifier(const std::vector<Token>& tokens, std::size_t at,
                               std::size_t line_no, std::size_t line_len, const char* what) {
    if (at >= tokens.size()) {
        throw ParseError(std::string("expected ") + what, line_no, line_len + 1);
    }
    const auto& tok = tokens[at];
    if (tok.kind != TokenKind::word || !is_identifier(tok.text)) {
        throw ParseError(std::string("expected ") + what + ", found '" + tok.text + "'", line_no,
                         tok.column);
    }
    return tok;
}

void expect_end(const std::vector<Token>& tokens, std::size_t at, std::size_t line_no) {
    if (at < tokens.size()) {
        throw ParseError("unexpected token '" + tokens[at].text + "'", line_no, tokens[at].column);
    }
}

std::string escape_label(const std::string& label) {
    std::string out;
    for (char c : label) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

}  // namespace

CausalDag parse_dag(std::string_view text) {
    std::string name;
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::unordered_map<std::string, std::size_t> declared;
    std::set<std::pair<std::string, std::string>> seen_edges;
    bool any_statement = false;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        const auto tokens = tokenize(line, line_no);
        if (tokens.empty()) continue;
        const auto& head = tokens.front();
        if (head.kind != TokenKind::word) {
            throw ParseError("expected a statement keyword", line_no, head.column);
        }

        if (head.text == "dag") {
            if (any_statement) throw ParseError("'dag' header must come first", line_no, head.column);
            name = expect_identifier(tokens, 1, line_no, line.size(), "graph name").text;
            expect_end(tokens, 2, line_no);
        } else if (head.text == "node") {
            const auto& id_tok = expect_identifier(tokens, 1, line_no, line.size(), "node id");
            Node node{id_tok.text, id_tok.text, NodeKind::observed};
            std::size_t at = 2;
            if (at < tokens.size() && tokens[at].kind == TokenKind::quoted) {
                node.label = tokens[at].text;
                ++at;
            }
            if (at < tokens.size() && tokens[at].kind == TokenKind::word && tokens[at].text == "latent") {
                node.kind = NodeKind::latent;
                ++at;
            }
            expect_end(tokens, at, line_no);
            if (declared.count(node.id)) {
                throw ParseError("duplicate node id '" + node.id + "'", line_no, id_tok.column);
            }
            declared.emplace(node.id, nodes.size());
            nodes.push_back(std::move(node));
        } else if (head.text == "edge") {
            const auto& from = expect_identifier(tokens, 1, line_no, line.size(), "source node id");
            if (tokens.size() < 3 || tokens[2].kind != TokenKind::arrow) {
                throw ParseError("expected '->'", line_no,
                                 tokens.size() < 3 ? line.size() + 1 : tokens[2].column);
            }
            const auto& to = expect_identifier(tokens, 3, line_no, line.size(), "target node id");
            expect_end(tokens, 4, line_no);
            if (!declared.count(from.text)) {
                throw ParseError("unknown node '" + from.text + "' in edge", line_no, from.column);
            }
            if (!declared.count(to.text)) {
                throw ParseError("unknown node '" + to.text + "' in edge", line_no, to.column);
            }
            if (from.text == to.text) {
                throw ParseError("self-loop on node '" + from.text + "'", line_no, from.column);
            }
            if (!seen_edges.emplace(from.text, to.text).second) {
                throw ParseError("duplicate edge " + from.text + " -> " + to.text, line_no,
                                 from.column);
            }
            edges.push_back({from.text, to.text});
        } else {
            throw ParseError("unknown statement '" + head.text + "'", line_no, head.column);
        }
        any_statement = true;
    }
    return CausalDag(std::move(name), std::move(nodes), std::move(edges));
}

CausalDag load_dag(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open DAG file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dag(buf.str());
}

std::string serialize_dag(const CausalDag& dag) {
    std::ostringstream out;
    if (!dag.name().empty()) out << "dag " << dag.name() << '\n';
    for (const auto& node : dag.nodes()) {
        out << "node " << node.id << " \"" << escape_label(node.label) << '"';
        if (node.kind == NodeKind::latent) out << " latent";
        out << '\n';
    }
    for (const auto& edge : dag.edges()) out << "edge " << edge.from << " -> " << edge.to << '\n';
    return out.str();
}

}  // namespace confound::graph
