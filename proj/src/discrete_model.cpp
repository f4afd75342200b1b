#include "confound/discrete_model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "confound/error.hpp"

namespace confound::adjust {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Splits on commas, trimming each piece; an all-blank input yields no items.
std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = s.find(',', start);
        out.emplace_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool is_label(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return !std::isspace(static_cast<unsigned char>(c)) && c != ',' && c != '(' && c != ')' &&
               c != ':' && c != '|';
    });
}

std::string render_row(const std::vector<std::string>& key) {
    std::string out = "(";
    for (std::size_t i = 0; i < key.size(); ++i) out += (i ? ", " : "") + key[i];
    return out + ")";
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

std::vector<ModelViolation> validate_model(const DiscreteModel& model) {
    std::vector<ModelViolation> out;
    const auto& dag = model.dag;

    for (const auto& [id, labels] : model.domains) {
        if (!dag.contains(id)) out.push_back({id, "domain declared for unknown node"});
    }
    for (const auto& [id, table] : model.cpts) {
        if (!dag.contains(id)) out.push_back({id, "table declared for unknown node"});
    }

    for (const auto& node : dag.nodes()) {
        const auto& id = node.id;
        auto dom = model.domains.find(id);
        if (dom == model.domains.end() || dom->second.empty()) {
            out.push_back({id, "missing or empty domain"});
            continue;
        }
        std::set<std::string> unique(dom->second.begin(), dom->second.end());
        if (unique.size() != dom->second.size()) out.push_back({id, "domain has duplicate labels"});

        auto tab = model.cpts.find(id);
        if (tab == model.cpts.end()) {
            out.push_back({id, "missing conditional table"});
            continue;
        }
        const auto& table = tab->second;
        std::vector<std::string> declared = table.parents;
        std::sort(declared.begin(), declared.end());
        if (declared != dag.parent_ids(id) ||
            std::adjacent_find(declared.begin(), declared.end()) != declared.end()) {
            out.push_back({id, "table parents do not match the DAG parents"});
            continue;
        }

        std::vector<const std::vector<std::string>*> parent_domains;
        bool parents_ok = true;
        for (const auto& p : table.parents) {
            auto pd = model.domains.find(p);
            if (pd == model.domains.end() || pd->second.empty()) {
                parents_ok = false;
                break;
            }
            parent_domains.push_back(&pd->second);
        }
        if (!parents_ok) continue;  // reported on the parent itself

        // Every row of the Cartesian product must be present.
        std::size_t expected_rows = 1;
        for (const auto* d : parent_domains) expected_rows *= d->size();
        std::vector<std::size_t> digit(parent_domains.size(), 0);
        for (std::size_t r = 0; r < expected_rows; ++r) {
            std::vector<std::string> key;
            for (std::size_t k = 0; k < digit.size(); ++k) key.push_back((*parent_domains[k])[digit[k]]);
            if (!table.rows.count(key)) out.push_back({id, "row " + render_row(key) + " missing"});
            for (std::size_t k = digit.size(); k-- > 0;) {
                if (++digit[k] < parent_domains[k]->size()) break;
                digit[k] = 0;
            }
        }

        for (const auto& [key, probs] : table.rows) {
            const std::string row = render_row(key);
            bool in_domain = key.size() == parent_domains.size();
            for (std::size_t k = 0; in_domain && k < key.size(); ++k) {
                const auto& d = *parent_domains[k];
                in_domain = std::find(d.begin(), d.end(), key[k]) != d.end();
            }
            if (!in_domain) {
                out.push_back({id, "row " + row + " does not match the parent domains"});
                continue;
            }
            if (probs.size() != dom->second.size()) {
                out.push_back({id, "row " + row + " has " + std::to_string(probs.size()) +
                                       " probabilities, domain has " +
                                       std::to_string(dom->second.size())});
                continue;
            }
            double sum = 0.0;
            bool entries_ok = true;
            for (double p : probs) {
                if (!std::isfinite(p) || p < 0.0) entries_ok = false;
                sum += p;
            }
            if (!entries_ok) {
                out.push_back({id, "row " + row + " has a negative or non-finite probability"});
            } else if (std::abs(sum - 1.0) > kRowSumTolerance) {
                out.push_back({id, "row " + row + " sums to " + format_double(sum)});
            }
        }
    }
    return out;
}

void require_valid(const DiscreteModel& model) {
    const auto violations = validate_model(model);
    if (violations.empty()) return;
    std::string msg = "invalid model:";
    for (const auto& v : violations) msg += " [" + v.node + ": " + v.message + "]";
    throw ValidationError(msg);
}

DiscreteModel parse_model(std::string_view text, graph::CausalDag dag) {
    DiscreteModel model;
    model.dag = std::move(dag);

    enum class Section { none, domains, table };
    Section section = Section::none;
    ConditionalTable* current = nullptr;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        const std::size_t indent = static_cast<std::size_t>(line.data() - raw.data()) + 1;

        if (line == "domains:") {
            section = Section::domains;
            current = nullptr;
            continue;
        }
        if (line.rfind("cpt", 0) == 0 && (line.size() == 3 || std::isspace(static_cast<unsigned char>(line[3])))) {
            std::string_view rest = trim(line.substr(3));
            std::string_view child = rest;
            std::string_view parents;
            if (auto bar = rest.find('|'); bar != std::string_view::npos) {
                child = trim(rest.substr(0, bar));
                parents = rest.substr(bar + 1);
            }
            if (!is_label(child)) throw ParseError("expected node id after 'cpt'", line_no, indent + 3);
            ConditionalTable table;
            table.child = std::string(child);
            for (auto& p : split_list(parents)) {
                if (!is_label(p)) throw ParseError("malformed parent list", line_no, indent);
                table.parents.push_back(std::move(p));
            }
            auto [it, inserted] = model.cpts.emplace(table.child, std::move(table));
            if (!inserted) throw ParseError("duplicate table for node '" + std::string(child) + "'", line_no, indent);
            current = &it->second;
            section = Section::table;
            continue;
        }

        if (section == Section::domains) {
            const auto colon = line.find(':');
            if (colon == std::string_view::npos) throw ParseError("expected '<node>: <labels>'", line_no, indent);
            const auto node = trim(line.substr(0, colon));
            if (!is_label(node)) throw ParseError("malformed node id", line_no, indent);
            auto labels = split_list(line.substr(colon + 1));
            for (const auto& l : labels) {
                if (!is_label(l)) throw ParseError("malformed category label '" + l + "'", line_no, indent);
            }
            if (!model.domains.emplace(std::string(node), std::move(labels)).second) {
                throw ParseError("duplicate domain for node '" + std::string(node) + "'", line_no, indent);
            }
        } else if (section == Section::table) {
            if (line.front() != '(') throw ParseError("expected '(' to start a table row", line_no, indent);
            const auto close = line.find(')');
            if (close == std::string_view::npos) throw ParseError("unclosed parent tuple", line_no, indent);
            auto key = split_list(line.substr(1, close - 1));
            const auto after = trim(line.substr(close + 1));
            if (after.empty() || after.front() != ':') {
                throw ParseError("expected ':' after parent tuple", line_no, indent + close + 1);
            }
            std::vector<double> probs;
            for (const auto& item : split_list(after.substr(1))) {
                double v = 0.0;
                auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
                if (ec != std::errc() || ptr != item.data() + item.size()) {
                    throw ParseError("malformed probability '" + item + "'", line_no, indent);
                }
                probs.push_back(v);
            }
            if (probs.empty()) throw ParseError("row has no probabilities", line_no, indent);
            if (!current->rows.emplace(std::move(key), std::move(probs)).second) {
                throw ParseError("duplicate row in table for '" + current->child + "'", line_no, indent);
            }
        } else {
            throw ParseError("expected 'domains:' or 'cpt' section", line_no, indent);
        }
    }
    return model;
}

DiscreteModel load_model(const std::filesystem::path& path, graph::CausalDag dag) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str(), std::move(dag));
}

}  // namespace confound::adjust
