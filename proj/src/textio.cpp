#include "qcausal/textio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qcausal {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

double parse_number(const std::string& tok, const std::string& file, int line) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw parse_error(file, line, "expected a number, got '" + tok + "'");
    }
    if (used != tok.size()) throw parse_error(file, line, "trailing garbage in number '" + tok + "'");
    return v;
}

int parse_int(const std::string& tok, const std::string& file, int line) {
    double v = parse_number(tok, file, line);
    int i = static_cast<int>(v);
    if (v != i) throw parse_error(file, line, "expected an integer, got '" + tok + "'");
    return i;
}

}  // namespace

VarId NamedDag::id_of(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<VarId>(i);
    throw input_error("unknown node '" + name + "'");
}

NamedDag parse_dag_text(const std::string& text, const std::string& filename) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;

    std::vector<std::string> names;
    std::vector<Role> roles;
    std::vector<int> values;
    std::vector<int> node_lines;
    struct PendingEdge {
        std::string parent, child;
        int dim, line;
    };
    std::vector<PendingEdge> pending;

    while (std::getline(in, raw)) {
        ++lineno;
        auto toks = split_ws(strip_comment(raw));
        if (toks.empty()) continue;
        if (toks[0] == "node") {
            if (toks.size() != 4)
                throw parse_error(filename, lineno,
                                  "expected: node <name> role=<setting|outcome> values=<k>");
            const std::string& name = toks[1];
            if (std::find(names.begin(), names.end(), name) != names.end())
                throw parse_error(filename, lineno, "duplicate node name '" + name + "'");
            if (toks[2].rfind("role=", 0) != 0 || toks[3].rfind("values=", 0) != 0)
                throw parse_error(filename, lineno,
                                  "expected: node <name> role=<setting|outcome> values=<k>");
            std::string role = toks[2].substr(5);
            if (role != "setting" && role != "outcome")
                throw parse_error(filename, lineno, "role must be 'setting' or 'outcome'");
            int k = parse_int(toks[3].substr(7), filename, lineno);
            if (k < 1) throw parse_error(filename, lineno, "values must be >= 1");
            names.push_back(name);
            roles.push_back(role == "setting" ? Role::setting : Role::outcome);
            values.push_back(k);
            node_lines.push_back(lineno);
        } else if (toks[0] == "edge") {
            if (toks.size() != 4 && toks.size() != 5)
                throw parse_error(filename, lineno,
                                  "expected: edge <parent> -> <child> [dim=<2^n>]");
            if (toks[2] != "->")
                throw parse_error(filename, lineno, "expected '->' between parent and child");
            int dim = 2;
            if (toks.size() == 5) {
                if (toks[4].rfind("dim=", 0) != 0)
                    throw parse_error(filename, lineno, "expected dim=<2^n>");
                dim = parse_int(toks[4].substr(4), filename, lineno);
            }
            pending.push_back({toks[1], toks[3], dim, lineno});
        } else {
            throw parse_error(filename, lineno, "unknown directive '" + toks[0] + "'");
        }
    }

    std::vector<Edge> edges;
    for (const auto& pe : pending) {
        auto find = [&](const std::string& n) -> VarId {
            auto it = std::find(names.begin(), names.end(), n);
            if (it == names.end())
                throw parse_error(filename, pe.line, "unknown node '" + n + "'");
            return static_cast<VarId>(it - names.begin());
        };
        edges.push_back({find(pe.parent), find(pe.child), pe.dim});
    }
    try {
        Dag dag(static_cast<int>(names.size()), std::move(edges), std::move(roles));
        return NamedDag{std::move(dag), std::move(names), std::move(values),
                        std::move(node_lines)};
    } catch (const input_error& e) {
        throw parse_error(filename, lineno, e.what());
    }
}

NamedDag parse_dag_file(const std::string& path) { return parse_dag_text(read_file(path), path); }

std::string format_dag(const NamedDag& d) {
    std::ostringstream out;
    for (VarId v = 0; v < d.dag.size(); ++v)
        out << "node " << d.names[static_cast<std::size_t>(v)] << " role="
            << (d.dag.role(v) == Role::setting ? "setting" : "outcome")
            << " values=" << d.values[static_cast<std::size_t>(v)] << "\n";
    for (const Edge& e : d.dag.edges())
        out << "edge " << d.names[static_cast<std::size_t>(e.parent)] << " -> "
            << d.names[static_cast<std::size_t>(e.child)] << " dim=" << e.dim << "\n";
    return out.str();
}

namespace {

VarSet parse_side(const std::string& side, const NamedDag& d) {
    VarSet out;
    std::string item;
    std::istringstream in(side);
    while (std::getline(in, item, ',')) {
        // trim
        auto b = item.find_first_not_of(" \t");
        auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        out |= VarSet::single(d.id_of(item.substr(b, e - b + 1)));
    }
    return out;
}

}  // namespace

CiRelation parse_ci_relation(const std::string& text, const NamedDag& d) {
    auto sep = text.find("_||_");
    if (sep == std::string::npos)
        throw input_error("CI relation needs the '_||_' separator: " + text);
    std::string left = text.substr(0, sep);
    std::string rest = text.substr(sep + 4);
    std::string right = rest, cond;
    auto bar = rest.find('|');
    if (bar != std::string::npos) {
        right = rest.substr(0, bar);
        cond = rest.substr(bar + 1);
    }
    VarSet x = parse_side(left, d);
    VarSet y = parse_side(right, d);
    VarSet z = parse_side(cond, d);
    if (x.empty() || y.empty()) throw input_error("CI relation sides must be nonempty: " + text);
    return CiRelation(x, y, z);
}

std::string format_ci_relation(const CiRelation& r, const std::vector<std::string>& names) {
    auto side = [&](VarSet s) {
        std::string out;
        bool first = true;
        s.for_each([&](VarId v) {
            if (!first) out += ",";
            out += names.at(static_cast<std::size_t>(v));
            first = false;
        });
        return out;
    };
    std::string out = side(r.x()) + " _||_ " + side(r.y());
    if (!r.z().empty()) out += " | " + side(r.z());
    return out;
}

NamedTable parse_table_text(const std::string& text, const std::string& filename) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::vector<std::string> names;
    OutcomeSpace space;
    std::vector<double> table;
    bool header = false;

    while (std::getline(in, raw)) {
        ++lineno;
        auto toks = split_ws(strip_comment(raw));
        if (toks.empty()) continue;
        if (!header) {
            if (toks[0] != "vars")
                throw parse_error(filename, lineno, "expected a 'vars <name:size> ...' header");
            for (std::size_t i = 1; i < toks.size(); ++i) {
                auto colon = toks[i].find(':');
                if (colon == std::string::npos)
                    throw parse_error(filename, lineno, "expected <name:size>, got '" + toks[i] + "'");
                names.push_back(toks[i].substr(0, colon));
                int sz = parse_int(toks[i].substr(colon + 1), filename, lineno);
                if (sz < 1) throw parse_error(filename, lineno, "sizes must be >= 1");
                space.sizes.push_back(sz);
            }
            if (names.empty()) throw parse_error(filename, lineno, "header declares no variables");
            space.validate();
            table.assign(space.cells(), 0.0);
            header = true;
            continue;
        }
        if (toks.size() != names.size() + 1)
            throw parse_error(filename, lineno,
                              "expected " + std::to_string(names.size()) +
                                  " outcome indices and a probability");
        std::vector<int> vals;
        for (std::size_t i = 0; i < names.size(); ++i)
            vals.push_back(parse_int(toks[i], filename, lineno));
        double p = parse_number(toks.back(), filename, lineno);
        if (p < 0) throw parse_error(filename, lineno, "probabilities must be non-negative");
        std::size_t idx;
        try {
            idx = space.index_of(vals);
        } catch (const input_error& e) {
            throw parse_error(filename, lineno, e.what());
        }
        if (table[idx] != 0) throw parse_error(filename, lineno, "duplicate cell");
        table[idx] = p;
    }
    if (!header) throw parse_error(filename, lineno, "empty table file");
    try {
        return NamedTable{JointDistribution(std::move(space), std::move(table), 1e-9),
                          std::move(names)};
    } catch (const input_error& e) {
        throw parse_error(filename, lineno, e.what());
    }
}

NamedTable parse_table_file(const std::string& path) {
    return parse_table_text(read_file(path), path);
}

std::string format_table(const JointDistribution& p, const std::vector<std::string>& names) {
    if (static_cast<int>(names.size()) != p.num_vars())
        throw input_error("one name per variable required");
    std::ostringstream out;
    out << "vars";
    for (int v = 0; v < p.num_vars(); ++v)
        out << " " << names[static_cast<std::size_t>(v)] << ":"
            << p.space().sizes[static_cast<std::size_t>(v)];
    out << "\n";
    char buf[64];
    for (std::size_t i = 0; i < p.cells(); ++i) {
        if (p.cell(i) == 0) continue;
        for (int val : p.space().decode(i)) out << val << " ";
        std::snprintf(buf, sizeof(buf), "%.17g", p.cell(i));
        out << buf << "\n";
    }
    return out.str();
}

Complex parse_complex(const std::string& token) {
    if (token.empty()) throw input_error("empty complex literal");
    auto number = [&](const std::string& s) -> double {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw input_error("bad complex literal '" + token + "'");
        }
        if (used != s.size()) throw input_error("bad complex literal '" + token + "'");
        return v;
    };
    auto comma = token.find(',');
    if (comma != std::string::npos)
        return {number(token.substr(0, comma)), number(token.substr(comma + 1))};
    if (token.back() != 'i') return {number(token), 0};
    std::string body = token.substr(0, token.size() - 1);
    // Split at the last sign that is neither leading nor part of an exponent.
    std::size_t split = std::string::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    auto imag_part = [&](const std::string& s) -> double {
        if (s.empty() || s == "+") return 1.0;
        if (s == "-") return -1.0;
        return number(s);
    };
    if (split == std::string::npos) return {0, imag_part(body)};
    return {number(body.substr(0, split)), imag_part(body.substr(split))};
}

QuantumModelParams parse_params_text(const std::string& text, const NamedDag& d,
                                     const std::string& filename) {
    QuantumModelParams params = QuantumModelParams::sized(d.dag.size());
    // Pre-size the per-value slots from the declared outcome spaces.
    for (VarId v = 0; v < d.dag.size(); ++v) {
        std::size_t k = static_cast<std::size_t>(d.values[static_cast<std::size_t>(v)]);
        if (d.dag.kind(v) == NodeKind::exogenous)
            params.preps[static_cast<std::size_t>(v)].resize(k);
        else if (d.dag.kind(v) == NodeKind::intermediate)
            params.gates[static_cast<std::size_t>(v)].resize(k);
    }
    std::vector<std::vector<bool>> seen(static_cast<std::size_t>(d.dag.size()));
    for (VarId v = 0; v < d.dag.size(); ++v)
        seen[static_cast<std::size_t>(v)].assign(
            static_cast<std::size_t>(d.values[static_cast<std::size_t>(v)]), false);

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto toks = split_ws(strip_comment(raw));
        if (toks.empty()) continue;
        auto colon = std::find(toks.begin(), toks.end(), ":");
        if (colon == toks.end()) throw parse_error(filename, lineno, "expected ':' separator");
        std::vector<std::string> head(toks.begin(), colon);
        std::vector<std::string> tail(colon + 1, toks.end());
        auto node_of = [&](const std::string& name) -> VarId {
            try {
                return d.id_of(name);
            } catch (const input_error& e) {
                throw parse_error(filename, lineno, e.what());
            }
        };
        if (head.size() == 3 && head[0] == "prep") {
            VarId v = node_of(head[1]);
            if (d.dag.kind(v) != NodeKind::exogenous)
                throw parse_error(filename, lineno, "'" + head[1] + "' is not an exogenous node");
            int val = parse_int(head[2], filename, lineno);
            if (val < 0 || val >= d.values[static_cast<std::size_t>(v)])
                throw parse_error(filename, lineno, "value out of range");
            if (seen[static_cast<std::size_t>(v)][static_cast<std::size_t>(val)])
                throw parse_error(filename, lineno, "duplicate prep for this value");
            StateVector psi;
            for (const auto& t : tail) {
                try {
                    psi.push_back(parse_complex(t));
                } catch (const input_error& e) {
                    throw parse_error(filename, lineno, e.what());
                }
            }
            params.preps[static_cast<std::size_t>(v)][static_cast<std::size_t>(val)] =
                std::move(psi);
            seen[static_cast<std::size_t>(v)][static_cast<std::size_t>(val)] = true;
        } else if (head.size() == 3 && head[0] == "gate") {
            VarId v = node_of(head[1]);
            if (d.dag.kind(v) != NodeKind::intermediate)
                throw parse_error(filename, lineno, "'" + head[1] + "' is not an intermediate node");
            int val = parse_int(head[2], filename, lineno);
            if (val < 0 || val >= d.values[static_cast<std::size_t>(v)])
                throw parse_error(filename, lineno, "value out of range");
            if (seen[static_cast<std::size_t>(v)][static_cast<std::size_t>(val)])
                throw parse_error(filename, lineno, "duplicate gate for this value");
            ComplexMatrix m;
            std::size_t count = tail.size();
            int dim = static_cast<int>(std::lround(std::sqrt(static_cast<double>(count))));
            if (static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim) != count)
                throw parse_error(filename, lineno, "gate needs a square number of entries");
            m.dim = dim;
            for (const auto& t : tail) {
                try {
                    m.a.push_back(parse_complex(t));
                } catch (const input_error& e) {
                    throw parse_error(filename, lineno, e.what());
                }
            }
            params.gates[static_cast<std::size_t>(v)][static_cast<std::size_t>(val)] =
                std::move(m);
            seen[static_cast<std::size_t>(v)][static_cast<std::size_t>(val)] = true;
        } else if (head.size() == 2 && head[0] == "marginal") {
            VarId v = node_of(head[1]);
            if (d.dag.kind(v) == NodeKind::drain)
                throw parse_error(filename, lineno, "'" + head[1] + "' is a drain; drains take no marginal");
            std::vector<double> probs;
            for (const auto& t : tail) probs.push_back(parse_number(t, filename, lineno));
            if (static_cast<int>(probs.size()) != d.values[static_cast<std::size_t>(v)])
                throw parse_error(filename, lineno,
                                  "marginal arity does not match the declared values");
            params.marginals[static_cast<std::size_t>(v)] = std::move(probs);
        } else {
            throw parse_error(filename, lineno, "unknown directive '" + head[0] + "'");
        }
    }

    // Defaults and completeness checks.
    for (VarId v = 0; v < d.dag.size(); ++v) {
        NodeKind k = d.dag.kind(v);
        std::size_t vi = static_cast<std::size_t>(v);
        if (k == NodeKind::drain) continue;
        if (params.marginals[vi].empty())
            params.marginals[vi].assign(static_cast<std::size_t>(d.values[vi]),
                                        1.0 / d.values[vi]);
        for (int val = 0; val < d.values[vi]; ++val)
            if (!seen[vi][static_cast<std::size_t>(val)])
                throw parse_error(filename, lineno,
                                  std::string(k == NodeKind::exogenous ? "prep" : "gate") +
                                      " missing for node '" + d.names[vi] + "' value " +
                                      std::to_string(val));
    }
    return params;
}

QuantumModelParams parse_params_file(const std::string& path, const NamedDag& d) {
    return parse_params_text(read_file(path), d, path);
}

}  // namespace qcausal
