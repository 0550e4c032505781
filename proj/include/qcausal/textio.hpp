#pragma once

#include <string>
#include <vector>

#include "qcausal/ci.hpp"
#include "qcausal/dag.hpp"
#include "qcausal/dist.hpp"
#include "qcausal/qsim.hpp"

namespace qcausal {

// Parse failures carry "file:line: message" in what().
struct parse_error : input_error {
    parse_error(const std::string& file, int at_line, const std::string& msg)
        : input_error(file + ":" + std::to_string(at_line) + ": " + msg), line(at_line) {}
    int line;
};

// A DAG together with its declared node names and outcome-space sizes.
struct NamedDag {
    Dag dag;
    std::vector<std::string> names;
    std::vector<int> values;      // declared outcome-space size per node
    std::vector<int> node_lines;  // declaration line per node

    VarId id_of(const std::string& name) const;
};

// Line-oriented DAG description:
//   node <name> role=<setting|outcome> values=<k>
//   edge <parent> -> <child> [dim=<2^n>]
// '#' starts a comment; ids are assigned in declaration order.
NamedDag parse_dag_text(const std::string& text, const std::string& filename = "<input>");
NamedDag parse_dag_file(const std::string& path);
std::string format_dag(const NamedDag& d);

// CI relation syntax: "X,Y _||_ Z | W" (conditioning side optional).
CiRelation parse_ci_relation(const std::string& text, const NamedDag& d);
std::string format_ci_relation(const CiRelation& r, const std::vector<std::string>& names);

// Table format: a "vars <name:size> ..." header, then one line per nonzero
// cell holding the outcome indices and the probability.
struct NamedTable {
    JointDistribution dist;
    std::vector<std::string> names;
};
NamedTable parse_table_text(const std::string& text, const std::string& filename = "<input>");
NamedTable parse_table_file(const std::string& path);
std::string format_table(const JointDistribution& p, const std::vector<std::string>& names);

// Model parameter sections:
//   prep <node> <value> : <complex> ...
//   gate <node> <value> : <row-major complex matrix>
//   marginal <node> : <p0 p1 ...>
// Complex literals are a+bi / a-bi / bi / a, or a re,im pair.
QuantumModelParams parse_params_text(const std::string& text, const NamedDag& d,
                                     const std::string& filename = "<input>");
QuantumModelParams parse_params_file(const std::string& path, const NamedDag& d);

Complex parse_complex(const std::string& token);

}  // namespace qcausal
