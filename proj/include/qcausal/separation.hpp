#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcausal/ci.hpp"
#include "qcausal/dag.hpp"
#include "qcausal/types.hpp"

namespace qcausal {

// Undirected simple path through a DAG. forward[i] is true when the edge
// between nodes[i] and nodes[i+1] points from nodes[i] to nodes[i+1].
struct Path {
    std::vector<VarId> nodes;
    std::vector<bool> forward;
};

// Production engines (reachability over (node, entering-direction) states).

// Classical criterion: every path is blocked by a conditioned chain/fork
// node, or by a collider that is neither conditioned nor has a conditioned
// descendant.
bool d_separated(const Dag& g, VarSet x, VarSet y, VarSet z);

// Variables w such that every path from w to v contains a collider that is
// not in o and has no directed path into o.
VarSet detached(const Dag& g, VarSet v, VarSet o);

// Negation of mutual detachment: some path between a and b has every
// collider in o or leading into o.
bool chain_connected(const Dag& g, VarSet a, VarSet b, VarSet o);

// Quantum criterion. Per endpoint pair: setting-setting pairs are inactive
// when one setting has no directed path to a conditioned outcome;
// setting-outcome pairs when the setting reaches neither the outcome nor a
// conditioned outcome; otherwise every path needs a blocking collider.
// Settings inside z never block or activate.
bool q_separated(const Dag& g, VarSet x, VarSet y, VarSet z);

// All separated triples over disjoint subsets (x, y nonempty). OpenMP over
// the linearized assignment space.
CiSet ci_set_d(const Dag& g, int cap = limits::enum_cap);
CiSet ci_set_q(const Dag& g, int cap = limits::enum_cap);

// Plain-loop reference implementations kept for testing and benchmarks.
CiSet ci_set_d_serial(const Dag& g, int cap = limits::enum_cap);
CiSet ci_set_q_serial(const Dag& g, int cap = limits::enum_cap);

// Path-enumeration reference engines. These evaluate the separation rules
// literally on every simple path and anchor the reachability
// implementations in tests; they also back the CLI explanations.
std::vector<Path> simple_paths(const Dag& g, VarId u, VarId v);
bool d_separated_paths(const Dag& g, VarSet x, VarSet y, VarSet z);
bool q_separated_paths(const Dag& g, VarSet x, VarSet y, VarSet z);
VarSet detached_paths(const Dag& g, VarSet v, VarSet o);

// First active path between x and y, if any (used by --explain).
std::optional<Path> find_active_path(const Dag& g, VarSet x, VarSet y, VarSet z, bool quantum);
// Human-readable reasons, one line per path (or per endpoint rule).
std::vector<std::string> explain_separation(const Dag& g, VarSet x, VarSet y, VarSet z,
                                            bool quantum, const std::vector<std::string>& names);
std::string format_path(const Path& p, const std::vector<std::string>& names);

}  // namespace qcausal
