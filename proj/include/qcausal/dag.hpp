#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qcausal/ci.hpp"
#include "qcausal/types.hpp"

namespace qcausal {

// Variable roles in a network: settings are preparations and operation
// choices, outcomes are fixed-basis measurement results.
enum class Role { setting, outcome };

// Node kinds derived from the edge structure.
enum class NodeKind { exogenous, intermediate, drain };

struct Edge {
    VarId parent = 0;
    VarId child = 0;
    int dim = 2;  // Hilbert-space dimension of the connection, power of two
};

// Immutable DAG over dense variable ids with per-node roles.
class Dag {
  public:
    Dag(int n, std::vector<Edge> edges, std::vector<Role> roles, int cap = limits::dag_cap);

    int size() const { return n_; }
    VarSet nodes() const { return VarSet::full(n_); }
    VarSet parents(VarId v) const { return parents_.at(check(v)); }
    VarSet children(VarId v) const { return children_.at(check(v)); }
    Role role(VarId v) const { return roles_.at(check(v)); }
    NodeKind kind(VarId v) const;
    bool has_edge(VarId p, VarId c) const;
    int edge_dim(VarId p, VarId c) const;
    const std::vector<Edge>& edges() const { return edges_; }

    VarSet settings() const;   // role-based
    VarSet outcomes() const;   // role-based
    VarSet drains() const;     // kind-based
    VarSet exogenous() const;  // kind-based

    // Rules a DAG must satisfy to be read as a quantum network: outcomes are
    // exactly the drains and every setting feeds at least one node.
    std::vector<std::string> quantum_violations(const std::vector<std::string>* names = nullptr) const;
    // Wire rules needed on top for simulation: dimensions are powers of two
    // and intermediate nodes have balanced input/output dimensions.
    std::vector<std::string> dimension_violations(const std::vector<std::string>* names = nullptr) const;
    bool quantum_valid() const { return quantum_violations().empty(); }
    void require_quantum_valid() const;

  private:
    VarId check(VarId v) const {
        if (v < 0 || v >= n_) throw input_error("unknown VarId " + std::to_string(v));
        return v;
    }
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<VarSet> parents_, children_;
    std::vector<Role> roles_;
};

// Union of all nodes with a directed path into (out of) some member of v.
VarSet ancestors(const Dag& g, VarSet v);
VarSet descendants(const Dag& g, VarSet v);

// Total order on variables; sequence[i] is the variable at position i.
struct Ordering {
    std::vector<VarId> sequence;

    static Ordering identity(int n);
    int position(VarId v) const;
    bool consistent_with(const Dag& g) const;
    // Variables strictly before v in the order.
    VarSet predecessors(VarId v) const;
};

Ordering topological_ordering(const Dag& g);

// Ordered per-variable parent assignment. Each entry encodes the relation
// (var _||_ rest | parents) where rest is the remaining predecessors.
class CausalInputList {
  public:
    struct Entry {
        VarId var;
        VarSet rest;
        VarSet parents;
    };

    CausalInputList(Ordering ordering, std::vector<VarSet> parents);

    const Ordering& ordering() const { return ordering_; }
    const std::vector<VarSet>& parents() const { return parents_; }
    int size() const { return static_cast<int>(parents_.size()); }
    std::vector<Entry> entries() const;
    // Entries as a CiSet; entries with an empty rest side are dropped.
    CiSet ci_relations() const;

  private:
    Ordering ordering_;
    std::vector<VarSet> parents_;  // indexed by VarId
};

CausalInputList causal_input_list(const Dag& g, const Ordering& ord);

// Rebuilds the DAG a causal input list generates, one edge per parent.
Dag dag_from_parents(int n, const std::vector<VarSet>& parents,
                     const std::vector<Role>* roles = nullptr);

// Parent assignment plus the two generated families of CI relations for a
// quantum network: detachment relations (S' _||_ dt_O'(S') | O'), where a
// variable is detached when the pairwise separation rules disconnect it
// from every member of S' given O', and the unconditioned outcome relations
// (O' an(O') _||_ non-ancestor settings and outcome-detached variables | {}).
class QuantumInputList {
  public:
    QuantumInputList(Dag dag, Ordering ordering);

    const Dag& dag() const { return dag_; }
    const Ordering& ordering() const { return ordering_; }
    const std::vector<VarSet>& parents() const { return parents_; }

    // Streams every relation without materializing the full set.
    void for_each_relation(const std::function<void(const CiRelation&)>& fn) const;
    // Materialized set; refuses universes where the 2^N x 2^N enumeration
    // would be unreasonable.
    CiSet relations(int cap = 10) const;

  private:
    Dag dag_;
    Ordering ordering_;
    std::vector<VarSet> parents_;
};

QuantumInputList quantum_input_list(const Dag& g, const Ordering& ord);

}  // namespace qcausal
