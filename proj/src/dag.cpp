#include "qcausal/dag.hpp"

#include <algorithm>
#include <numeric>

#include "qcausal/separation.hpp"

namespace qcausal {

namespace {

bool is_power_of_two(long v) { return v > 0 && (v & (v - 1)) == 0; }

std::string node_name(VarId v, const std::vector<std::string>* names) {
    if (names && v >= 0 && v < static_cast<int>(names->size())) return (*names)[v];
    return "#" + std::to_string(v);
}

}  // namespace

Dag::Dag(int n, std::vector<Edge> edges, std::vector<Role> roles, int cap)
    : n_(n), edges_(std::move(edges)), roles_(std::move(roles)) {
    if (n_ < 0) throw input_error("negative node count");
    if (n_ > cap)
        throw resource_error("DAG with " + std::to_string(n_) + " nodes exceeds the cap of " +
                             std::to_string(cap) + " (set operations are exponential in N)");
    if (static_cast<int>(roles_.size()) != n_) throw input_error("one role per node required");
    parents_.assign(static_cast<std::size_t>(n_), VarSet());
    children_.assign(static_cast<std::size_t>(n_), VarSet());
    for (const Edge& e : edges_) {
        check(e.parent);
        check(e.child);
        if (e.parent == e.child) throw input_error("self-loop on node " + std::to_string(e.parent));
        if (children_[e.parent].contains(e.child))
            throw input_error("duplicate edge " + std::to_string(e.parent) + " -> " +
                              std::to_string(e.child));
        children_[e.parent] |= VarSet::single(e.child);
        parents_[e.child] |= VarSet::single(e.parent);
    }
    // Kahn's check for acyclicity.
    std::vector<int> indeg(static_cast<std::size_t>(n_), 0);
    for (VarId v = 0; v < n_; ++v) indeg[v] = parents_[v].size();
    std::vector<VarId> queue;
    for (VarId v = 0; v < n_; ++v)
        if (indeg[v] == 0) queue.push_back(v);
    int seen = 0;
    while (!queue.empty()) {
        VarId v = queue.back();
        queue.pop_back();
        ++seen;
        children_[v].for_each([&](VarId c) {
            if (--indeg[c] == 0) queue.push_back(c);
        });
    }
    if (seen != n_) throw input_error("edge set contains a directed cycle");
}

NodeKind Dag::kind(VarId v) const {
    check(v);
    if (parents_[v].empty()) return NodeKind::exogenous;
    if (children_[v].empty()) return NodeKind::drain;
    return NodeKind::intermediate;
}

bool Dag::has_edge(VarId p, VarId c) const { return children_.at(check(p)).contains(check(c)); }

int Dag::edge_dim(VarId p, VarId c) const {
    for (const Edge& e : edges_)
        if (e.parent == p && e.child == c) return e.dim;
    throw input_error("no edge " + std::to_string(p) + " -> " + std::to_string(c));
}

VarSet Dag::settings() const {
    VarSet s;
    for (VarId v = 0; v < n_; ++v)
        if (roles_[v] == Role::setting) s |= VarSet::single(v);
    return s;
}

VarSet Dag::outcomes() const { return settings().complement_in(n_); }

VarSet Dag::drains() const {
    VarSet s;
    for (VarId v = 0; v < n_; ++v)
        if (kind(v) == NodeKind::drain) s |= VarSet::single(v);
    return s;
}

VarSet Dag::exogenous() const {
    VarSet s;
    for (VarId v = 0; v < n_; ++v)
        if (kind(v) == NodeKind::exogenous) s |= VarSet::single(v);
    return s;
}

std::vector<std::string> Dag::quantum_violations(const std::vector<std::string>* names) const {
    std::vector<std::string> out;
    for (VarId v = 0; v < n_; ++v) {
        bool drain = kind(v) == NodeKind::drain;
        bool outcome = roles_[v] == Role::outcome;
        if (drain && !outcome)
            out.push_back("node " + node_name(v, names) +
                          " has no outgoing edges but is marked as a setting");
        if (!drain && outcome)
            out.push_back("node " + node_name(v, names) +
                          " has outgoing edges but is marked as an outcome");
        if (!drain && !outcome && children_[v].empty())
            out.push_back("setting " + node_name(v, names) + " is not a parent of any node");
    }
    return out;
}

std::vector<std::string> Dag::dimension_violations(const std::vector<std::string>* names) const {
    std::vector<std::string> out;
    for (const Edge& e : edges_) {
        if (!is_power_of_two(e.dim) || e.dim < 2)
            out.push_back("edge " + node_name(e.parent, names) + " -> " +
                          node_name(e.child, names) + " has dimension " + std::to_string(e.dim) +
                          ", expected a power of two >= 2");
    }
    for (VarId v = 0; v < n_; ++v) {
        if (kind(v) != NodeKind::intermediate) continue;
        long in = 1, outd = 1;
        parents_[v].for_each([&](VarId p) { in *= edge_dim(p, v); });
        children_[v].for_each([&](VarId c) { outd *= edge_dim(v, c); });
        if (in != outd)
            out.push_back("intermediate node " + node_name(v, names) + " has input dimension " +
                          std::to_string(in) + " but output dimension " + std::to_string(outd));
    }
    return out;
}

void Dag::require_quantum_valid() const {
    auto v = quantum_violations();
    if (!v.empty()) throw validation_error("DAG is not a valid quantum network", std::move(v));
}

VarSet ancestors(const Dag& g, VarSet v) {
    if (!v.subset_of(g.nodes())) throw input_error("ancestors: set outside the DAG");
    VarSet frontier = v, seen;
    while (!frontier.empty()) {
        VarSet next;
        frontier.for_each([&](VarId u) { next |= g.parents(u); });
        next = next - seen;
        seen |= next;
        frontier = next;
    }
    return seen;
}

VarSet descendants(const Dag& g, VarSet v) {
    if (!v.subset_of(g.nodes())) throw input_error("descendants: set outside the DAG");
    VarSet frontier = v, seen;
    while (!frontier.empty()) {
        VarSet next;
        frontier.for_each([&](VarId u) { next |= g.children(u); });
        next = next - seen;
        seen |= next;
        frontier = next;
    }
    return seen;
}

Ordering Ordering::identity(int n) {
    Ordering o;
    o.sequence.resize(static_cast<std::size_t>(n));
    std::iota(o.sequence.begin(), o.sequence.end(), 0);
    return o;
}

int Ordering::position(VarId v) const {
    for (std::size_t i = 0; i < sequence.size(); ++i)
        if (sequence[i] == v) return static_cast<int>(i);
    throw input_error("variable " + std::to_string(v) + " missing from ordering");
}

bool Ordering::consistent_with(const Dag& g) const {
    if (static_cast<int>(sequence.size()) != g.size()) return false;
    std::vector<int> pos(sequence.size(), -1);
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        VarId v = sequence[i];
        if (v < 0 || v >= g.size() || pos[v] != -1) return false;
        pos[v] = static_cast<int>(i);
    }
    for (const Edge& e : g.edges())
        if (pos[e.parent] >= pos[e.child]) return false;
    return true;
}

VarSet Ordering::predecessors(VarId v) const {
    VarSet s;
    for (VarId u : sequence) {
        if (u == v) return s;
        s |= VarSet::single(u);
    }
    throw input_error("variable " + std::to_string(v) + " missing from ordering");
}

Ordering topological_ordering(const Dag& g) {
    Ordering o;
    std::vector<int> indeg(static_cast<std::size_t>(g.size()), 0);
    for (VarId v = 0; v < g.size(); ++v) indeg[v] = g.parents(v).size();
    for (VarId v = 0; v < g.size(); ++v)
        if (indeg[v] == 0) o.sequence.push_back(v);
    for (std::size_t i = 0; i < o.sequence.size(); ++i) {
        g.children(o.sequence[i]).for_each([&](VarId c) {
            if (--indeg[c] == 0) o.sequence.push_back(c);
        });
    }
    return o;
}

CausalInputList::CausalInputList(Ordering ordering, std::vector<VarSet> parents)
    : ordering_(std::move(ordering)), parents_(std::move(parents)) {
    if (ordering_.sequence.size() != parents_.size())
        throw input_error("ordering and parent list sizes differ");
    for (VarId v : ordering_.sequence)
        if (!parents_[v].subset_of(ordering_.predecessors(v)))
            throw input_error("parents of " + std::to_string(v) +
                              " are not all predecessors under the ordering");
}

std::vector<CausalInputList::Entry> CausalInputList::entries() const {
    std::vector<Entry> out;
    VarSet before;
    for (VarId v : ordering_.sequence) {
        out.push_back({v, before - parents_[v], parents_[v]});
        before |= VarSet::single(v);
    }
    return out;
}

CiSet CausalInputList::ci_relations() const {
    std::vector<CiRelation> rels;
    for (const Entry& e : entries())
        if (!e.rest.empty()) rels.emplace_back(VarSet::single(e.var), e.rest, e.parents);
    return CiSet(size(), std::move(rels));
}

CausalInputList causal_input_list(const Dag& g, const Ordering& ord) {
    if (!ord.consistent_with(g))
        throw input_error("ordering is not consistent with the DAG's partial order");
    std::vector<VarSet> parents(static_cast<std::size_t>(g.size()));
    for (VarId v = 0; v < g.size(); ++v) parents[v] = g.parents(v);
    return CausalInputList(ord, std::move(parents));
}

Dag dag_from_parents(int n, const std::vector<VarSet>& parents, const std::vector<Role>* roles) {
    if (static_cast<int>(parents.size()) != n) throw input_error("one parent set per node required");
    std::vector<Edge> edges;
    for (VarId v = 0; v < n; ++v)
        parents[v].for_each([&](VarId p) { edges.push_back({p, v, 2}); });
    std::vector<Role> rs;
    if (roles) {
        rs = *roles;
    } else {
        // Default roles: drains read as outcomes, everything else as settings.
        std::vector<VarSet> children(static_cast<std::size_t>(n));
        for (const Edge& e : edges) children[e.parent] |= VarSet::single(e.child);
        for (VarId v = 0; v < n; ++v)
            rs.push_back(children[v].empty() && !parents[v].empty() ? Role::outcome
                                                                    : Role::setting);
    }
    return Dag(n, std::move(edges), std::move(rs));
}

QuantumInputList::QuantumInputList(Dag dag, Ordering ordering)
    : dag_(std::move(dag)), ordering_(std::move(ordering)) {
    dag_.require_quantum_valid();
    if (!ordering_.consistent_with(dag_))
        throw input_error("ordering is not consistent with the DAG's partial order");
    parents_.reserve(static_cast<std::size_t>(dag_.size()));
    for (VarId v = 0; v < dag_.size(); ++v) parents_.push_back(dag_.parents(v));
}

void QuantumInputList::for_each_relation(const std::function<void(const CiRelation&)>& fn) const {
    const Dag& g = dag_;
    const std::uint32_t settings = g.settings().bits();
    const std::uint32_t outcomes = g.outcomes().bits();

    // Detachment family over every (S', O') subset pair. Setting endpoints
    // carry their own connectivity rules (a setting joins a chain only
    // through a conditioned outcome it reaches, or an outcome it feeds), so
    // membership is the pairwise separation verdict rather than the bare
    // collider rule.
    for (std::uint32_t ob = outcomes;; ob = (ob - 1) & outcomes) {
        VarSet oset = VarSet::from_bits(ob);
        for (std::uint32_t sb = settings; sb; sb = (sb - 1) & settings) {
            VarSet sset = VarSet::from_bits(sb);
            VarSet dt;
            (g.nodes() - sset - oset).for_each([&](VarId w) {
                if (q_separated(g, sset, VarSet::single(w), oset)) dt |= VarSet::single(w);
            });
            if (!dt.empty()) fn(CiRelation(sset, dt, oset));
        }
        if (ob == 0) break;
    }
    // Unconditioned outcome family over every nonempty O'.
    for (std::uint32_t ob = outcomes; ob; ob = (ob - 1) & outcomes) {
        VarSet oset = VarSet::from_bits(ob);
        VarSet an = ancestors(g, oset);
        VarSet left = oset | an;
        VarSet right = (g.settings() - an) | detached(g, oset, VarSet());
        if (!right.empty()) fn(CiRelation(left, right, VarSet()));
    }
}

CiSet QuantumInputList::relations(int cap) const {
    if (dag_.size() > cap)
        throw resource_error("materializing the quantum input list over " +
                             std::to_string(dag_.size()) + " variables exceeds the cap of " +
                             std::to_string(cap) + " (2^N x 2^N subset pairs)");
    std::vector<CiRelation> rels;
    for_each_relation([&](const CiRelation& r) { rels.push_back(r); });
    return CiSet(dag_.size(), std::move(rels));
}

QuantumInputList quantum_input_list(const Dag& g, const Ordering& ord) {
    return QuantumInputList(g, ord);
}

}  // namespace qcausal
