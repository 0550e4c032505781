#include "qcausal/separation.hpp"

#include <algorithm>

namespace qcausal {

namespace {

void check_triple(const Dag& g, VarSet x, VarSet y, VarSet z) {
    if (x.empty() || y.empty()) throw input_error("separation query needs nonempty x and y");
    if (!(x | y | z).subset_of(g.nodes())) throw input_error("separation query outside the DAG");
    if (!x.disjoint_with(y) || !x.disjoint_with(z) || !y.disjoint_with(z))
        throw input_error("separation query sets overlap");
}

// Trail reachability with per-state memo. A state is (node, entered-from):
// entering from a child permits any continuation, entering from a parent
// permits descending freely and ascending only through an open collider.
// At most 2N states under the DAG cap, so the search is allocation-free.
struct Reach {
    const Dag& g;
    VarSet block_through;   // nodes that stop chain/fork traversal
    VarSet open_colliders;  // nodes whose collider configuration passes

    VarSet run(VarSet start) const {
        std::uint64_t seen = 0;
        int stack[2 * limits::dag_cap];
        int top = 0;
        auto push = [&](VarId v, bool from_parent) {
            int s = 2 * v + (from_parent ? 1 : 0);
            if (!((seen >> s) & 1)) {
                seen |= std::uint64_t{1} << s;
                stack[top++] = s;
            }
        };
        start.for_each([&](VarId v) { push(v, false); });
        VarSet reached;
        while (top > 0) {
            int s = stack[--top];
            VarId v = s / 2;
            bool from_parent = s & 1;
            reached |= VarSet::single(v);
            if (from_parent) {
                if (!block_through.contains(v))
                    g.children(v).for_each([&](VarId c) { push(c, true); });
                if (open_colliders.contains(v))
                    g.parents(v).for_each([&](VarId p) { push(p, false); });
            } else {
                if (!block_through.contains(v)) {
                    g.children(v).for_each([&](VarId c) { push(c, true); });
                    g.parents(v).for_each([&](VarId p) { push(p, false); });
                }
            }
        }
        return reached;
    }
};

VarSet outcomes_in(const Dag& g, VarSet z) { return z & g.outcomes(); }

}  // namespace

bool d_separated(const Dag& g, VarSet x, VarSet y, VarSet z) {
    check_triple(g, x, y, z);
    Reach r{g, z, z | ancestors(g, z)};
    return (r.run(x) & y).empty();
}

VarSet detached(const Dag& g, VarSet v, VarSet o) {
    if (!(v | o).subset_of(g.nodes())) throw input_error("detached: set outside the DAG");
    if (!(o & g.settings()).empty())
        throw input_error("detached: conditioning set contains a setting");
    if (!v.disjoint_with(o)) throw input_error("detached: v overlaps o");
    Reach r{g, VarSet(), o | ancestors(g, o)};
    return g.nodes() - (r.run(v) | v | o);
}

bool chain_connected(const Dag& g, VarSet a, VarSet b, VarSet o) {
    if (a.empty() || b.empty()) throw input_error("chain query needs nonempty sets");
    if (!(o & g.settings()).empty())
        throw input_error("chain query: conditioning set contains a setting");
    if (!a.disjoint_with(o) || !b.disjoint_with(o) || !a.disjoint_with(b))
        throw input_error("chain query sets overlap");
    Reach r{g, VarSet(), o | ancestors(g, o)};
    return !(r.run(a) & b).empty();
}

bool q_separated(const Dag& g, VarSet x, VarSet y, VarSet z) {
    check_triple(g, x, y, z);
    g.require_quantum_valid();
    VarSet zo = outcomes_in(g, z);
    VarSet reaches_zo = ancestors(g, zo);  // nodes with a directed path into zo
    Reach chain{g, VarSet(), zo | reaches_zo};
    VarSet settings = g.settings();

    bool connected = false;
    x.for_each([&](VarId u) {
        if (connected) return;
        VarSet chained_to_u = chain.run(VarSet::single(u));
        y.for_each([&](VarId v) {
            if (connected) return;
            bool us = settings.contains(u), vs = settings.contains(v);
            if (us && vs) {
                // Inactive when either setting cannot reach a conditioned outcome.
                if (!reaches_zo.contains(u) || !reaches_zo.contains(v)) return;
            } else if (us != vs) {
                VarId s = us ? u : v;
                VarId oend = us ? v : u;
                if (!descendants(g, VarSet::single(s)).contains(oend) && !reaches_zo.contains(s))
                    return;
            }
            // Remaining pairs need a blocking collider on every path.
            if (chained_to_u.contains(v)) connected = true;
        });
    });
    return !connected;
}

namespace {

// Decodes index i over the base-4 assignment space into a triple, skipping
// assignments with empty x or y and non-canonical (x, y) orders.
bool decode_triple(std::uint64_t i, int n, VarSet& x, VarSet& y, VarSet& z) {
    std::uint32_t xb = 0, yb = 0, zb = 0;
    for (int v = 0; v < n; ++v) {
        switch (i % 4) {
            case 1: xb |= 1u << v; break;
            case 2: yb |= 1u << v; break;
            case 3: zb |= 1u << v; break;
            default: break;
        }
        i /= 4;
    }
    if (xb == 0 || yb == 0 || xb > yb) return false;
    x = VarSet::from_bits(xb);
    y = VarSet::from_bits(yb);
    z = VarSet::from_bits(zb);
    return true;
}

void check_enum_cap(int n, int cap, const char* what) {
    if (n > cap)
        throw resource_error(std::string(what) + " over " + std::to_string(n) +
                             " variables exceeds the cap of " + std::to_string(cap) +
                             " (4^N separation queries)");
}

template <typename Pred>
CiSet enumerate_ci_parallel(const Dag& g, Pred pred) {
    int n = g.size();
    std::uint64_t total = 1;
    for (int v = 0; v < n; ++v) total *= 4;
    std::vector<std::vector<CiRelation>> found;
#pragma omp parallel
    {
        std::vector<CiRelation> local;
#pragma omp for schedule(dynamic, 64) nowait
        for (long long i = 0; i < static_cast<long long>(total); ++i) {
            VarSet x, y, z;
            if (!decode_triple(static_cast<std::uint64_t>(i), n, x, y, z)) continue;
            if (pred(x, y, z)) local.emplace_back(x, y, z);
        }
#pragma omp critical
        found.push_back(std::move(local));
    }
    std::vector<CiRelation> all;
    for (auto& part : found) all.insert(all.end(), part.begin(), part.end());
    return CiSet(n, std::move(all));
}

template <typename Pred>
CiSet enumerate_ci_serial(const Dag& g, Pred pred) {
    int n = g.size();
    std::uint64_t total = 1;
    for (int v = 0; v < n; ++v) total *= 4;
    std::vector<CiRelation> all;
    for (std::uint64_t i = 0; i < total; ++i) {
        VarSet x, y, z;
        if (!decode_triple(i, n, x, y, z)) continue;
        if (pred(x, y, z)) all.emplace_back(x, y, z);
    }
    return CiSet(n, std::move(all));
}

}  // namespace

CiSet ci_set_d(const Dag& g, int cap) {
    check_enum_cap(g.size(), cap, "d-separation CI extraction");
    return enumerate_ci_parallel(
        g, [&](VarSet x, VarSet y, VarSet z) { return d_separated(g, x, y, z); });
}

CiSet ci_set_q(const Dag& g, int cap) {
    check_enum_cap(g.size(), cap, "q-separation CI extraction");
    g.require_quantum_valid();
    return enumerate_ci_parallel(
        g, [&](VarSet x, VarSet y, VarSet z) { return q_separated(g, x, y, z); });
}

CiSet ci_set_d_serial(const Dag& g, int cap) {
    check_enum_cap(g.size(), cap, "d-separation CI extraction");
    return enumerate_ci_serial(
        g, [&](VarSet x, VarSet y, VarSet z) { return d_separated(g, x, y, z); });
}

CiSet ci_set_q_serial(const Dag& g, int cap) {
    check_enum_cap(g.size(), cap, "q-separation CI extraction");
    g.require_quantum_valid();
    return enumerate_ci_serial(
        g, [&](VarSet x, VarSet y, VarSet z) { return q_separated(g, x, y, z); });
}

// --- path-enumeration reference engines ---

namespace {

void dfs_paths(const Dag& g, VarId at, VarId target, std::vector<VarId>& nodes,
               std::vector<bool>& forward, VarSet visited, std::vector<Path>& out) {
    if (at == target) {
        out.push_back({nodes, forward});
        return;
    }
    auto step = [&](VarId next, bool fwd) {
        if (visited.contains(next)) return;
        nodes.push_back(next);
        forward.push_back(fwd);
        dfs_paths(g, next, target, nodes, forward, visited | VarSet::single(next), out);
        nodes.pop_back();
        forward.pop_back();
    };
    g.children(at).for_each([&](VarId c) { step(c, true); });
    g.parents(at).for_each([&](VarId p) { step(p, false); });
}

bool is_collider_at(const Path& p, std::size_t i) {
    // interior node i: collider iff both adjacent edges point into it
    return p.forward[i - 1] && !p.forward[i];
}

// Classical blocking rule for one path.
bool d_path_blocked(const Path& p, VarSet z, VarSet collider_open) {
    for (std::size_t i = 1; i + 1 < p.nodes.size(); ++i) {
        VarId m = p.nodes[i];
        if (is_collider_at(p, i)) {
            if (!collider_open.contains(m)) return true;
        } else {
            if (z.contains(m)) return true;
        }
    }
    return false;
}

// Quantum inactivation rules for one path.
bool q_path_inactive(const Dag& g, const Path& p, VarSet zo, VarSet reaches_zo) {
    VarId u = p.nodes.front(), v = p.nodes.back();
    bool us = g.role(u) == Role::setting, vs = g.role(v) == Role::setting;
    if (us && vs) {
        if (!reaches_zo.contains(u) || !reaches_zo.contains(v)) return true;
    } else if (us != vs) {
        VarId s = us ? u : v;
        VarId oend = us ? v : u;
        if (!descendants(g, VarSet::single(s)).contains(oend) && !reaches_zo.contains(s))
            return true;
    }
    for (std::size_t i = 1; i + 1 < p.nodes.size(); ++i) {
        VarId m = p.nodes[i];
        if (is_collider_at(p, i) && !zo.contains(m) && !reaches_zo.contains(m)) return true;
    }
    return false;
}

template <typename PerPath>
bool all_paths(const Dag& g, VarSet x, VarSet y, PerPath fn) {
    bool ok = true;
    x.for_each([&](VarId u) {
        y.for_each([&](VarId v) {
            if (!ok) return;
            std::vector<VarId> nodes{u};
            std::vector<bool> fwd;
            std::vector<Path> paths;
            dfs_paths(g, u, v, nodes, fwd, VarSet::single(u), paths);
            for (const Path& p : paths)
                if (!fn(p)) {
                    ok = false;
                    return;
                }
        });
    });
    return ok;
}

}  // namespace

std::vector<Path> simple_paths(const Dag& g, VarId u, VarId v) {
    std::vector<Path> out;
    std::vector<VarId> nodes{u};
    std::vector<bool> fwd;
    dfs_paths(g, u, v, nodes, fwd, VarSet::single(u), out);
    return out;
}

bool d_separated_paths(const Dag& g, VarSet x, VarSet y, VarSet z) {
    check_triple(g, x, y, z);
    VarSet open = z | ancestors(g, z);
    return all_paths(g, x, y, [&](const Path& p) { return d_path_blocked(p, z, open); });
}

bool q_separated_paths(const Dag& g, VarSet x, VarSet y, VarSet z) {
    check_triple(g, x, y, z);
    g.require_quantum_valid();
    VarSet zo = outcomes_in(g, z);
    VarSet reach = ancestors(g, zo);
    return all_paths(g, x, y, [&](const Path& p) { return q_path_inactive(g, p, zo, reach); });
}

VarSet detached_paths(const Dag& g, VarSet v, VarSet o) {
    if (!(o & g.settings()).empty())
        throw input_error("detached: conditioning set contains a setting");
    if (!v.disjoint_with(o)) throw input_error("detached: v overlaps o");
    VarSet open = o | ancestors(g, o);
    VarSet result;
    (g.nodes() - (v | o)).for_each([&](VarId w) {
        bool every_path_blocked = all_paths(g, VarSet::single(w), v, [&](const Path& p) {
            for (std::size_t i = 1; i + 1 < p.nodes.size(); ++i)
                if (is_collider_at(p, i) && !open.contains(p.nodes[i])) return true;
            return false;
        });
        if (every_path_blocked) result |= VarSet::single(w);
    });
    return result;
}

std::optional<Path> find_active_path(const Dag& g, VarSet x, VarSet y, VarSet z, bool quantum) {
    check_triple(g, x, y, z);
    std::optional<Path> found;
    VarSet zo = outcomes_in(g, z);
    VarSet reach_zo = ancestors(g, zo);
    VarSet open_d = z | ancestors(g, z);
    all_paths(g, x, y, [&](const Path& p) {
        bool inactive = quantum ? q_path_inactive(g, p, zo, reach_zo)
                                : d_path_blocked(p, z, open_d);
        if (!inactive && !found) found = p;
        return !found;
    });
    return found;
}

std::string format_path(const Path& p, const std::vector<std::string>& names) {
    std::string out = names.at(static_cast<std::size_t>(p.nodes[0]));
    for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
        out += p.forward[i] ? " -> " : " <- ";
        out += names.at(static_cast<std::size_t>(p.nodes[i + 1]));
    }
    return out;
}

std::vector<std::string> explain_separation(const Dag& g, VarSet x, VarSet y, VarSet z,
                                            bool quantum, const std::vector<std::string>& names) {
    check_triple(g, x, y, z);
    std::vector<std::string> lines;
    VarSet zo = outcomes_in(g, z);
    VarSet reach_zo = ancestors(g, zo);
    VarSet open_d = z | ancestors(g, z);
    auto name = [&](VarId v) { return names.at(static_cast<std::size_t>(v)); };
    all_paths(g, x, y, [&](const Path& p) {
        std::string line = "path " + format_path(p, names) + ": ";
        bool inactive = false;
        if (quantum) {
            VarId u = p.nodes.front(), v = p.nodes.back();
            bool us = g.role(u) == Role::setting, vs = g.role(v) == Role::setting;
            if (us && vs && (!reach_zo.contains(u) || !reach_zo.contains(v))) {
                VarId s = !reach_zo.contains(u) ? u : v;
                line += "inactive, setting " + name(s) + " has no directed path to a conditioned outcome";
                inactive = true;
            } else if (us != vs) {
                VarId s = us ? u : v;
                VarId oe = us ? v : u;
                if (!descendants(g, VarSet::single(s)).contains(oe) && !reach_zo.contains(s)) {
                    line += "inactive, setting " + name(s) + " has no directed path to " + name(oe) +
                            " or to a conditioned outcome";
                    inactive = true;
                }
            }
            if (!inactive) {
                for (std::size_t i = 1; i + 1 < p.nodes.size() && !inactive; ++i) {
                    VarId m = p.nodes[i];
                    if (is_collider_at(p, i) && !zo.contains(m) && !reach_zo.contains(m)) {
                        line += "inactive, collider " + name(m) +
                                " is not a conditioned outcome and reaches none";
                        inactive = true;
                    }
                }
            }
        } else {
            for (std::size_t i = 1; i + 1 < p.nodes.size() && !inactive; ++i) {
                VarId m = p.nodes[i];
                if (is_collider_at(p, i)) {
                    if (!open_d.contains(m)) {
                        line += "blocked at collider " + name(m) +
                                " (not conditioned, no conditioned descendant)";
                        inactive = true;
                    }
                } else if (z.contains(m)) {
                    line += "blocked at conditioned node " + name(m);
                    inactive = true;
                }
            }
        }
        if (!inactive) line += "active";
        lines.push_back(line);
        return true;
    });
    if (lines.empty()) lines.push_back("no connecting paths");
    return lines;
}

}  // namespace qcausal
