#include "qcausal/qsim.hpp"

#include <algorithm>
#include <cmath>

namespace qcausal {

ComplexMatrix ComplexMatrix::identity(int dim) {
    ComplexMatrix m;
    m.dim = dim;
    m.a.assign(static_cast<std::size_t>(dim) * dim, Complex(0, 0));
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1;
    return m;
}

double ComplexMatrix::unitarity_defect() const {
    double worst = 0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            Complex s(0, 0);
            for (int k = 0; k < dim; ++k) s += std::conj(at(k, i)) * at(k, j);
            if (i == j) s -= 1.0;
            worst = std::max(worst, std::abs(s));
        }
    return worst;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim != b.dim) throw input_error("matmul dimension mismatch");
    ComplexMatrix c;
    c.dim = a.dim;
    c.a.assign(a.a.size(), Complex(0, 0));
    for (int i = 0; i < a.dim; ++i)
        for (int k = 0; k < a.dim; ++k) {
            Complex f = a.at(i, k);
            if (f == Complex(0, 0)) continue;
            for (int j = 0; j < a.dim; ++j) c.at(i, j) += f * b.at(k, j);
        }
    return c;
}

ComplexMatrix kronecker(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix c;
    c.dim = a.dim * b.dim;
    c.a.assign(static_cast<std::size_t>(c.dim) * c.dim, Complex(0, 0));
    for (int i = 0; i < a.dim; ++i)
        for (int j = 0; j < a.dim; ++j)
            for (int k = 0; k < b.dim; ++k)
                for (int l = 0; l < b.dim; ++l)
                    c.at(i * b.dim + k, j * b.dim + l) = a.at(i, j) * b.at(k, l);
    return c;
}

namespace {

constexpr double k_model_tol = 1e-10;

// Edge indices into dag.edges() for a node, sorted by the far endpoint.
std::vector<int> in_edges(const Dag& g, VarId v) {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(g.edges().size()); ++i)
        if (g.edges()[static_cast<std::size_t>(i)].child == v) out.push_back(i);
    std::sort(out.begin(), out.end(), [&](int a, int b) {
        return g.edges()[static_cast<std::size_t>(a)].parent <
               g.edges()[static_cast<std::size_t>(b)].parent;
    });
    return out;
}

std::vector<int> out_edges(const Dag& g, VarId v) {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(g.edges().size()); ++i)
        if (g.edges()[static_cast<std::size_t>(i)].parent == v) out.push_back(i);
    std::sort(out.begin(), out.end(), [&](int a, int b) {
        return g.edges()[static_cast<std::size_t>(a)].child <
               g.edges()[static_cast<std::size_t>(b)].child;
    });
    return out;
}

long edge_product(const Dag& g, const std::vector<int>& es) {
    long d = 1;
    for (int e : es) d *= g.edges()[static_cast<std::size_t>(e)].dim;
    return d;
}

long in_dim(const Dag& g, VarId v) { return edge_product(g, in_edges(g, v)); }
long out_dim(const Dag& g, VarId v) { return edge_product(g, out_edges(g, v)); }

// Active wires of an in-flight contraction; wires[0] is most significant.
struct WireState {
    const Dag& g;
    std::vector<int> wires = {};  // edge indices
    StateVector amps{Complex(1, 0)};

    std::size_t total() const { return amps.size(); }

    int wire_dim(int e) const { return g.edges()[static_cast<std::size_t>(e)].dim; }

    void attach(const StateVector& psi, const std::vector<int>& new_wires) {
        StateVector next(amps.size() * psi.size());
        for (std::size_t i = 0; i < amps.size(); ++i)
            for (std::size_t j = 0; j < psi.size(); ++j)
                next[i * psi.size() + j] = amps[i] * psi[j];
        amps = std::move(next);
        wires.insert(wires.end(), new_wires.begin(), new_wires.end());
    }

    // Reorders the active wires; new_order is a permutation of the current
    // wire list.
    void permute(const std::vector<int>& new_order) {
        if (new_order == wires) return;
        std::vector<int> pos_of(new_order.size());
        for (std::size_t i = 0; i < new_order.size(); ++i) {
            auto it = std::find(wires.begin(), wires.end(), new_order[i]);
            if (it == wires.end()) throw input_error("internal wire bookkeeping error");
            pos_of[i] = static_cast<int>(it - wires.begin());
        }
        std::vector<std::size_t> old_stride(wires.size(), 1);
        for (std::size_t i = wires.size(); i-- > 1;)
            old_stride[i - 1] = old_stride[i] * static_cast<std::size_t>(wire_dim(wires[i]));
        StateVector next(amps.size());
        std::vector<int> digits(new_order.size(), 0);
        for (std::size_t ni = 0; ni < next.size(); ++ni) {
            std::size_t rem = ni, old_idx = 0;
            for (std::size_t i = new_order.size(); i-- > 0;) {
                int d = wire_dim(new_order[i]);
                digits[i] = static_cast<int>(rem % static_cast<std::size_t>(d));
                rem /= static_cast<std::size_t>(d);
            }
            for (std::size_t i = 0; i < new_order.size(); ++i)
                old_idx += static_cast<std::size_t>(digits[i]) *
                           old_stride[static_cast<std::size_t>(pos_of[i])];
            next[ni] = amps[old_idx];
        }
        amps = std::move(next);
        wires = new_order;
    }

    // Applies a unitary to the given wires (consumed in that order) and
    // replaces them with the node's outgoing wires.
    void apply(const ComplexMatrix& u, const std::vector<int>& targets,
               const std::vector<int>& replacements) {
        std::vector<int> order;
        for (int w : wires)
            if (std::find(targets.begin(), targets.end(), w) == targets.end()) order.push_back(w);
        order.insert(order.end(), targets.begin(), targets.end());
        permute(order);
        std::size_t d = static_cast<std::size_t>(u.dim);
        std::size_t rest = amps.size() / d;
        StateVector next(amps.size(), Complex(0, 0));
        for (std::size_t r = 0; r < rest; ++r)
            for (std::size_t i = 0; i < d; ++i) {
                Complex acc(0, 0);
                for (std::size_t j = 0; j < d; ++j)
                    acc += u.a[i * d + j] * amps[r * d + j];
                next[r * d + i] = acc;
            }
        amps = std::move(next);
        wires.resize(wires.size() - targets.size());
        wires.insert(wires.end(), replacements.begin(), replacements.end());
    }
};

}  // namespace

OutcomeSpace qcm_space(const Qcm& q) {
    OutcomeSpace space;
    for (VarId v = 0; v < q.dag.size(); ++v) {
        if (q.dag.kind(v) == NodeKind::drain)
            space.sizes.push_back(static_cast<int>(in_dim(q.dag, v)));
        else
            space.sizes.push_back(
                static_cast<int>(q.params.marginals[static_cast<std::size_t>(v)].size()));
    }
    return space;
}

Qcm make_qcm(Dag dag, Ordering ordering, QuantumModelParams params, std::size_t sim_cap) {
    dag.require_quantum_valid();
    {
        auto dims = dag.dimension_violations();
        if (!dims.empty())
            throw validation_error("DAG wire dimensions are not simulable", std::move(dims));
    }
    if (!ordering.consistent_with(dag))
        throw input_error("ordering is not consistent with the DAG's partial order");
    int n = dag.size();
    auto arity = [&](const char* what, std::size_t got) {
        if (got != static_cast<std::size_t>(n))
            throw input_error(std::string(what) + " must have one entry per node");
    };
    arity("preps", params.preps.size());
    arity("gates", params.gates.size());
    arity("drain_labels", params.drain_labels.size());
    arity("marginals", params.marginals.size());

    std::size_t drain_total = 1;
    for (VarId v = 0; v < n; ++v) {
        NodeKind k = dag.kind(v);
        const std::string id = "node " + std::to_string(v);
        if (k == NodeKind::drain) {
            long dim = in_dim(dag, v);
            drain_total *= static_cast<std::size_t>(dim);
            if (!params.marginals[static_cast<std::size_t>(v)].empty())
                throw input_error(id + " is a drain and takes no marginal");
            auto& labels = params.drain_labels[static_cast<std::size_t>(v)];
            if (labels.empty()) {
                labels.resize(static_cast<std::size_t>(dim));
                for (int i = 0; i < dim; ++i) labels[static_cast<std::size_t>(i)] = i;
            }
            if (static_cast<long>(labels.size()) != dim)
                throw input_error(id + " outcome space must match its input dimension " +
                                  std::to_string(dim));
            std::vector<bool> hit(static_cast<std::size_t>(dim), false);
            for (int b : labels) {
                if (b < 0 || b >= dim || hit[static_cast<std::size_t>(b)])
                    throw input_error(id + " drain labels must be a bijection onto basis indices");
                hit[static_cast<std::size_t>(b)] = true;
            }
            continue;
        }
        const auto& marg = params.marginals[static_cast<std::size_t>(v)];
        if (marg.empty()) throw input_error(id + " needs a marginal distribution");
        double sum = 0;
        for (double p : marg) {
            if (p < 0) throw input_error(id + " marginal has a negative entry");
            sum += p;
        }
        if (std::abs(sum - 1.0) > k_model_tol)
            throw input_error(id + " marginal sums to " + std::to_string(sum));
        if (k == NodeKind::exogenous) {
            long dim = out_dim(dag, v);
            const auto& states = params.preps[static_cast<std::size_t>(v)];
            if (states.size() != marg.size())
                throw input_error(id + " needs one preparation per value");
            for (const auto& psi : states) {
                if (static_cast<long>(psi.size()) != dim)
                    throw input_error(id + " preparation has length " +
                                      std::to_string(psi.size()) + ", expected " +
                                      std::to_string(dim));
                double norm = 0;
                for (Complex c : psi) norm += std::norm(c);
                if (std::abs(std::sqrt(norm) - 1.0) > k_model_tol)
                    throw input_error(id + " preparation is not unit norm");
            }
        } else {
            long dim = in_dim(dag, v);
            const auto& gates = params.gates[static_cast<std::size_t>(v)];
            if (gates.size() != marg.size()) throw input_error(id + " needs one gate per value");
            for (const auto& u : gates) {
                if (u.dim != dim)
                    throw input_error(id + " gate has dimension " + std::to_string(u.dim) +
                                      ", expected " + std::to_string(dim));
                if (u.unitarity_defect() > k_model_tol)
                    throw input_error(id + " gate is not unitary");
            }
        }
    }
    if (drain_total > sim_cap)
        throw resource_error("total drain input dimension " + std::to_string(drain_total) +
                             " exceeds the simulator cap of " + std::to_string(sim_cap));
    Qcm q{std::move(dag), std::move(ordering), std::move(params)};
    qcm_space(q).validate();
    return q;
}

JointDistribution evaluate(const Qcm& q) {
    const Dag& g = q.dag;
    int n = g.size();
    OutcomeSpace space = qcm_space(q);
    std::vector<double> table(space.cells(), 0.0);

    std::vector<VarId> setting_nodes, drain_nodes;
    for (VarId v : q.ordering.sequence)
        if (g.kind(v) == NodeKind::drain)
            drain_nodes.push_back(v);
        else
            setting_nodes.push_back(v);
    std::sort(drain_nodes.begin(), drain_nodes.end());

    // Final wire order groups each drain's inputs together, drains ascending.
    std::vector<int> final_wires;
    std::vector<std::vector<int>> drain_wire_groups;
    for (VarId d : drain_nodes) {
        drain_wire_groups.push_back(in_edges(g, d));
        final_wires.insert(final_wires.end(), drain_wire_groups.back().begin(),
                           drain_wire_groups.back().end());
    }
    std::vector<std::vector<int>> label_inverse(static_cast<std::size_t>(n));
    for (VarId d : drain_nodes) {
        const auto& labels = q.params.drain_labels[static_cast<std::size_t>(d)];
        auto& inv = label_inverse[static_cast<std::size_t>(d)];
        inv.resize(labels.size());
        for (std::size_t v = 0; v < labels.size(); ++v)
            inv[static_cast<std::size_t>(labels[v])] = static_cast<int>(v);
    }

    std::vector<int> setting_vals(setting_nodes.size(), 0);
    for (;;) {
        double weight = 1.0;
        for (std::size_t i = 0; i < setting_nodes.size(); ++i)
            weight *= q.params.marginals[static_cast<std::size_t>(setting_nodes[i])]
                                        [static_cast<std::size_t>(setting_vals[i])];
        if (weight > 0) {
            WireState ws{g};
            for (std::size_t i = 0; i < setting_nodes.size(); ++i) {
                VarId v = setting_nodes[i];
                int val = setting_vals[i];
                if (g.kind(v) == NodeKind::exogenous) {
                    ws.attach(q.params.preps[static_cast<std::size_t>(v)]
                                            [static_cast<std::size_t>(val)],
                              out_edges(g, v));
                } else {
                    ws.apply(q.params.gates[static_cast<std::size_t>(v)]
                                           [static_cast<std::size_t>(val)],
                             in_edges(g, v), out_edges(g, v));
                }
            }
            ws.permute(final_wires);

            std::vector<int> vals(static_cast<std::size_t>(n), 0);
            for (std::size_t i = 0; i < setting_nodes.size(); ++i)
                vals[static_cast<std::size_t>(setting_nodes[i])] = setting_vals[i];
            for (std::size_t b = 0; b < ws.amps.size(); ++b) {
                double prob = std::norm(ws.amps[b]);
                if (prob == 0) continue;
                // Split the global basis index into per-drain basis indices.
                std::size_t rem = b;
                for (std::size_t di = drain_nodes.size(); di-- > 0;) {
                    long dim = in_dim(g, drain_nodes[di]);
                    int basis = static_cast<int>(rem % static_cast<std::size_t>(dim));
                    rem /= static_cast<std::size_t>(dim);
                    vals[static_cast<std::size_t>(drain_nodes[di])] =
                        label_inverse[static_cast<std::size_t>(drain_nodes[di])]
                                     [static_cast<std::size_t>(basis)];
                }
                table[space.index_of(vals)] += weight * prob;
            }
        }
        // next setting assignment
        bool carried_out = true;
        std::size_t i = setting_nodes.size();
        while (i-- > 0) {
            int sz = static_cast<int>(
                q.params.marginals[static_cast<std::size_t>(setting_nodes[i])].size());
            if (++setting_vals[i] < sz) {
                carried_out = false;
                break;
            }
            setting_vals[i] = 0;
        }
        if (carried_out) break;
    }

    return JointDistribution(space, std::move(table), 1e-10);
}

Dag classical_limit(const Dag& g) {
    g.require_quantum_valid();
    std::vector<Edge> edges;
    std::vector<Role> roles;
    for (VarId v = 0; v < g.size(); ++v) roles.push_back(g.role(v));
    for (VarId s = 0; s < g.size(); ++s) {
        if (g.kind(s) == NodeKind::drain) continue;
        VarSet desc = descendants(g, VarSet::single(s));
        desc.for_each([&](VarId o) {
            if (g.kind(o) == NodeKind::drain) edges.push_back({s, o, 2});
        });
    }
    return Dag(g.size(), std::move(edges), std::move(roles));
}

std::pair<CausalInputList, ClassicalModelParams> ccm_from_qcm(const Qcm& q, double tol) {
    const Dag& g = q.dag;
    int n = g.size();

    // Basis index of each preparation, and permutation action of each gate.
    std::vector<std::vector<int>> prep_basis(static_cast<std::size_t>(n));
    std::vector<std::vector<std::vector<int>>> gate_perm(static_cast<std::size_t>(n));
    for (VarId v = 0; v < n; ++v) {
        NodeKind k = g.kind(v);
        if (k == NodeKind::exogenous) {
            for (const auto& psi : q.params.preps[static_cast<std::size_t>(v)]) {
                int hit = -1;
                for (std::size_t i = 0; i < psi.size(); ++i) {
                    double mag = std::abs(psi[i]);
                    if (mag > tol) {
                        if (hit >= 0 || std::abs(mag - 1.0) > tol)
                            throw validation_error(
                                "node " + std::to_string(v) +
                                " has a preparation that is not a computational basis state");
                        hit = static_cast<int>(i);
                    }
                }
                prep_basis[static_cast<std::size_t>(v)].push_back(hit);
            }
        } else if (k == NodeKind::intermediate) {
            for (const auto& u : q.params.gates[static_cast<std::size_t>(v)]) {
                std::vector<int> perm(static_cast<std::size_t>(u.dim), -1);
                for (int col = 0; col < u.dim; ++col) {
                    int hit = -1;
                    for (int row = 0; row < u.dim; ++row) {
                        double mag = std::abs(u.at(row, col));
                        if (mag > tol) {
                            if (hit >= 0 || std::abs(mag - 1.0) > tol)
                                throw validation_error("node " + std::to_string(v) +
                                                       " has a gate that is not a permutation");
                            hit = row;
                        }
                    }
                    perm[static_cast<std::size_t>(col)] = hit;
                }
                gate_perm[static_cast<std::size_t>(v)].push_back(std::move(perm));
            }
        }
    }

    Dag gc = classical_limit(g);
    OutcomeSpace space = qcm_space(q);

    // Deterministic propagation of basis digits along the wires.
    auto propagate = [&](const std::vector<int>& setting_vals) {
        std::vector<int> wire_digit(g.edges().size(), 0);
        std::vector<int> drain_val(static_cast<std::size_t>(n), 0);
        auto spread = [&](const Dag& dag, long basis, const std::vector<int>& outs) {
            for (std::size_t i = outs.size(); i-- > 0;) {
                int d = dag.edges()[static_cast<std::size_t>(outs[i])].dim;
                wire_digit[static_cast<std::size_t>(outs[i])] = static_cast<int>(basis % d);
                basis /= d;
            }
        };
        auto gather = [&](const Dag& dag, const std::vector<int>& ins) {
            long basis = 0;
            for (int e : ins)
                basis = basis * dag.edges()[static_cast<std::size_t>(e)].dim +
                        wire_digit[static_cast<std::size_t>(e)];
            return basis;
        };
        for (VarId v : q.ordering.sequence) {
            switch (g.kind(v)) {
                case NodeKind::exogenous:
                    spread(g,
                           prep_basis[static_cast<std::size_t>(v)][static_cast<std::size_t>(
                               setting_vals[static_cast<std::size_t>(v)])],
                           out_edges(g, v));
                    break;
                case NodeKind::intermediate: {
                    long in = gather(g, in_edges(g, v));
                    long out = gate_perm[static_cast<std::size_t>(v)][static_cast<std::size_t>(
                        setting_vals[static_cast<std::size_t>(v)])][static_cast<std::size_t>(in)];
                    spread(g, out, out_edges(g, v));
                    break;
                }
                case NodeKind::drain: {
                    long basis = gather(g, in_edges(g, v));
                    const auto& labels = q.params.drain_labels[static_cast<std::size_t>(v)];
                    for (std::size_t val = 0; val < labels.size(); ++val)
                        if (labels[val] == basis) drain_val[static_cast<std::size_t>(v)] =
                            static_cast<int>(val);
                    break;
                }
            }
        }
        return drain_val;
    };

    ClassicalModelParams params;
    params.space = space;
    params.mechanisms.resize(static_cast<std::size_t>(n));
    for (VarId v = 0; v < n; ++v) {
        if (g.kind(v) != NodeKind::drain) {
            params.mechanisms[static_cast<std::size_t>(v)] =
                NodeMechanism::marginal_node(q.params.marginals[static_cast<std::size_t>(v)]);
            continue;
        }
        std::vector<VarId> pa = gc.parents(v).members();
        std::vector<int> pa_sizes;
        for (VarId p : pa) pa_sizes.push_back(space.sizes[static_cast<std::size_t>(p)]);
        params.mechanisms[static_cast<std::size_t>(v)] = NodeMechanism::deterministic(
            pa_sizes, space.sizes[static_cast<std::size_t>(v)],
            [&](const std::vector<int>& pa_vals) {
                std::vector<int> setting_vals(static_cast<std::size_t>(n), 0);
                for (std::size_t i = 0; i < pa.size(); ++i)
                    setting_vals[static_cast<std::size_t>(pa[i])] = pa_vals[i];
                return propagate(setting_vals)[static_cast<std::size_t>(v)];
            });
    }

    std::vector<VarSet> parents(static_cast<std::size_t>(n));
    for (VarId v = 0; v < n; ++v) parents[static_cast<std::size_t>(v)] = gc.parents(v);
    return {CausalInputList(q.ordering, std::move(parents)), std::move(params)};
}

}  // namespace qcausal
