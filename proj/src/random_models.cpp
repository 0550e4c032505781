#include "qcausal/random_models.hpp"

#include <algorithm>
#include <cmath>

namespace qcausal {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

Rng Rng::stream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix64(seed + 0x9e3779b97f4a7c15ull * (stream + 1)));
}

std::uint64_t Rng::next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix64(state_);
}

double Rng::next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::next_normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * next_double() - 1.0;
        v = 2.0 * next_double() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
}

int Rng::next_int(int n) {
    if (n <= 0) throw input_error("next_int needs a positive bound");
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
}

RandomDagResult random_dag(Rng& rng, int n, double edge_prob) {
    std::vector<VarId> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i)
        std::swap(order[static_cast<std::size_t>(i)],
                  order[static_cast<std::size_t>(rng.next_int(i + 1))]);
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.next_double() < edge_prob)
                edges.push_back({order[static_cast<std::size_t>(i)],
                                 order[static_cast<std::size_t>(j)], 2});
    std::vector<VarSet> children(static_cast<std::size_t>(n));
    std::vector<VarSet> parents(static_cast<std::size_t>(n));
    for (const Edge& e : edges) {
        children[static_cast<std::size_t>(e.parent)] |= VarSet::single(e.child);
        parents[static_cast<std::size_t>(e.child)] |= VarSet::single(e.parent);
    }
    std::vector<Role> roles;
    for (int v = 0; v < n; ++v)
        roles.push_back(children[static_cast<std::size_t>(v)].empty() &&
                                !parents[static_cast<std::size_t>(v)].empty()
                            ? Role::outcome
                            : Role::setting);
    Ordering ord;
    ord.sequence = order;
    return {Dag(n, std::move(edges), std::move(roles)), std::move(ord)};
}

Dag random_quantum_dag(Rng& rng, int max_nodes) {
    if (max_nodes < 2) throw input_error("a quantum network needs at least two nodes");
    for (int attempt = 0; attempt < 1000; ++attempt) {
        int n = 2 + rng.next_int(max_nodes - 1);
        int n_exo = 1 + rng.next_int(std::max(1, (n - 1) / 2 + 1));
        n_exo = std::min(n_exo, n - 1);
        int n_drain = 1 + rng.next_int(n - n_exo);
        int n_int = n - n_exo - n_drain;

        std::vector<int> open;  // emitter id per dangling wire
        std::vector<Edge> edges;
        std::vector<Role> roles;
        int id = 0;
        for (int i = 0; i < n_exo; ++i, ++id) {
            int wires = 1 + rng.next_int(2);
            for (int w = 0; w < wires; ++w) open.push_back(id);
            roles.push_back(Role::setting);
        }
        bool fail = false;
        for (int i = 0; i < n_int && !fail; ++i, ++id) {
            std::vector<int> emitters = open;
            std::sort(emitters.begin(), emitters.end());
            emitters.erase(std::unique(emitters.begin(), emitters.end()), emitters.end());
            if (emitters.empty()) {
                fail = true;
                break;
            }
            int k = 1 + rng.next_int(std::min<int>(2, static_cast<int>(emitters.size())));
            for (int j = static_cast<int>(emitters.size()) - 1; j > 0; --j)
                std::swap(emitters[static_cast<std::size_t>(j)],
                          emitters[static_cast<std::size_t>(rng.next_int(j + 1))]);
            for (int j = 0; j < k; ++j) {
                int src = emitters[static_cast<std::size_t>(j)];
                open.erase(std::find(open.begin(), open.end(), src));
                edges.push_back({src, id, 2});
                open.push_back(id);
            }
            roles.push_back(Role::setting);
        }
        if (fail || static_cast<int>(open.size()) < n_drain) continue;

        // Deal the remaining wires into drains, distinct emitters per drain.
        for (int j = static_cast<int>(open.size()) - 1; j > 0; --j)
            std::swap(open[static_cast<std::size_t>(j)],
                      open[static_cast<std::size_t>(rng.next_int(j + 1))]);
        std::vector<std::vector<int>> drain_src(static_cast<std::size_t>(n_drain));
        for (std::size_t w = 0; w < open.size() && !fail; ++w) {
            int src = open[w];
            int start = w < static_cast<std::size_t>(n_drain) ? static_cast<int>(w)
                                                              : rng.next_int(n_drain);
            bool placed = false;
            for (int probe = 0; probe < n_drain; ++probe) {
                int d = (start + probe) % n_drain;
                auto& srcs = drain_src[static_cast<std::size_t>(d)];
                if (std::find(srcs.begin(), srcs.end(), src) == srcs.end()) {
                    srcs.push_back(src);
                    placed = true;
                    break;
                }
            }
            if (!placed) fail = true;
        }
        if (fail) continue;
        for (int d = 0; d < n_drain; ++d, ++id) {
            if (drain_src[static_cast<std::size_t>(d)].empty()) {
                fail = true;
                break;
            }
            for (int src : drain_src[static_cast<std::size_t>(d)]) edges.push_back({src, id, 2});
            roles.push_back(Role::outcome);
        }
        if (fail) continue;
        Dag g(n, std::move(edges), std::move(roles));
        if (g.quantum_valid()) return g;
    }
    throw error("random quantum DAG generation failed to converge");
}

ClassicalModelParams random_ccm_params(Rng& rng, const CausalInputList& list, int max_size) {
    int n = list.size();
    ClassicalModelParams params;
    params.space.sizes.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v)
        params.space.sizes[static_cast<std::size_t>(v)] = 2 + rng.next_int(max_size - 1);
    params.mechanisms.resize(static_cast<std::size_t>(n));
    for (VarId v = 0; v < n; ++v) {
        std::size_t rows = 1;
        list.parents()[static_cast<std::size_t>(v)].for_each(
            [&](VarId p) { rows *= static_cast<std::size_t>(params.space.sizes[p]); });
        NodeMechanism mech;
        mech.rows.resize(rows);
        int size = params.space.sizes[static_cast<std::size_t>(v)];
        for (auto& row : mech.rows) {
            row.resize(static_cast<std::size_t>(size));
            double sum = 0;
            for (double& q : row) {
                q = 0.05 + rng.next_double();
                sum += q;
            }
            for (double& q : row) q /= sum;
        }
        params.mechanisms[static_cast<std::size_t>(v)] = std::move(mech);
    }
    return params;
}

StateVector random_state(Rng& rng, int dim) {
    StateVector psi(static_cast<std::size_t>(dim));
    double norm = 0;
    for (auto& c : psi) {
        c = Complex(rng.next_normal(), rng.next_normal());
        norm += std::norm(c);
    }
    norm = std::sqrt(norm);
    for (auto& c : psi) c /= norm;
    return psi;
}

ComplexMatrix random_unitary(Rng& rng, int dim) {
    ComplexMatrix m;
    m.dim = dim;
    m.a.resize(static_cast<std::size_t>(dim) * dim);
    for (auto& c : m.a) c = Complex(rng.next_normal(), rng.next_normal());
    // Two rounds of modified Gram-Schmidt over the columns.
    for (int round = 0; round < 2; ++round) {
        for (int j = 0; j < dim; ++j) {
            for (int k = 0; k < j; ++k) {
                Complex dot(0, 0);
                for (int r = 0; r < dim; ++r) dot += std::conj(m.at(r, k)) * m.at(r, j);
                for (int r = 0; r < dim; ++r) m.at(r, j) -= dot * m.at(r, k);
            }
            double norm = 0;
            for (int r = 0; r < dim; ++r) norm += std::norm(m.at(r, j));
            norm = std::sqrt(norm);
            for (int r = 0; r < dim; ++r) m.at(r, j) /= norm;
        }
    }
    return m;
}

QuantumModelParams random_qcm_params(Rng& rng, const Dag& g) {
    g.require_quantum_valid();
    QuantumModelParams params = QuantumModelParams::sized(g.size());
    for (VarId v = 0; v < g.size(); ++v) {
        NodeKind k = g.kind(v);
        if (k == NodeKind::drain) continue;
        long dim = 1;
        if (k == NodeKind::exogenous) {
            g.children(v).for_each([&](VarId c) { dim *= g.edge_dim(v, c); });
            for (int val = 0; val < 2; ++val)
                params.preps[static_cast<std::size_t>(v)].push_back(
                    random_state(rng, static_cast<int>(dim)));
        } else {
            g.parents(v).for_each([&](VarId p) { dim *= g.edge_dim(p, v); });
            for (int val = 0; val < 2; ++val)
                params.gates[static_cast<std::size_t>(v)].push_back(
                    random_unitary(rng, static_cast<int>(dim)));
        }
        double a = 0.2 + rng.next_double();
        double b = 0.2 + rng.next_double();
        params.marginals[static_cast<std::size_t>(v)] = {a / (a + b), b / (a + b)};
    }
    return params;
}

}  // namespace qcausal
