#pragma once

#include "qcausal/dag.hpp"
#include "qcausal/scenarios.hpp"

namespace qcausal::testing {

// Five-node example graph: X -> V, X -> Y, V -> W, V -> Z, Y -> Z.
// Ids: X=0, V=1, W=2, Y=3, Z=4.
inline constexpr VarId fx = 0, fv = 1, fw = 2, fy = 3, fz = 4;
inline Dag chain_fork_dag() {
    std::vector<Edge> edges = {{fx, fv, 2}, {fx, fy, 2}, {fv, fw, 2}, {fv, fz, 2}, {fy, fz, 2}};
    std::vector<Role> roles = {Role::setting, Role::setting, Role::outcome, Role::setting,
                               Role::outcome};
    return Dag(5, std::move(edges), std::move(roles));
}
inline Ordering chain_fork_order() {
    Ordering o;
    o.sequence = {fx, fv, fw, fy, fz};
    return o;
}

// Complete three-node graph: Z -> Y, Z -> X, Y -> X. Ids: X=0, Y=1, Z=2.
inline Dag complete3_dag() {
    std::vector<Edge> edges = {{2, 1, 2}, {2, 0, 2}, {1, 0, 2}};
    std::vector<Role> roles = {Role::outcome, Role::setting, Role::setting};
    return Dag(3, std::move(edges), std::move(roles));
}

// Hidden-common-cause network: S -> A, lambda -> A, lambda -> B, T -> B,
// with the shared scenario ids (A=0, B=1, S=2, T=3, lambda=4).
inline Dag bell_dag() { return bell_common_cause_dag(); }

}  // namespace qcausal::testing
