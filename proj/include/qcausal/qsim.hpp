#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "qcausal/dag.hpp"
#include "qcausal/dist.hpp"
#include "qcausal/types.hpp"

namespace qcausal {

using Complex = std::complex<double>;
using StateVector = std::vector<Complex>;

// Dense square matrix, row-major.
struct ComplexMatrix {
    int dim = 0;
    std::vector<Complex> a;

    static ComplexMatrix identity(int dim);
    Complex& at(int r, int c) { return a[static_cast<std::size_t>(r) * dim + c]; }
    Complex at(int r, int c) const { return a[static_cast<std::size_t>(r) * dim + c]; }
    double unitarity_defect() const;  // max |U* U - I|
};

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kronecker(const ComplexMatrix& a, const ComplexMatrix& b);

// Everything needed to read a DAG as a quantum network: pure-state
// preparations per exogenous value, unitaries per intermediate value,
// basis labels per drain, and independent marginals for the settings.
struct QuantumModelParams {
    std::vector<std::vector<StateVector>> preps;     // [node][value] -> state on the out-space
    std::vector<std::vector<ComplexMatrix>> gates;   // [node][value] -> unitary on the in-space
    std::vector<std::vector<int>> drain_labels;      // [node]: value -> basis index; empty = identity
    std::vector<std::vector<double>> marginals;      // [node] for exogenous/intermediate nodes

    static QuantumModelParams sized(int n) {
        QuantumModelParams p;
        p.preps.resize(static_cast<std::size_t>(n));
        p.gates.resize(static_cast<std::size_t>(n));
        p.drain_labels.resize(static_cast<std::size_t>(n));
        p.marginals.resize(static_cast<std::size_t>(n));
        return p;
    }
};

struct Qcm {
    Dag dag;
    Ordering ordering;
    QuantumModelParams params;
};

// Validates dimensions, normalization (1e-10), unitarity (1e-10), label
// bijections and the simulator cap, then assembles the model.
Qcm make_qcm(Dag dag, Ordering ordering, QuantumModelParams params,
             std::size_t sim_cap = limits::sim_cap);

// Outcome-space sizes implied by the model: declared marginal arity for
// settings, input dimension for drains.
OutcomeSpace qcm_space(const Qcm& q);

// Exact joint distribution: product of setting marginals times the
// measured-outcome conditional obtained by state-vector contraction.
JointDistribution evaluate(const Qcm& q);

// Rewires every setting directly to each drain it reaches and drops
// setting-to-setting edges, leaving a bipartite setting -> outcome DAG.
Dag classical_limit(const Dag& g);

// For models whose preparations are basis states and whose gates are
// permutations (within tol), returns the equivalent classical model on the
// classical-limit DAG.
std::pair<CausalInputList, ClassicalModelParams> ccm_from_qcm(const Qcm& q, double tol = 1e-10);

}  // namespace qcausal
