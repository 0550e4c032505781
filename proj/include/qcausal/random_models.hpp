#pragma once

#include <cstdint>

#include "qcausal/dag.hpp"
#include "qcausal/dist.hpp"
#include "qcausal/qsim.hpp"

namespace qcausal {

// Small deterministic generator (splitmix64 core) so seeded runs reproduce
// byte-identically across platforms and thread schedules.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Independent stream derived from (seed, stream); used to make parallel
    // draws schedule-independent.
    static Rng stream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    double next_double();  // [0, 1)
    double next_normal();
    int next_int(int n);  // [0, n)

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0;
};

struct RandomDagResult {
    Dag dag;
    Ordering ordering;
};

// Uniform random topological order, each forward pair wired with edge_prob.
RandomDagResult random_dag(Rng& rng, int n, double edge_prob = 0.5);

// Circuit-style generator: sources emit qubit wires, intermediate gates
// consume and re-emit them, drains absorb what remains. All edges are
// qubit-dimensional and node ids follow a topological creation order.
Dag random_quantum_dag(Rng& rng, int max_nodes);

// Random strictly positive conditional tables over the list's parent sets.
ClassicalModelParams random_ccm_params(Rng& rng, const CausalInputList& list, int max_size = 3);

// Random pure-state preparations and near-Haar unitaries (orthonormalized
// complex Gaussian matrices), binary settings, strictly positive marginals.
QuantumModelParams random_qcm_params(Rng& rng, const Dag& g);

ComplexMatrix random_unitary(Rng& rng, int dim);
StateVector random_state(Rng& rng, int dim);

}  // namespace qcausal
