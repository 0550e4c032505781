#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "qcausal/ci.hpp"
#include "qcausal/dag.hpp"
#include "qcausal/types.hpp"

namespace qcausal {

// Per-variable outcome-space cardinalities. Indexing is variable-major with
// the first variable most significant.
struct OutcomeSpace {
    std::vector<int> sizes;

    int num_vars() const { return static_cast<int>(sizes.size()); }
    std::size_t cells() const;
    std::size_t index_of(const std::vector<int>& values) const;
    std::vector<int> decode(std::size_t index) const;
    void validate(std::size_t cap = limits::table_cap) const;
};

// Exact dense probability table over finite outcome spaces.
class JointDistribution {
  public:
    JointDistribution(OutcomeSpace space, std::vector<double> table, double norm_tol = 1e-12,
                      std::size_t cap = limits::table_cap);

    const OutcomeSpace& space() const { return space_; }
    int num_vars() const { return space_.num_vars(); }
    std::size_t cells() const { return table_.size(); }
    double cell(std::size_t i) const { return table_.at(i); }
    double at(const std::vector<int>& values) const { return table_[space_.index_of(values)]; }
    const std::vector<double>& table() const { return table_; }

  private:
    OutcomeSpace space_;
    std::vector<double> table_;
};

// Sums out everything outside keep; the result is over the kept variables in
// ascending original index order.
JointDistribution marginal(const JointDistribution& p, VarSet keep);

// P(x,y|z) == P(x|z) P(y|z) within tol on every cell, for every conditioning
// context with mass above tol. Zero-mass contexts are skipped.
bool is_ci(const JointDistribution& p, VarSet x, VarSet y, VarSet z, double tol);

// All CI triples passing is_ci. OpenMP over the linearized triple space.
CiSet all_ci(const JointDistribution& p, double tol, int cap = limits::enum_cap);
CiSet all_ci_serial(const JointDistribution& p, double tol, int cap = limits::enum_cap);

// Per-variable mechanism: a conditional probability table with one row per
// assignment of the parents (ascending id, first parent most significant).
struct NodeMechanism {
    std::vector<std::vector<double>> rows;  // rows[pa_index][value]

    static NodeMechanism marginal_node(std::vector<double> probs);
    // Deterministic function of the parent values.
    static NodeMechanism deterministic(const std::vector<int>& pa_sizes, int size,
                                       const std::function<int(const std::vector<int>&)>& f);
    // Deterministic function of parents and an independent error variable.
    static NodeMechanism noisy(const std::vector<int>& pa_sizes, int size,
                               const std::vector<double>& error_dist,
                               const std::function<int(const std::vector<int>&, int)>& f);
};

struct ClassicalModelParams {
    OutcomeSpace space;                     // per-variable cardinalities
    std::vector<NodeMechanism> mechanisms;  // indexed by VarId
};

// Ordered generation: each variable conditioned on its parents only.
JointDistribution generate_ccm(const CausalInputList& list, const ClassicalModelParams& params);

}  // namespace qcausal
