#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "qcausal/dist.hpp"
#include "qcausal/qsim.hpp"

namespace qcausal {

struct MapVerdict {
    bool imap = false;
    bool perfect = false;
    // A relation from the symmetric difference: graph-implied but failing in
    // the distribution when imap is false, otherwise an extra independence
    // the graph does not imply.
    std::optional<CiRelation> witness;
};

enum class SepRule { d, q };

// imap iff closure(graph CI set) is contained in the distribution's CI set;
// perfect iff they are equal.
MapVerdict check_map(const Dag& g, const JointDistribution& p, SepRule rule, double tol,
                     int cap = limits::enum_cap);

// Variable ids shared by the built-in scenarios.
inline constexpr VarId bell_a = 0;
inline constexpr VarId bell_b = 1;
inline constexpr VarId bell_s = 2;
inline constexpr VarId bell_t = 3;
inline constexpr VarId bell_lambda = 4;

// Rotation angles maximizing the CHSH combination |E00 + E01 + E10 - E11|
// for the two-qubit source used by bell_scenario.
inline constexpr std::array<double, 4> bell_optimal_angles = {0.0, 0.78539816339744831,
                                                              0.39269908169872415,
                                                              -0.39269908169872415};

struct BellScenario {
    Qcm qcm;
    JointDistribution joint;  // over (A, B, S, T, lambda)
};

// Source -> per-wire rotation -> measurement network. The source prepares a
// two-qubit state per lambda value; S and T rotate their wire by an angle
// chosen by the setting value; A and B read the wires in the fixed basis.
// With the default single-valued lambda the source emits one maximally
// entangled pair.
BellScenario bell_scenario(std::array<double, 4> angles = bell_optimal_angles,
                           int lambda_values = 1);

// The same five variables wired as the hidden-common-cause DAG: lambda and
// the settings feed the outcomes directly.
Dag bell_common_cause_dag();

// |E(0,0)+E(0,1)+E(1,0)-E(1,1)| with E(s,t) = sum (-1)^(a xor b) P(a,b|s,t).
// Expects four binary variables ordered (A, B, S, T).
double chsh(const JointDistribution& p);

// P(A,B,S,T) with uniform independent settings and the nonlocal-box
// conditional: outcomes anticorrelate exactly when both settings are 1.
JointDistribution pr_box();

struct FinetuneResult {
    Dag dag;          // complete three-node DAG over (X, Y, Z)
    JointDistribution joint;
    MapVerdict verdict;
};

// Deterministic chain model where the mechanism constant k cancels the
// noise value, hiding the Y->X edge: Z uniform on {1,2}, Y = Z + 1,
// X = Y + Z - k. Values are stored as indices into the shifted value sets.
FinetuneResult finetune_demo(int k = 1);

struct ProbeReport {
    int draws = 0;
    std::uint64_t seed = 0;
    double max_chsh = 0;
    int argmax_draw = -1;
    bool within_bound = false;  // max <= 2*sqrt(2) + 1e-6
};

// Samples random models on the entangled-source network and records the
// largest CHSH value reached; quantum mechanics caps it at 2*sqrt(2).
ProbeReport no_qcm_for_prbox_probe(int draws, std::uint64_t seed);

std::string format_probe_report(const ProbeReport& r);

}  // namespace qcausal
