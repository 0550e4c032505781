#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "qcausal/qsim.hpp"
#include "qcausal/random_models.hpp"
#include "qcausal/scenarios.hpp"

using namespace qcausal;
using namespace qcausal::testing;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Qcm single_wire_qcm(StateVector prep) {
    Dag g(2, {{0, 1, 2}}, {Role::setting, Role::outcome});
    QuantumModelParams params = QuantumModelParams::sized(2);
    params.preps[0] = {std::move(prep)};
    params.marginals[0] = {1.0};
    return make_qcm(std::move(g), Ordering::identity(2), std::move(params));
}

ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
    ComplexMatrix m;
    m.dim = 2;
    m.a = {a, b, c, d};
    return m;
}

ComplexMatrix cnot() {
    ComplexMatrix m = ComplexMatrix::identity(4);
    std::swap(m.a[2 * 4 + 2], m.a[3 * 4 + 2]);
    std::swap(m.a[2 * 4 + 3], m.a[3 * 4 + 3]);
    return m;
}

ComplexMatrix hadamard() {
    return mat2(kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2);
}

// Test-side contraction: applies a two-qubit gate to slots (hi, lo) of a
// three-qubit register with qubit 0 most significant; hi is the gate's more
// significant input.
StateVector apply_two_qubit(const StateVector& in, const ComplexMatrix& u, int hi, int lo) {
    StateVector out(8, Complex(0, 0));
    auto bit = [](std::size_t idx, int q) { return static_cast<int>((idx >> (2 - q)) & 1); };
    for (std::size_t i = 0; i < 8; ++i) {
        int a = bit(i, hi), b = bit(i, lo);
        for (int a2 = 0; a2 < 2; ++a2)
            for (int b2 = 0; b2 < 2; ++b2) {
                std::size_t j = i;
                j &= ~((std::size_t{1} << (2 - hi)) | (std::size_t{1} << (2 - lo)));
                j |= static_cast<std::size_t>(a2) << (2 - hi);
                j |= static_cast<std::size_t>(b2) << (2 - lo);
                out[j] += u.at(a2 * 2 + b2, a * 2 + b) * in[i];
            }
    }
    return out;
}

}  // namespace

TEST_CASE("single preparation measured directly") {
    JointDistribution p = evaluate(single_wire_qcm({1, 0}));
    CHECK(p.at({0, 0}) == doctest::Approx(1.0).epsilon(1e-12));
    JointDistribution plus = evaluate(single_wire_qcm({kInvSqrt2, kInvSqrt2}));
    CHECK(plus.at({0, 0}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(plus.at({0, 1}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("model validation") {
    Dag g(2, {{0, 1, 2}}, {Role::setting, Role::outcome});
    QuantumModelParams p = QuantumModelParams::sized(2);
    p.preps[0] = {{1, 1}};  // not unit norm
    p.marginals[0] = {1.0};
    CHECK_THROWS_AS(make_qcm(g, Ordering::identity(2), p), input_error);
    p.preps[0] = {{1, 0, 0, 0}};  // wrong length
    CHECK_THROWS_AS(make_qcm(g, Ordering::identity(2), p), input_error);
    p.preps[0] = {{1, 0}};
    p.marginals[0] = {0.7, 0.7};  // not normalized
    CHECK_THROWS_AS(make_qcm(g, Ordering::identity(2), p), input_error);

    Dag chain(3, {{0, 1, 2}, {1, 2, 2}}, {Role::setting, Role::setting, Role::outcome});
    QuantumModelParams q = QuantumModelParams::sized(3);
    q.preps[0] = {{1, 0}};
    q.marginals[0] = {1.0};
    q.gates[1] = {mat2(1, 0, 0, 2)};  // not unitary
    q.marginals[1] = {1.0};
    CHECK_THROWS_AS(make_qcm(chain, Ordering::identity(3), q), input_error);
    q.gates[1] = {hadamard()};
    CHECK_NOTHROW(make_qcm(chain, Ordering::identity(3), q));

    // Drains take no marginal and their labels must be a bijection.
    QuantumModelParams r = QuantumModelParams::sized(2);
    r.preps[0] = {{1, 0}};
    r.marginals[0] = {1.0};
    r.marginals[1] = {1.0};
    CHECK_THROWS_AS(make_qcm(g, Ordering::identity(2), r), input_error);
    r.marginals[1] = {};
    r.drain_labels[1] = {0, 0};
    CHECK_THROWS_AS(make_qcm(g, Ordering::identity(2), r), input_error);
    r.drain_labels[1] = {1, 0};
    CHECK_NOTHROW(make_qcm(g, Ordering::identity(2), r));

    // Orderings must respect the edges.
    Ordering backwards;
    backwards.sequence = {1, 0};
    r.drain_labels[1] = {};
    CHECK_THROWS_AS(make_qcm(g, backwards, r), input_error);
}

TEST_CASE("drain labels relabel the readout") {
    Dag g(2, {{0, 1, 2}}, {Role::setting, Role::outcome});
    QuantumModelParams params = QuantumModelParams::sized(2);
    params.preps[0] = {{1, 0}};
    params.marginals[0] = {1.0};
    params.drain_labels[1] = {1, 0};  // value 0 names basis index 1
    JointDistribution p = evaluate(make_qcm(g, Ordering::identity(2), params));
    CHECK(p.at({0, 1}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate preparations are allowed") {
    Dag g(2, {{0, 1, 2}}, {Role::setting, Role::outcome});
    QuantumModelParams params = QuantumModelParams::sized(2);
    params.preps[0] = {{1, 0}, {1, 0}};  // two values, same state
    params.marginals[0] = {0.25, 0.75};
    JointDistribution p = evaluate(make_qcm(g, Ordering::identity(2), params));
    CHECK(p.at({0, 0}) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(p.at({1, 0}) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("entangled source matches the closed-form correlator") {
    BellScenario bell = bell_scenario();
    JointDistribution p = marginal(bell.joint, VarSet::of({bell_a, bell_b, bell_s, bell_t}));
    const auto& angles = bell_optimal_angles;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int s = 0; s < 2; ++s)
                for (int t = 0; t < 2; ++t) {
                    double corr = std::cos(2.0 * (angles[s] - angles[2 + t]));
                    double expected = (1.0 + ((a ^ b) ? -corr : corr)) / 16.0;
                    CHECK(p.at({a, b, s, t}) == doctest::Approx(expected).epsilon(1e-10));
                }
}

TEST_CASE("three-qubit network matches an independent contraction") {
    // X and Y feed a CNOT; one output is read out, the other meets the
    // ancilla Z inside a chosen two-qubit gate before the final readouts.
    // Ids: X=0, Y=1, Z=2, S=3, U=4, T=5, V=6, W=7.
    std::vector<Edge> edges = {{0, 3, 2}, {1, 3, 2}, {3, 4, 2}, {3, 5, 2},
                               {2, 5, 2}, {5, 6, 2}, {5, 7, 2}};
    std::vector<Role> roles(8, Role::setting);
    roles[4] = roles[6] = roles[7] = Role::outcome;
    Dag g(8, std::move(edges), std::move(roles));

    const double al = 0.3;
    StateVector psi0 = {std::cos(al), std::sin(al)};
    StateVector psi1 = {-std::sin(al), std::cos(al)};
    StateVector phi = {kInvSqrt2, Complex(0, kInvSqrt2)};
    ComplexMatrix cz = ComplexMatrix::identity(4);
    cz.at(3, 3) = -1;
    ComplexMatrix rot = mat2(std::cos(0.5), std::sin(0.5), -std::sin(0.5), std::cos(0.5));
    std::vector<ComplexMatrix> t_gates = {cnot(), matmul(kronecker(hadamard(), rot), cz),
                                          ComplexMatrix::identity(4)};
    // Make the third one a swap.
    t_gates[2].at(1, 1) = t_gates[2].at(2, 2) = 0;
    t_gates[2].at(1, 2) = t_gates[2].at(2, 1) = 1;

    QuantumModelParams params = QuantumModelParams::sized(8);
    params.preps[0] = {psi0, psi1};
    params.marginals[0] = {0.7, 0.3};
    params.preps[1] = {psi0, psi1};
    params.marginals[1] = {0.6, 0.4};
    params.preps[2] = {phi};
    params.marginals[2] = {1.0};
    params.gates[3] = {cnot()};
    params.marginals[3] = {1.0};
    params.gates[5] = t_gates;
    params.marginals[5] = {0.5, 0.3, 0.2};

    Ordering ord;
    ord.sequence = {0, 1, 2, 3, 5, 4, 6, 7};
    JointDistribution p = evaluate(make_qcm(g, ord, params));

    // Oracle: dense three-qubit register ordered (X, Y, Z).
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int t = 0; t < 3; ++t) {
                StateVector reg(8, Complex(0, 0));
                const StateVector& sx = x ? psi1 : psi0;
                const StateVector& sy = y ? psi1 : psi0;
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j)
                        for (int k = 0; k < 2; ++k)
                            reg[static_cast<std::size_t>(i * 4 + j * 2 + k)] =
                                sx[static_cast<std::size_t>(i)] *
                                sy[static_cast<std::size_t>(j)] *
                                phi[static_cast<std::size_t>(k)];
                reg = apply_two_qubit(reg, cnot(), 0, 1);       // S on (X, Y)
                reg = apply_two_qubit(reg, t_gates[static_cast<std::size_t>(t)], 2, 1);  // T on (Z, S-out)
                double wx = params.marginals[0][static_cast<std::size_t>(x)];
                double wy = params.marginals[1][static_cast<std::size_t>(y)];
                double wt = params.marginals[5][static_cast<std::size_t>(t)];
                for (int u = 0; u < 2; ++u)
                    for (int v = 0; v < 2; ++v)
                        for (int w = 0; w < 2; ++w) {
                            // U reads the X slot, V the Z slot, W the Y slot.
                            double amp2 = std::norm(reg[static_cast<std::size_t>(u * 4 + w * 2 + v)]);
                            CHECK(p.at({x, y, 0, 0, u, t, v, w}) ==
                                  doctest::Approx(wx * wy * wt * amp2).epsilon(1e-10));
                        }
            }
}

TEST_CASE("evaluation conserves probability and the simulator cap holds") {
    Rng rng(301);
    for (int trial = 0; trial < 25; ++trial) {
        Dag g = random_quantum_dag(rng, 5);
        Qcm q = make_qcm(g, topological_ordering(g), random_qcm_params(rng, g));
        JointDistribution p = evaluate(q);
        double sum = 0;
        for (std::size_t i = 0; i < p.cells(); ++i) sum += p.cell(i);
        CHECK(std::abs(sum - 1.0) <= 1e-10);
    }
}

TEST_CASE("declared setting marginals are recovered") {
    Rng rng(302);
    for (int trial = 0; trial < 10; ++trial) {
        Dag g = random_quantum_dag(rng, 5);
        Qcm q = make_qcm(g, topological_ordering(g), random_qcm_params(rng, g));
        JointDistribution p = evaluate(q);
        for (VarId v = 0; v < g.size(); ++v) {
            if (g.kind(v) == NodeKind::drain) continue;
            JointDistribution m = marginal(p, VarSet::single(v));
            const auto& declared = q.params.marginals[static_cast<std::size_t>(v)];
            for (std::size_t val = 0; val < declared.size(); ++val)
                CHECK(m.at({static_cast<int>(val)}) ==
                      doctest::Approx(declared[val]).epsilon(1e-10));
        }
    }
}

TEST_CASE("classical limit rewires settings to their reachable drains") {
    // Chain S -> U -> O becomes {S -> O, U -> O}.
    Dag chain(3, {{0, 1, 2}, {1, 2, 2}}, {Role::setting, Role::setting, Role::outcome});
    Dag lim = classical_limit(chain);
    CHECK(lim.has_edge(0, 2));
    CHECK(lim.has_edge(1, 2));
    CHECK(!lim.has_edge(0, 1));
    CHECK(lim.edges().size() == 2);

    // A bipartite network is already a fixed point.
    Dag flat(2, {{0, 1, 2}}, {Role::setting, Role::outcome});
    CHECK(classical_limit(flat).edges().size() == 1);

    // The measurement network collapses to the hidden-common-cause shape.
    BellScenario bell = bell_scenario();
    Dag lim2 = classical_limit(bell.qcm.dag);
    CHECK(lim2.has_edge(bell_lambda, bell_a));
    CHECK(lim2.has_edge(bell_lambda, bell_b));
    CHECK(lim2.has_edge(bell_s, bell_a));
    CHECK(lim2.has_edge(bell_t, bell_b));
    CHECK(lim2.edges().size() == 4);

    // Idempotence.
    Dag lim3 = classical_limit(lim2);
    CHECK(lim3.edges().size() == lim2.edges().size());
}

TEST_CASE("classical limit preserves setting-to-drain reachability") {
    Rng rng(303);
    for (int trial = 0; trial < 30; ++trial) {
        Dag g = random_quantum_dag(rng, 6);
        Dag lim = classical_limit(g);
        VarSet drains = g.drains();
        for (VarId s = 0; s < g.size(); ++s) {
            if (g.kind(s) == NodeKind::drain) continue;
            CHECK((descendants(g, VarSet::single(s)) & drains) ==
                  (descendants(lim, VarSet::single(s)) & drains));
        }
    }
}

TEST_CASE("classical models extract to an equivalent classical form") {
    // S chooses a bit, an intermediate applies identity or flip, the drain
    // reads it: the extracted function is exclusive-or.
    Dag g(3, {{0, 1, 2}, {1, 2, 2}}, {Role::setting, Role::setting, Role::outcome});
    QuantumModelParams params = QuantumModelParams::sized(3);
    params.preps[0] = {{1, 0}, {0, 1}};
    params.marginals[0] = {0.5, 0.5};
    params.gates[1] = {ComplexMatrix::identity(2), mat2(0, 1, 1, 0)};
    params.marginals[1] = {0.25, 0.75};
    Qcm q = make_qcm(g, Ordering::identity(3), params);
    auto [list, cparams] = ccm_from_qcm(q);
    CHECK(list.parents()[2] == VarSet::of({0, 1}));
    JointDistribution generated = generate_ccm(list, cparams);
    JointDistribution simulated = evaluate(q);
    for (std::size_t i = 0; i < generated.cells(); ++i)
        CHECK(std::abs(generated.cell(i) - simulated.cell(i)) <= 1e-10);
    // Spot check the mechanism: value = s xor u.
    const auto& rows = cparams.mechanisms[2].rows;
    CHECK(rows[0][0] == 1.0);  // s=0, u=identity -> 0
    CHECK(rows[1][1] == 1.0);  // s=0, u=flip -> 1
    CHECK(rows[2][1] == 1.0);  // s=1, u=identity -> 1
    CHECK(rows[3][0] == 1.0);  // s=1, u=flip -> 0
}

TEST_CASE("identity-only network reproduces the preparation label") {
    Dag g(2, {{0, 1, 2}}, {Role::setting, Role::outcome});
    QuantumModelParams params = QuantumModelParams::sized(2);
    params.preps[0] = {{1, 0}, {0, 1}};
    params.marginals[0] = {0.5, 0.5};
    Qcm q = make_qcm(g, Ordering::identity(2), params);
    auto [list, cparams] = ccm_from_qcm(q);
    JointDistribution p = generate_ccm(list, cparams);
    CHECK(p.at({0, 0}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.at({1, 1}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.at({0, 1}) == 0.0);
}

TEST_CASE("entangling preparations are rejected by the classical extraction") {
    BellScenario bell = bell_scenario();
    CHECK_THROWS_AS(ccm_from_qcm(bell.qcm), validation_error);
}

TEST_CASE("random classical-subspace models match their extraction") {
    Rng rng(305);
    for (int trial = 0; trial < 20; ++trial) {
        Dag g = random_quantum_dag(rng, 5);
        QuantumModelParams params = QuantumModelParams::sized(g.size());
        for (VarId v = 0; v < g.size(); ++v) {
            NodeKind k = g.kind(v);
            if (k == NodeKind::drain) continue;
            long dim = 1;
            if (k == NodeKind::exogenous) {
                g.children(v).for_each([&](VarId c) { dim *= g.edge_dim(v, c); });
                for (int val = 0; val < 2; ++val) {
                    StateVector basis(static_cast<std::size_t>(dim), Complex(0, 0));
                    basis[static_cast<std::size_t>(rng.next_int(static_cast<int>(dim)))] = 1;
                    params.preps[static_cast<std::size_t>(v)].push_back(std::move(basis));
                }
            } else {
                g.parents(v).for_each([&](VarId p2) { dim *= g.edge_dim(p2, v); });
                for (int val = 0; val < 2; ++val) {
                    // Random permutation matrix.
                    std::vector<int> perm(static_cast<std::size_t>(dim));
                    for (int i = 0; i < dim; ++i) perm[static_cast<std::size_t>(i)] = i;
                    for (int i = static_cast<int>(dim) - 1; i > 0; --i)
                        std::swap(perm[static_cast<std::size_t>(i)],
                                  perm[static_cast<std::size_t>(rng.next_int(i + 1))]);
                    ComplexMatrix m;
                    m.dim = static_cast<int>(dim);
                    m.a.assign(static_cast<std::size_t>(dim) * dim, Complex(0, 0));
                    for (int col = 0; col < dim; ++col)
                        m.at(perm[static_cast<std::size_t>(col)], col) = 1;
                    params.gates[static_cast<std::size_t>(v)].push_back(std::move(m));
                }
            }
            double a = 0.2 + rng.next_double();
            double b = 0.2 + rng.next_double();
            params.marginals[static_cast<std::size_t>(v)] = {a / (a + b), b / (a + b)};
        }
        Qcm q = make_qcm(g, topological_ordering(g), std::move(params));
        auto [list, cparams] = ccm_from_qcm(q);
        JointDistribution generated = generate_ccm(list, cparams);
        JointDistribution simulated = evaluate(q);
        for (std::size_t i = 0; i < generated.cells(); ++i)
            CHECK(std::abs(generated.cell(i) - simulated.cell(i)) <= 1e-10);
    }
}

TEST_CASE("simulator cap") {
    // A single source feeding a 2^13-dimensional drain exceeds the cap.
    Dag g(2, {{0, 1, 1 << 13}}, {Role::setting, Role::outcome});
    QuantumModelParams params = QuantumModelParams::sized(2);
    StateVector big(1 << 13, Complex(0, 0));
    big[0] = 1;
    params.preps[0] = {std::move(big)};
    params.marginals[0] = {1.0};
    CHECK_THROWS_AS(make_qcm(g, Ordering::identity(2), params), resource_error);
}
