#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "qcausal/dag.hpp"
#include "qcausal/random_models.hpp"
#include "qcausal/separation.hpp"

using namespace qcausal;
using namespace qcausal::testing;

TEST_CASE("varset basics") {
    VarSet s = VarSet::of({0, 2, 5});
    CHECK(s.size() == 3);
    CHECK(s.contains(2));
    CHECK(!s.contains(1));
    CHECK((s | VarSet::single(1)).size() == 4);
    CHECK((s & VarSet::of({2, 3})) == VarSet::single(2));
    CHECK((s - VarSet::single(0)) == VarSet::of({2, 5}));
    CHECK(VarSet::of({0, 1}).subset_of(VarSet::full(3)));
    CHECK(VarSet::of({0, 1}).disjoint_with(VarSet::of({2, 3})));
    CHECK(VarSet::full(0).empty());
    CHECK(VarSet::of({0, 2}).complement_in(4) == VarSet::of({1, 3}));
    CHECK_THROWS_AS(VarSet::single(40), input_error);
}

TEST_CASE("dag construction rejects malformed inputs") {
    std::vector<Role> rr = {Role::setting, Role::outcome};
    CHECK_THROWS_AS(Dag(2, {{0, 0, 2}}, rr), input_error);                  // self loop
    CHECK_THROWS_AS(Dag(2, {{0, 1, 2}, {0, 1, 2}}, rr), input_error);       // duplicate
    CHECK_THROWS_AS(Dag(2, {{0, 1, 2}, {1, 0, 2}}, rr), input_error);       // cycle
    CHECK_THROWS_AS(Dag(2, {{0, 3, 2}}, rr), input_error);                  // unknown id
    CHECK_THROWS_AS(Dag(20, {}, std::vector<Role>(20, Role::setting)), resource_error);
}

TEST_CASE("node kinds derive from the edge structure") {
    Dag g = chain_fork_dag();
    CHECK(g.kind(fx) == NodeKind::exogenous);
    CHECK(g.kind(fv) == NodeKind::intermediate);
    CHECK(g.kind(fw) == NodeKind::drain);
    CHECK(g.kind(fz) == NodeKind::drain);
    CHECK(g.drains() == VarSet::of({fw, fz}));
    CHECK(g.exogenous() == VarSet::single(fx));
    CHECK(g.settings() == VarSet::of({fx, fv, fy}));
    CHECK(g.outcomes() == VarSet::of({fw, fz}));
}

TEST_CASE("quantum validity rules") {
    Dag good = chain_fork_dag();
    CHECK(good.quantum_valid());

    // A drain marked as a setting.
    std::vector<Role> bad_roles = {Role::setting, Role::setting, Role::setting, Role::setting,
                                   Role::outcome};
    Dag bad(5, {{0, 1, 2}, {0, 3, 2}, {1, 2, 2}, {1, 4, 2}, {3, 4, 2}}, bad_roles);
    auto v = bad.quantum_violations();
    REQUIRE(!v.empty());
    CHECK(v[0].find("#2") != std::string::npos);

    // An isolated setting is not a parent of anything.
    Dag lonely(2, {{0, 1, 2}}, {Role::setting, Role::outcome});
    CHECK(lonely.quantum_valid());
    Dag lonely2(3, {{0, 1, 2}}, {Role::setting, Role::outcome, Role::setting});
    CHECK(!lonely2.quantum_valid());

    // Unbalanced intermediate dimensions are a wire problem, not a role one.
    Dag unbalanced(3, {{0, 1, 4}, {1, 2, 2}},
                   {Role::setting, Role::setting, Role::outcome});
    CHECK(unbalanced.quantum_valid());
    auto uv = unbalanced.dimension_violations();
    REQUIRE(uv.size() == 1);
    CHECK(uv[0].find("input dimension 4") != std::string::npos);
    CHECK_THROWS_AS(bad.require_quantum_valid(), validation_error);

    // The worked classical example has a fan-out node, so it cannot carry
    // balanced wires even though its roles line up.
    CHECK(!chain_fork_dag().dimension_violations().empty());
}

TEST_CASE("ancestors and descendants on the worked example") {
    Dag g = chain_fork_dag();
    CHECK(ancestors(g, VarSet::single(fz)) == VarSet::of({fv, fy, fx}));
    CHECK(ancestors(g, VarSet::single(fx)).empty());
    CHECK(ancestors(g, VarSet::of({fw, fz})) == VarSet::of({fv, fx, fy}));
    CHECK(descendants(g, VarSet::single(fx)) == VarSet::of({fv, fy, fw, fz}));
    CHECK(descendants(g, VarSet::single(fz)).empty());
    CHECK(descendants(g, VarSet::single(fv)) == VarSet::of({fw, fz}));
    CHECK_THROWS_AS(ancestors(g, VarSet::single(9)), input_error);
}

TEST_CASE("ancestors and descendants match the relaxation oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        auto [g, ord] = random_dag(rng, 2 + rng.next_int(5));
        for (int rep = 0; rep < 8; ++rep) {
            VarSet v = VarSet::from_bits(
                static_cast<std::uint32_t>(rng.next_int(1 << g.size())));
            if (v.empty()) continue;
            CHECK(ancestors(g, v) == ancestors_oracle(g, v));
            CHECK(descendants(g, v) == descendants_oracle(g, v));
        }
    }
}

TEST_CASE("ancestors are monotone and idempotent under self-union") {
    Rng rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        auto [g, ord] = random_dag(rng, 2 + rng.next_int(5));
        VarSet v = VarSet::from_bits(static_cast<std::uint32_t>(rng.next_int(1 << g.size())));
        VarSet w = v | VarSet::from_bits(static_cast<std::uint32_t>(rng.next_int(1 << g.size())));
        if (v.empty() || w.empty()) continue;
        CHECK(ancestors(g, v).subset_of(ancestors(g, w)));
        CHECK(ancestors(g, v | ancestors(g, v)) == ancestors(g, v));
    }
}

TEST_CASE("causal input list of the worked example") {
    Dag g = chain_fork_dag();
    CausalInputList list = causal_input_list(g, chain_fork_order());
    auto entries = list.entries();
    REQUIRE(entries.size() == 5);
    CHECK(entries[0].var == fx);
    CHECK(entries[0].rest.empty());
    CHECK(entries[2].var == fw);
    CHECK(entries[2].rest == VarSet::single(fx));
    CHECK(entries[2].parents == VarSet::single(fv));
    CHECK(entries[4].var == fz);
    CHECK(entries[4].rest == VarSet::of({fx, fw}));
    CHECK(entries[4].parents == VarSet::of({fy, fv}));

    CiSet rels = list.ci_relations();
    CHECK(rels.contains(CiRelation(VarSet::single(fw), VarSet::single(fx), VarSet::single(fv))));
    CHECK(rels.contains(
        CiRelation(VarSet::single(fz), VarSet::of({fx, fw}), VarSet::of({fy, fv}))));
    CHECK(rels.size() == 3);  // the X and V entries have empty rests
}

TEST_CASE("causal input list rejects inconsistent orderings") {
    Dag g = chain_fork_dag();
    Ordering bad;
    bad.sequence = {fz, fy, fw, fv, fx};
    CHECK_THROWS_AS(causal_input_list(g, bad), input_error);
}

TEST_CASE("single node input list") {
    Dag g(1, {}, {Role::setting});
    CausalInputList list = causal_input_list(g, Ordering::identity(1));
    auto entries = list.entries();
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].rest.empty());
    CHECK(entries[0].parents.empty());
    CHECK(list.ci_relations().empty());
}

TEST_CASE("complete graph input list has empty rests") {
    Dag g = complete3_dag();
    Ordering ord;
    ord.sequence = {2, 1, 0};
    CausalInputList list = causal_input_list(g, ord);
    for (const auto& e : list.entries()) CHECK(e.rest.empty());
    CHECK(list.ci_relations().empty());
}

TEST_CASE("input list round trips through its generated DAG") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        auto [g, ord] = random_dag(rng, 2 + rng.next_int(5));
        CausalInputList list = causal_input_list(g, ord);
        Dag g2 = dag_from_parents(g.size(), list.parents());
        CausalInputList list2 = causal_input_list(g2, ord);
        CHECK(list.parents() == list2.parents());
        CHECK(list.ci_relations() == list2.ci_relations());
    }
}

TEST_CASE("quantum input list on the hidden-common-cause network") {
    Dag g = bell_dag();
    QuantumInputList q = quantum_input_list(g, topological_ordering(g));
    CiSet rels = q.relations();
    // Unconditioned family with O' = {A}.
    CHECK(rels.contains(CiRelation(VarSet::of({bell_a, bell_s, bell_lambda}),
                                   VarSet::single(bell_t), VarSet())));
    // Detachment family with S' = {S}, O' = {}.
    CHECK(rels.contains(CiRelation(VarSet::single(bell_s),
                                   VarSet::of({bell_t, bell_lambda, bell_b}), VarSet())));
}

TEST_CASE("quantum input list with a direct setting-outcome edge is empty") {
    Dag g(2, {{0, 1, 2}}, {Role::setting, Role::outcome});
    QuantumInputList q = quantum_input_list(g, Ordering::identity(2));
    CHECK(q.relations().empty());
}

TEST_CASE("quantum input list rejects invalid networks") {
    Dag bad(3, {{0, 1, 2}}, {Role::setting, Role::outcome, Role::setting});
    CHECK_THROWS_AS(quantum_input_list(bad, Ordering::identity(3)), validation_error);
}

TEST_CASE("lazy enumeration agrees with materialization") {
    Rng rng(15);
    Dag g = random_quantum_dag(rng, 5);
    QuantumInputList q = quantum_input_list(g, topological_ordering(g));
    std::size_t count = 0;
    q.for_each_relation([&](const CiRelation& r) {
        (void)r;
        ++count;
    });
    CHECK(count >= q.relations().size());  // materialization dedupes
}
