#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "qcausal/dist.hpp"
#include "qcausal/random_models.hpp"
#include "qcausal/scenarios.hpp"

using namespace qcausal;
using namespace qcausal::testing;

namespace {

// Two independent uniform bits.
JointDistribution two_bits() {
    return JointDistribution(OutcomeSpace{{2, 2}}, {0.25, 0.25, 0.25, 0.25});
}

// X, W uniform bits, Y = X xor W. Variables ordered (X, W, Y).
JointDistribution xor_triple() {
    OutcomeSpace space{{2, 2, 2}};
    std::vector<double> t(8, 0.0);
    for (int x = 0; x < 2; ++x)
        for (int w = 0; w < 2; ++w) t[space.index_of({x, w, x ^ w})] = 0.25;
    return JointDistribution(std::move(space), std::move(t));
}

}  // namespace

TEST_CASE("joint distribution validation") {
    CHECK_THROWS_AS(JointDistribution(OutcomeSpace{{2}}, {0.5, 0.6}), input_error);
    CHECK_THROWS_AS(JointDistribution(OutcomeSpace{{2}}, {1.2, -0.2}), input_error);
    CHECK_THROWS_AS(JointDistribution(OutcomeSpace{{2, 2}}, {1.0}), input_error);
    CHECK_THROWS_AS(JointDistribution(OutcomeSpace{{0}}, {}), input_error);
    OutcomeSpace huge{{1 << 11, 1 << 11}};
    CHECK_THROWS_AS(huge.validate(), resource_error);
}

TEST_CASE("marginal of a product distribution is the factor") {
    JointDistribution p = two_bits();
    JointDistribution m = marginal(p, VarSet::single(0));
    CHECK(m.num_vars() == 1);
    CHECK(m.at({0}) == doctest::Approx(0.5).epsilon(1e-12));
    // Keeping everything reproduces the table.
    JointDistribution all = marginal(p, VarSet::full(2));
    for (std::size_t i = 0; i < p.cells(); ++i) CHECK(all.cell(i) == p.cell(i));
    CHECK_THROWS_AS(marginal(p, VarSet()), input_error);
}

TEST_CASE("nonlocal-box marginals are uniform") {
    JointDistribution box = pr_box();
    JointDistribution a = marginal(box, VarSet::single(0));
    CHECK(a.at({0}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(a.at({1}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("independence of uniform bits") {
    CHECK(is_ci(two_bits(), VarSet::single(0), VarSet::single(1), VarSet(), 1e-9));
}

TEST_CASE("xor triple: pairwise independent, jointly dependent") {
    JointDistribution p = xor_triple();
    CHECK(is_ci(p, VarSet::single(0), VarSet::single(2), VarSet(), 1e-9));
    CHECK(is_ci(p, VarSet::single(1), VarSet::single(2), VarSet(), 1e-9));
    CHECK(!is_ci(p, VarSet::of({0, 1}), VarSet::single(2), VarSet(), 1e-9));
}

TEST_CASE("no signalling in the nonlocal box") {
    JointDistribution box = pr_box();
    CHECK(is_ci(box, VarSet::single(0), VarSet::single(3), VarSet::single(2), 1e-12));
}

TEST_CASE("is_ci input checks") {
    JointDistribution p = two_bits();
    CHECK_THROWS_AS(is_ci(p, VarSet::single(0), VarSet::single(0), VarSet(), 1e-9), input_error);
    CHECK_THROWS_AS(is_ci(p, VarSet::single(0), VarSet::single(1), VarSet(), 0.0), input_error);
}

TEST_CASE("all_ci of two independent bits") {
    CiSet c = all_ci(two_bits(), 1e-9);
    REQUIRE(c.size() == 1);
    CHECK(c.contains(CiRelation(VarSet::single(0), VarSet::single(1), VarSet())));
}

TEST_CASE("all_ci enumeration cap") {
    OutcomeSpace space{{2, 2, 2, 2, 2, 2, 2}};
    std::vector<double> t(128, 1.0 / 128);
    JointDistribution p(space, std::move(t));
    CHECK_THROWS_AS(all_ci(p, 1e-9), resource_error);
}

TEST_CASE("degenerate variables are always independent") {
    JointDistribution p(OutcomeSpace{{2, 1}}, {0.3, 0.7});
    CHECK(is_ci(p, VarSet::single(0), VarSet::single(1), VarSet(), 1e-9));
}

TEST_CASE("generation matches hand substitution for a deterministic chain") {
    // Z -> Y -> X with Y = not Z (error variable pinned at 1), X = Y xor Z.
    // Ids: Z=0, Y=1, X=2.
    Dag g(3, {{0, 1, 2}, {0, 2, 2}, {1, 2, 2}},
          {Role::setting, Role::setting, Role::outcome});
    CausalInputList list = causal_input_list(g, Ordering::identity(3));
    ClassicalModelParams params;
    params.space.sizes = {2, 2, 2};
    params.mechanisms.resize(3);
    params.mechanisms[0] = NodeMechanism::marginal_node({0.3, 0.7});
    params.mechanisms[1] = NodeMechanism::noisy(
        {2}, 2, {0.0, 1.0}, [](const std::vector<int>& pa, int u) { return pa[0] ^ u; });
    params.mechanisms[2] = NodeMechanism::deterministic(
        {2, 2}, 2, [](const std::vector<int>& pa) { return pa[0] ^ pa[1]; });
    JointDistribution p = generate_ccm(list, params);
    CHECK(p.at({0, 1, 1}) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(p.at({1, 0, 1}) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(p.at({0, 0, 0}) == 0.0);
}

TEST_CASE("all exogenous variables give a product of marginals") {
    Dag g(2, {}, {Role::setting, Role::setting});
    CausalInputList list = causal_input_list(g, Ordering::identity(2));
    ClassicalModelParams params;
    params.space.sizes = {2, 3};
    params.mechanisms = {NodeMechanism::marginal_node({0.25, 0.75}),
                         NodeMechanism::marginal_node({0.2, 0.3, 0.5})};
    JointDistribution p = generate_ccm(list, params);
    CHECK(p.at({1, 2}) == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("fine-tuned chain model reproduces the closed form") {
    FinetuneResult r = finetune_demo();
    // P(x, y, z) = 1/2 at (x=2z, y=z+1), stored as shifted indices.
    CHECK(r.joint.at({0, 0, 0}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.joint.at({2, 1, 1}) == doctest::Approx(0.5).epsilon(1e-12));
    double rest = 0;
    for (std::size_t i = 0; i < r.joint.cells(); ++i) rest += r.joint.cell(i);
    CHECK(rest == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(is_ci(r.joint, VarSet::single(0), VarSet::single(1), VarSet::single(2), 1e-9));
    CiSet c = all_ci(r.joint, 1e-9);
    CHECK(c.contains(CiRelation(VarSet::single(0), VarSet::single(1), VarSet::single(2))));
}

TEST_CASE("generate_ccm rejects malformed parameters") {
    Dag g(2, {{0, 1, 2}}, {Role::setting, Role::outcome});
    CausalInputList list = causal_input_list(g, Ordering::identity(2));
    ClassicalModelParams params;
    params.space.sizes = {2, 2};
    params.mechanisms.resize(2);
    params.mechanisms[0] = NodeMechanism::marginal_node({0.5, 0.5});
    params.mechanisms[1] = NodeMechanism{{{0.6, 0.6}, {0.5, 0.5}}};
    CHECK_THROWS_AS(generate_ccm(list, params), input_error);  // row sums to 1.2
    params.mechanisms[1] = NodeMechanism{{{1.0, 0.0}}};
    CHECK_THROWS_AS(generate_ccm(list, params), input_error);  // missing parent row
}

TEST_CASE("is_ci skips zero-probability contexts") {
    // The z=1 context carries no mass; its undefined conditionals are skipped.
    OutcomeSpace space{{2, 2, 2}};
    std::vector<double> t(8, 0.0);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) t[space.index_of({x, y, 0})] = 0.25;
    JointDistribution p(space, std::move(t));
    CHECK(is_ci(p, VarSet::single(0), VarSet::single(1), VarSet::single(2), 1e-9));
}
