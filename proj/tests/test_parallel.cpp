#include "doctest.h"
#include "fixtures.hpp"
#include "qcausal/dist.hpp"
#include "qcausal/random_models.hpp"
#include "qcausal/separation.hpp"

using namespace qcausal;
using namespace qcausal::testing;

// The parallel kernels must agree with their serial references exactly.

TEST_CASE("ci_set_d parallel equals serial") {
    Rng rng(401);
    for (int trial = 0; trial < 20; ++trial) {
        auto [g, ord] = random_dag(rng, 2 + rng.next_int(5), 0.3 + 0.4 * rng.next_double());
        CHECK(ci_set_d(g) == ci_set_d_serial(g));
    }
}

TEST_CASE("ci_set_q parallel equals serial") {
    Rng rng(403);
    for (int trial = 0; trial < 15; ++trial) {
        Dag g = random_quantum_dag(rng, 6);
        CHECK(ci_set_q(g) == ci_set_q_serial(g));
    }
}

TEST_CASE("all_ci parallel equals serial") {
    Rng rng(405);
    for (int trial = 0; trial < 8; ++trial) {
        auto [g, ord] = random_dag(rng, 2 + rng.next_int(4));
        CausalInputList list = causal_input_list(g, ord);
        JointDistribution p = generate_ccm(list, random_ccm_params(rng, list, 2));
        CHECK(all_ci(p, 1e-9) == all_ci_serial(p, 1e-9));
    }
}
