#include "qcausal/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qcausal/random_models.hpp"
#include "qcausal/separation.hpp"

namespace qcausal {

MapVerdict check_map(const Dag& g, const JointDistribution& p, SepRule rule, double tol, int cap) {
    if (g.size() != p.num_vars())
        throw input_error("check_map: DAG and distribution have different variable sets");
    CiSet graph_set = rule == SepRule::d ? ci_set_d(g, cap) : ci_set_q(g, cap);
    CiSet implied = closure(graph_set);
    CiSet observed = all_ci(p, tol, cap);

    auto first_diff = [](const CiSet& a, const CiSet& b) -> std::optional<CiRelation> {
        std::vector<CiRelation> diff;
        for (const auto& r : a)
            if (!b.contains(r)) diff.push_back(r);
        if (diff.empty()) return std::nullopt;
        std::sort(diff.begin(), diff.end(), [](const CiRelation& l, const CiRelation& r) {
            if (l.x() != r.x()) return l.x() < r.x();
            if (l.y() != r.y()) return l.y() < r.y();
            return l.z() < r.z();
        });
        return diff.front();
    };

    MapVerdict v;
    auto graph_only = first_diff(implied, observed);
    auto dist_only = first_diff(observed, implied);
    v.imap = !graph_only.has_value();
    v.perfect = v.imap && !dist_only.has_value();
    if (!v.imap)
        v.witness = graph_only;
    else if (!v.perfect)
        v.witness = dist_only;
    return v;
}

namespace {

StateVector bell_pair(int which) {
    const double r = 1.0 / std::sqrt(2.0);
    switch (which % 4) {
        case 0: return {r, 0, 0, r};    // (|00> + |11>)/sqrt(2)
        case 1: return {0, r, -r, 0};   // (|01> - |10>)/sqrt(2)
        case 2: return {r, 0, 0, -r};   // (|00> - |11>)/sqrt(2)
        default: return {0, r, r, 0};   // (|01> + |10>)/sqrt(2)
    }
}

ComplexMatrix rotation(double theta) {
    ComplexMatrix m;
    m.dim = 2;
    m.a = {Complex(std::cos(theta), 0), Complex(std::sin(theta), 0),
           Complex(-std::sin(theta), 0), Complex(std::cos(theta), 0)};
    return m;
}

Dag bell_network_dag() {
    std::vector<Edge> edges = {{bell_lambda, bell_s, 2},
                               {bell_lambda, bell_t, 2},
                               {bell_s, bell_a, 2},
                               {bell_t, bell_b, 2}};
    std::vector<Role> roles(5, Role::setting);
    roles[bell_a] = Role::outcome;
    roles[bell_b] = Role::outcome;
    return Dag(5, std::move(edges), std::move(roles));
}

Ordering bell_ordering() {
    Ordering o;
    o.sequence = {bell_lambda, bell_s, bell_t, bell_a, bell_b};
    return o;
}

Qcm bell_qcm(std::array<double, 4> angles, int lambda_values) {
    if (lambda_values < 1) throw input_error("bell scenario needs at least one source value");
    QuantumModelParams params = QuantumModelParams::sized(5);
    for (int v = 0; v < lambda_values; ++v)
        params.preps[bell_lambda].push_back(bell_pair(v));
    params.marginals[bell_lambda].assign(static_cast<std::size_t>(lambda_values),
                                         1.0 / lambda_values);
    params.gates[bell_s] = {rotation(angles[0]), rotation(angles[1])};
    params.gates[bell_t] = {rotation(angles[2]), rotation(angles[3])};
    params.marginals[bell_s] = {0.5, 0.5};
    params.marginals[bell_t] = {0.5, 0.5};
    return make_qcm(bell_network_dag(), bell_ordering(), std::move(params));
}

}  // namespace

BellScenario bell_scenario(std::array<double, 4> angles, int lambda_values) {
    Qcm q = bell_qcm(angles, lambda_values);
    JointDistribution joint = evaluate(q);
    return {std::move(q), std::move(joint)};
}

Dag bell_common_cause_dag() {
    std::vector<Edge> edges = {{bell_s, bell_a, 2},
                               {bell_lambda, bell_a, 2},
                               {bell_lambda, bell_b, 2},
                               {bell_t, bell_b, 2}};
    std::vector<Role> roles(5, Role::setting);
    roles[bell_a] = Role::outcome;
    roles[bell_b] = Role::outcome;
    return Dag(5, std::move(edges), std::move(roles));
}

double chsh(const JointDistribution& p) {
    if (p.num_vars() != 4) throw input_error("chsh expects exactly the variables (A, B, S, T)");
    for (int s : p.space().sizes)
        if (s != 2) throw input_error("chsh expects binary variables");
    double e[2][2];
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) {
            double corr = 0, mass = 0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    double w = p.at({a, b, s, t});
                    mass += w;
                    corr += ((a ^ b) ? -1.0 : 1.0) * w;
                }
            if (mass <= 0)
                throw input_error("chsh requires nonvanishing setting probabilities");
            e[s][t] = corr / mass;
        }
    return std::abs(e[0][0] + e[0][1] + e[1][0] - e[1][1]);
}

JointDistribution pr_box() {
    OutcomeSpace space{{2, 2, 2, 2}};  // (A, B, S, T)
    std::vector<double> table(16, 0.0);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int s = 0; s < 2; ++s)
                for (int t = 0; t < 2; ++t) {
                    double cond = (s & t) ? ((a ^ b) ? 0.5 : 0.0) : ((a ^ b) ? 0.0 : 0.5);
                    table[space.index_of({a, b, s, t})] = 0.25 * cond;
                }
    return JointDistribution(std::move(space), std::move(table));
}

FinetuneResult finetune_demo(int k) {
    // Ids: X=0, Y=1, Z=2. Values: Z in {1,2}, Y in {2,3}, X in {3-k..5-k};
    // indices store value minus the set minimum.
    std::vector<Edge> edges = {{2, 1, 2}, {2, 0, 2}, {1, 0, 2}};
    std::vector<Role> roles = {Role::outcome, Role::setting, Role::setting};
    Dag dag(3, std::move(edges), std::move(roles));
    Ordering ord;
    ord.sequence = {2, 1, 0};
    CausalInputList list = causal_input_list(dag, ord);

    ClassicalModelParams params;
    params.space.sizes = {3, 2, 2};
    params.mechanisms.resize(3);
    params.mechanisms[2] = NodeMechanism::marginal_node({0.5, 0.5});
    // Y = Z + 1 with a unit point-mass error variable.
    params.mechanisms[1] = NodeMechanism::deterministic(
        {2}, 2, [](const std::vector<int>& pa) { return pa[0]; });
    // X = Y + Z - k; the index of X is (y + z - k) - (3 - k) = y_idx + z_idx.
    params.mechanisms[0] = NodeMechanism::deterministic(
        {2, 2}, 3, [](const std::vector<int>& pa) { return pa[0] + pa[1]; });
    (void)k;  // the table is k-invariant at the index level; k only shifts value labels

    JointDistribution joint = generate_ccm(list, params);
    MapVerdict verdict = check_map(dag, joint, SepRule::d, 1e-9);
    return {std::move(dag), std::move(joint), verdict};
}

ProbeReport no_qcm_for_prbox_probe(int draws, std::uint64_t seed) {
    if (draws < 1) throw input_error("probe needs at least one draw");
    const Dag dag = bell_network_dag();
    const Ordering ord = bell_ordering();
    std::vector<double> results(static_cast<std::size_t>(draws), 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int d = 0; d < draws; ++d) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(d));
        QuantumModelParams params = QuantumModelParams::sized(5);
        params.preps[bell_lambda] = {random_state(rng, 4)};
        params.marginals[bell_lambda] = {1.0};
        params.gates[bell_s] = {random_unitary(rng, 2), random_unitary(rng, 2)};
        params.gates[bell_t] = {random_unitary(rng, 2), random_unitary(rng, 2)};
        params.marginals[bell_s] = {0.5, 0.5};
        params.marginals[bell_t] = {0.5, 0.5};
        Qcm q = make_qcm(dag, ord, std::move(params));
        JointDistribution joint = evaluate(q);
        results[static_cast<std::size_t>(d)] =
            chsh(marginal(joint, VarSet::of({bell_a, bell_b, bell_s, bell_t})));
    }
    ProbeReport report;
    report.draws = draws;
    report.seed = seed;
    for (int d = 0; d < draws; ++d) {
        if (results[static_cast<std::size_t>(d)] > report.max_chsh) {
            report.max_chsh = results[static_cast<std::size_t>(d)];
            report.argmax_draw = d;
        }
    }
    report.within_bound = report.max_chsh <= 2.0 * std::sqrt(2.0) + 1e-6;
    return report;
}

std::string format_probe_report(const ProbeReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "prbox-probe draws=%d seed=%llu\nmax-chsh %.7f at draw %d\nbound %.7f: %s\n",
                  r.draws, static_cast<unsigned long long>(r.seed), r.max_chsh, r.argmax_draw,
                  2.0 * std::sqrt(2.0) + 1e-6, r.within_bound ? "satisfied" : "VIOLATED");
    return buf;
}

}  // namespace qcausal
