// Compares the OpenMP kernels against their serial references on fixed
// workloads and reports wall time and speedup.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qcausal/random_models.hpp"
#include "qcausal/scenarios.hpp"
#include "qcausal/separation.hpp"

using namespace qcausal;

namespace {

double time_of(const std::function<void()>& fn) {
    auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-28s serial %8.3fs   parallel %8.3fs   speedup %5.2fx\n", name, serial,
                parallel, parallel > 0 ? serial / parallel : 0.0);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif

    // Workload 1: classical CI extraction over random six-node DAGs.
    {
        Rng rng(1);
        std::vector<Dag> dags;
        for (int i = 0; i < 1500; ++i) dags.push_back(random_dag(rng, 6, 0.5).dag);
        std::size_t sink = 0;
        double s = time_of([&] {
            for (const auto& g : dags) sink += ci_set_d_serial(g).size();
        });
        double p = time_of([&] {
            for (const auto& g : dags) sink += ci_set_d(g).size();
        });
        report("ci_set_d (1500 x N=6)", s, p);
        if (sink == 0) std::printf("(no separated triples found)\n");
    }

    // Workload 2: quantum CI extraction over random networks.
    {
        Rng rng(2);
        std::vector<Dag> dags;
        for (int i = 0; i < 800; ++i) dags.push_back(random_quantum_dag(rng, 6));
        std::size_t sink = 0;
        double s = time_of([&] {
            for (const auto& g : dags) sink += ci_set_q_serial(g).size();
        });
        double p = time_of([&] {
            for (const auto& g : dags) sink += ci_set_q(g).size();
        });
        report("ci_set_q (800 x N<=6)", s, p);
    }

    // Workload 3: brute-force CI extraction from dense tables.
    {
        Rng rng(3);
        std::vector<JointDistribution> tables;
        for (int i = 0; i < 40; ++i) {
            auto [g, ord] = random_dag(rng, 6, 0.35);
            CausalInputList list = causal_input_list(g, ord);
            tables.push_back(generate_ccm(list, random_ccm_params(rng, list, 3)));
        }
        std::size_t sink = 0;
        double ts = time_of([&] {
            for (const auto& p : tables) sink += all_ci_serial(p, 1e-9).size();
        });
        double tp = time_of([&] {
            for (const auto& p : tables) sink += all_ci(p, 1e-9).size();
        });
        report("all_ci (40 x N=6 tables)", ts, tp);
    }

    // Workload 4: the sampling probe (parallel inside the library call).
    {
        double t = time_of([&] { no_qcm_for_prbox_probe(4000, 7); });
        std::printf("%-28s %8.3fs (4000 draws)\n", "prbox-probe", t);
    }
    return 0;
}
