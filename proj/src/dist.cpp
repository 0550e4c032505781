#include "qcausal/dist.hpp"

#include <algorithm>
#include <cmath>

namespace qcausal {

std::size_t OutcomeSpace::cells() const {
    std::size_t total = 1;
    for (int s : sizes) total *= static_cast<std::size_t>(s);
    return total;
}

std::size_t OutcomeSpace::index_of(const std::vector<int>& values) const {
    if (values.size() != sizes.size()) throw input_error("value tuple arity mismatch");
    std::size_t idx = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (values[i] < 0 || values[i] >= sizes[i])
            throw input_error("outcome value out of range for variable " + std::to_string(i));
        idx = idx * static_cast<std::size_t>(sizes[i]) + static_cast<std::size_t>(values[i]);
    }
    return idx;
}

std::vector<int> OutcomeSpace::decode(std::size_t index) const {
    std::vector<int> values(sizes.size());
    for (std::size_t i = sizes.size(); i-- > 0;) {
        values[i] = static_cast<int>(index % static_cast<std::size_t>(sizes[i]));
        index /= static_cast<std::size_t>(sizes[i]);
    }
    return values;
}

void OutcomeSpace::validate(std::size_t cap) const {
    std::size_t total = 1;
    for (int s : sizes) {
        if (s < 1) throw input_error("outcome-space sizes must be >= 1");
        total *= static_cast<std::size_t>(s);
        if (total > cap)
            throw resource_error("joint table with more than " + std::to_string(cap) +
                                 " cells exceeds the configured cap");
    }
}

JointDistribution::JointDistribution(OutcomeSpace space, std::vector<double> table,
                                     double norm_tol, std::size_t cap)
    : space_(std::move(space)), table_(std::move(table)) {
    space_.validate(cap);
    if (table_.size() != space_.cells()) throw input_error("table size does not match the space");
    double sum = 0;
    for (double v : table_) {
        if (v < 0 || std::isnan(v)) throw input_error("probabilities must be non-negative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > norm_tol)
        throw input_error("table sums to " + std::to_string(sum) + ", expected 1 within " +
                          std::to_string(norm_tol));
}

namespace {

// Walks every cell of a space in table order, keeping the value tuple
// updated in place.
struct CellWalker {
    const std::vector<int>& sizes;
    std::vector<int> values;

    explicit CellWalker(const std::vector<int>& sizes_)
        : sizes(sizes_), values(sizes_.size(), 0) {}
    void advance() {
        for (std::size_t v = sizes.size(); v-- > 0;) {
            if (++values[v] < sizes[v]) return;
            values[v] = 0;
        }
    }
};

}  // namespace

JointDistribution marginal(const JointDistribution& p, VarSet keep) {
    if (keep.empty()) throw input_error("marginal requires a nonempty keep set");
    if (!keep.subset_of(VarSet::full(p.num_vars())))
        throw input_error("marginal keep set outside the distribution");
    std::vector<VarId> kept = keep.members();
    OutcomeSpace sub;
    for (VarId v : kept) sub.sizes.push_back(p.space().sizes[static_cast<std::size_t>(v)]);
    std::vector<double> table(sub.cells(), 0.0);
    CellWalker walk(p.space().sizes);
    for (std::size_t i = 0; i < p.cells(); ++i, walk.advance()) {
        std::size_t idx = 0;
        for (std::size_t k = 0; k < kept.size(); ++k)
            idx = idx * static_cast<std::size_t>(sub.sizes[k]) +
                  static_cast<std::size_t>(walk.values[static_cast<std::size_t>(kept[k])]);
        table[idx] += p.cell(i);
    }
    // Accumulation preserves normalization; reuse the source tolerance loosely.
    return JointDistribution(std::move(sub), std::move(table), 1e-9);
}

namespace {

// Mixed-radix view of a variable subset inside a distribution.
struct SubIndex {
    std::vector<VarId> vars;
    std::vector<int> sizes;
    std::size_t cells = 1;

    SubIndex(const JointDistribution& p, VarSet s) {
        vars = s.members();
        for (VarId v : vars) {
            sizes.push_back(p.space().sizes[static_cast<std::size_t>(v)]);
            cells *= static_cast<std::size_t>(sizes.back());
        }
    }
    std::size_t project(const std::vector<int>& full) const {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < vars.size(); ++i)
            idx = idx * static_cast<std::size_t>(sizes[i]) +
                  static_cast<std::size_t>(full[static_cast<std::size_t>(vars[i])]);
        return idx;
    }
};

}  // namespace

bool is_ci(const JointDistribution& p, VarSet x, VarSet y, VarSet z, double tol) {
    if (x.empty() || y.empty()) throw input_error("is_ci requires nonempty x and y");
    if (!x.disjoint_with(y) || !x.disjoint_with(z) || !y.disjoint_with(z))
        throw input_error("is_ci sets overlap");
    if (!(x | y | z).subset_of(VarSet::full(p.num_vars())))
        throw input_error("is_ci sets outside the distribution");
    if (tol <= 0) throw input_error("is_ci tolerance must be positive");

    SubIndex xi(p, x), yi(p, y), zi(p, z);
    std::vector<double> pz(zi.cells, 0.0);
    std::vector<double> pxz(xi.cells * zi.cells, 0.0);
    std::vector<double> pyz(yi.cells * zi.cells, 0.0);
    std::vector<double> pxyz(xi.cells * yi.cells * zi.cells, 0.0);

    CellWalker walk(p.space().sizes);
    for (std::size_t i = 0; i < p.cells(); ++i, walk.advance()) {
        double w = p.cell(i);
        if (w == 0) continue;
        std::size_t a = xi.project(walk.values), b = yi.project(walk.values),
                    c = zi.project(walk.values);
        pz[c] += w;
        pxz[a * zi.cells + c] += w;
        pyz[b * zi.cells + c] += w;
        pxyz[(a * yi.cells + b) * zi.cells + c] += w;
    }
    for (std::size_t c = 0; c < zi.cells; ++c) {
        if (pz[c] <= tol) continue;  // conditional undefined, context skipped
        for (std::size_t a = 0; a < xi.cells; ++a)
            for (std::size_t b = 0; b < yi.cells; ++b) {
                double joint = pxyz[(a * yi.cells + b) * zi.cells + c] / pz[c];
                double prod = (pxz[a * zi.cells + c] / pz[c]) * (pyz[b * zi.cells + c] / pz[c]);
                if (std::abs(joint - prod) > tol) return false;
            }
    }
    return true;
}

namespace {

bool decode_triple(std::uint64_t i, int n, VarSet& x, VarSet& y, VarSet& z) {
    std::uint32_t xb = 0, yb = 0, zb = 0;
    for (int v = 0; v < n; ++v) {
        switch (i % 4) {
            case 1: xb |= 1u << v; break;
            case 2: yb |= 1u << v; break;
            case 3: zb |= 1u << v; break;
            default: break;
        }
        i /= 4;
    }
    if (xb == 0 || yb == 0 || xb > yb) return false;
    x = VarSet::from_bits(xb);
    y = VarSet::from_bits(yb);
    z = VarSet::from_bits(zb);
    return true;
}

void check_enum_cap(int n, int cap) {
    if (n > cap)
        throw resource_error("CI extraction over " + std::to_string(n) +
                             " variables exceeds the cap of " + std::to_string(cap) +
                             " (4^N independence tests)");
}

}  // namespace

CiSet all_ci(const JointDistribution& p, double tol, int cap) {
    int n = p.num_vars();
    check_enum_cap(n, cap);
    std::uint64_t total = 1;
    for (int v = 0; v < n; ++v) total *= 4;
    std::vector<std::vector<CiRelation>> found;
#pragma omp parallel
    {
        std::vector<CiRelation> local;
#pragma omp for schedule(dynamic, 16) nowait
        for (long long i = 0; i < static_cast<long long>(total); ++i) {
            VarSet x, y, z;
            if (!decode_triple(static_cast<std::uint64_t>(i), n, x, y, z)) continue;
            if (is_ci(p, x, y, z, tol)) local.emplace_back(x, y, z);
        }
#pragma omp critical
        found.push_back(std::move(local));
    }
    std::vector<CiRelation> all;
    for (auto& part : found) all.insert(all.end(), part.begin(), part.end());
    return CiSet(n, std::move(all));
}

CiSet all_ci_serial(const JointDistribution& p, double tol, int cap) {
    int n = p.num_vars();
    check_enum_cap(n, cap);
    std::uint64_t total = 1;
    for (int v = 0; v < n; ++v) total *= 4;
    std::vector<CiRelation> all;
    for (std::uint64_t i = 0; i < total; ++i) {
        VarSet x, y, z;
        if (!decode_triple(i, n, x, y, z)) continue;
        if (is_ci(p, x, y, z, tol)) all.emplace_back(x, y, z);
    }
    return CiSet(n, std::move(all));
}

NodeMechanism NodeMechanism::marginal_node(std::vector<double> probs) {
    NodeMechanism m;
    m.rows.push_back(std::move(probs));
    return m;
}

NodeMechanism NodeMechanism::deterministic(const std::vector<int>& pa_sizes, int size,
                                           const std::function<int(const std::vector<int>&)>& f) {
    return noisy(pa_sizes, size, {1.0},
                 [&](const std::vector<int>& pa, int) { return f(pa); });
}

NodeMechanism NodeMechanism::noisy(const std::vector<int>& pa_sizes, int size,
                                   const std::vector<double>& error_dist,
                                   const std::function<int(const std::vector<int>&, int)>& f) {
    std::size_t rows = 1;
    for (int s : pa_sizes) rows *= static_cast<std::size_t>(s);
    NodeMechanism m;
    m.rows.assign(rows, std::vector<double>(static_cast<std::size_t>(size), 0.0));
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<int> pa(pa_sizes.size());
        std::size_t rem = r;
        for (std::size_t i = pa_sizes.size(); i-- > 0;) {
            pa[i] = static_cast<int>(rem % static_cast<std::size_t>(pa_sizes[i]));
            rem /= static_cast<std::size_t>(pa_sizes[i]);
        }
        for (std::size_t u = 0; u < error_dist.size(); ++u) {
            int v = f(pa, static_cast<int>(u));
            if (v < 0 || v >= size)
                throw input_error("mechanism produced a value outside the outcome space");
            m.rows[r][static_cast<std::size_t>(v)] += error_dist[u];
        }
    }
    return m;
}

JointDistribution generate_ccm(const CausalInputList& list, const ClassicalModelParams& params) {
    int n = list.size();
    if (params.space.num_vars() != n || static_cast<int>(params.mechanisms.size()) != n)
        throw input_error("model parameters do not match the input list");
    params.space.validate();

    // Validate mechanism shapes and row normalization.
    for (VarId v = 0; v < n; ++v) {
        const auto& mech = params.mechanisms[static_cast<std::size_t>(v)];
        std::size_t rows = 1;
        list.parents()[static_cast<std::size_t>(v)].for_each(
            [&](VarId p) { rows *= static_cast<std::size_t>(params.space.sizes[p]); });
        if (mech.rows.size() != rows)
            throw input_error("mechanism for variable " + std::to_string(v) +
                              " has the wrong number of parent rows");
        for (const auto& row : mech.rows) {
            if (row.size() != static_cast<std::size_t>(params.space.sizes[v]))
                throw input_error("mechanism row arity mismatch for variable " +
                                  std::to_string(v));
            double s = 0;
            for (double q : row) {
                if (q < 0) throw input_error("negative probability in mechanism");
                s += q;
            }
            if (std::abs(s - 1.0) > 1e-9)
                throw input_error("mechanism column for variable " + std::to_string(v) +
                                  " sums to " + std::to_string(s) + ", expected 1");
        }
    }

    std::vector<double> table(params.space.cells(), 0.0);
    CellWalker walk(params.space.sizes);
    for (std::size_t i = 0; i < table.size(); ++i, walk.advance()) {
        double prob = 1.0;
        for (VarId v = 0; v < n && prob > 0; ++v) {
            std::size_t row = 0;
            list.parents()[static_cast<std::size_t>(v)].for_each([&](VarId p) {
                row = row * static_cast<std::size_t>(params.space.sizes[p]) +
                      static_cast<std::size_t>(walk.values[static_cast<std::size_t>(p)]);
            });
            prob *= params.mechanisms[static_cast<std::size_t>(v)]
                        .rows[row][static_cast<std::size_t>(
                            walk.values[static_cast<std::size_t>(v)])];
        }
        table[i] = prob;
    }
    return JointDistribution(params.space, std::move(table));
}

}  // namespace qcausal
