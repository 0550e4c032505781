#include "qcausal/ci.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

namespace qcausal {

CiRelation::CiRelation(VarSet x, VarSet y, VarSet z) {
    if (x.empty() || y.empty()) throw input_error("CI relation sides must be nonempty");
    if (!x.disjoint_with(y) || !x.disjoint_with(z) || !y.disjoint_with(z))
        throw input_error("CI relation sets must be pairwise disjoint");
    if (y < x) std::swap(x, y);
    x_ = x;
    y_ = y;
    z_ = z;
}

CiSet::CiSet(int n, std::vector<CiRelation> rels) : n_(n), rels_(std::move(rels)) {
    VarSet u = VarSet::full(n_);
    for (const auto& r : rels_)
        if (!r.vars().subset_of(u)) throw input_error("CI relation outside the variable universe");
    std::sort(rels_.begin(), rels_.end());
    rels_.erase(std::unique(rels_.begin(), rels_.end()), rels_.end());
}

bool CiSet::contains(const CiRelation& r) const {
    return std::binary_search(rels_.begin(), rels_.end(), r);
}

bool CiSet::subset_of(const CiSet& o) const {
    return std::includes(o.rels_.begin(), o.rels_.end(), rels_.begin(), rels_.end());
}

void CiSet::insert(const CiRelation& r) {
    auto it = std::lower_bound(rels_.begin(), rels_.end(), r);
    if (it == rels_.end() || *it != r) rels_.insert(it, r);
}

namespace {

std::uint64_t canon_key(VarSet a, VarSet b, VarSet z) {
    if (b < a) std::swap(a, b);
    return std::uint64_t{a.bits()} | (std::uint64_t{b.bits()} << 16) |
           (std::uint64_t{z.bits()} << 32);
}

std::uint64_t slot_key(VarSet slot, VarSet cond) {
    return std::uint64_t{slot.bits()} | (std::uint64_t{cond.bits()} << 32);
}

// Worklist fixpoint over canonical relation keys. Decomposition and weak
// union enumerate subsets of one side; contraction pairs are found through a
// (slot, conditioning) index instead of rescanning the whole set.
class ClosureEngine {
  public:
    void seed(const CiRelation& r) { add(r.key()); }

    void run() {
        while (!work_.empty()) {
            std::uint64_t k = work_.front();
            work_.pop_front();
            derive(CiRelation::from_key(k));
        }
    }

    std::vector<CiRelation> result() const {
        std::vector<CiRelation> out;
        out.reserve(seen_.size());
        for (std::uint64_t k : seen_) out.push_back(CiRelation::from_key(k));
        return out;
    }

  private:
    void add(std::uint64_t key) {
        if (!seen_.insert(key).second) return;
        CiRelation r = CiRelation::from_key(key);
        index_[slot_key(r.x(), r.z())].push_back(r.y());
        index_[slot_key(r.y(), r.z())].push_back(r.x());
        work_.push_back(key);
    }

    void derive(const CiRelation& r) {
        derive_oriented(r.x(), r.y(), r.z());
        derive_oriented(r.y(), r.x(), r.z());
    }

    // a plays the role of X in (X _||_ Y | Z); b is the other side.
    void derive_oriented(VarSet a, VarSet b, VarSet z) {
        // Decomposition and weak union: (X _||_ s | Z) and (X _||_ s | Z + (b-s)).
        std::uint32_t bb = b.bits();
        for (std::uint32_t sub = (bb - 1) & bb; sub; sub = (sub - 1) & bb) {
            VarSet s = VarSet::from_bits(sub);
            add(canon_key(a, s, z));
            add(canon_key(a, s, z | (b - s)));
        }
        // Contraction with this relation as (X _||_ Y | Z W): look for the
        // companion (X _||_ W | Z) among already-seen relations.
        std::uint32_t zz = z.bits();
        for (std::uint32_t sub = zz; sub; sub = (sub - 1) & zz) {
            VarSet w = VarSet::from_bits(sub);
            if (seen_.count(canon_key(a, w, z - w))) add(canon_key(a, b | w, z - w));
        }
        // Contraction with this relation as (X _||_ W | Z): companions of the
        // form (X _||_ Y | Z W) share the slot a and condition on z | b.
        auto it = index_.find(slot_key(a, z | b));
        if (it != index_.end()) {
            // The bucket may grow while we derive; index by position.
            for (std::size_t i = 0; i < it->second.size(); ++i) {
                VarSet y = it->second[i];
                add(canon_key(a, y | b, z));
                it = index_.find(slot_key(a, z | b));
            }
        }
    }

    std::unordered_set<std::uint64_t> seen_;
    std::unordered_map<std::uint64_t, std::vector<VarSet>> index_;
    std::deque<std::uint64_t> work_;
};

void check_cap(int n, int cap) {
    if (n > cap)
        throw resource_error("closure over " + std::to_string(n) +
                             " variables exceeds the cap of " + std::to_string(cap) +
                             " (the relation universe grows as 4^N)");
}

}  // namespace

CiSet closure(const CiSet& s, int cap) {
    check_cap(s.universe_size(), cap);
    ClosureEngine engine;
    for (const auto& r : s) engine.seed(r);
    engine.run();
    return CiSet(s.universe_size(), engine.result());
}

bool implies(const CiSet& s, const CiRelation& r, int cap) {
    return closure(s, cap).contains(r);
}

SetOrder subset_closed_eq(const CiSet& a, const CiSet& b, int cap) {
    if (a.universe_size() != b.universe_size())
        throw input_error("CI sets compare over different universes");
    CiSet ca = closure(a, cap);
    CiSet cb = closure(b, cap);
    bool ab = ca.subset_of(cb);
    bool ba = cb.subset_of(ca);
    if (ab && ba) return SetOrder::equal;
    if (ba) return SetOrder::a_proper;
    if (ab) return SetOrder::b_proper;
    return SetOrder::incomparable;
}

}  // namespace qcausal
