#pragma once

#include <cstdint>
#include <vector>

#include "qcausal/types.hpp"

namespace qcausal {

// A conditional-independence statement (X _||_ Y | Z) over disjoint sets.
// Stored in canonical form: the smaller of (x, y) comes first, so symmetry
// is baked into equality and hashing.
class CiRelation {
  public:
    CiRelation(VarSet x, VarSet y, VarSet z);

    VarSet x() const { return x_; }
    VarSet y() const { return y_; }
    VarSet z() const { return z_; }
    VarSet vars() const { return x_ | y_ | z_; }

    // Packs (x, y, z) into one integer; masks fit in 16 bits each under the DAG cap.
    std::uint64_t key() const {
        return std::uint64_t{x_.bits()} | (std::uint64_t{y_.bits()} << 16) |
               (std::uint64_t{z_.bits()} << 32);
    }
    static CiRelation from_key(std::uint64_t k) {
        return CiRelation(VarSet::from_bits(static_cast<std::uint32_t>(k & 0xffff)),
                          VarSet::from_bits(static_cast<std::uint32_t>((k >> 16) & 0xffff)),
                          VarSet::from_bits(static_cast<std::uint32_t>((k >> 32) & 0xffff)));
    }

    friend bool operator==(const CiRelation& a, const CiRelation& b) { return a.key() == b.key(); }
    friend bool operator!=(const CiRelation& a, const CiRelation& b) { return a.key() != b.key(); }
    friend bool operator<(const CiRelation& a, const CiRelation& b) { return a.key() < b.key(); }

  private:
    VarSet x_, y_, z_;
};

// A deduplicated set of CI relations over a fixed universe of n variables.
// Relations are kept sorted, so equality and subset tests are cheap.
class CiSet {
  public:
    explicit CiSet(int n) : n_(n) {}
    CiSet(int n, std::vector<CiRelation> rels);

    int universe_size() const { return n_; }
    std::size_t size() const { return rels_.size(); }
    bool empty() const { return rels_.empty(); }
    bool contains(const CiRelation& r) const;
    bool subset_of(const CiSet& o) const;
    void insert(const CiRelation& r);

    const std::vector<CiRelation>& relations() const { return rels_; }
    auto begin() const { return rels_.begin(); }
    auto end() const { return rels_.end(); }

    friend bool operator==(const CiSet& a, const CiSet& b) {
        return a.n_ == b.n_ && a.rels_ == b.rels_;
    }

  private:
    int n_ = 0;
    std::vector<CiRelation> rels_;  // sorted, unique
};

// Least fixpoint of s under symmetry, decomposition, weak union and contraction.
CiSet closure(const CiSet& s, int cap = limits::closure_cap);

// Membership of r in closure(s).
bool implies(const CiSet& s, const CiRelation& r, int cap = limits::closure_cap);

enum class SetOrder { equal, a_proper, b_proper, incomparable };

// Compares closure(a) against closure(b).
SetOrder subset_closed_eq(const CiSet& a, const CiSet& b, int cap = limits::closure_cap);

}  // namespace qcausal
