#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcausal {

// Dense variable index, 0..N-1 within one model.
using VarId = int;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input: bad sets, unknown ids, dimension mismatches, parse errors.
struct input_error : error {
    using error::error;
};

// A structurally sound input that violates model rules (e.g. a DAG that
// cannot be read as a quantum network). Carries the violated rules.
struct validation_error : error {
    explicit validation_error(const std::string& what, std::vector<std::string> rules = {})
        : error(what), violations(std::move(rules)) {}
    std::vector<std::string> violations;
};

// An operation whose cost is exponential in N was asked to exceed its cap.
struct resource_error : error {
    using error::error;
};

namespace limits {
inline constexpr int dag_cap = 16;          // bitset-backed variable sets
inline constexpr int closure_cap = 7;       // closure universe is 4^N relations
inline constexpr int enum_cap = 6;          // triple enumerations are 4^N
inline constexpr std::size_t table_cap = std::size_t{1} << 20;  // joint table cells
inline constexpr std::size_t sim_cap = std::size_t{1} << 12;    // state-vector amplitudes
}  // namespace limits

// Exact set of variables, bitset semantics over dense ids.
class VarSet {
  public:
    constexpr VarSet() = default;
    static constexpr VarSet from_bits(std::uint32_t bits) {
        VarSet s;
        s.bits_ = bits;
        return s;
    }
    static VarSet single(VarId v) { return from_bits(std::uint32_t{1} << check(v)); }
    static VarSet of(std::initializer_list<VarId> vs) {
        VarSet s;
        for (VarId v : vs) s.bits_ |= std::uint32_t{1} << check(v);
        return s;
    }
    static VarSet full(int n) {
        if (n < 0 || n > 31) throw input_error("VarSet universe out of range");
        return from_bits(n == 0 ? 0u : (n == 31 ? 0x7fffffffu : ((std::uint32_t{1} << n) - 1)));
    }

    constexpr std::uint32_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool contains(VarId v) const { return v >= 0 && v < 31 && (bits_ >> v) & 1u; }
    int size() const { return __builtin_popcount(bits_); }

    constexpr bool subset_of(VarSet o) const { return (bits_ & ~o.bits_) == 0; }
    constexpr bool disjoint_with(VarSet o) const { return (bits_ & o.bits_) == 0; }

    friend constexpr VarSet operator|(VarSet a, VarSet b) { return from_bits(a.bits_ | b.bits_); }
    friend constexpr VarSet operator&(VarSet a, VarSet b) { return from_bits(a.bits_ & b.bits_); }
    friend constexpr VarSet operator-(VarSet a, VarSet b) { return from_bits(a.bits_ & ~b.bits_); }
    VarSet& operator|=(VarSet o) { bits_ |= o.bits_; return *this; }
    VarSet& operator&=(VarSet o) { bits_ &= o.bits_; return *this; }
    VarSet complement_in(int n) const { return full(n) - *this; }
    VarSet with(VarId v) const { return *this | single(v); }
    VarSet without(VarId v) const { return *this - single(v); }

    friend constexpr bool operator==(VarSet a, VarSet b) { return a.bits_ == b.bits_; }
    friend constexpr bool operator!=(VarSet a, VarSet b) { return a.bits_ != b.bits_; }
    // Total order used for canonical forms; compares member lists via bit value.
    friend constexpr bool operator<(VarSet a, VarSet b) { return a.bits_ < b.bits_; }

    std::vector<VarId> members() const {
        std::vector<VarId> out;
        out.reserve(static_cast<std::size_t>(size()));
        for (std::uint32_t b = bits_; b;) {
            int v = __builtin_ctz(b);
            out.push_back(v);
            b &= b - 1;
        }
        return out;
    }
    template <typename F>
    void for_each(F&& f) const {
        for (std::uint32_t b = bits_; b;) {
            f(static_cast<VarId>(__builtin_ctz(b)));
            b &= b - 1;
        }
    }
    VarId first() const {
        if (empty()) throw input_error("first() on empty VarSet");
        return __builtin_ctz(bits_);
    }

  private:
    static VarId check(VarId v) {
        if (v < 0 || v >= 31) throw input_error("VarId out of range: " + std::to_string(v));
        return v;
    }
    std::uint32_t bits_ = 0;
};

}  // namespace qcausal
