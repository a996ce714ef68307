#pragma once

// Independent brute-force oracles. These deliberately avoid the library's
// pruned/cached code paths: everything is recomputed from the multiplicity
// matrix by direct definition chasing.

#include <cstdint>
#include <vector>

#include "quiver/discrete.hpp"

namespace qvtest {

using qv::DiscreteQuiver;
using qv::VMask;

inline bool oracle_hereditary(const DiscreteQuiver& d, VMask u) {
    for (int v = 0; v < d.n(); ++v)
        for (int w = 0; w < d.n(); ++w)
            if (DiscreteQuiver::in(u, v) && d.mult(v, w).any() && !DiscreteQuiver::in(u, w))
                return false;
    return true;
}

inline bool oracle_regular(const DiscreteQuiver& d, int v) {
    if (d.out_infinite(v)) return false;
    return d.out_degree_finite(v) > 0;
}

inline bool oracle_saturated(const DiscreteQuiver& d, VMask u) {
    for (int v = 0; v < d.n(); ++v) {
        if (DiscreteQuiver::in(u, v) || !oracle_regular(d, v)) continue;
        bool all_in = true;
        for (int w = 0; w < d.n(); ++w)
            if (d.mult(v, w).any() && !DiscreteQuiver::in(u, w)) all_in = false;
        if (all_in) return false;
    }
    return true;
}

/// Regular vertices of the quotient by U, computed straight from the matrix
/// (vertex kept iff outside U; edge kept iff its range is outside U).
inline VMask oracle_quotient_regular(const DiscreteQuiver& d, VMask u) {
    VMask out = 0;
    for (int v = 0; v < d.n(); ++v) {
        if (DiscreteQuiver::in(u, v)) continue;
        bool inf = false;
        std::uint64_t deg = 0;
        for (int w = 0; w < d.n(); ++w) {
            if (DiscreteQuiver::in(u, w)) continue;
            if (d.mult(v, w).inf) inf = true;
            deg += d.mult(v, w).m;
        }
        if (!inf && deg > 0) out |= VMask(1) << v;
    }
    return out;
}

/// All admissible pairs by scanning every (U, V) subset pair and applying the
/// two defining conditions literally.
inline std::vector<std::pair<VMask, VMask>> oracle_admissible_pairs(const DiscreteQuiver& d) {
    std::vector<std::pair<VMask, VMask>> out;
    VMask full = d.n() == 0 ? 0 : ((VMask(1) << d.n()) - 1);
    VMask reg = 0;
    for (int v = 0; v < d.n(); ++v)
        if (oracle_regular(d, v)) reg |= VMask(1) << v;
    for (VMask u = 0;; ++u) {
        if (oracle_hereditary(d, u) && oracle_saturated(d, u)) {
            VMask lower = reg & ~u;
            VMask upper = oracle_quotient_regular(d, u);
            for (VMask v = 0;; ++v) {
                if ((v & u) == 0 && (lower & ~v) == 0 && (v & ~upper) == 0) out.push_back({u, v});
                if (v == full) break;
            }
        }
        if (u == full) break;
    }
    return out;
}

/// Exitless-loop existence by raw DFS over all edge walks of length <= n:
/// a loop with no exits must keep every vertex on it at out-degree one.
inline bool oracle_has_exitless_loop(const DiscreteQuiver& d) {
    for (int v = 0; v < d.n(); ++v) {
        // follow walks from v of length <= n; every vertex passed must have a
        // unique out-edge, which also makes the walk unique
        int x = v;
        bool dead = false;
        for (int len = 1; len <= d.n(); ++len) {
            bool inf = d.out_infinite(x);
            std::uint64_t deg = d.out_degree_finite(x);
            if (inf || deg != 1) { dead = true; break; }
            for (int w = 0; w < d.n(); ++w)
                if (d.mult(x, w).any()) { x = w; break; }
            if (x == v) break;
        }
        if (!dead && x == v && d.out_degree_finite(v) == 1 && !d.out_infinite(v)) return true;
    }
    return false;
}

/// Condition (L) by definition: no exitless loop (discrete interiors are the
/// sets themselves, so "empty interior" means "empty").
inline bool oracle_condition_L(const DiscreteQuiver& d) { return !oracle_has_exitless_loop(d); }

/// Condition (K) by definition: every quotient by a saturated hereditary
/// subset satisfies Condition (L).
inline bool oracle_condition_K(const DiscreteQuiver& d) {
    VMask full = d.n() == 0 ? 0 : ((VMask(1) << d.n()) - 1);
    for (VMask u = 0;; ++u) {
        if (oracle_hereditary(d, u) && oracle_saturated(d, u)) {
            if (!oracle_condition_L(d.quotient(u))) return false;
        }
        if (u == full) break;
    }
    return true;
}

inline bool oracle_minimal(const DiscreteQuiver& d) {
    VMask full = d.n() == 0 ? 0 : ((VMask(1) << d.n()) - 1);
    for (VMask u = 1; u < full; ++u)
        if (oracle_hereditary(d, u) && oracle_saturated(d, u)) return false;
    return full != 0;  // the empty quiver is vacuously minimal
}

}  // namespace qvtest
