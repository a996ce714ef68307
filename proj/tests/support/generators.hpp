#pragma once

// Deterministic random generators shared by the unit and acceptance suites.

#include <random>
#include <vector>

#include "quiver/complex.hpp"
#include "quiver/discrete.hpp"
#include "quiver/quiver.hpp"
#include "quiver/subset.hpp"

namespace qvtest {

using Rng = std::mt19937_64;

inline qv::Rat rand_rat(Rng& rng, long lo_num, long hi_num, long max_den) {
    std::uniform_int_distribution<long> den(1, max_den);
    long d = den(rng);
    std::uniform_int_distribution<long> num(lo_num * d, hi_num * d);
    return qv::Rat(num(rng), d);
}

/// Random subset of X: a few random intervals per cell, random tail parts.
inline qv::SubSet rand_subset(Rng& rng, const qv::OneComplex& X) {
    qv::SubSet s(X);
    std::uniform_int_distribution<int> nparts(0, 3);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int c = 0; c < X.n_cells(); ++c) {
        const qv::Cell& cell = X.cell(c);
        if (cell.zero_length()) {
            if (coin(rng)) s.add_interval(c, qv::iv_point(cell.lo));
            continue;
        }
        int k = nparts(rng);
        for (int i = 0; i < k; ++i) {
            qv::Rat a = rand_rat(rng, 0, 8, 4);
            qv::Rat b = rand_rat(rng, 0, 8, 4);
            // scale into the cell
            qv::Rat span = cell.hi - cell.lo;
            a = cell.lo + a * span / qv::Rat(8);
            b = cell.lo + b * span / qv::Rat(8);
            if (b < a) std::swap(a, b);
            if (a == b) {
                s.add_interval(c, qv::iv_point(a));
            } else {
                s.add_interval(c, qv::Iv{a, b, coin(rng) == 1, coin(rng) == 1});
            }
        }
    }
    for (int t = 0; t < X.n_tails(); ++t) {
        int kind = std::uniform_int_distribution<int>(0, 3)(rng);
        qv::TailSet ts;
        if (kind == 0) ts = qv::TailSet::none();
        if (kind == 1) ts = qv::TailSet::all();
        if (kind >= 2) {
            ts.cofinite = (kind == 3);
            int k = std::uniform_int_distribution<int>(1, 3)(rng);
            for (int i = 0; i < k; ++i)
                ts.xs.push_back(std::uniform_int_distribution<int>(0, 6)(rng));
        }
        s.set_tail_part(t, ts);
    }
    if (X.compactified() && coin(rng)) s.set_infinity(true);
    s.canonicalize(X);
    return s;
}

/// Rational sample points of X suitable as a membership oracle grid:
/// all interval endpoints of the given sets plus a dyadic grid, tail indices,
/// and the point at infinity when present.
inline std::vector<qv::Point> sample_grid(const qv::OneComplex& X,
                                          const std::vector<const qv::SubSet*>& sets,
                                          int grid = 8) {
    std::vector<qv::Point> pts;
    for (int c = 0; c < X.n_cells(); ++c) {
        const qv::Cell& cell = X.cell(c);
        std::vector<qv::Rat> xs{cell.lo, cell.hi};
        for (int i = 1; i < grid; ++i)
            xs.push_back(cell.lo + (cell.hi - cell.lo) * qv::Rat(i, grid));
        for (const auto* s : sets)
            for (const qv::Iv& iv : s->cell_part(c)) {
                xs.push_back(iv.lo);
                xs.push_back(iv.hi);
                if (!iv.is_point()) xs.push_back(qv::midpoint(iv.lo, iv.hi));
            }
        std::sort(xs.begin(), xs.end(), [](const qv::Rat& a, const qv::Rat& b) { return a < b; });
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        for (const auto& x : xs) pts.push_back(qv::CellPoint{c, x});
    }
    for (int t = 0; t < X.n_tails(); ++t) {
        for (std::int64_t i = 0; i < 10; ++i) pts.push_back(qv::TailPoint{t, i});
        for (const auto* s : sets)
            for (auto i : s->tail_part(t).xs) {
                pts.push_back(qv::TailPoint{t, i});
                pts.push_back(qv::TailPoint{t, i + 1});
            }
    }
    if (X.compactified()) pts.push_back(qv::InfinityPoint{});
    return pts;
}

/// Random discrete quiver: multiplicities mostly 0/1, occasionally 2 or
/// infinite; optional random weights on finite edges.
inline qv::DiscreteQuiver rand_discrete_quiver(Rng& rng, int n, bool with_weights = false,
                                               bool allow_inf = true) {
    qv::DiscreteQuiver d;
    for (int i = 0; i < n; ++i) d.add_vertex("v" + std::to_string(i));
    std::uniform_int_distribution<int> pick(0, 99);
    for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w) {
            int roll = pick(rng);
            if (roll < 50) continue;
            if (roll < 80) d.add_edges(v, w, qv::Mult{1, false});
            else if (roll < 92 || !allow_inf) d.add_edges(v, w, qv::Mult{2, false});
            else d.add_edges(v, w, qv::Mult::infinite());
            if (with_weights && !d.mult(v, w).inf) {
                for (std::uint64_t i = 0; i < d.mult(v, w).m; ++i)
                    d.set_weight(v, w, i, qv::Rat(std::uniform_int_distribution<long>(1, 6)(rng),
                                                  std::uniform_int_distribution<long>(1, 4)(rng)));
            }
        }
    return d;
}

/// Exhaustive multiplicity assignment decoder: code digit per ordered pair in
/// {none, 1, 2, inf}. Used for the small exhaustive corpora.
inline qv::DiscreteQuiver decode_quiver(int n, std::uint64_t code) {
    qv::DiscreteQuiver d;
    for (int i = 0; i < n; ++i) d.add_vertex("v" + std::to_string(i));
    for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w) {
            int digit = code % 4;
            code /= 4;
            if (digit == 1) d.add_edges(v, w, qv::Mult{1, false});
            if (digit == 2) d.add_edges(v, w, qv::Mult{2, false});
            if (digit == 3) d.add_edges(v, w, qv::Mult::infinite());
        }
    return d;
}

/// Random valid PL quiver from a few well-behaved families (the families are
/// chosen so the range map is open by construction).
inline qv::PLQuiver rand_pl_quiver(Rng& rng, qv::DiscreteQuiver* discrete_out = nullptr) {
    using namespace qv;
    // weighted: the expanding family cascades under saturation and is kept rare
    int roll = std::uniform_int_distribution<int>(0, 9)(rng);
    int family = roll <= 3 ? 0 : roll <= 5 ? 1 : roll <= 8 ? 2 : 3;
    if (family == 0) {
        // discrete quiver viewed as a PL quiver
        DiscreteQuiver d = rand_discrete_quiver(rng, std::uniform_int_distribution<int>(1, 4)(rng));
        if (discrete_out) *discrete_out = d;
        return pl_view(d);
    }
    if (family == 1) {
        // interval, r an affine bijection (identity or flip), s identity
        auto V = make_complex({Cell{"c", 0, 1}});
        auto E = make_complex({Cell{"e", 0, 1}});
        bool flip = std::uniform_int_distribution<int>(0, 1)(rng);
        Piece rp = flip ? Piece{0, 1, -1, 1, 0} : Piece{0, 1, 1, 0, 0};
        return PLQuiver{V, E, PLMap(E, V, {{rp}}), PLMap(E, V, {{Piece{0, 1, 1, 0, 0}}})};
    }
    if (family == 2) {
        // circle rotation by p/q
        auto C = make_complex({Cell{"c", 0, 1}}, {{Endpoint{0, 0}, Endpoint{0, 1}}});
        long qden = std::uniform_int_distribution<long>(2, 5)(rng);
        long pnum = std::uniform_int_distribution<long>(1, qden - 1)(rng);
        Rat rot(pnum, qden);
        Rat split = Rat(1) - rot;
        std::vector<Piece> rp{Piece{0, split, 1, rot, 0}, Piece{split, 1, 1, rot - 1, 0}};
        return PLQuiver{C, C, PLMap(C, C, {rp}), PLMap(C, C, {{Piece{0, 1, 1, 0, 0}}})};
    }
    // doubling-style expansion [0,1] -> [0,2]
    auto V = make_complex({Cell{"c", 0, 2}});
    auto E = make_complex({Cell{"e", 0, 1}});
    return PLQuiver{V, E, PLMap(E, V, {{Piece{0, 1, 2, 0, 0}}}),
                    PLMap(E, V, {{Piece{0, 1, 1, 0, 0}}})};
}

}  // namespace qvtest
