#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "quiver/complex.hpp"
#include "quiver/rational.hpp"

namespace qv {

/// One interval with rational endpoints and end flags. lo == hi (both ends
/// closed) is a single point.
struct Iv {
    Rat lo, hi;
    bool lc = true, hc = true;
    bool is_point() const { return lo == hi; }
    friend bool operator==(const Iv& a, const Iv& b) {
        return a.lo == b.lo && a.hi == b.hi && a.lc == b.lc && a.hc == b.hc;
    }
};

inline Iv iv_point(const Rat& x) { return Iv{x, x, true, true}; }

/// Finite / cofinite subset of one tail family. cofinite == false: `xs` are
/// the members; cofinite == true: `xs` are the non-members.
struct TailSet {
    bool cofinite = false;
    std::vector<std::int64_t> xs;

    static TailSet none() { return TailSet{false, {}}; }
    static TailSet all() { return TailSet{true, {}}; }
    bool is_empty() const { return !cofinite && xs.empty(); }
    bool is_all() const { return cofinite && xs.empty(); }
    bool is_infinite() const { return cofinite; }
    bool contains(std::int64_t i) const {
        bool listed = std::binary_search(xs.begin(), xs.end(), i);
        return cofinite ? !listed : listed;
    }
    void normalize() {
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    }
    friend bool operator==(const TailSet& a, const TailSet& b) {
        return a.cofinite == b.cofinite && a.xs == b.xs;
    }
};

inline TailSet tail_union(const TailSet& a, const TailSet& b) {
    TailSet r;
    if (!a.cofinite && !b.cofinite) {
        r.cofinite = false;
        r.xs = a.xs;
        r.xs.insert(r.xs.end(), b.xs.begin(), b.xs.end());
    } else {
        r.cofinite = true;
        // exclusions of the union
        for (auto x : (a.cofinite ? a.xs : b.xs)) {
            const TailSet& other = a.cofinite ? b : a;
            if (!other.contains(x)) r.xs.push_back(x);
        }
        if (a.cofinite && b.cofinite) {
            r.xs.clear();
            for (auto x : a.xs)
                if (!b.contains(x)) r.xs.push_back(x);
        }
    }
    r.normalize();
    return r;
}

inline TailSet tail_complement(const TailSet& a) { return TailSet{!a.cofinite, a.xs}; }

inline TailSet tail_intersect(const TailSet& a, const TailSet& b) {
    return tail_complement(tail_union(tail_complement(a), tail_complement(b)));
}

/// Exact subset of a OneComplex: per cell a canonical finite union of
/// intervals, per tail a finite/cofinite set, plus membership of the point at
/// infinity when the complex is compactified.
///
/// Canonical form: intervals sorted, disjoint, maximal (merged across shared
/// endpoints), and endpoint-class consistent — a realized point lying in a
/// glue class is either marked at every member endpoint or at none.
class SubSet {
public:
    SubSet() = default;
    explicit SubSet(const OneComplex& X)
        : cells_(X.n_cells()), tails_(X.n_tails(), TailSet::none()) {}

    static SubSet empty(const OneComplex& X) { return SubSet(X); }
    static SubSet all(const OneComplex& X) {
        SubSet s(X);
        for (int c = 0; c < X.n_cells(); ++c)
            s.cells_[c] = {Iv{X.cell(c).lo, X.cell(c).hi, true, true}};
        for (auto& t : s.tails_) t = TailSet::all();
        s.inf_ = X.compactified();
        return s;
    }

    const std::vector<Iv>& cell_part(int c) const { return cells_.at(c); }
    const TailSet& tail_part(int t) const { return tails_.at(t); }
    bool has_infinity() const { return inf_; }
    int n_cell_parts() const { return static_cast<int>(cells_.size()); }
    int n_tail_parts() const { return static_cast<int>(tails_.size()); }

    void set_tail_part(int t, TailSet s) {
        tails_.at(t) = std::move(s);
        tails_.at(t).normalize();
    }
    void set_infinity(bool b) { inf_ = b; }

    /// Adds one interval to a cell part; canonicalize(X) must be called
    /// before the set is used.
    void add_interval(int c, Iv iv) {
        if (iv.lo > iv.hi) return;
        if (iv.lo == iv.hi && !(iv.lc && iv.hc)) return;
        cells_.at(c).push_back(iv);
    }

    bool compatible_with(const OneComplex& X) const {
        return n_cell_parts() == X.n_cells() && n_tail_parts() == X.n_tails() &&
               (!inf_ || X.compactified());
    }

    /// Membership of a written point (realized semantics: endpoint-class
    /// points answer consistently at any member).
    bool contains(const OneComplex& X, const Point& p) const {
        if (std::holds_alternative<InfinityPoint>(p)) return inf_;
        if (const auto* tp = std::get_if<TailPoint>(&p)) return tails_.at(tp->tail).contains(tp->index);
        const auto& cp = std::get<CellPoint>(p);
        return coord_member(cp.cell, cp.x);
    }

    /// Raw per-cell coordinate membership (no glue lookup; canonical sets are
    /// consistent so this equals realized membership). Assumes the part is
    /// normalized (sorted and disjoint).
    bool coord_member(int c, const Rat& x) const {
        const auto& part = cells_.at(c);
        auto it = std::upper_bound(part.begin(), part.end(), x,
                                   [](const Rat& v, const Iv& iv) { return v < iv.lo; });
        if (it == part.begin()) return false;
        const Iv& iv = *std::prev(it);
        if (x > iv.hi) return false;
        if (x == iv.lo && !iv.lc) return false;
        if (x == iv.hi && !iv.hc) return false;
        return true;
    }

    bool is_empty() const {
        for (const auto& part : cells_)
            if (!part.empty()) return false;
        for (const auto& t : tails_)
            if (!t.is_empty()) return false;
        return !inf_;
    }

    /// Sorts, merges and enforces endpoint-class consistency (a realized
    /// glue-class point present at one member endpoint is added to all).
    void canonicalize(const OneComplex& X) {
        for (int c = 0; c < n_cell_parts(); ++c) normalize_cell(c);
        for (auto& t : tails_) t.normalize();
        propagate_classes(X);
    }

    friend bool operator==(const SubSet& a, const SubSet& b) {
        return a.inf_ == b.inf_ && a.cells_ == b.cells_ && a.tails_ == b.tails_;
    }
    friend bool operator!=(const SubSet& a, const SubSet& b) { return !(a == b); }

private:
    std::vector<std::vector<Iv>> cells_;
    std::vector<TailSet> tails_;
    bool inf_ = false;

    void normalize_cell(int c) {
        auto& part = cells_[c];
        std::sort(part.begin(), part.end(), [](const Iv& a, const Iv& b) {
            if (a.lo != b.lo) return a.lo < b.lo;
            return (a.lc ? 0 : 1) < (b.lc ? 0 : 1);
        });
        std::vector<Iv> merged;
        for (const Iv& iv : part) {
            if (!merged.empty()) {
                Iv& last = merged.back();
                bool touches = iv.lo < last.hi || (iv.lo == last.hi && (last.hc || iv.lc));
                if (touches) {
                    if (iv.hi > last.hi) {
                        last.hi = iv.hi;
                        last.hc = iv.hc;
                    } else if (iv.hi == last.hi) {
                        last.hc = last.hc || iv.hc;
                    }
                    continue;
                }
            }
            merged.push_back(iv);
        }
        part = std::move(merged);
    }

    void propagate_classes(const OneComplex& X) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (int cls = 0; cls < X.n_classes(); ++cls) {
                const auto& members = X.class_members(cls);
                if (members.size() < 2) continue;
                bool any = false, all = true;
                for (const Endpoint& e : members) {
                    bool m = coord_member(e.cell, X.endpoint_coord(e));
                    any = any || m;
                    all = all && m;
                }
                if (any && !all) {
                    for (const Endpoint& e : members) {
                        Rat x = X.endpoint_coord(e);
                        if (!coord_member(e.cell, x)) {
                            cells_[e.cell].push_back(iv_point(x));
                            normalize_cell(e.cell);
                            changed = true;
                        }
                    }
                }
            }
        }
    }
};

namespace detail {

/// Pointwise boolean combination of two interval lists over the closed cell
/// [lo, hi]: collects all critical coordinates, evaluates the combination at
/// each critical point and on each open gap, and reassembles intervals.
inline std::vector<Iv> cell_combine(const Cell& cell, const std::vector<Iv>& a,
                                    const std::vector<Iv>& b,
                                    const std::function<bool(bool, bool)>& op) {
    // operands are canonical (sorted, disjoint): binary search per query
    auto member = [](const std::vector<Iv>& part, const Rat& x) {
        auto it = std::upper_bound(part.begin(), part.end(), x,
                                   [](const Rat& v, const Iv& iv) { return v < iv.lo; });
        if (it == part.begin()) return false;
        const Iv& iv = *std::prev(it);
        if (x > iv.hi) return false;
        if (x == iv.lo && !iv.lc) return false;
        if (x == iv.hi && !iv.hc) return false;
        return true;
    };
    std::vector<Rat> crit{cell.lo, cell.hi};
    for (const auto* part : {&a, &b})
        for (const Iv& iv : *part) {
            crit.push_back(iv.lo);
            crit.push_back(iv.hi);
        }
    std::sort(crit.begin(), crit.end());
    crit.erase(std::unique(crit.begin(), crit.end()), crit.end());

    std::vector<Iv> out;
    auto emit_point = [&](const Rat& x) { out.push_back(iv_point(x)); };
    for (size_t i = 0; i < crit.size(); ++i) {
        if (op(member(a, crit[i]), member(b, crit[i]))) emit_point(crit[i]);
        if (i + 1 < crit.size()) {
            Rat mid = midpoint(crit[i], crit[i + 1]);
            if (op(member(a, mid), member(b, mid)))
                out.push_back(Iv{crit[i], crit[i + 1], false, false});
        }
    }
    return out;
}

}  // namespace detail

inline SubSet set_combine(const OneComplex& X, const SubSet& A, const SubSet& B,
                          const std::function<bool(bool, bool)>& op) {
    if (!A.compatible_with(X) || !B.compatible_with(X))
        throw std::invalid_argument("SubSet: ambient complex mismatch");
    SubSet r(X);
    for (int c = 0; c < X.n_cells(); ++c)
        for (const Iv& iv : detail::cell_combine(X.cell(c), A.cell_part(c), B.cell_part(c), op))
            r.add_interval(c, iv);
    for (int t = 0; t < X.n_tails(); ++t) {
        // decide by truth table on the finite/cofinite lattice
        const TailSet& a = A.tail_part(t);
        const TailSet& b = B.tail_part(t);
        bool ff = op(false, false), ft = op(false, true), tf = op(true, false), tt = op(true, true);
        TailSet res = TailSet::none();
        if (ff) res = tail_union(res, tail_intersect(tail_complement(a), tail_complement(b)));
        if (ft) res = tail_union(res, tail_intersect(tail_complement(a), b));
        if (tf) res = tail_union(res, tail_intersect(a, tail_complement(b)));
        if (tt) res = tail_union(res, tail_intersect(a, b));
        r.set_tail_part(t, res);
    }
    if (X.compactified()) r.set_infinity(op(A.has_infinity(), B.has_infinity()));
    r.canonicalize(X);
    return r;
}

inline SubSet set_union(const OneComplex& X, const SubSet& A, const SubSet& B) {
    return set_combine(X, A, B, [](bool x, bool y) { return x || y; });
}
inline SubSet set_intersect(const OneComplex& X, const SubSet& A, const SubSet& B) {
    return set_combine(X, A, B, [](bool x, bool y) { return x && y; });
}
inline SubSet set_difference(const OneComplex& X, const SubSet& A, const SubSet& B) {
    return set_combine(X, A, B, [](bool x, bool y) { return x && !y; });
}
inline SubSet set_complement(const OneComplex& X, const SubSet& A) {
    return set_combine(X, SubSet::all(X), A, [](bool x, bool y) { return x && !y; });
}

inline bool is_subset(const OneComplex& X, const SubSet& A, const SubSet& B) {
    return set_difference(X, A, B).is_empty();
}

/// Topological closure in the realized space: interval ends close, glued
/// endpoint points propagate across their class, tails are closed discrete
/// sets (except that in a compactified complex an infinite tail part pulls in
/// the point at infinity).
inline SubSet closure(const OneComplex& X, const SubSet& S) {
    if (!S.compatible_with(X)) throw std::invalid_argument("closure: ambient mismatch");
    SubSet r(X);
    for (int c = 0; c < X.n_cells(); ++c)
        for (Iv iv : S.cell_part(c)) {
            iv.lc = iv.hc = true;
            r.add_interval(c, iv);
        }
    for (int t = 0; t < X.n_tails(); ++t) r.set_tail_part(t, S.tail_part(t));
    bool inf = S.has_infinity();
    if (X.compactified())
        for (int t = 0; t < X.n_tails(); ++t)
            if (S.tail_part(t).is_infinite()) inf = true;
    r.set_infinity(inf);
    r.canonicalize(X);
    return r;
}

inline SubSet interior(const OneComplex& X, const SubSet& S) {
    return set_complement(X, closure(X, set_complement(X, S)));
}

inline SubSet boundary(const OneComplex& X, const SubSet& S) {
    return set_intersect(X, closure(X, S), closure(X, set_complement(X, S)));
}

inline bool is_open(const OneComplex& X, const SubSet& S) { return S == interior(X, S); }
inline bool is_closed(const OneComplex& X, const SubSet& S) { return S == closure(X, S); }

/// Precompactness in the presented space: cell parts always are; tail parts
/// must be finite unless the complex carries the compactifying point.
inline bool is_precompact(const OneComplex& X, const SubSet& S) {
    if (X.compactified()) return true;
    for (int t = 0; t < X.n_tails(); ++t)
        if (S.tail_part(t).is_infinite()) return false;
    return true;
}

inline SubSet single_point(const OneComplex& X, const Point& p) {
    SubSet s(X);
    if (std::holds_alternative<InfinityPoint>(p)) {
        s.set_infinity(true);
    } else if (const auto* tp = std::get_if<TailPoint>(&p)) {
        s.set_tail_part(tp->tail, TailSet{false, {tp->index}});
    } else {
        const auto& cp = std::get<CellPoint>(p);
        s.add_interval(cp.cell, iv_point(cp.x));
    }
    s.canonicalize(X);
    return s;
}

/// True iff p belongs to S and some punctured rational-radius neighborhood of
/// p misses S; exact via closure of S minus the point.
inline bool is_isolated_in(const OneComplex& X, const Point& p, const SubSet& S) {
    if (!S.contains(X, p)) return false;
    SubSet rest = set_difference(X, S, single_point(X, p));
    return !closure(X, rest).contains(X, p);
}

/// Any single written point of a nonempty set (used for witnesses).
inline std::optional<Point> pick_point(const OneComplex& X, const SubSet& S) {
    for (int c = 0; c < X.n_cells(); ++c)
        for (const Iv& iv : S.cell_part(c)) {
            if (iv.is_point()) return Point(CellPoint{c, iv.lo});
            return Point(CellPoint{c, midpoint(iv.lo, iv.hi)});
        }
    for (int t = 0; t < X.n_tails(); ++t) {
        const TailSet& ts = S.tail_part(t);
        if (ts.is_empty()) continue;
        if (!ts.cofinite) return Point(TailPoint{t, ts.xs.front()});
        std::int64_t i = 0;
        while (ts.contains(i) == false) ++i;
        return Point(TailPoint{t, i});
    }
    if (S.has_infinity()) return Point(InfinityPoint{});
    return std::nullopt;
}

}  // namespace qv
