#pragma once

// The quiver constructions: adding tails to sinks, unitization (one-point
// compactification of the vertex space), and products with a space.
//
// A tailed quiver is kept symbolic: level i >= 1 is a copy of the sink set,
// with the level-i edge copy running from a vertex's copy at level i-1 to its
// copy at level i. Subsets of the tailed vertex space are (base part,
// finitely many explicit level parts, an eventual level part); analyses are
// extended by closed-form shift rules proved once from the construction.

#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "quiver/ideals.hpp"
#include "quiver/loops.hpp"
#include "quiver/quiver.hpp"
#include "quiver/verdicts.hpp"

namespace qv {

struct TailedQuiver {
    PLQuiver base;
    std::optional<DiscreteQuiver> discrete_base;  // provenance, when discrete
    SubSet tail_base;                             // = sinks(base), an open set
    bool unitized = false;

    friend bool operator==(const TailedQuiver& a, const TailedQuiver& b) {
        return a.base == b.base && a.discrete_base == b.discrete_base &&
               a.tail_base == b.tail_base && a.unitized == b.unitized;
    }
};

/// Subset of the tailed vertex space F^0 = E^0 u V_1 u V_2 u ...; every
/// level part is a subset of the tail base. `rest` covers all levels beyond
/// the explicit list; `infinity` is the unitized point when present.
struct TailedSubSet {
    SubSet base;
    std::vector<SubSet> levels;
    SubSet rest;
    bool infinity = false;
};

// --- tailed set algebra -------------------------------------------------------

inline TailedSubSet tailed_empty(const TailedQuiver& t) {
    return TailedSubSet{SubSet::empty(t.base.V()), {}, SubSet::empty(t.base.V()), false};
}

inline TailedSubSet tailed_full(const TailedQuiver& t) {
    return TailedSubSet{SubSet::all(t.base.V()), {}, t.tail_base, t.unitized};
}

inline void tailed_canonicalize(const TailedQuiver& t, TailedSubSet& s) {
    const OneComplex& X = t.base.V();
    s.rest = set_intersect(X, s.rest, t.tail_base);
    for (auto& l : s.levels) l = set_intersect(X, l, t.tail_base);
    while (!s.levels.empty() && s.levels.back() == s.rest) s.levels.pop_back();
    if (!t.unitized) s.infinity = false;
}

inline SubSet tailed_level(const TailedSubSet& s, std::size_t i) {
    // level numbering starts at 1
    if (i == 0 || i > s.levels.size() + 1000000) throw std::logic_error("bad level index");
    if (i <= s.levels.size()) return s.levels[i - 1];
    return s.rest;
}

inline TailedSubSet tailed_combine(const TailedQuiver& t, const TailedSubSet& a,
                                   const TailedSubSet& b,
                                   const std::function<bool(bool, bool)>& op) {
    const OneComplex& X = t.base.V();
    TailedSubSet out;
    out.base = set_combine(X, a.base, b.base, op);
    std::size_t k = std::max(a.levels.size(), b.levels.size());
    for (std::size_t i = 1; i <= k; ++i)
        out.levels.push_back(set_combine(X, tailed_level(a, i), tailed_level(b, i), op));
    out.rest = set_combine(X, a.rest, b.rest, op);
    out.infinity = op(a.infinity, b.infinity);
    tailed_canonicalize(t, out);
    return out;
}

inline TailedSubSet tailed_union(const TailedQuiver& t, const TailedSubSet& a,
                                 const TailedSubSet& b) {
    return tailed_combine(t, a, b, [](bool x, bool y) { return x || y; });
}
inline TailedSubSet tailed_intersect(const TailedQuiver& t, const TailedSubSet& a,
                                     const TailedSubSet& b) {
    return tailed_combine(t, a, b, [](bool x, bool y) { return x && y; });
}
inline TailedSubSet tailed_complement(const TailedQuiver& t, const TailedSubSet& a) {
    return tailed_combine(t, tailed_full(t), a, [](bool x, bool y) { return x && !y; });
}
inline TailedSubSet tailed_difference(const TailedQuiver& t, const TailedSubSet& a,
                                      const TailedSubSet& b) {
    return tailed_combine(t, a, b, [](bool x, bool y) { return x && !y; });
}

inline bool tailed_equal(const TailedQuiver& t, TailedSubSet a, TailedSubSet b) {
    tailed_canonicalize(t, a);
    tailed_canonicalize(t, b);
    if (!(a.base == b.base) || !(a.rest == b.rest) || a.infinity != b.infinity) return false;
    if (a.levels.size() != b.levels.size()) return false;
    for (std::size_t i = 0; i < a.levels.size(); ++i)
        if (!(a.levels[i] == b.levels[i])) return false;
    return true;
}

inline bool tailed_is_empty(const TailedQuiver& t, const TailedSubSet& a) {
    if (!a.base.is_empty() || !a.rest.is_empty() || a.infinity) return false;
    for (const auto& l : a.levels)
        if (!l.is_empty()) return false;
    return true;
}

namespace detail {
inline bool subset_tail_infinite(const SubSet& s) {
    for (int t = 0; t < s.n_tail_parts(); ++t)
        if (s.tail_part(t).is_infinite()) return true;
    return false;
}
}  // namespace detail

/// Closure: levels are open copies of the (open) sink set, closed within the
/// disjoint union componentwise; in a unitized quiver the point at infinity
/// compactifies everything, so any infinite spread pulls it in.
inline TailedSubSet tailed_closure(const TailedQuiver& t, const TailedSubSet& a) {
    const OneComplex& X = t.base.V();
    TailedSubSet out;
    out.base = closure(X, a.base);
    for (const auto& l : a.levels)
        out.levels.push_back(set_intersect(X, closure(X, l), t.tail_base));
    out.rest = set_intersect(X, closure(X, a.rest), t.tail_base);
    out.infinity = a.infinity;
    if (t.unitized) {
        if (!a.rest.is_empty()) out.infinity = true;
        if (detail::subset_tail_infinite(a.base) || detail::subset_tail_infinite(a.rest))
            out.infinity = true;
        for (const auto& l : a.levels)
            if (detail::subset_tail_infinite(l)) out.infinity = true;
    }
    tailed_canonicalize(t, out);
    return out;
}

inline TailedSubSet tailed_interior(const TailedQuiver& t, const TailedSubSet& a) {
    return tailed_complement(t, tailed_closure(t, tailed_complement(t, a)));
}

inline bool tailed_is_open(const TailedQuiver& t, const TailedSubSet& a) {
    return tailed_equal(t, a, tailed_interior(t, a));
}

// --- construction -------------------------------------------------------------

inline TailedQuiver add_tails(const PLQuiver& q) {
    return TailedQuiver{q, std::nullopt, sinks_set(q), false};
}
inline TailedQuiver add_tails(const DiscreteQuiver& d) {
    PLQuiver p = pl_view(d);
    return TailedQuiver{p, d, sinks_set(p), false};
}
/// A tailed quiver has no sinks; adding tails again is the identity.
inline TailedQuiver add_tails(const TailedQuiver& t) { return t; }

struct CompactVertexSpace : std::invalid_argument {
    CompactVertexSpace()
        : std::invalid_argument("vertex space is compact: the algebra is already unital") {}
};

/// One-point compactification of the vertex space (edge space unchanged).
/// Defined only for non-compact vertex spaces.
inline PLQuiver unitize(const PLQuiver& q) {
    if (q.V().is_compact_space()) throw CompactVertexSpace{};
    auto compactified = make_complex(q.V().cells(), q.V().glue_pairs(), q.V().tails(), true);
    PLMap r(q.edge_space, compactified, q.r.pieces(), q.r.tail_rules());
    PLMap s(q.edge_space, compactified, q.s.pieces(), q.s.tail_rules());
    return PLQuiver{compactified, q.edge_space, std::move(r), std::move(s)};
}
inline PLQuiver unitize(const DiscreteQuiver& d) { return unitize(pl_view(d)); }
inline TailedQuiver unitize(const TailedQuiver& t) {
    if (t.unitized) throw CompactVertexSpace{};
    if (t.tail_base.is_empty()) {
        // no levels were attached: compactify the base concretely
        PLQuiver base1 = unitize(t.base);  // throws when already compact
        SubSet tb = SubSet::empty(*base1.vertex_space);
        return TailedQuiver{std::move(base1), std::nullopt, std::move(tb), false};
    }
    TailedQuiver out = t;
    out.unitized = true;
    return out;
}

/// The product quiver E x X: |E^0| copies of X as vertex space, one copy of X
/// per explicit edge as edge space, range and source acting as the identity
/// on the X factor. Infinite multiplicities have no explicit edges and are
/// rejected.
inline PLQuiver product_with_space(const DiscreteQuiver& d, const OneComplex& X) {
    if (d.has_tails()) throw std::invalid_argument("product: tail-family vertices unsupported");
    std::vector<Cell> vcells;
    std::vector<std::pair<Endpoint, Endpoint>> vglue;
    std::vector<TailFamily> vtails;
    auto copy_space = [&](std::vector<Cell>& cells, std::vector<std::pair<Endpoint, Endpoint>>& glue,
                          std::vector<TailFamily>& tails, const std::string& tag) {
        int cell_off = static_cast<int>(cells.size());
        int tail_off = static_cast<int>(tails.size());
        for (const Cell& c : X.cells()) cells.push_back(Cell{tag + "." + c.name, c.lo, c.hi});
        for (auto [a, b] : X.glue_pairs())
            glue.push_back({Endpoint{a.cell + cell_off, a.end}, Endpoint{b.cell + cell_off, b.end}});
        for (const TailFamily& f : X.tails()) tails.push_back(TailFamily{tag + "." + f.name});
        return std::pair{cell_off, tail_off};
    };
    std::vector<std::pair<int, int>> v_offsets;
    for (int v = 0; v < d.n(); ++v)
        v_offsets.push_back(copy_space(vcells, vglue, vtails, d.name(v)));

    std::vector<Cell> ecells;
    std::vector<std::pair<Endpoint, Endpoint>> eglue;
    std::vector<TailFamily> etails;
    struct EdgeCopy {
        int src, dst;
        std::pair<int, int> offsets;
    };
    std::vector<EdgeCopy> copies;
    for (int v = 0; v < d.n(); ++v)
        for (int w = 0; w < d.n(); ++w) {
            const Mult& m = d.mult(v, w);
            if (m.inf)
                throw std::invalid_argument("product: infinite multiplicities have no explicit edges");
            for (std::uint64_t i = 0; i < m.m; ++i) {
                std::string tag = d.name(v) + ">" + d.name(w) + "." + std::to_string(i);
                copies.push_back({v, w, copy_space(ecells, eglue, etails, tag)});
            }
        }
    auto V = make_complex(vcells, vglue, vtails);
    auto E = make_complex(ecells, eglue, etails);
    auto identity_pieces = [&](bool use_range) {
        std::vector<std::vector<Piece>> pieces(E->n_cells());
        std::vector<TailRule> rules;
        for (const EdgeCopy& ec : copies) {
            int target_vertex = use_range ? ec.dst : ec.src;
            auto [vcell_off, vtail_off] = v_offsets[target_vertex];
            for (int c = 0; c < X.n_cells(); ++c)
                pieces[ec.offsets.first + c] = {
                    Piece{X.cell(c).lo, X.cell(c).hi, X.cell(c).zero_length() ? Rat(0) : Rat(1),
                          X.cell(c).zero_length() ? X.cell(c).lo : Rat(0), vcell_off + c}};
            for (int f = 0; f < X.n_tails(); ++f)
                rules.push_back(TailToTail{ec.offsets.second + f, vtail_off + f});
        }
        return std::pair{pieces, rules};
    };
    auto [rp, rr] = identity_pieces(true);
    auto [sp, sr] = identity_pieces(false);
    return PLQuiver{V, E, PLMap(E, V, rp, rr), PLMap(E, V, sp, sr)};
}

// --- tailed classification ------------------------------------------------------

struct TailedClassification {
    TailedSubSet sinks, fin, reg;
};

/// Closed forms from the construction: no sinks (every base sink now emits
/// into its level-one copy, every level emits deeper); finite emitters gain
/// every level; with no sinks the regular vertices equal the finite emitters.
/// The unitized point, when present, is neither a sink nor a finite emitter
/// (whole level families accumulate at it).
inline TailedClassification classify(const TailedQuiver& t) {
    Classification base = classify(t.base);
    TailedClassification out{tailed_empty(t), tailed_empty(t), tailed_empty(t)};
    if (t.tail_base.is_empty()) {
        out.sinks.base = base.sinks;
        out.fin.base = base.fin;
        out.reg.base = base.reg;
        return out;
    }
    out.fin.base = base.fin;
    out.fin.rest = t.tail_base;
    out.reg = out.fin;
    // the symbolic infinity (when unitized) has whole level families in every
    // neighborhood: neither a sink nor a finite emitter
    tailed_canonicalize(t, out.sinks);
    tailed_canonicalize(t, out.fin);
    tailed_canonicalize(t, out.reg);
    return out;
}

inline ValidationReport validate(const TailedQuiver& t) {
    ValidationReport rep = t.discrete_base ? validate(*t.discrete_base) : validate(t.base);
    bool tb = t.tail_base == sinks_set(t.base);
    rep.checks.push_back({"tails attached along the sinks of the base", tb,
                          tb ? "" : "tail base differs from the base sink set"});
    return rep;
}

// --- tailed hereditary/saturated machinery ---------------------------------------

/// r'(s'^{-1}(U)) u U in closed form: the base flows by the base quiver; the
/// level-i copy receives the previous level (level zero being the base part
/// restricted to the tail base).
inline TailedSubSet tailed_hereditary_step(const TailedQuiver& t, const TailedSubSet& u) {
    const OneComplex& X = t.base.V();
    TailedSubSet out = u;
    out.base = set_union(X, out.base, t.base.r.image(t.base.s.preimage(u.base)));
    std::size_t k = u.levels.size() + 1;
    std::vector<SubSet> nl;
    for (std::size_t i = 1; i <= k; ++i) {
        SubSet prev = i == 1 ? set_intersect(X, u.base, t.tail_base) : tailed_level(u, i - 1);
        nl.push_back(set_union(X, tailed_level(u, i), prev));
    }
    out.levels = std::move(nl);
    out.rest = u.rest;  // deep levels only receive the eventual part itself
    tailed_canonicalize(t, out);
    return out;
}

/// Full hereditary closure: the base closes on its own; level i then receives
/// every earlier level cumulatively, the eventual part their union.
inline Iterated<TailedSubSet> tailed_hereditary_closure(const TailedQuiver& t, TailedSubSet u,
                                                        int bound = kDefaultFixpointBound) {
    const OneComplex& X = t.base.V();
    Iterated<TailedSubSet> out;
    out.bound = bound;
    Iterated<SubSet> base = hereditary_closure(t.base, u.base, bound);
    out.steps = base.steps;
    SubSet b = base.stabilized() ? *base.value : base.partial;
    TailedSubSet res;
    res.base = b;
    res.infinity = u.infinity;
    SubSet acc = set_intersect(X, b, t.tail_base);
    for (std::size_t i = 1; i <= u.levels.size(); ++i) {
        acc = set_union(X, acc, tailed_level(u, i));
        res.levels.push_back(acc);
    }
    res.rest = set_union(X, acc, u.rest);
    tailed_canonicalize(t, res);
    if (base.stabilized()) out.value = res;
    out.partial = std::move(res);
    return out;
}

inline bool tailed_is_hereditary(const TailedQuiver& t, const TailedSubSet& u) {
    return tailed_equal(t, tailed_hereditary_step(t, u), u);
}

/// Saturation pulls the other way: a level vertex is regular with a unique
/// out-edge into the next level, a finite-emitting base vertex with all base
/// edges into U (and, if a sink, its level-one copy in U) is forced in.
inline TailedSubSet tailed_saturation_step(const TailedQuiver& t, const TailedSubSet& u) {
    const OneComplex& X = t.base.V();
    Classification base_cls = classify(t.base);
    TailedSubSet out = u;
    // base pull: pointwise outs-in-U set, refined on the sink part by level 1
    SubSet leaking = t.base.s.image(t.base.r.preimage(set_complement(X, u.base)));
    SubSet pointwise = set_complement(X, leaking);
    SubSet sink_ok = set_union(X, set_complement(X, t.tail_base),
                               set_intersect(X, t.tail_base, tailed_level(u, 1)));
    SubSet candidates = set_intersect(X, set_intersect(X, pointwise, base_cls.fin), sink_ok);
    out.base = set_union(X, out.base, interior(X, candidates));
    // level pull: level i receives level i+1
    std::size_t k = u.levels.size();
    std::vector<SubSet> nl;
    for (std::size_t i = 1; i <= k; ++i)
        nl.push_back(set_union(X, tailed_level(u, i), tailed_level(u, i + 1)));
    out.levels = std::move(nl);
    // the eventual part: suffix unions collapse to rest itself
    tailed_canonicalize(t, out);
    return out;
}

inline bool tailed_is_saturated(const TailedQuiver& t, const TailedSubSet& u) {
    return tailed_equal(t, tailed_saturation_step(t, u), u);
}

inline Iterated<TailedSubSet> tailed_saturation(const TailedQuiver& t, TailedSubSet u,
                                                int bound = kDefaultFixpointBound) {
    Iterated<TailedSubSet> out;
    out.bound = bound;
    bool exact = true;
    for (int k = 0; k <= bound; ++k) {
        Iterated<TailedSubSet> hc = tailed_hereditary_closure(t, u, bound);
        if (!hc.stabilized()) exact = false;
        TailedSubSet next = tailed_saturation_step(t, hc.partial);
        if (tailed_equal(t, next, u)) {
            if (exact) out.value = u;
            out.partial = std::move(u);
            out.steps = k;
            return out;
        }
        u = std::move(next);
    }
    out.partial = std::move(u);
    out.steps = bound;
    return out;
}

inline MinimalityVerdict is_minimal(const TailedQuiver& t, int depth = 3,
                                    int bound = kDefaultFixpointBound) {
    MinimalityVerdict out;
    out.bound = bound;
    TailedSubSet full = tailed_full(t);
    bool any_unknown = false;
    std::vector<TailedSubSet> basis;
    for (const SubSet& b : minimality_basis(t.base.V(), depth)) {
        TailedSubSet tb = tailed_empty(t);
        tb.base = b;
        basis.push_back(tb);
        SubSet in_tail = set_intersect(t.base.V(), b, t.tail_base);
        if (!in_tail.is_empty()) {
            TailedSubSet lvl = tailed_empty(t);
            lvl.levels.push_back(in_tail);
            basis.push_back(lvl);
            TailedSubSet deep = tailed_empty(t);
            deep.rest = in_tail;
            basis.push_back(deep);
        }
    }
    for (TailedSubSet& b : basis) {
        tailed_canonicalize(t, b);
        auto sat = tailed_saturation(t, b, bound);
        if (!sat.stabilized()) {
            any_unknown = true;
            continue;
        }
        if (!tailed_equal(t, *sat.value, full)) {
            out.status = MinimalityVerdict::Status::No;
            out.witness = sat.value->base;  // base-part witness for reporting
            return out;
        }
    }
    out.status = any_unknown ? MinimalityVerdict::Status::Unknown : MinimalityVerdict::Status::Yes;
    return out;
}

// --- tailed loop analysis ----------------------------------------------------------

/// Loops never enter the tails (level edges strictly deepen), and no loop
/// vertex is a sink, so both loop conditions coincide with the base's.
inline LoopVerdict condition_L(const TailedQuiver& t, int maxlen = kDefaultLoopBound) {
    return t.discrete_base ? condition_L(*t.discrete_base, maxlen)
                           : condition_L(t.base, maxlen);
}
inline LoopVerdict condition_K(const TailedQuiver& t, int maxlen = kDefaultLoopBound) {
    return t.discrete_base ? condition_K(*t.discrete_base, maxlen)
                           : condition_K(t.base, maxlen);
}

inline SimplicityVerdict is_simple(const TailedQuiver& t, int maxlen = kDefaultLoopBound) {
    SimplicityVerdict out;
    out.bound = maxlen;
    MinimalityVerdict m = is_minimal(t);
    if (m.status == MinimalityVerdict::Status::No) {
        out.status = SimplicityVerdict::Status::NotSimple;
        out.reason = "not minimal";
        out.witness = m.witness;
        return out;
    }
    LoopVerdict l = condition_L(t, maxlen);
    if (l.status == Verdict::Fails) {
        out.status = SimplicityVerdict::Status::NotSimple;
        out.reason = "Condition (L) fails";
        out.witness = l.witness;
        return out;
    }
    if (m.status == MinimalityVerdict::Status::Yes && l.status == Verdict::Holds && l.complete) {
        out.status = SimplicityVerdict::Status::Simple;
        out.reason = "minimal and Condition (L)";
        return out;
    }
    out.status = SimplicityVerdict::Status::Unknown;
    out.reason = m.status == MinimalityVerdict::Status::Unknown ? "minimality unresolved"
                                                                : "Condition (L) unresolved";
    return out;
}

// --- the quiver variant ---------------------------------------------------------

using AnyQuiver = std::variant<DiscreteQuiver, PLQuiver, TailedQuiver>;

inline ValidationReport validate(const AnyQuiver& q) {
    return std::visit([](const auto& v) { return validate(v); }, q);
}
inline LoopVerdict condition_L_any(const AnyQuiver& q, int maxlen) {
    return std::visit([&](const auto& v) { return condition_L(v, maxlen); }, q);
}
inline LoopVerdict condition_K_any(const AnyQuiver& q, int maxlen) {
    return std::visit([&](const auto& v) { return condition_K(v, maxlen); }, q);
}
inline SimplicityVerdict is_simple_any(const AnyQuiver& q, int maxlen) {
    return std::visit([&](const auto& v) { return is_simple(v, maxlen); }, q);
}

inline AnyQuiver unitize_any(const AnyQuiver& q) {
    if (const auto* d = std::get_if<DiscreteQuiver>(&q)) return AnyQuiver{unitize(*d)};
    if (const auto* p = std::get_if<PLQuiver>(&q)) return AnyQuiver{unitize(*p)};
    return AnyQuiver{unitize(std::get<TailedQuiver>(q))};
}
inline TailedQuiver add_tails_any(const AnyQuiver& q) {
    if (const auto* d = std::get_if<DiscreteQuiver>(&q)) return add_tails(*d);
    if (const auto* p = std::get_if<PLQuiver>(&q)) return add_tails(*p);
    return std::get<TailedQuiver>(q);
}

}  // namespace qv
