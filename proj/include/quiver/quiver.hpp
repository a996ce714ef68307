#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "quiver/discrete.hpp"
#include "quiver/plmap.hpp"
#include "quiver/subset.hpp"
#include "quiver/verdicts.hpp"

namespace qv {

/// Topological quiver with piecewise-linear structure: vertex and edge
/// spaces, a range map (must be open) and a source map. The measures are
/// never materialized: every implemented criterion depends on them only
/// through supp lambda_v = r^{-1}(v), which holds fiberwise by construction.
struct PLQuiver {
    ComplexPtr vertex_space;
    ComplexPtr edge_space;
    PLMap r, s;

    const OneComplex& V() const { return *vertex_space; }
    const OneComplex& E() const { return *edge_space; }

    friend bool operator==(const PLQuiver& a, const PLQuiver& b) {
        return *a.vertex_space == *b.vertex_space && *a.edge_space == *b.edge_space &&
               a.r == b.r && a.s == b.s;
    }
};

/// Vertex classification (Prop 3.16 shapes): all three are open subsets of
/// the vertex space, reg = fin \ closure(sinks).
struct Classification {
    SubSet sinks, fin, reg;
};

inline PLQuiver pl_view(const DiscreteQuiver& d) {
    return PLQuiver{d.vertex_complex(), d.edge_complex(), d.range_map(), d.source_map()};
}

// --- classification ---------------------------------------------------------

inline SubSet sinks_set(const PLQuiver& q) {
    return set_complement(q.V(), closure(q.V(), q.s.image(SubSet::all(q.E()))));
}

/// Finite emitters: v admitting a precompact neighborhood V with s^{-1}(V-)
/// compact and r a local homeomorphism on s^{-1}(V). Piecewise linearity
/// collapses the neighborhood quantifier to a closed bad set: images under s
/// of the non-local-homeo region of r, the constant images of infinite edge
/// families, and (in a compactified vertex space) the point at infinity when
/// s carries whole families near it.
inline SubSet fin_set(const PLQuiver& q) {
    SubSet bad = q.s.image(set_complement(q.E(), q.r.local_homeo_region()));
    bool any_tail_to_tail = false;
    for (const TailRule& rule : q.s.tail_rules()) {
        if (const auto* c = std::get_if<TailToPoint>(&rule)) {
            bad = set_union(q.V(), bad, single_point(q.V(), c->target));
        } else {
            any_tail_to_tail = true;
        }
    }
    if (q.V().compactified() && any_tail_to_tail) bad.set_infinity(true);
    bad.canonicalize(q.V());
    return set_complement(q.V(), bad);
}

inline Classification classify(const PLQuiver& q) {
    SubSet sinks = sinks_set(q);
    SubSet fin = fin_set(q);
    SubSet reg = set_difference(q.V(), fin, closure(q.V(), sinks));
    return Classification{std::move(sinks), std::move(fin), std::move(reg)};
}

inline Classification classify(const DiscreteQuiver& d) {
    const OneComplex& X = *d.vertex_complex();
    SubSet sinks = d.mask_to_subset(d.sinks_mask());
    SubSet fin = d.mask_to_subset(d.fin_mask());
    SubSet reg = d.mask_to_subset(d.reg_mask());
    // tail-family vertices are edgeless: sinks and finite emitters, never regular
    for (int t = 0; t < X.n_tails(); ++t) {
        sinks.set_tail_part(t, TailSet::all());
        fin.set_tail_part(t, TailSet::all());
    }
    sinks.canonicalize(X);
    fin.canonicalize(X);
    return Classification{std::move(sinks), std::move(fin), std::move(reg)};
}

// --- validation ---------------------------------------------------------------

inline ValidationReport validate(const PLQuiver& q) {
    ValidationReport rep;
    auto structural = [&](const char* name, const PLMap& m) {
        auto errs = m.structural_errors();
        if (errs.empty()) {
            rep.checks.push_back({std::string(name) + " continuous (coverage, breakpoints, glue)", true, ""});
        } else {
            for (const auto& e : errs)
                rep.checks.push_back({std::string(name) + " continuous", false, e});
        }
    };
    structural("r", q.r);
    structural("s", q.s);
    if (rep.ok()) {
        auto oc = q.r.open_check();
        if (oc.open) {
            rep.checks.push_back({"r open", true, ""});
        } else {
            std::string w = "not a neighborhood image at a critical point";
            rep.checks.push_back({"r open", false, w});
        }
    } else {
        rep.checks.push_back({"r open", false, "skipped: structure invalid"});
    }
    rep.checks.push_back({"measures: supp lambda_v = r^{-1}(v)", true,
                          "not materialized; fiberwise support constraint holds by construction"});
    return rep;
}

inline ValidationReport validate(const DiscreteQuiver& d) {
    ValidationReport rep;
    rep.checks.push_back({"vertex/edge spaces discrete", true, ""});
    rep.checks.push_back({"r open, s continuous", true, "automatic in the discrete topology"});
    bool weights_ok = true;
    std::string witness;
    for (const auto& [vw, ws] : d.weight_table()) {
        const Mult& m = d.mult(vw.first, vw.second);
        if (m.inf && !ws.empty()) {
            weights_ok = false;
            witness = "weights on infinite class " + d.name(vw.first) + "->" + d.name(vw.second);
            break;
        }
        for (std::size_t i = 0; i < ws.size(); ++i) {
            if (ws[i].sign() <= 0) {
                weights_ok = false;
                witness = "nonpositive weight on edge " + d.name(vw.first) + "->" +
                          d.name(vw.second) + "#" + std::to_string(i);
                break;
            }
            if (i >= m.m) {
                weights_ok = false;
                witness = "weight index beyond multiplicity on " + d.name(vw.first) + "->" +
                          d.name(vw.second);
                break;
            }
        }
        if (!weights_ok) break;
    }
    rep.checks.push_back({"weights positive on every edge class (supp lambda_v = r^{-1}(v))",
                          weights_ok, witness});
    return rep;
}

// --- compact left multiplication (Cor 3.14 specialization) -------------------

/// True iff phi(f) acts compactly for f with the given open support: the
/// s-preimage of the support is precompact and r restricts there to a local
/// homeomorphism.
inline bool compact_left_mult(const PLQuiver& q, const SubSet& osupp_f) {
    SubSet pre = q.s.preimage(osupp_f);
    if (!is_precompact(q.E(), closure(q.E(), pre))) return false;
    return is_subset(q.E(), pre, q.r.local_homeo_region());
}

inline bool compact_left_mult(const DiscreteQuiver& d, const SubSet& osupp_f) {
    // tail-family vertices emit nothing, so only named vertices matter
    for (int v = 0; v < d.n(); ++v)
        if (osupp_f.coord_member(v, Rat(0)) && d.out_infinite(v)) return false;
    return true;
}

}  // namespace qv
