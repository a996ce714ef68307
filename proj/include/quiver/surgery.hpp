#pragma once

// Complex surgery: carving closed subcomplexes, splitting cells at points,
// and the two quiver constructions built from them (quotient by a hereditary
// open set, doubling along an open set of regular vertices).

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "quiver/quiver.hpp"

namespace qv {

/// A closed subcomplex of X, optionally subdivided at interior cut points.
/// Coordinates are preserved, so affine map data transfers verbatim.
struct CarvedComplex {
    std::vector<Cell> cells;
    std::vector<std::pair<Endpoint, Endpoint>> glue;
    std::vector<TailFamily> tails;
    std::vector<int> tail_map;                              // old tail -> new or -1
    std::vector<std::vector<std::pair<int, Iv>>> pieces_of;  // old cell -> (new idx, span)
    ComplexPtr space;                                        // standalone build

    /// New cell whose span contains [lo, hi] within the given old cell.
    int find_cell(int old_cell, const Rat& lo, const Rat& hi) const {
        for (const auto& [idx, iv] : pieces_of.at(old_cell))
            if (iv.lo <= lo && hi <= iv.hi) return idx;
        throw std::logic_error("carve: span not contained in any kept piece");
    }

    std::optional<CellPoint> map_point(const CellPoint& p) const {
        for (const auto& [idx, iv] : pieces_of.at(p.cell))
            if (iv.lo <= p.x && p.x <= iv.hi) return CellPoint{idx, p.x};
        return std::nullopt;
    }
};

/// Carves the closed set `kept` out of X as a complex of its own, splitting
/// the kept intervals additionally at the strictly interior `cuts`. Tail
/// families must be kept entirely or dropped entirely.
inline CarvedComplex carve(const OneComplex& X, const SubSet& kept,
                           const std::vector<std::vector<Rat>>& cuts,
                           const std::string& name_suffix = "") {
    CarvedComplex out;
    out.pieces_of.resize(X.n_cells());
    for (int c = 0; c < X.n_cells(); ++c) {
        const Cell& cell = X.cell(c);
        const auto& part = kept.cell_part(c);
        for (const Iv& iv : part)
            if (!iv.lc || !iv.hc) throw std::invalid_argument("carve: kept set is not closed");
        int seq = 0;
        bool whole = part.size() == 1 && part[0].lo == cell.lo && part[0].hi == cell.hi;
        for (const Iv& iv : part) {
            std::vector<Rat> pts{iv.lo};
            if (c < static_cast<int>(cuts.size()))
                for (const Rat& x : cuts[c])
                    if (iv.lo < x && x < iv.hi) pts.push_back(x);
            pts.push_back(iv.hi);
            std::sort(pts.begin(), pts.end());
            pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
            int prev_new = -1;
            for (std::size_t k = 0; k + 1 < pts.size() || pts.size() == 1; ++k) {
                Rat lo = pts[k];
                Rat hi = pts.size() == 1 ? pts[k] : pts[k + 1];
                std::string nm = cell.name + name_suffix;
                if (!whole || pts.size() > 2) nm += "." + std::to_string(seq);
                int idx = static_cast<int>(out.cells.size());
                out.cells.push_back(Cell{nm, lo, hi});
                out.pieces_of[c].push_back({idx, Iv{lo, hi, true, true}});
                if (prev_new >= 0)  // reconnect at the cut point
                    out.glue.push_back({Endpoint{prev_new, 1}, Endpoint{idx, 0}});
                prev_new = idx;
                ++seq;
                if (pts.size() == 1) break;
            }
        }
    }
    // old glue classes whose realized point survives glue their surviving ends
    for (int cls = 0; cls < X.n_classes(); ++cls) {
        const auto& members = X.class_members(cls);
        std::vector<Endpoint> new_eps;
        for (const Endpoint& e : members) {
            Rat x = X.endpoint_coord(e);
            if (!kept.coord_member(e.cell, x)) continue;
            for (const auto& [idx, iv] : out.pieces_of[e.cell]) {
                if (iv.lo == x) { new_eps.push_back(Endpoint{idx, 0}); break; }
                if (iv.hi == x) { new_eps.push_back(Endpoint{idx, 1}); break; }
            }
        }
        std::sort(new_eps.begin(), new_eps.end());
        new_eps.erase(std::unique(new_eps.begin(), new_eps.end()), new_eps.end());
        for (std::size_t i = 1; i < new_eps.size(); ++i)
            out.glue.push_back({new_eps[0], new_eps[i]});
    }
    out.tail_map.assign(X.n_tails(), -1);
    for (int t = 0; t < X.n_tails(); ++t) {
        const TailSet& ts = kept.tail_part(t);
        if (ts.is_empty()) continue;
        if (!ts.is_all())
            throw std::invalid_argument("carve: partial tail families unsupported (" +
                                        X.tail(t).name + ")");
        out.tail_map[t] = static_cast<int>(out.tails.size());
        out.tails.push_back(TailFamily{X.tail(t).name + name_suffix});
    }
    out.space = make_complex(out.cells, out.glue, out.tails);
    return out;
}

namespace detail {

/// Rebuilds the pieces of `m` over carved domain and codomain. `cod_offset`
/// shifts target cell indices (used when the carved codomain is embedded in
/// a larger combined complex); `cod` spans must already be cut so that every
/// clipped piece image fits a single carved codomain cell.
inline std::vector<std::vector<Piece>> retarget_pieces(const PLMap& m, const CarvedComplex& dom,
                                                       const CarvedComplex& cod,
                                                       int cod_offset = 0) {
    std::vector<std::vector<Piece>> out(dom.cells.size());
    for (int c = 0; c < static_cast<int>(dom.pieces_of.size()); ++c) {
        for (const auto& [idx, span] : dom.pieces_of[c]) {
            for (const Piece& p : m.pieces()[c]) {
                Rat lo = std::max(p.lo, span.lo), hi = std::min(p.hi, span.hi);
                if (lo > hi) continue;
                // a single-point overlap matters only for point spans; on a
                // positive span it is a boundary touch the neighbour covers
                if (lo == hi && span.lo != span.hi) continue;
                Rat vlo = p.value_at(lo), vhi = p.value_at(hi);
                Rat vmin = std::min(vlo, vhi), vmax = std::max(vlo, vhi);
                int tgt = cod.find_cell(p.target, vmin, vmax) + cod_offset;
                out[idx].push_back(Piece{lo, hi, p.slope, p.icpt, tgt});
            }
        }
    }
    for (auto& ps : out) {
        std::sort(ps.begin(), ps.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
        ps.erase(std::unique(ps.begin(), ps.end(),
                             [](const Piece& a, const Piece& b) {
                                 return a.lo == b.lo && a.hi == b.hi;
                             }),
                 ps.end());
    }
    return out;
}

/// Coordinates at which edge cells must be cut so that every piece of `m`
/// maps atomic sub-pieces into single carved codomain cells: the solutions of
/// piece(x) = y over all codomain cut coordinates y in the piece's target.
inline std::vector<std::vector<Rat>> edge_cuts_for(const PLMap& m,
                                                   const std::vector<std::vector<Rat>>& cod_cuts) {
    std::vector<std::vector<Rat>> cuts(m.domain().n_cells());
    for (int c = 0; c < m.domain().n_cells(); ++c) {
        for (const Piece& p : m.pieces()[c]) {
            if (p.target >= static_cast<int>(cod_cuts.size())) continue;
            if (p.slope == Rat(0) || p.lo == p.hi) continue;
            for (const Rat& y : cod_cuts[p.target]) {
                Rat x = (y - p.icpt) / p.slope;
                if (p.lo < x && x < p.hi) cuts[c].push_back(x);
            }
        }
    }
    return cuts;
}

inline std::vector<Rat> boundary_coords(const OneComplex& X, const SubSet& S, int cell) {
    std::vector<Rat> out;
    SubSet bd = boundary(X, S);
    for (const Iv& iv : bd.cell_part(cell)) {
        if (!iv.is_point())
            throw std::logic_error("expected a finite boundary, found an interval");
        out.push_back(iv.lo);
    }
    return out;
}

}  // namespace detail

/// Quotient quiver Q_U for a hereditary open U: vertex space E^0 \ U, edge
/// space E^1 \ r^{-1}(U), with the restricted maps. Weights restrict along;
/// for PL data the measures are untracked so only the structure transfers.
inline PLQuiver quotient_quiver(const PLQuiver& q, const SubSet& U) {
    if (!is_open(q.V(), U)) throw std::invalid_argument("quotient: U must be open");
    if (!is_subset(q.V(), q.r.image(q.s.preimage(U)), U))
        throw std::invalid_argument("quotient: U must be hereditary");
    SubSet keptV = set_complement(q.V(), U);
    SubSet keptE = set_complement(q.E(), q.r.preimage(U));
    CarvedComplex cv = carve(q.V(), keptV, {});
    CarvedComplex ce = carve(q.E(), keptE, {});
    auto remap_rules = [&](const PLMap& m) {
        std::vector<TailRule> rules;
        for (const TailRule& rule : m.tail_rules()) {
            int src = std::holds_alternative<TailToTail>(rule) ? std::get<TailToTail>(rule).src
                                                               : std::get<TailToPoint>(rule).src;
            if (ce.tail_map[src] < 0) continue;
            if (const auto* tt = std::get_if<TailToTail>(&rule)) {
                if (cv.tail_map[tt->dst] < 0)
                    throw std::logic_error("quotient: kept edge family targets removed tail");
                rules.push_back(TailToTail{ce.tail_map[src], cv.tail_map[tt->dst]});
            } else {
                const auto& tp = std::get<TailToPoint>(rule);
                Point target = tp.target;
                if (const auto* cp = std::get_if<CellPoint>(&target)) {
                    auto mp = cv.map_point(*cp);
                    if (!mp) throw std::logic_error("quotient: kept edge family targets removed point");
                    target = *mp;
                } else if (const auto* dtp = std::get_if<TailPoint>(&target)) {
                    if (cv.tail_map[dtp->tail] < 0)
                        throw std::logic_error("quotient: kept edge family targets removed tail point");
                    target = TailPoint{cv.tail_map[dtp->tail], dtp->index};
                }
                rules.push_back(TailToPoint{ce.tail_map[src], target});
            }
        }
        return rules;
    };
    PLMap r2(ce.space, cv.space, detail::retarget_pieces(q.r, ce, cv), remap_rules(q.r));
    PLMap s2(ce.space, cv.space, detail::retarget_pieces(q.s, ce, cv), remap_rules(q.s));
    return PLQuiver{cv.space, ce.space, std::move(r2), std::move(s2)};
}

/// Doubled quiver Q(V) for open V inside the regular vertices: two copies of
/// the spaces glued along the complement of W = Int(E^0_reg \ V) and of
/// r^{-1}(W); the second copy's range stays in the second copy while every
/// source lands in the first, so each added vertex copy is a sink.
inline PLQuiver relative_quiver(const PLQuiver& q, const SubSet& V) {
    Classification cls = classify(q);
    if (!is_open(q.V(), V)) throw std::invalid_argument("relative quiver: V must be open");
    if (!is_subset(q.V(), V, cls.reg))
        throw std::invalid_argument("relative quiver: V must lie in the regular vertices");
    SubSet W = interior(q.V(), set_difference(q.V(), cls.reg, V));
    SubSet Wbar = closure(q.V(), W);

    std::vector<std::vector<Rat>> vcuts(q.V().n_cells());
    for (int c = 0; c < q.V().n_cells(); ++c) vcuts[c] = detail::boundary_coords(q.V(), W, c);

    CarvedComplex v0 = carve(q.V(), SubSet::all(q.V()), vcuts);
    CarvedComplex v1 = carve(q.V(), Wbar, vcuts, ".1");

    SubSet RW = q.r.preimage(W);
    SubSet RWbar = closure(q.E(), RW);
    std::vector<std::vector<Rat>> ecuts_r = detail::edge_cuts_for(q.r, vcuts);
    std::vector<std::vector<Rat>> ecuts_s = detail::edge_cuts_for(q.s, vcuts);
    std::vector<std::vector<Rat>> ecuts(q.E().n_cells());
    for (int c = 0; c < q.E().n_cells(); ++c) {
        ecuts[c] = ecuts_r[c];
        ecuts[c].insert(ecuts[c].end(), ecuts_s[c].begin(), ecuts_s[c].end());
        for (const Rat& x : detail::boundary_coords(q.E(), RW, c)) ecuts[c].push_back(x);
    }
    CarvedComplex e0 = carve(q.E(), SubSet::all(q.E()), ecuts);
    CarvedComplex e1 = carve(q.E(), RWbar, ecuts, ".1");

    // combined complexes: copy0 cells then copy1 cells, cross-glued on the
    // boundaries of W and r^{-1}(W)
    auto combine = [](const CarvedComplex& a, const CarvedComplex& b, const OneComplex& X,
                      const SubSet& bd_source) {
        std::vector<Cell> cells = a.cells;
        cells.insert(cells.end(), b.cells.begin(), b.cells.end());
        int off = static_cast<int>(a.cells.size());
        auto glue = a.glue;
        for (auto [x, y] : b.glue)
            glue.push_back({Endpoint{x.cell + off, x.end}, Endpoint{y.cell + off, y.end}});
        // cross glue: every boundary point of bd_source is realized in both copies
        SubSet bd = boundary(X, bd_source);
        for (int c = 0; c < X.n_cells(); ++c)
            for (const Iv& iv : bd.cell_part(c)) {
                CellPoint p{c, iv.lo};
                auto p0 = a.map_point(p);
                auto p1 = b.map_point(p);
                if (!p0 || !p1) throw std::logic_error("relative quiver: boundary point not kept");
                auto ep = [](const CarvedComplex& cc, const CellPoint& cp,
                             int offset) -> Endpoint {
                    const Cell& cell = cc.cells[cp.cell];
                    if (cell.lo == cp.x) return Endpoint{cp.cell + offset, 0};
                    if (cell.hi == cp.x) return Endpoint{cp.cell + offset, 1};
                    throw std::logic_error("relative quiver: boundary point is not a cut end");
                };
                glue.push_back({ep(a, *p0, 0), ep(b, *p1, off)});
            }
        std::vector<TailFamily> tails = a.tails;
        tails.insert(tails.end(), b.tails.begin(), b.tails.end());
        return make_complex(cells, glue, tails);
    };

    ComplexPtr F0 = combine(v0, v1, q.V(), W);
    ComplexPtr F1 = combine(e0, e1, q.E(), RW);
    int v_off = static_cast<int>(v0.cells.size());
    int e_tail_off = static_cast<int>(e0.tails.size());

    auto pieces_r0 = detail::retarget_pieces(q.r, e0, v0, 0);
    auto pieces_r1 = detail::retarget_pieces(q.r, e1, v1, v_off);
    auto pieces_s0 = detail::retarget_pieces(q.s, e0, v0, 0);
    auto pieces_s1 = detail::retarget_pieces(q.s, e1, v0, 0);  // sources land in copy 0

    auto concat = [](std::vector<std::vector<Piece>> a, const std::vector<std::vector<Piece>>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };

    // tail rules: copy0 keeps the originals (remapped); copy1 families exist
    // for edge tails inside r^{-1}(W) and keep their range in copy 1
    auto remap_point = [&](const CarvedComplex& cv, int tail_off, const Point& pt) -> Point {
        if (const auto* cp = std::get_if<CellPoint>(&pt)) {
            auto mp = cv.map_point(*cp);
            if (!mp) throw std::logic_error("relative quiver: rule target not kept");
            return CellPoint{mp->cell + (&cv == &v1 ? v_off : 0), mp->x};
        }
        if (const auto* tp = std::get_if<TailPoint>(&pt)) {
            int nt = cv.tail_map[tp->tail];
            if (nt < 0) throw std::logic_error("relative quiver: rule targets dropped tail");
            return TailPoint{nt + tail_off, tp->index};
        }
        return pt;
    };
    std::vector<TailRule> rules_r, rules_s;
    for (const TailRule& rule : q.r.tail_rules()) {
        if (const auto* tt = std::get_if<TailToTail>(&rule)) {
            rules_r.push_back(TailToTail{e0.tail_map[tt->src], v0.tail_map[tt->dst]});
        } else {
            const auto& tp = std::get<TailToPoint>(rule);
            rules_r.push_back(TailToPoint{e0.tail_map[tp.src], remap_point(v0, 0, tp.target)});
        }
    }
    for (const TailRule& rule : q.s.tail_rules()) {
        if (const auto* tt = std::get_if<TailToTail>(&rule)) {
            rules_s.push_back(TailToTail{e0.tail_map[tt->src], v0.tail_map[tt->dst]});
        } else {
            const auto& tp = std::get<TailToPoint>(rule);
            rules_s.push_back(TailToPoint{e0.tail_map[tp.src], remap_point(v0, 0, tp.target)});
        }
    }
    for (int t = 0; t < q.E().n_tails(); ++t) {
        if (e1.tail_map[t] < 0) continue;  // family not inside r^{-1}(W)
        int copy_src = e1.tail_map[t] + e_tail_off;
        for (const TailRule& rule : q.r.tail_rules()) {
            const auto* tp = std::get_if<TailToPoint>(&rule);
            if (tp && tp->src == t)
                rules_r.push_back(TailToPoint{copy_src, remap_point(v1, 0, tp->target)});
        }
        for (const TailRule& rule : q.s.tail_rules()) {
            const auto* tp = std::get_if<TailToPoint>(&rule);
            if (tp && tp->src == t)
                rules_s.push_back(TailToPoint{copy_src, remap_point(v0, 0, tp->target)});
        }
    }

    PLMap r2(F1, F0, concat(pieces_r0, pieces_r1), rules_r);
    PLMap s2(F1, F0, concat(pieces_s0, pieces_s1), rules_s);
    return PLQuiver{F0, F1, std::move(r2), std::move(s2)};
}

}  // namespace qv
