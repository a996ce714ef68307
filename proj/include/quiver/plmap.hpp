#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "quiver/complex.hpp"
#include "quiver/subset.hpp"

namespace qv {

/// One affine segment of a PL map: on [lo, hi] (a subinterval of its domain
/// cell) the map is x -> slope * x + icpt, landing inside the named codomain
/// cell. For a zero-length domain cell the single piece has lo == hi.
struct Piece {
    Rat lo, hi;
    Rat slope, icpt;
    int target = -1;
    Rat value_at(const Rat& x) const { return slope * x + icpt; }
    friend bool operator==(const Piece& a, const Piece& b) {
        return a.lo == b.lo && a.hi == b.hi && a.slope == b.slope && a.icpt == b.icpt &&
               a.target == b.target;
    }
};

/// Tail-to-tail rule maps family src into family dst index-preservingly.
struct TailToTail {
    int src = -1, dst = -1;
    friend bool operator==(const TailToTail& a, const TailToTail& b) {
        return a.src == b.src && a.dst == b.dst;
    }
};
/// Whole-family constant rule: every point of family src maps to `target`.
struct TailToPoint {
    int src = -1;
    Point target;
    friend bool operator==(const TailToPoint& a, const TailToPoint& b) {
        return a.src == b.src && a.target == b.target;
    }
};
using TailRule = std::variant<TailToTail, TailToPoint>;

struct FiberCount {
    bool infinite = false;
    std::int64_t count = 0;
};

struct OpenCheck {
    bool open = true;
    std::optional<Point> witness;
};

namespace detail {
inline bool point_less(const Point& a, const Point& b) {
    if (a.index() != b.index()) return a.index() < b.index();
    if (const auto* ca = std::get_if<CellPoint>(&a)) {
        const auto& cb = std::get<CellPoint>(b);
        if (ca->cell != cb.cell) return ca->cell < cb.cell;
        return ca->x < cb.x;
    }
    if (const auto* ta = std::get_if<TailPoint>(&a)) {
        const auto& tb = std::get<TailPoint>(b);
        if (ta->tail != tb.tail) return ta->tail < tb.tail;
        return ta->index < tb.index;
    }
    return false;
}
}  // namespace detail

/// Piecewise-linear rational map between OneComplexes. Stores raw piece data;
/// structural_errors() reports coverage/continuity violations (validation is
/// deferred, so a discontinuous description is representable but invalid).
class PLMap {
public:
    PLMap() = default;
    PLMap(ComplexPtr dom, ComplexPtr cod, std::vector<std::vector<Piece>> pieces,
          std::vector<TailRule> tail_rules = {})
        : dom_(std::move(dom)), cod_(std::move(cod)), pieces_(std::move(pieces)),
          tail_rules_(std::move(tail_rules)) {
        if (!dom_ || !cod_) throw std::invalid_argument("PLMap: null complex");
        if (dom_->compactified())
            throw std::invalid_argument("PLMap: compactified domain unsupported");
        if (static_cast<int>(pieces_.size()) != dom_->n_cells())
            throw std::invalid_argument("PLMap: piece table size mismatch");
        for (auto& cell_pieces : pieces_)
            std::sort(cell_pieces.begin(), cell_pieces.end(),
                      [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
    }

    const OneComplex& domain() const { return *dom_; }
    const OneComplex& codomain() const { return *cod_; }
    ComplexPtr domain_ptr() const { return dom_; }
    ComplexPtr codomain_ptr() const { return cod_; }
    const std::vector<std::vector<Piece>>& pieces() const { return pieces_; }
    const std::vector<TailRule>& tail_rules() const { return tail_rules_; }

    /// Coverage, range and continuity diagnostics; empty means well-formed.
    std::vector<std::string> structural_errors() const {
        std::vector<std::string> errs;
        for (int c = 0; c < dom_->n_cells(); ++c) {
            const Cell& cell = dom_->cell(c);
            const auto& ps = pieces_[c];
            if (ps.empty()) {
                errs.push_back("cell " + cell.name + ": no pieces");
                continue;
            }
            if (ps.front().lo != cell.lo || ps.back().hi != cell.hi)
                errs.push_back("cell " + cell.name + ": pieces do not cover the cell");
            for (size_t i = 0; i < ps.size(); ++i) {
                const Piece& p = ps[i];
                if (p.lo > p.hi || (p.lo == p.hi && !cell.zero_length()))
                    errs.push_back("cell " + cell.name + ": degenerate piece");
                if (p.target < 0 || p.target >= cod_->n_cells()) {
                    errs.push_back("cell " + cell.name + ": piece targets unknown cell");
                    continue;
                }
                const Cell& tc = cod_->cell(p.target);
                Rat vlo = p.value_at(p.lo), vhi = p.value_at(p.hi);
                Rat vmin = std::min(vlo, vhi), vmax = std::max(vlo, vhi);
                if (vmin < tc.lo || vmax > tc.hi)
                    errs.push_back("cell " + cell.name + ": piece leaves target cell " + tc.name);
                if (i + 1 < ps.size()) {
                    const Piece& q = ps[i + 1];
                    if (p.hi != q.lo) {
                        errs.push_back("cell " + cell.name + ": gap or overlap between pieces");
                    } else if (!values_equal(p, q, p.hi)) {
                        errs.push_back("cell " + cell.name + ": discontinuity at breakpoint " +
                                       p.hi.str());
                    }
                }
            }
        }
        // Glued domain endpoints must map to one realized codomain point.
        for (int cls = 0; cls < dom_->n_classes(); ++cls) {
            const auto& members = dom_->class_members(cls);
            if (members.size() < 2) continue;
            std::optional<Point> first;
            for (const Endpoint& e : members) {
                if (pieces_[e.cell].empty()) { first.reset(); break; }
                Point v = eval_cell(e.cell, dom_->endpoint_coord(e));
                if (!first) first = v;
                else if (!cod_->points_equal(*first, v)) {
                    errs.push_back("glued endpoints of class containing cell " +
                                   dom_->cell(e.cell).name + " map to different points");
                    break;
                }
            }
        }
        std::vector<bool> ruled(dom_->n_tails(), false);
        for (const TailRule& r : tail_rules_) {
            int src = std::holds_alternative<TailToTail>(r) ? std::get<TailToTail>(r).src
                                                            : std::get<TailToPoint>(r).src;
            if (src < 0 || src >= dom_->n_tails()) {
                errs.push_back("tail rule for unknown tail");
                continue;
            }
            if (ruled[src]) errs.push_back("duplicate tail rule for " + dom_->tail(src).name);
            ruled[src] = true;
            if (const auto* tt = std::get_if<TailToTail>(&r)) {
                if (tt->dst < 0 || tt->dst >= cod_->n_tails())
                    errs.push_back("tail rule targets unknown tail");
            } else {
                const auto& tp = std::get<TailToPoint>(r);
                if (std::holds_alternative<InfinityPoint>(tp.target))
                    errs.push_back("tail rule may not target the point at infinity");
                else if (const auto* cp = std::get_if<CellPoint>(&tp.target)) {
                    if (cp->cell < 0 || cp->cell >= cod_->n_cells() ||
                        cp->x < cod_->cell(cp->cell).lo || cp->x > cod_->cell(cp->cell).hi)
                        errs.push_back("tail rule targets a point outside the codomain");
                } else {
                    const auto& dtp = std::get<TailPoint>(tp.target);
                    if (dtp.tail < 0 || dtp.tail >= cod_->n_tails())
                        errs.push_back("tail rule targets unknown tail point");
                }
            }
        }
        for (int t = 0; t < dom_->n_tails(); ++t)
            if (!ruled[t]) errs.push_back("tail " + dom_->tail(t).name + " has no rule");
        return errs;
    }

    Point eval(const Point& p) const {
        if (std::holds_alternative<InfinityPoint>(p))
            throw std::invalid_argument("PLMap: cannot evaluate at infinity");
        if (const auto* tp = std::get_if<TailPoint>(&p)) {
            for (const TailRule& r : tail_rules_) {
                if (const auto* tt = std::get_if<TailToTail>(&r)) {
                    if (tt->src == tp->tail) return TailPoint{tt->dst, tp->index};
                } else {
                    const auto& c = std::get<TailToPoint>(r);
                    if (c.src == tp->tail) return c.target;
                }
            }
            throw std::invalid_argument("PLMap: unmapped tail point");
        }
        const auto& cp = std::get<CellPoint>(p);
        return eval_cell(cp.cell, cp.x);
    }

    SubSet image(const SubSet& S) const {
        if (!S.compatible_with(*dom_)) throw std::invalid_argument("image: ambient mismatch");
        SubSet out(*cod_);
        for (int c = 0; c < dom_->n_cells(); ++c) {
            for (const Piece& p : pieces_[c]) {
                for (const Iv& iv : S.cell_part(c)) {
                    auto clipped = clip(iv, p.lo, p.hi);
                    if (!clipped) continue;
                    out.add_interval(p.target, transform(*clipped, p));
                }
            }
        }
        for (const TailRule& r : tail_rules_) {
            if (const auto* tt = std::get_if<TailToTail>(&r)) {
                const TailSet& src = S.tail_part(tt->src);
                out.set_tail_part(tt->dst, tail_union(out.tail_part(tt->dst), src));
            } else {
                const auto& c = std::get<TailToPoint>(r);
                if (!S.tail_part(c.src).is_empty()) add_point(out, c.target);
            }
        }
        out.canonicalize(*cod_);
        return out;
    }

    SubSet preimage(const SubSet& S) const {
        if (!S.compatible_with(*cod_)) throw std::invalid_argument("preimage: ambient mismatch");
        SubSet out(*dom_);
        for (int c = 0; c < dom_->n_cells(); ++c) {
            for (const Piece& p : pieces_[c]) {
                if (p.lo == p.hi || p.slope == Rat(0)) {
                    Point v = CellPoint{p.target, p.value_at(p.lo)};
                    if (S.contains(*cod_, v)) out.add_interval(c, Iv{p.lo, p.hi, true, true});
                    continue;
                }
                for (const Iv& iv : S.cell_part(p.target)) {
                    Iv back = inverse_transform(iv, p);
                    auto clipped = clip(back, p.lo, p.hi);
                    if (clipped) out.add_interval(c, *clipped);
                }
            }
        }
        for (const TailRule& r : tail_rules_) {
            if (const auto* tt = std::get_if<TailToTail>(&r)) {
                out.set_tail_part(tt->src, S.tail_part(tt->dst));
            } else {
                const auto& c = std::get<TailToPoint>(r);
                out.set_tail_part(c.src, S.contains(*cod_, c.target) ? TailSet::all() : TailSet::none());
            }
        }
        out.canonicalize(*dom_);
        return out;
    }

    /// Exact fiber over p. `infinite` is set when a positive-length constant
    /// piece or a whole tail family lands on p; otherwise all preimage points
    /// are enumerated (deduplicated as realized points).
    std::vector<Point> fiber_points(const Point& p, bool* infinite) const {
        *infinite = false;
        std::vector<Point> raw;
        if (std::holds_alternative<CellPoint>(p)) {
            // All written coordinates of the realized point p.
            std::vector<CellPoint> forms = written_forms(*cod_, std::get<CellPoint>(p));
            for (int c = 0; c < dom_->n_cells(); ++c) {
                for (const Piece& pc : pieces_[c]) {
                    for (const CellPoint& f : forms) {
                        if (pc.target != f.cell) continue;
                        if (pc.lo == pc.hi) {
                            if (pc.value_at(pc.lo) == f.x) raw.push_back(CellPoint{c, pc.lo});
                        } else if (pc.slope == Rat(0)) {
                            if (pc.icpt == f.x) *infinite = true;
                        } else {
                            Rat x0 = (f.x - pc.icpt) / pc.slope;
                            if (pc.lo <= x0 && x0 <= pc.hi) raw.push_back(CellPoint{c, x0});
                        }
                    }
                }
            }
        }
        for (const TailRule& r : tail_rules_) {
            if (const auto* tt = std::get_if<TailToTail>(&r)) {
                if (const auto* tp = std::get_if<TailPoint>(&p))
                    if (tp->tail == tt->dst) raw.push_back(TailPoint{tt->src, tp->index});
            } else {
                const auto& c = std::get<TailToPoint>(r);
                if (cod_->points_equal(c.target, p)) *infinite = true;
            }
        }
        std::vector<Point> out;
        for (const Point& q : raw) {
            Point cq = dom_->canonical_point(q);
            bool dup = false;
            for (const Point& o : out) dup = dup || dom_->points_equal(o, cq);
            if (!dup) out.push_back(cq);
        }
        std::sort(out.begin(), out.end(), detail::point_less);
        return out;
    }

    FiberCount fiber_count(const Point& p) const {
        bool inf = false;
        auto pts = fiber_points(p, &inf);
        return FiberCount{inf, static_cast<std::int64_t>(pts.size())};
    }

    /// Decides openness by the local criterion: at every critical point of
    /// the domain (endpoint classes, interior breakpoints, constant pieces,
    /// tail rules) the image of a small neighborhood must be a neighborhood
    /// of the image point. Returns a witness point on failure.
    OpenCheck open_check() const {
        for (const CriticalPoint& cp : critical_points()) {
            auto req = required_directions(eval(cp.where));
            auto prov = provided_directions(cp);
            for (const auto& need : req) {
                if (std::find(prov.begin(), prov.end(), need) == prov.end())
                    return OpenCheck{false, cp.where};
            }
        }
        for (int c = 0; c < dom_->n_cells(); ++c) {
            for (const Piece& p : pieces_[c]) {
                if (p.lo == p.hi || p.slope != Rat(0)) continue;
                Point mid = CellPoint{c, midpoint(p.lo, p.hi)};
                if (!required_directions(eval(mid)).empty()) return OpenCheck{false, mid};
            }
        }
        for (const TailRule& r : tail_rules_) {
            if (const auto* c = std::get_if<TailToPoint>(&r)) {
                if (!required_directions(c->target).empty())
                    return OpenCheck{false, Point(TailPoint{c->src, 0})};
            }
        }
        return OpenCheck{};
    }

    /// Largest open subset of the domain on which the map is a local
    /// homeomorphism onto its image: nonzero slopes, locally injective across
    /// breakpoints and glue classes. Isolated domain points always qualify.
    SubSet local_homeo_region() const {
        SubSet bad(*dom_);
        for (int c = 0; c < dom_->n_cells(); ++c)
            for (const Piece& p : pieces_[c])
                if (p.lo != p.hi && p.slope == Rat(0))
                    bad.add_interval(c, Iv{p.lo, p.hi, true, true});
        for (const CriticalPoint& cp : critical_points()) {
            bool exclude = false;
            std::vector<std::pair<int, int>> dirs;
            for (const Germ& g : germs_at(cp)) {
                if (g.slope == Rat(0)) { exclude = true; break; }
                auto d = std::make_pair(g.target, g.dir * g.slope.sign());
                if (std::find(dirs.begin(), dirs.end(), d) != dirs.end()) exclude = true;
                dirs.push_back(d);
            }
            if (exclude) {
                if (const auto* cpt = std::get_if<CellPoint>(&cp.where))
                    bad.add_interval(cpt->cell, iv_point(cpt->x));
            }
        }
        bad.canonicalize(*dom_);
        return set_complement(*dom_, bad);
    }

    friend bool operator==(const PLMap& a, const PLMap& b) {
        return *a.dom_ == *b.dom_ && *a.cod_ == *b.cod_ && a.pieces_ == b.pieces_ &&
               a.tail_rules_ == b.tail_rules_;
    }

private:
    ComplexPtr dom_, cod_;
    std::vector<std::vector<Piece>> pieces_;
    std::vector<TailRule> tail_rules_;

    struct Germ {
        int cell;     // domain cell of the stick
        int dir;      // +1 = into the cell from x upward, -1 = downward
        Rat slope;
        int target;   // codomain cell
    };
    struct CriticalPoint {
        Point where;                      // realized point (canonical form)
        std::vector<std::pair<int, Rat>> coords;  // all (cell, coordinate) forms
    };

    static std::vector<CellPoint> written_forms(const OneComplex& X, const CellPoint& p) {
        std::vector<CellPoint> forms;
        auto e = X.endpoint_at(p.cell, p.x);
        if (!e) {
            forms.push_back(p);
            return forms;
        }
        for (const Endpoint& m : X.class_members(X.class_of(*e)))
            forms.push_back(CellPoint{m.cell, X.endpoint_coord(m)});
        // members may repeat coordinates (zero-length cells); dedupe
        std::sort(forms.begin(), forms.end(), [](const CellPoint& a, const CellPoint& b) {
            return a.cell != b.cell ? a.cell < b.cell : a.x < b.x;
        });
        forms.erase(std::unique(forms.begin(), forms.end()), forms.end());
        return forms;
    }

    Point eval_cell(int c, const Rat& x) const {
        for (const Piece& p : pieces_.at(c))
            if (p.lo <= x && x <= p.hi) return CellPoint{p.target, p.value_at(x)};
        throw std::invalid_argument("PLMap: point outside covered domain");
    }

    bool values_equal(const Piece& a, const Piece& b, const Rat& x) const {
        return cod_->points_equal(Point(CellPoint{a.target, a.value_at(x)}),
                                  Point(CellPoint{b.target, b.value_at(x)}));
    }

    static std::optional<Iv> clip(const Iv& iv, const Rat& lo, const Rat& hi) {
        Iv r = iv;
        if (r.lo < lo) { r.lo = lo; r.lc = true; }
        if (r.hi > hi) { r.hi = hi; r.hc = true; }
        if (r.lo > r.hi) return std::nullopt;
        if (r.lo == r.hi && !(r.lc && r.hc)) return std::nullopt;
        return r;
    }

    static Iv transform(const Iv& iv, const Piece& p) {
        if (p.lo == p.hi || p.slope == Rat(0)) return iv_point(p.value_at(iv.lo));
        Rat a = p.value_at(iv.lo), b = p.value_at(iv.hi);
        if (p.slope.sign() > 0) return Iv{a, b, iv.lc, iv.hc};
        return Iv{b, a, iv.hc, iv.lc};
    }

    static Iv inverse_transform(const Iv& iv, const Piece& p) {
        Rat a = (iv.lo - p.icpt) / p.slope, b = (iv.hi - p.icpt) / p.slope;
        if (p.slope.sign() > 0) return Iv{a, b, iv.lc, iv.hc};
        return Iv{b, a, iv.hc, iv.lc};
    }

    static void add_point(SubSet& s, const Point& p) {
        if (const auto* cp = std::get_if<CellPoint>(&p)) {
            s.add_interval(cp->cell, iv_point(cp->x));
        } else if (const auto* tp = std::get_if<TailPoint>(&p)) {
            TailSet t = s.tail_part(tp->tail);
            t.xs.push_back(tp->index);
            s.set_tail_part(tp->tail, t);
        }
    }

    /// Endpoint classes plus interior piece breakpoints, as realized points.
    std::vector<CriticalPoint> critical_points() const {
        std::vector<CriticalPoint> out;
        for (int cls = 0; cls < dom_->n_classes(); ++cls) {
            CriticalPoint cp;
            const Endpoint& e0 = dom_->class_members(cls).front();
            cp.where = dom_->canonical_point(CellPoint{e0.cell, dom_->endpoint_coord(e0)});
            for (const Endpoint& m : dom_->class_members(cls))
                cp.coords.emplace_back(m.cell, dom_->endpoint_coord(m));
            out.push_back(std::move(cp));
        }
        for (int c = 0; c < dom_->n_cells(); ++c) {
            const auto& ps = pieces_[c];
            for (size_t i = 0; i + 1 < ps.size(); ++i) {
                Rat x = ps[i].hi;
                if (dom_->endpoint_at(c, x)) continue;  // endpoint classes handled above
                CriticalPoint cp;
                cp.where = CellPoint{c, x};
                cp.coords.emplace_back(c, x);
                out.push_back(std::move(cp));
            }
        }
        return out;
    }

    std::vector<Germ> germs_at(const CriticalPoint& cp) const {
        std::vector<Germ> out;
        for (const auto& [c, x] : cp.coords) {
            const Cell& cell = dom_->cell(c);
            if (cell.zero_length()) continue;
            if (x > cell.lo) {  // downward stick
                for (const Piece& p : pieces_[c])
                    if (p.lo < x && x <= p.hi) {
                        out.push_back(Germ{c, -1, p.slope, p.target});
                        break;
                    }
            }
            if (x < cell.hi) {  // upward stick
                for (const Piece& p : pieces_[c])
                    if (p.lo <= x && x < p.hi) {
                        out.push_back(Germ{c, +1, p.slope, p.target});
                        break;
                    }
            }
        }
        return out;
    }

    /// Directions a neighborhood of p must cover in the codomain.
    std::vector<std::pair<int, int>> required_directions(const Point& p) const {
        if (std::holds_alternative<TailPoint>(p)) return {};
        const auto& cp = std::get<CellPoint>(p);
        auto e = cod_->endpoint_at(cp.cell, cp.x);
        if (!e) return {{cp.cell, +1}, {cp.cell, -1}};
        return cod_->sticks_at(cod_->class_of(*e));
    }

    std::vector<std::pair<int, int>> provided_directions(const CriticalPoint& cp) const {
        std::vector<std::pair<int, int>> out;
        for (const Germ& g : germs_at(cp)) {
            if (g.slope == Rat(0)) continue;  // constant germ covers nothing
            out.emplace_back(g.target, g.dir * g.slope.sign());
        }
        return out;
    }
};

}  // namespace qv
