#pragma once

// The line-oriented quiver document format and the canonical subset syntax.
//
//   quiver v1 discrete
//   vertex v
//   edge e0 v w weight 1/2
//   edges-inf v w
//   tail t
//
//   quiver v1 pl
//   vertices [compactified]
//   cell c0 [0, 2]
//   glue c0.lo c0.hi
//   tail t
//   edges
//   cell e0 [0, 1]
//   map r piece e0 [0,1] slope 2 intercept 0 -> c0
//   map s tail te -> tail t | point c0 1/2 | tailpoint t 3
//
//   quiver v1 tailed discrete|pl [unitized]
//   ... base body ...
//   tailbase <subset>
//
// Subsets: `empty`, `all`, or comma-separated atoms `cell`, `cell:[a,b]`,
// `cell:(a,b]`, `cell:{p}`, `tail:all`, `tail:{0,1}`, `tail:!{0}`, `inf`.
// Exact rationals are written p or p/q. Parse errors carry line numbers;
// semantic validation is deferred to `validate`.

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "quiver/build.hpp"
#include "quiver/quiver.hpp"

namespace qv {

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_no, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
};

namespace fmt_detail {

inline std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == '#') break;
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline Rat parse_rat(const std::string& tok, int line) {
    try {
        return Rat::parse(tok);
    } catch (const std::invalid_argument& e) {
        throw ParseError(line, e.what());
    }
}

/// "[a,b]" possibly split across tokens; returns the pair.
inline std::pair<Rat, Rat> parse_bracket_pair(const std::string& text, int line) {
    if (text.size() < 2 || text.front() != '[' || text.back() != ']')
        throw ParseError(line, "expected [a, b], got '" + text + "'");
    std::string inner = text.substr(1, text.size() - 2);
    auto comma = inner.find(',');
    if (comma == std::string::npos) throw ParseError(line, "expected two coordinates in " + text);
    return {parse_rat(inner.substr(0, comma), line), parse_rat(inner.substr(comma + 1), line)};
}

inline std::string joined_bracket(const std::vector<std::string>& toks, std::size_t& i, int line) {
    std::string text;
    for (; i < toks.size(); ++i) {
        text += toks[i];
        if (!text.empty() && text.back() == ']') {
            ++i;
            return text;
        }
    }
    throw ParseError(line, "unterminated bracket expression");
}

inline Endpoint parse_endpoint(const OneComplex& X, const std::string& tok, int line) {
    auto dot = tok.rfind('.');
    if (dot == std::string::npos) throw ParseError(line, "expected cell.lo or cell.hi");
    std::string cell = tok.substr(0, dot), end = tok.substr(dot + 1);
    auto ci = X.cell_index(cell);
    if (!ci) throw ParseError(line, "unknown cell '" + cell + "'");
    if (end != "lo" && end != "hi") throw ParseError(line, "endpoint must be .lo or .hi");
    return Endpoint{*ci, end == "hi" ? 1 : 0};
}

}  // namespace fmt_detail

// --- subsets ---------------------------------------------------------------------

inline std::string print_subset(const OneComplex& X, const SubSet& S) {
    if (S.is_empty()) return "empty";
    if (S == SubSet::all(X)) return "all";
    std::ostringstream os;
    bool first = true;
    auto sep = [&] {
        if (!first) os << ", ";
        first = false;
    };
    for (int c = 0; c < X.n_cells(); ++c) {
        const Cell& cell = X.cell(c);
        for (const Iv& iv : S.cell_part(c)) {
            sep();
            if (cell.zero_length()) {
                os << cell.name;
            } else if (iv.lo == cell.lo && iv.hi == cell.hi && iv.lc && iv.hc) {
                os << cell.name;
            } else if (iv.is_point()) {
                os << cell.name << ":{" << iv.lo.str() << "}";
            } else {
                os << cell.name << ":" << (iv.lc ? "[" : "(") << iv.lo.str() << ","
                   << iv.hi.str() << (iv.hc ? "]" : ")");
            }
        }
    }
    for (int t = 0; t < X.n_tails(); ++t) {
        const TailSet& ts = S.tail_part(t);
        if (ts.is_empty()) continue;
        sep();
        os << X.tail(t).name << ":";
        if (ts.is_all()) {
            os << "all";
        } else {
            if (ts.cofinite) os << "!";
            os << "{";
            for (std::size_t i = 0; i < ts.xs.size(); ++i)
                os << (i ? "," : "") << ts.xs[i];
            os << "}";
        }
    }
    if (S.has_infinity()) {
        sep();
        os << "inf";
    }
    return os.str();
}

inline SubSet parse_subset(const OneComplex& X, const std::string& text, int line = 0) {
    SubSet out(X);
    std::string trimmed;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) trimmed.push_back(ch);
    if (trimmed.empty() || trimmed == "empty") return out;
    if (trimmed == "all") return SubSet::all(X);
    // split on commas at depth zero
    std::vector<std::string> atoms;
    int depth = 0;
    std::string cur;
    for (char ch : trimmed) {
        if (ch == '[' || ch == '{' || ch == '(') ++depth;
        if (ch == ']' || ch == '}' || ch == ')') --depth;
        if (ch == ',' && depth == 0) {
            atoms.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) atoms.push_back(cur);
    for (const std::string& atom : atoms) {
        if (atom == "inf") {
            if (!X.compactified()) throw ParseError(line, "no point at infinity in this space");
            out.set_infinity(true);
            continue;
        }
        auto colon = atom.find(':');
        std::string name = colon == std::string::npos ? atom : atom.substr(0, colon);
        std::string rest = colon == std::string::npos ? "" : atom.substr(colon + 1);
        if (auto ci = X.cell_index(name)) {
            const Cell& cell = X.cell(*ci);
            if (rest.empty()) {
                out.add_interval(*ci, Iv{cell.lo, cell.hi, true, true});
                continue;
            }
            if (rest.front() == '{') {
                if (rest.back() != '}') throw ParseError(line, "malformed point set " + atom);
                out.add_interval(*ci, iv_point(fmt_detail::parse_rat(rest.substr(1, rest.size() - 2), line)));
                continue;
            }
            bool lc = rest.front() == '[';
            bool hc = rest.back() == ']';
            if ((rest.front() != '[' && rest.front() != '(') ||
                (rest.back() != ']' && rest.back() != ')'))
                throw ParseError(line, "malformed interval " + atom);
            std::string inner = rest.substr(1, rest.size() - 2);
            auto comma = inner.find(',');
            if (comma == std::string::npos) throw ParseError(line, "malformed interval " + atom);
            Rat lo = fmt_detail::parse_rat(inner.substr(0, comma), line);
            Rat hi = fmt_detail::parse_rat(inner.substr(comma + 1), line);
            if (lo > hi || lo < cell.lo || hi > cell.hi)
                throw ParseError(line, "interval outside cell in " + atom);
            out.add_interval(*ci, Iv{lo, hi, lc, hc});
            continue;
        }
        if (auto ti = X.tail_index(name)) {
            if (rest == "all" || rest.empty()) {
                out.set_tail_part(*ti, TailSet::all());
                continue;
            }
            bool cof = rest.front() == '!';
            std::string body = cof ? rest.substr(1) : rest;
            if (body.size() < 2 || body.front() != '{' || body.back() != '}')
                throw ParseError(line, "malformed tail set " + atom);
            TailSet ts;
            ts.cofinite = cof;
            std::istringstream is(body.substr(1, body.size() - 2));
            std::string tok;
            while (std::getline(is, tok, ','))
                if (!tok.empty()) ts.xs.push_back(std::stoll(tok));
            out.set_tail_part(*ti, ts);
            continue;
        }
        throw ParseError(line, "unknown cell or tail '" + name + "'");
    }
    out.canonicalize(X);
    return out;
}

inline std::string print_point(const OneComplex& X, const Point& p) {
    if (const auto* cp = std::get_if<CellPoint>(&p)) {
        const Cell& cell = X.cell(cp->cell);
        if (cell.zero_length()) return cell.name;
        if (X.n_cells() == 1) return cp->x.str();
        return cell.name + ":" + cp->x.str();
    }
    if (const auto* tp = std::get_if<TailPoint>(&p))
        return X.tail(tp->tail).name + "[" + std::to_string(tp->index) + "]";
    return "inf";
}

// --- complexes --------------------------------------------------------------------

inline std::string print_complex_body(const OneComplex& X) {
    std::ostringstream os;
    if (X.compactified()) os << "compactified\n";
    for (const Cell& c : X.cells())
        os << "cell " << c.name << " [" << c.lo.str() << ", " << c.hi.str() << "]\n";
    for (int cls = 0; cls < X.n_classes(); ++cls) {
        const auto& members = X.class_members(cls);
        // skip the automatic lo~hi identification of point cells
        std::vector<Endpoint> distinct;
        for (const Endpoint& e : members) {
            bool dup = false;
            for (const Endpoint& o : distinct)
                if (o.cell == e.cell && X.cell(e.cell).zero_length()) dup = true;
            if (!dup) distinct.push_back(e);
        }
        for (std::size_t i = 1; i < distinct.size(); ++i) {
            auto nm = [&](Endpoint e) {
                return X.cell(e.cell).name + (e.end == 0 ? ".lo" : ".hi");
            };
            os << "glue " << nm(distinct[0]) << " " << nm(distinct[i]) << "\n";
        }
    }
    for (const TailFamily& t : X.tails()) os << "tail " << t.name << "\n";
    return os.str();
}

/// Standalone complex documents (`complex v1` header then a body).
inline std::string print_complex(const OneComplex& X) {
    return "complex v1\n" + print_complex_body(X);
}

inline ComplexPtr parse_complex(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    std::vector<Cell> cells;
    std::vector<TailFamily> tails;
    std::vector<std::pair<std::string, std::string>> glue_names;
    bool compactified = false;
    std::vector<std::pair<int, std::string>> glue_lines;
    while (std::getline(is, line)) {
        ++line_no;
        auto toks = fmt_detail::tokenize(line);
        if (toks.empty()) continue;
        if (!header_seen) {
            if (toks.size() < 2 || toks[0] != "complex" || toks[1] != "v1")
                throw ParseError(line_no, "expected 'complex v1' header");
            header_seen = true;
            continue;
        }
        if (toks[0] == "cell") {
            if (toks.size() < 3) throw ParseError(line_no, "cell needs a name and bounds");
            std::size_t i = 2;
            auto [lo, hi] = fmt_detail::parse_bracket_pair(
                fmt_detail::joined_bracket(toks, i, line_no), line_no);
            if (lo > hi) throw ParseError(line_no, "cell with lo > hi");
            cells.push_back(Cell{toks[1], lo, hi});
        } else if (toks[0] == "tail") {
            if (toks.size() != 2) throw ParseError(line_no, "tail needs a name");
            tails.push_back(TailFamily{toks[1]});
        } else if (toks[0] == "glue") {
            if (toks.size() != 3) throw ParseError(line_no, "glue needs two endpoints");
            glue_lines.push_back({line_no, line});
        } else if (toks[0] == "compactified") {
            compactified = true;
        } else {
            throw ParseError(line_no, "unexpected directive '" + toks[0] + "'");
        }
    }
    if (!header_seen) throw ParseError(1, "missing 'complex v1' header");
    OneComplex probe(cells, {}, tails, compactified);
    std::vector<std::pair<Endpoint, Endpoint>> glue;
    for (auto& [ln, raw] : glue_lines) {
        auto toks = fmt_detail::tokenize(raw);
        glue.push_back({fmt_detail::parse_endpoint(probe, toks[1], ln),
                        fmt_detail::parse_endpoint(probe, toks[2], ln)});
    }
    return make_complex(std::move(cells), std::move(glue), std::move(tails), compactified);
}

// --- quivers -----------------------------------------------------------------------

inline std::string print_quiver(const DiscreteQuiver& d) {
    std::ostringstream os;
    os << "quiver v1 discrete\n";
    for (int v = 0; v < d.n(); ++v) os << "vertex " << d.name(v) << "\n";
    for (const std::string& t : d.tail_families()) os << "tail " << t << "\n";
    int edge_seq = 0;
    for (int v = 0; v < d.n(); ++v)
        for (int w = 0; w < d.n(); ++w) {
            const Mult& m = d.mult(v, w);
            if (m.inf) {
                os << "edges-inf " << d.name(v) << " " << d.name(w) << "\n";
                continue;
            }
            for (std::uint64_t i = 0; i < m.m; ++i) {
                os << "edge e" << edge_seq++ << " " << d.name(v) << " " << d.name(w);
                Rat wt = d.weight(v, w, i);
                if (wt != Rat(1)) os << " weight " << wt.str();
                os << "\n";
            }
        }
    return os.str();
}

inline std::string print_quiver(const PLQuiver& q) {
    std::ostringstream os;
    os << "quiver v1 pl\n";
    os << "vertices\n" << print_complex_body(q.V());
    os << "edges\n" << print_complex_body(q.E());
    auto print_map = [&](const char* name, const PLMap& m) {
        for (int c = 0; c < q.E().n_cells(); ++c)
            for (const Piece& p : m.pieces()[c])
                os << "map " << name << " piece " << q.E().cell(c).name << " [" << p.lo.str()
                   << "," << p.hi.str() << "] slope " << p.slope.str() << " intercept "
                   << p.icpt.str() << " -> " << q.V().cell(p.target).name << "\n";
        for (const TailRule& rule : m.tail_rules()) {
            if (const auto* tt = std::get_if<TailToTail>(&rule)) {
                os << "map " << name << " tail " << q.E().tail(tt->src).name << " -> tail "
                   << q.V().tail(tt->dst).name << "\n";
            } else {
                const auto& tp = std::get<TailToPoint>(rule);
                os << "map " << name << " tail " << q.E().tail(tp.src).name << " -> ";
                if (const auto* cp = std::get_if<CellPoint>(&tp.target))
                    os << "point " << q.V().cell(cp->cell).name << " " << cp->x.str() << "\n";
                else if (const auto* dtp = std::get_if<TailPoint>(&tp.target))
                    os << "tailpoint " << q.V().tail(dtp->tail).name << " " << dtp->index << "\n";
            }
        }
    };
    print_map("r", q.r);
    print_map("s", q.s);
    return os.str();
}

inline std::string print_quiver(const TailedQuiver& t) {
    std::ostringstream os;
    os << "quiver v1 tailed " << (t.discrete_base ? "discrete" : "pl")
       << (t.unitized ? " unitized" : "") << "\n";
    std::string body = t.discrete_base ? print_quiver(*t.discrete_base) : print_quiver(t.base);
    // strip the inner header line
    os << body.substr(body.find('\n') + 1);
    os << "tailbase " << print_subset(t.base.V(), t.tail_base) << "\n";
    return os.str();
}

inline std::string print_quiver(const AnyQuiver& q) {
    return std::visit([](const auto& v) { return print_quiver(v); }, q);
}

namespace fmt_detail {

struct RawPiece {
    int line;
    std::string map, cell, target;
    Rat lo, hi, slope, icpt;
};
struct RawTailRule {
    int line;
    std::string map, src, kind, target;
    std::int64_t index = 0;
    Rat coord;
    std::string coord_text;
};

struct PLBody {
    std::vector<Cell> vcells, ecells;
    std::vector<TailFamily> vtails, etails;
    std::vector<std::pair<int, std::string>> vglue, eglue;
    bool v_compactified = false;
    std::vector<RawPiece> pieces;
    std::vector<RawTailRule> rules;
};

inline PLQuiver assemble_pl(const PLBody& b) {
    OneComplex vprobe(b.vcells, {}, b.vtails, b.v_compactified);
    OneComplex eprobe(b.ecells, {}, b.etails, false);
    std::vector<std::pair<Endpoint, Endpoint>> vglue, eglue;
    for (auto& [ln, raw] : b.vglue) {
        auto toks = tokenize(raw);
        vglue.push_back({parse_endpoint(vprobe, toks[1], ln), parse_endpoint(vprobe, toks[2], ln)});
    }
    for (auto& [ln, raw] : b.eglue) {
        auto toks = tokenize(raw);
        eglue.push_back({parse_endpoint(eprobe, toks[1], ln), parse_endpoint(eprobe, toks[2], ln)});
    }
    auto V = make_complex(b.vcells, vglue, b.vtails, b.v_compactified);
    auto E = make_complex(b.ecells, eglue, b.etails, false);
    std::vector<std::vector<Piece>> rp(E->n_cells()), sp(E->n_cells());
    for (const RawPiece& p : b.pieces) {
        auto ec = E->cell_index(p.cell);
        if (!ec) throw ParseError(p.line, "unknown edge cell '" + p.cell + "'");
        auto vc = V->cell_index(p.target);
        if (!vc) throw ParseError(p.line, "unknown vertex cell '" + p.target + "'");
        Piece piece{p.lo, p.hi, p.slope, p.icpt, static_cast<int>(*vc)};
        (p.map == "r" ? rp : sp)[*ec].push_back(piece);
    }
    std::vector<TailRule> rr, sr;
    for (const RawTailRule& r : b.rules) {
        auto et = E->tail_index(r.src);
        if (!et) throw ParseError(r.line, "unknown edge tail '" + r.src + "'");
        TailRule rule = TailToTail{};
        if (r.kind == "tail") {
            auto vt = V->tail_index(r.target);
            if (!vt) throw ParseError(r.line, "unknown vertex tail '" + r.target + "'");
            rule = TailToTail{static_cast<int>(*et), static_cast<int>(*vt)};
        } else if (r.kind == "point") {
            auto vc = V->cell_index(r.target);
            if (!vc) throw ParseError(r.line, "unknown vertex cell '" + r.target + "'");
            rule = TailToPoint{static_cast<int>(*et), CellPoint{static_cast<int>(*vc), r.coord}};
        } else {
            auto vt = V->tail_index(r.target);
            if (!vt) throw ParseError(r.line, "unknown vertex tail '" + r.target + "'");
            rule = TailToPoint{static_cast<int>(*et), TailPoint{static_cast<int>(*vt), r.index}};
        }
        (r.map == "r" ? rr : sr).push_back(rule);
    }
    return PLQuiver{V, E, PLMap(E, V, rp, rr), PLMap(E, V, sp, sr)};
}

}  // namespace fmt_detail

inline AnyQuiver parse_quiver(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    std::string kind, base_kind;
    bool unitized = false;
    bool header_seen = false;

    DiscreteQuiver disc;
    fmt_detail::PLBody pl;
    enum class Section { None, Vertices, Edges } section = Section::None;
    std::optional<std::pair<int, std::string>> tailbase_line;

    while (std::getline(is, line)) {
        ++line_no;
        auto toks = fmt_detail::tokenize(line);
        if (toks.empty()) continue;
        if (!header_seen) {
            if (toks.size() < 3 || toks[0] != "quiver" || toks[1] != "v1")
                throw ParseError(line_no, "expected 'quiver v1 <kind>' header");
            kind = toks[2];
            if (kind == "tailed") {
                if (toks.size() < 4) throw ParseError(line_no, "tailed header needs a base kind");
                base_kind = toks[3];
                unitized = toks.size() > 4 && toks[4] == "unitized";
            } else if (kind != "discrete" && kind != "pl") {
                throw ParseError(line_no, "kind must be discrete, pl or tailed");
            }
            header_seen = true;
            continue;
        }
        const std::string effective = kind == "tailed" ? base_kind : kind;
        const std::string& op = toks[0];
        if (op == "tailbase") {
            auto pos = line.find("tailbase");
            tailbase_line = {line_no, line.substr(pos + 8)};
            continue;
        }
        if (effective == "discrete") {
            if (op == "vertex") {
                if (toks.size() != 2) throw ParseError(line_no, "vertex needs a name");
                disc.add_vertex(toks[1]);
            } else if (op == "tail") {
                disc.add_tail_family(toks[1]);
            } else if (op == "edge") {
                if (toks.size() != 4 && toks.size() != 6)
                    throw ParseError(line_no, "edge <name> <src> <rng> [weight p/q]");
                auto src = disc.find_vertex(toks[2]), dst = disc.find_vertex(toks[3]);
                if (!src || !dst) throw ParseError(line_no, "unknown vertex in edge");
                std::uint64_t idx = disc.mult(*src, *dst).m;
                disc.add_edges(*src, *dst, Mult{1, false});
                if (toks.size() == 6) {
                    if (toks[4] != "weight") throw ParseError(line_no, "expected 'weight'");
                    disc.set_weight(*src, *dst, idx, fmt_detail::parse_rat(toks[5], line_no));
                }
            } else if (op == "edges-inf") {
                if (toks.size() != 3) throw ParseError(line_no, "edges-inf <src> <rng>");
                auto src = disc.find_vertex(toks[1]), dst = disc.find_vertex(toks[2]);
                if (!src || !dst) throw ParseError(line_no, "unknown vertex in edges-inf");
                disc.add_edges(*src, *dst, Mult::infinite());
            } else {
                throw ParseError(line_no, "unexpected directive '" + op + "' in a discrete quiver");
            }
            continue;
        }
        // pl body
        if (op == "vertices") {
            section = Section::Vertices;
        } else if (op == "edges") {
            section = Section::Edges;
        } else if (op == "compactified") {
            if (section != Section::Vertices)
                throw ParseError(line_no, "compactified applies to the vertices block");
            pl.v_compactified = true;
        } else if (op == "cell") {
            if (section == Section::None) throw ParseError(line_no, "cell before a section header");
            if (toks.size() < 3) throw ParseError(line_no, "cell needs a name and bounds");
            std::size_t i = 2;
            auto [lo, hi] = fmt_detail::parse_bracket_pair(
                fmt_detail::joined_bracket(toks, i, line_no), line_no);
            if (lo > hi) throw ParseError(line_no, "cell with lo > hi");
            (section == Section::Vertices ? pl.vcells : pl.ecells).push_back(Cell{toks[1], lo, hi});
        } else if (op == "tail") {
            if (section == Section::None) throw ParseError(line_no, "tail before a section header");
            (section == Section::Vertices ? pl.vtails : pl.etails).push_back(TailFamily{toks[1]});
        } else if (op == "glue") {
            if (toks.size() != 3) throw ParseError(line_no, "glue needs two endpoints");
            (section == Section::Vertices ? pl.vglue : pl.eglue).push_back({line_no, line});
        } else if (op == "map") {
            if (toks.size() < 4 || (toks[1] != "r" && toks[1] != "s"))
                throw ParseError(line_no, "map r|s ...");
            if (toks[2] == "piece") {
                // map r piece <cell> [a,b] slope p intercept p -> <cell>
                fmt_detail::RawPiece p;
                p.line = line_no;
                p.map = toks[1];
                p.cell = toks[3];
                std::size_t i = 4;
                auto [lo, hi] = fmt_detail::parse_bracket_pair(
                    fmt_detail::joined_bracket(toks, i, line_no), line_no);
                p.lo = lo;
                p.hi = hi;
                if (i + 5 >= toks.size() + 1 || toks.size() < i + 5)
                    throw ParseError(line_no, "map piece: expected slope/intercept/target");
                if (toks[i] != "slope") throw ParseError(line_no, "expected 'slope'");
                p.slope = fmt_detail::parse_rat(toks[i + 1], line_no);
                if (toks[i + 2] != "intercept") throw ParseError(line_no, "expected 'intercept'");
                p.icpt = fmt_detail::parse_rat(toks[i + 3], line_no);
                if (toks[i + 4] != "->") throw ParseError(line_no, "expected '->'");
                if (i + 5 >= toks.size()) throw ParseError(line_no, "missing target cell");
                p.target = toks[i + 5];
                pl.pieces.push_back(p);
            } else if (toks[2] == "tail") {
                // map r tail <t> -> tail <t'> | point <cell> <p/q> | tailpoint <t'> <n>
                if (toks.size() < 6 || toks[4] != "->")
                    throw ParseError(line_no, "map tail <t> -> tail|point|tailpoint ...");
                fmt_detail::RawTailRule r;
                r.line = line_no;
                r.map = toks[1];
                r.src = toks[3];
                r.kind = toks[5];
                if (r.kind == "tail") {
                    if (toks.size() != 7) throw ParseError(line_no, "map tail -> tail <name>");
                    r.target = toks[6];
                } else if (r.kind == "point") {
                    if (toks.size() != 8) throw ParseError(line_no, "map tail -> point <cell> <p/q>");
                    r.target = toks[6];
                    r.coord = fmt_detail::parse_rat(toks[7], line_no);
                } else if (r.kind == "tailpoint") {
                    if (toks.size() != 8)
                        throw ParseError(line_no, "map tail -> tailpoint <tail> <index>");
                    r.target = toks[6];
                    r.index = std::stoll(toks[7]);
                } else {
                    throw ParseError(line_no, "tail rule must target tail, point or tailpoint");
                }
                pl.rules.push_back(r);
            } else {
                throw ParseError(line_no, "map must define a piece or a tail rule");
            }
        } else {
            throw ParseError(line_no, "unexpected directive '" + op + "' in a pl quiver");
        }
    }
    if (!header_seen) throw ParseError(1, "missing 'quiver v1' header");

    auto finish_base = [&]() -> AnyQuiver {
        if ((kind == "tailed" ? base_kind : kind) == "discrete") return AnyQuiver{disc};
        return AnyQuiver{fmt_detail::assemble_pl(pl)};
    };
    if (kind != "tailed") return finish_base();
    AnyQuiver base = finish_base();
    TailedQuiver t = add_tails_any(base);
    if (tailbase_line) {
        SubSet declared =
            parse_subset(t.base.V(), tailbase_line->second, tailbase_line->first);
        t.tail_base = declared;  // may disagree with the sinks; validate reports it
    }
    t.unitized = unitized;
    return AnyQuiver{std::move(t)};
}

}  // namespace qv
