#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "quiver/complex.hpp"
#include "quiver/plmap.hpp"
#include "quiver/rational.hpp"
#include "quiver/subset.hpp"
#include "quiver/verdicts.hpp"

namespace qv {

/// Edge multiplicity of one (source, range) class: a natural number or the
/// symbol infinity (which carries no weights and is never enumerated).
struct Mult {
    std::uint64_t m = 0;
    bool inf = false;
    bool any() const { return inf || m > 0; }
    static Mult infinite() { return Mult{0, true}; }
};

/// Edge identity in a discrete quiver: (source, range, index < multiplicity).
struct Edge {
    int src = -1, dst = -1;
    std::uint64_t idx = 0;
    friend bool operator==(const Edge& a, const Edge& b) {
        return a.src == b.src && a.dst == b.dst && a.idx == b.idx;
    }
};

/// A path: composable edges, r(e_i) = s(e_{i+1}).
struct DiscretePath {
    std::vector<Edge> edges;
    int source() const { return edges.front().src; }
    int range() const { return edges.back().dst; }
    int length() const { return static_cast<int>(edges.size()); }
    bool is_loop() const { return !edges.empty() && source() == range(); }
};

using VMask = std::uint64_t;

/// Finite directed multigraph with optional infinite multiplicities, optional
/// positive rational weights per finite edge (the atoms of the vertex
/// measures; counting measure when omitted), and optional edgeless discrete
/// tail families among the vertices.
///
/// Analyses on the finite part use 64-bit masks (at most 64 named vertices);
/// the subset enumeration entry points take an explicit vertex limit.
class DiscreteQuiver {
public:
    DiscreteQuiver() = default;

    int add_vertex(const std::string& name) {
        if (find_vertex(name)) throw std::invalid_argument("duplicate vertex " + name);
        names_.push_back(name);
        for (auto& row : mult_) row.emplace_back();
        mult_.emplace_back(names_.size());
        invalidate();
        return static_cast<int>(names_.size()) - 1;
    }
    void add_tail_family(const std::string& name) {
        tails_.push_back(name);
        invalidate();
    }
    void add_edges(int v, int w, Mult m) {
        auto& cur = mult_.at(v).at(w);
        if (m.inf) cur = Mult::infinite();
        else if (!cur.inf) cur.m += m.m;
        invalidate();
    }
    void set_weight(int v, int w, std::uint64_t idx, Rat value) {
        weights_[{v, w}].resize(std::max<std::size_t>(weights_[{v, w}].size(), idx + 1), Rat(1));
        weights_[{v, w}][idx] = std::move(value);
        invalidate();
    }

    int n() const { return static_cast<int>(names_.size()); }
    const std::string& name(int v) const { return names_.at(v); }
    std::optional<int> find_vertex(const std::string& s) const {
        for (int i = 0; i < n(); ++i)
            if (names_[i] == s) return i;
        return std::nullopt;
    }
    const Mult& mult(int v, int w) const { return mult_.at(v).at(w); }
    bool has_tails() const { return !tails_.empty(); }
    const std::vector<std::string>& tail_families() const { return tails_; }

    Rat weight(int v, int w, std::uint64_t idx) const {
        auto it = weights_.find({v, w});
        if (it == weights_.end() || idx >= it->second.size()) return Rat(1);
        return it->second[idx];
    }
    bool has_explicit_weights() const { return !weights_.empty(); }
    const std::map<std::pair<int, int>, std::vector<Rat>>& weight_table() const { return weights_; }

    // --- basic vertex facts ------------------------------------------------

    bool out_infinite(int v) const {
        for (int w = 0; w < n(); ++w)
            if (mult_[v][w].inf) return true;
        return false;
    }
    std::uint64_t out_degree_finite(int v) const {
        std::uint64_t d = 0;
        for (int w = 0; w < n(); ++w) d += mult_[v][w].m;
        return d;
    }
    bool emits(int v) const {
        for (int w = 0; w < n(); ++w)
            if (mult_[v][w].any()) return true;
        return false;
    }

    // --- mask helpers ------------------------------------------------------

    VMask full_mask() const {
        require_mask();
        return n() == 64 ? ~VMask(0) : ((VMask(1) << n()) - 1);
    }
    static bool in(VMask m, int v) { return (m >> v) & 1; }

    /// Out-neighborhood r(s^{-1}(U)) of a vertex mask.
    VMask step(VMask u) const {
        VMask out = 0;
        for (int v = 0; v < n(); ++v)
            if (in(u, v))
                for (int w = 0; w < n(); ++w)
                    if (mult_[v][w].any()) out |= VMask(1) << w;
        return out;
    }

    VMask sinks_mask() const {
        VMask m = 0;
        for (int v = 0; v < n(); ++v)
            if (!emits(v)) m |= VMask(1) << v;
        return m;
    }
    VMask fin_mask() const {
        VMask m = 0;
        for (int v = 0; v < n(); ++v)
            if (!out_infinite(v)) m |= VMask(1) << v;
        return m;
    }
    VMask reg_mask() const { return fin_mask() & ~sinks_mask(); }

    // --- hereditary / saturated machinery -----------------------------------

    bool is_hereditary(VMask u, std::optional<Edge>* witness = nullptr) const {
        for (int v = 0; v < n(); ++v) {
            if (!in(u, v)) continue;
            for (int w = 0; w < n(); ++w)
                if (mult_[v][w].any() && !in(u, w)) {
                    if (witness) *witness = Edge{v, w, 0};
                    return false;
                }
        }
        return true;
    }

    VMask hereditary_closure(VMask u) const {
        for (;;) {
            VMask next = u | step(u);
            if (next == u) return u;
            u = next;
        }
    }

    /// Saturated = every regular vertex all of whose out-neighbors lie in U is
    /// itself in U. Requires hereditary U for the paper semantics but the
    /// check itself is general.
    bool is_saturated(VMask u, std::optional<int>* witness = nullptr) const {
        VMask reg = reg_mask();
        for (int v = 0; v < n(); ++v) {
            if (!in(reg, v) || in(u, v)) continue;
            bool all_in = true;
            for (int w = 0; w < n(); ++w)
                if (mult_[v][w].any() && !in(u, w)) all_in = false;
            if (all_in) {
                if (witness) *witness = v;
                return false;
            }
        }
        return true;
    }

    /// Least saturated hereditary superset (discrete: always terminates).
    VMask saturate(VMask u) const {
        VMask reg = reg_mask();
        for (;;) {
            VMask next = hereditary_closure(u);
            for (int v = 0; v < n(); ++v) {
                if (in(next, v) || !in(reg, v)) continue;
                bool all_in = true;
                for (int w = 0; w < n(); ++w)
                    if (mult_[v][w].any() && !in(next, w)) all_in = false;
                if (all_in) next |= VMask(1) << v;
            }
            if (next == u) return u;
            u = next;
        }
    }

    /// All saturated hereditary subsets, enumerated over the closure system
    /// (only closed sets are generated).
    std::vector<VMask> saturated_hereditary_sets(int vertex_limit = 20) const {
        require_no_tails("saturated_hereditary_sets");
        if (n() > vertex_limit)
            throw std::invalid_argument("saturated_hereditary_sets: vertex limit exceeded");
        std::set<VMask> seen;
        std::vector<VMask> queue{saturate(0)};
        seen.insert(queue[0]);
        for (std::size_t i = 0; i < queue.size(); ++i) {
            VMask c = queue[i];
            for (int v = 0; v < n(); ++v) {
                if (in(c, v)) continue;
                VMask d = saturate(c | (VMask(1) << v));
                if (seen.insert(d).second) queue.push_back(d);
            }
        }
        std::vector<VMask> out(seen.begin(), seen.end());
        std::sort(out.begin(), out.end(), [](VMask a, VMask b) {
            int pa = __builtin_popcountll(a), pb = __builtin_popcountll(b);
            return pa != pb ? pa < pb : a < b;
        });
        return out;
    }

    // --- constructions -------------------------------------------------------

    /// Quotient by a hereditary subset: keeps vertices outside U and edges
    /// whose range lies outside U (the source then automatically does too).
    DiscreteQuiver quotient(VMask u) const {
        require_no_tails("quotient");
        if (!is_hereditary(u)) throw std::invalid_argument("quotient: subset is not hereditary");
        DiscreteQuiver q;
        std::vector<int> new_index(n(), -1);
        for (int v = 0; v < n(); ++v)
            if (!in(u, v)) new_index[v] = q.add_vertex(names_[v]);
        for (int v = 0; v < n(); ++v)
            for (int w = 0; w < n(); ++w) {
                if (in(u, v) || in(u, w) || !mult_[v][w].any()) continue;
                q.add_edges(new_index[v], new_index[w], mult_[v][w]);
                auto it = weights_.find({v, w});
                if (it != weights_.end())
                    for (std::uint64_t i = 0; i < it->second.size(); ++i)
                        q.set_weight(new_index[v], new_index[w], i, it->second[i]);
            }
        return q;
    }

    /// Doubling along W = reg \ V: adds a sink copy of each W vertex; edges
    /// into W gain a parallel copy landing on the new sink.
    DiscreteQuiver relative_double(VMask v_set) const {
        require_no_tails("relative_double");
        VMask reg = reg_mask();
        if (v_set & ~reg) throw std::invalid_argument("relative quiver: V must lie in the regular vertices");
        VMask w_set = reg & ~v_set;
        DiscreteQuiver q;
        for (int v = 0; v < n(); ++v) q.add_vertex(names_[v]);
        std::vector<int> copy_index(n(), -1);
        for (int v = 0; v < n(); ++v)
            if (in(w_set, v)) copy_index[v] = q.add_vertex(names_[v] + ".1");
        for (int v = 0; v < n(); ++v)
            for (int w = 0; w < n(); ++w) {
                if (!mult_[v][w].any()) continue;
                q.add_edges(v, w, mult_[v][w]);
                if (in(w_set, w)) q.add_edges(v, copy_index[w], mult_[v][w]);
                auto it = weights_.find({v, w});
                if (it != weights_.end())
                    for (std::uint64_t i = 0; i < it->second.size(); ++i) {
                        q.set_weight(v, w, i, it->second[i]);
                        if (in(w_set, w)) q.set_weight(v, copy_index[w], i, it->second[i]);
                    }
            }
        return q;
    }

    // --- loops ---------------------------------------------------------------

    /// Exact count of simple loops based at v, saturated at 2 ("many").
    /// A loop is simple when its base point is not revisited; interior
    /// vertices may repeat, so the walk count is decided by cycle detection
    /// plus path DP on the interior subgraph.
    int count_simple_loops_at(int v) const {
        auto cap2 = [](std::uint64_t x) { return static_cast<int>(std::min<std::uint64_t>(x, 2)); };
        auto cnt = [&](int a, int b) -> int {
            const Mult& m = mult_[a][b];
            return m.inf ? 2 : cap2(m.m);
        };
        int total = cnt(v, v);  // self-loops close immediately
        // C: vertices x != v admitting an interior-avoiding walk x -> v.
        std::vector<char> inC(n(), 0);
        std::vector<int> stack;
        for (int x = 0; x < n(); ++x)
            if (x != v && cnt(x, v) > 0 && !inC[x]) { inC[x] = 1; stack.push_back(x); }
        while (!stack.empty()) {
            int y = stack.back();
            stack.pop_back();
            for (int x = 0; x < n(); ++x)
                if (x != v && !inC[x] && cnt(x, y) > 0) { inC[x] = 1; stack.push_back(x); }
        }
        for (int u = 0; u < n(); ++u) {
            if (total >= 2) return 2;
            if (u == v || cnt(v, u) == 0) continue;
            // R: reachable from u avoiding v
            std::vector<char> inR(n(), 0);
            inR[u] = 1;
            stack.assign(1, u);
            while (!stack.empty()) {
                int x = stack.back();
                stack.pop_back();
                for (int y = 0; y < n(); ++y)
                    if (y != v && !inR[y] && cnt(x, y) > 0) { inR[y] = 1; stack.push_back(y); }
            }
            std::vector<char> inH(n(), 0);
            for (int x = 0; x < n(); ++x) inH[x] = inR[x] && inC[x];
            if (!inH[u]) continue;  // no u -> v walk at all
            // cycle inside H pumps infinitely many distinct loops
            if (has_cycle_within(inH)) { total = 2; continue; }
            // DAG: walk counts by DP in reverse topological order
            std::vector<int> order = topo_order(inH);
            std::vector<int> walks(n(), 0);
            for (auto it = order.rbegin(); it != order.rend(); ++it) {
                int x = *it;
                std::uint64_t acc = cnt(x, v);
                for (int y = 0; y < n(); ++y)
                    if (inH[y] && cnt(x, y) > 0)
                        acc += static_cast<std::uint64_t>(cnt(x, y)) * walks[y];
                walks[x] = cap2(acc);
            }
            total = cap2(static_cast<std::uint64_t>(total) +
                         static_cast<std::uint64_t>(cnt(v, u)) * walks[u]);
        }
        return total;
    }

    /// All simple loops based at v of length <= maxlen, as explicit edge
    /// paths. Parallel-edge indices are enumerated up to `index_cap` per
    /// class; *complete is cleared when any cap truncated the search.
    std::vector<DiscretePath> simple_loops_at(int v, int maxlen, bool* complete = nullptr,
                                              std::uint64_t index_cap = 4,
                                              std::size_t count_cap = 4096) const {
        std::vector<DiscretePath> out;
        bool truncated = false;
        DiscretePath cur;
        dfs_loops(v, v, maxlen, index_cap, count_cap, cur, out, truncated);
        if (complete) *complete = !truncated;
        return out;
    }

    bool loop_has_exit(const DiscretePath& p) const {
        for (const Edge& e : p.edges) {
            if (out_infinite(e.src) || out_degree_finite(e.src) >= 2) return true;
        }
        return false;
    }

    /// First-return time of v under the unique-out-edge map, following only
    /// vertices of out-degree exactly one; nullopt when the orbit leaves that
    /// region or fails to return. Loops with no exits are exactly the orbits
    /// of finite return time.
    std::optional<int> exitless_return_time(int v) const {
        if (!unique_out(v)) return std::nullopt;
        int x = v;
        for (int steps = 1; steps <= n(); ++steps) {
            x = unique_out_target(x);
            if (x == v) return steps;
            if (!unique_out(x)) return std::nullopt;
        }
        return std::nullopt;
    }

    bool unique_out(int v) const { return !out_infinite(v) && out_degree_finite(v) == 1; }
    int unique_out_target(int v) const {
        for (int w = 0; w < n(); ++w)
            if (mult_[v][w].any()) return w;
        throw std::logic_error("unique_out_target: no out edge");
    }

    /// L_n = base points of exitless loops of length n (n-th return set).
    VMask exitless_base_mask(int length) const {
        VMask m = 0;
        for (int v = 0; v < n(); ++v) {
            auto ret = exitless_return_time(v);
            if (ret && length % *ret == 0) m |= VMask(1) << v;
        }
        return m;
    }
    VMask exitless_base_all() const {
        VMask m = 0;
        for (int v = 0; v < n(); ++v)
            if (exitless_return_time(v)) m |= VMask(1) << v;
        return m;
    }

    /// Backward reachability: vertices admitting a path (length >= 1) into v.
    VMask reaches_mask(int v) const {
        VMask s = 0;
        std::vector<int> stack;
        for (int x = 0; x < n(); ++x)
            if (mult_[x][v].any() && !in(s, x)) { s |= VMask(1) << x; stack.push_back(x); }
        while (!stack.empty()) {
            int y = stack.back();
            stack.pop_back();
            for (int x = 0; x < n(); ++x)
                if (!in(s, x) && mult_[x][y].any()) { s |= VMask(1) << x; stack.push_back(x); }
        }
        return s;
    }

    // --- conversions to the topological view --------------------------------

    /// Vertex space as a OneComplex: one isolated point cell per vertex plus
    /// the quiver's tail families.
    ComplexPtr vertex_complex() const {
        if (!vcx_) {
            std::vector<Cell> cells;
            for (const auto& nm : names_) cells.push_back(Cell{nm, 0, 0});
            std::vector<TailFamily> tails;
            for (const auto& t : tails_) tails.push_back(TailFamily{t});
            vcx_ = make_complex(std::move(cells), {}, std::move(tails));
        }
        return vcx_;
    }

    /// Edge space: one isolated point cell per explicit edge, one tail family
    /// per infinite-multiplicity class.
    ComplexPtr edge_complex() const {
        build_edge_view();
        return ecx_;
    }

    /// The quiver's maps as PL data over the point complexes (for cross-checks
    /// against the generic machinery; weights are not carried).
    PLMap range_map() const {
        build_edge_view();
        return PLMap(ecx_, vertex_complex(), edge_pieces(/*use_range=*/true),
                     edge_tail_rules(/*use_range=*/true));
    }
    PLMap source_map() const {
        build_edge_view();
        return PLMap(ecx_, vertex_complex(), edge_pieces(false), edge_tail_rules(false));
    }

    SubSet mask_to_subset(VMask m) const {
        SubSet s(*vertex_complex());
        for (int v = 0; v < n(); ++v)
            if (in(m, v)) s.add_interval(v, iv_point(Rat(0)));
        s.canonicalize(*vertex_complex());
        return s;
    }
    std::optional<VMask> subset_to_mask(const SubSet& s) const {
        for (int t = 0; t < static_cast<int>(tails_.size()); ++t)
            if (!s.tail_part(t).is_empty()) return std::nullopt;
        VMask m = 0;
        for (int v = 0; v < n(); ++v)
            if (s.coord_member(v, Rat(0))) m |= VMask(1) << v;
        return m;
    }

    friend bool operator==(const DiscreteQuiver& a, const DiscreteQuiver& b) {
        if (a.names_ != b.names_ || a.tails_ != b.tails_) return false;
        for (int v = 0; v < a.n(); ++v)
            for (int w = 0; w < a.n(); ++w) {
                const Mult &ma = a.mult_[v][w], &mb = b.mult_[v][w];
                if (ma.inf != mb.inf || ma.m != mb.m) return false;
                for (std::uint64_t i = 0; !ma.inf && i < ma.m; ++i)
                    if (a.weight(v, w, i) != b.weight(v, w, i)) return false;
            }
        return true;
    }

private:
    std::vector<std::string> names_;
    std::vector<std::vector<Mult>> mult_;
    std::map<std::pair<int, int>, std::vector<Rat>> weights_;
    std::vector<std::string> tails_;

    mutable ComplexPtr vcx_, ecx_;
    mutable std::vector<Edge> edge_cells_;     // cell index -> edge id
    mutable std::vector<std::pair<int, int>> edge_tails_;  // tail index -> inf class

    void invalidate() {
        vcx_.reset();
        ecx_.reset();
        edge_cells_.clear();
        edge_tails_.clear();
    }

    void require_mask() const {
        if (n() > 64) throw std::invalid_argument("discrete mask analyses limited to 64 vertices");
    }
    void require_no_tails(const char* op) const {
        if (has_tails())
            throw std::invalid_argument(std::string(op) + ": unsupported with tail-family vertices");
    }

    bool has_cycle_within(const std::vector<char>& inH) const {
        std::vector<int> state(n(), 0);
        std::function<bool(int)> visit = [&](int x) {
            state[x] = 1;
            for (int y = 0; y < n(); ++y) {
                if (!inH[y] || !mult_[x][y].any()) continue;
                if (state[y] == 1) return true;
                if (state[y] == 0 && visit(y)) return true;
            }
            state[x] = 2;
            return false;
        };
        for (int x = 0; x < n(); ++x)
            if (inH[x] && state[x] == 0 && visit(x)) return true;
        return false;
    }

    std::vector<int> topo_order(const std::vector<char>& inH) const {
        std::vector<int> order, state(n(), 0);
        std::function<void(int)> visit = [&](int x) {
            state[x] = 1;
            for (int y = 0; y < n(); ++y)
                if (inH[y] && mult_[x][y].any() && state[y] == 0) visit(y);
            order.push_back(x);
        };
        for (int x = 0; x < n(); ++x)
            if (inH[x] && state[x] == 0) visit(x);
        std::reverse(order.begin(), order.end());
        return order;  // forward topological order
    }

    void dfs_loops(int base, int cur, int remaining, std::uint64_t index_cap,
                   std::size_t count_cap, DiscretePath& path, std::vector<DiscretePath>& out,
                   bool& truncated) const {
        if (remaining == 0) return;
        for (int w = 0; w < n(); ++w) {
            const Mult& m = mult_[cur][w];
            if (!m.any()) continue;
            std::uint64_t limit = m.inf ? index_cap : std::min<std::uint64_t>(m.m, index_cap);
            if (m.inf || m.m > index_cap) truncated = true;
            for (std::uint64_t i = 0; i < limit; ++i) {
                if (out.size() >= count_cap) { truncated = true; return; }
                path.edges.push_back(Edge{cur, w, i});
                if (w == base) {
                    out.push_back(path);
                } else {
                    dfs_loops(base, w, remaining - 1, index_cap, count_cap, path, out, truncated);
                }
                path.edges.pop_back();
            }
        }
        if (remaining == 1) {
            // extensions beyond the cap are cut here; flag only if something
            // longer could have existed
            for (int w = 0; w < n(); ++w)
                if (mult_[cur][w].any() && w != base) { truncated = true; break; }
        }
    }

    void build_edge_view() const {
        if (ecx_) return;
        std::vector<Cell> cells;
        std::vector<TailFamily> tails;
        edge_cells_.clear();
        edge_tails_.clear();
        for (int v = 0; v < n(); ++v)
            for (int w = 0; w < n(); ++w) {
                const Mult& m = mult_[v][w];
                if (m.inf) {
                    tails.push_back(TailFamily{names_[v] + ">" + names_[w] + ".inf"});
                    edge_tails_.emplace_back(v, w);
                } else {
                    for (std::uint64_t i = 0; i < m.m; ++i) {
                        cells.push_back(Cell{names_[v] + ">" + names_[w] + "." + std::to_string(i), 0, 0});
                        edge_cells_.push_back(Edge{v, w, i});
                    }
                }
            }
        ecx_ = make_complex(std::move(cells), {}, std::move(tails));
    }

    std::vector<std::vector<Piece>> edge_pieces(bool use_range) const {
        std::vector<std::vector<Piece>> ps(edge_cells_.size());
        for (std::size_t i = 0; i < edge_cells_.size(); ++i) {
            int target = use_range ? edge_cells_[i].dst : edge_cells_[i].src;
            ps[i] = {Piece{0, 0, 0, 0, target}};
        }
        return ps;
    }
    std::vector<TailRule> edge_tail_rules(bool use_range) const {
        std::vector<TailRule> rules;
        for (std::size_t t = 0; t < edge_tails_.size(); ++t) {
            int target = use_range ? edge_tails_[t].second : edge_tails_[t].first;
            rules.push_back(TailToPoint{static_cast<int>(t), CellPoint{target, Rat(0)}});
        }
        return rules;
    }
};

}  // namespace qv
