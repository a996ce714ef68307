#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "quiver/rational.hpp"

namespace qv {

/// One closed interval [lo, hi] with rational endpoints. lo == hi encodes an
/// isolated point.
struct Cell {
    std::string name;
    Rat lo, hi;
    bool zero_length() const { return lo == hi; }
};

/// A presented countable discrete family: points indexed by the naturals,
/// discrete and closed in the realized space (no accumulation points), except
/// that in a compactified complex every infinite tail set accumulates at the
/// adjoined point at infinity.
struct TailFamily {
    std::string name;
};

/// One end of a cell: end == 0 is lo, end == 1 is hi.
struct Endpoint {
    int cell = -1;
    int end = 0;
    friend bool operator==(const Endpoint& a, const Endpoint& b) {
        return a.cell == b.cell && a.end == b.end;
    }
    friend bool operator<(const Endpoint& a, const Endpoint& b) {
        return a.cell != b.cell ? a.cell < b.cell : a.end < b.end;
    }
};

struct CellPoint {
    int cell = -1;
    Rat x;
    friend bool operator==(const CellPoint& a, const CellPoint& b) {
        return a.cell == b.cell && a.x == b.x;
    }
};
struct TailPoint {
    int tail = -1;
    std::int64_t index = 0;
    friend bool operator==(const TailPoint& a, const TailPoint& b) {
        return a.tail == b.tail && a.index == b.index;
    }
};
struct InfinityPoint {
    friend bool operator==(const InfinityPoint&, const InfinityPoint&) { return true; }
};

/// A point of the realized space, in written form. Two CellPoints naming
/// glued endpoints of different cells denote the same realized point; use
/// OneComplex::points_equal / canonical_point for realized identity.
using Point = std::variant<CellPoint, TailPoint, InfinityPoint>;

/// A compact rational 1-complex plus presented countable discrete tails.
/// Cells are closed intervals; glue classes identify cell endpoints (this is
/// how circles, wedges and trees arise). When `compactified` is set the space
/// additionally carries one point at infinity which compactifies the tails.
///
/// Invariants: glue only pairs endpoints; the realized space is Hausdorff;
/// every realized point is exactly one of cell-interior point, endpoint
/// class, tail point, or the infinity point.
class OneComplex {
public:
    OneComplex() { rebuild(); }
    OneComplex(std::vector<Cell> cells, std::vector<std::pair<Endpoint, Endpoint>> glue,
               std::vector<TailFamily> tails = {}, bool compactified = false)
        : cells_(std::move(cells)), tails_(std::move(tails)), glue_(std::move(glue)),
          compactified_(compactified) {
        rebuild();
    }

    int n_cells() const { return static_cast<int>(cells_.size()); }
    int n_tails() const { return static_cast<int>(tails_.size()); }
    const Cell& cell(int i) const { return cells_.at(i); }
    const TailFamily& tail(int i) const { return tails_.at(i); }
    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<TailFamily>& tails() const { return tails_; }
    const std::vector<std::pair<Endpoint, Endpoint>>& glue_pairs() const { return glue_; }
    bool compactified() const { return compactified_; }

    std::optional<int> cell_index(std::string_view name) const {
        for (int i = 0; i < n_cells(); ++i)
            if (cells_[i].name == name) return i;
        return std::nullopt;
    }
    std::optional<int> tail_index(std::string_view name) const {
        for (int i = 0; i < n_tails(); ++i)
            if (tails_[i].name == name) return i;
        return std::nullopt;
    }

    Rat endpoint_coord(Endpoint e) const {
        const Cell& c = cell(e.cell);
        return e.end == 0 ? c.lo : c.hi;
    }

    /// Endpoint-class id of a cell endpoint.
    int class_of(Endpoint e) const { return class_of_.at(2 * e.cell + e.end); }

    int n_classes() const { return static_cast<int>(classes_.size()); }
    const std::vector<Endpoint>& class_members(int cls) const { return classes_.at(cls); }

    /// If x is an endpoint coordinate of cell c, the endpoint (preferring lo).
    std::optional<Endpoint> endpoint_at(int c, const Rat& x) const {
        if (x == cells_[c].lo) return Endpoint{c, 0};
        if (x == cells_[c].hi) return Endpoint{c, 1};
        return std::nullopt;
    }

    /// Realized identity of points.
    bool points_equal(const Point& a, const Point& b) const {
        if (a.index() != b.index()) return false;
        if (std::holds_alternative<TailPoint>(a)) return std::get<TailPoint>(a) == std::get<TailPoint>(b);
        if (std::holds_alternative<InfinityPoint>(a)) return true;
        const auto& pa = std::get<CellPoint>(a);
        const auto& pb = std::get<CellPoint>(b);
        if (pa == pb) return true;
        auto ea = endpoint_at(pa.cell, pa.x);
        auto eb = endpoint_at(pb.cell, pb.x);
        if (!ea || !eb) return false;
        return class_of(*ea) == class_of(*eb);
    }

    /// Canonical written form: endpoint-class points are rewritten to the
    /// least member endpoint of their class.
    Point canonical_point(const Point& p) const {
        if (!std::holds_alternative<CellPoint>(p)) return p;
        const auto& cp = std::get<CellPoint>(p);
        auto e = endpoint_at(cp.cell, cp.x);
        if (!e) return p;
        Endpoint least = *std::min_element(class_members(class_of(*e)).begin(),
                                           class_members(class_of(*e)).end());
        return CellPoint{least.cell, endpoint_coord(least)};
    }

    /// Directions along which a positive-length cell leaves the endpoint
    /// class: (cell, +1) means into the cell from its lo end, (cell, -1)
    /// into the cell from its hi end. Zero-length members contribute none.
    std::vector<std::pair<int, int>> sticks_at(int cls) const {
        std::vector<std::pair<int, int>> out;
        for (const Endpoint& e : class_members(cls)) {
            if (cell(e.cell).zero_length()) continue;
            out.emplace_back(e.cell, e.end == 0 ? +1 : -1);
        }
        return out;
    }

    /// True when the realized point is open as a singleton.
    bool is_isolated(const Point& p) const {
        if (std::holds_alternative<TailPoint>(p)) return true;
        if (std::holds_alternative<InfinityPoint>(p)) return false;  // limits of tails
        const auto& cp = std::get<CellPoint>(p);
        auto e = endpoint_at(cp.cell, cp.x);
        if (!e) return false;
        return sticks_at(class_of(*e)).empty();
    }

    /// The space itself is compact iff it has no tails or carries the point
    /// at infinity.
    bool is_compact_space() const { return compactified_ || tails_.empty(); }

    friend bool operator==(const OneComplex& a, const OneComplex& b) {
        auto names = [](const std::vector<TailFamily>& ts) {
            std::vector<std::string> ns;
            for (auto& t : ts) ns.push_back(t.name);
            return ns;
        };
        if (a.compactified_ != b.compactified_) return false;
        if (names(a.tails_) != names(b.tails_)) return false;
        if (a.cells_.size() != b.cells_.size()) return false;
        for (size_t i = 0; i < a.cells_.size(); ++i) {
            if (a.cells_[i].name != b.cells_[i].name || a.cells_[i].lo != b.cells_[i].lo ||
                a.cells_[i].hi != b.cells_[i].hi)
                return false;
        }
        // Compare glue as partitions, not as declared pair lists.
        return a.class_of_ == b.class_of_;
    }

private:
    std::vector<Cell> cells_;
    std::vector<TailFamily> tails_;
    std::vector<std::pair<Endpoint, Endpoint>> glue_;
    bool compactified_ = false;

    std::vector<int> class_of_;               // 2 * cell + end -> class id
    std::vector<std::vector<Endpoint>> classes_;

    void rebuild() {
        for (const auto& c : cells_) {
            if (c.lo > c.hi) throw std::invalid_argument("OneComplex: cell with lo > hi: " + c.name);
        }
        int n = 2 * n_cells();
        std::vector<int> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
        // Both ends of a zero-length cell are the same realized point.
        for (int c = 0; c < n_cells(); ++c)
            if (cells_[c].zero_length()) unite(2 * c, 2 * c + 1);
        for (const auto& [a, b] : glue_) {
            if (a.cell < 0 || a.cell >= n_cells() || b.cell < 0 || b.cell >= n_cells())
                throw std::invalid_argument("OneComplex: glue references unknown cell");
            unite(2 * a.cell + a.end, 2 * b.cell + b.end);
        }
        class_of_.assign(n, -1);
        classes_.clear();
        std::map<int, int> root_to_class;
        for (int i = 0; i < n; ++i) {
            int r = find(i);
            auto it = root_to_class.find(r);
            if (it == root_to_class.end()) {
                it = root_to_class.emplace(r, static_cast<int>(classes_.size())).first;
                classes_.emplace_back();
            }
            class_of_[i] = it->second;
            classes_[it->second].push_back(Endpoint{i / 2, i % 2});
        }
        for (auto& members : classes_) std::sort(members.begin(), members.end());
    }
};

using ComplexPtr = std::shared_ptr<const OneComplex>;

inline ComplexPtr make_complex(std::vector<Cell> cells,
                               std::vector<std::pair<Endpoint, Endpoint>> glue = {},
                               std::vector<TailFamily> tails = {}, bool compactified = false) {
    return std::make_shared<const OneComplex>(std::move(cells), std::move(glue), std::move(tails),
                                              compactified);
}

}  // namespace qv
