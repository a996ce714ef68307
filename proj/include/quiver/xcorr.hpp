#pragma once

// Exact arithmetic of the quiver correspondence on discrete weighted quivers:
// the vertex-algebra-valued inner product, the module actions, and a checker
// for the algebraic identities. Scalars are Gaussian rationals; nothing is
// completed, so every identity here is decided exactly.

#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "quiver/discrete.hpp"

namespace qv {

/// Gaussian rational a + bi.
struct QC {
    Rat re, im;
    QC() = default;
    QC(Rat r) : re(std::move(r)) {}  // NOLINT: implicit by design
    QC(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}
    QC conj() const { return QC{re, -im}; }
    bool is_zero() const { return re.sign() == 0 && im.sign() == 0; }
    friend QC operator+(const QC& a, const QC& b) { return {a.re + b.re, a.im + b.im}; }
    friend QC operator-(const QC& a, const QC& b) { return {a.re - b.re, a.im - b.im}; }
    friend QC operator*(const QC& a, const QC& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend bool operator==(const QC& a, const QC& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const QC& a, const QC& b) { return !(a == b); }
    std::string str() const { return "(" + re.str() + (im.sign() < 0 ? "" : "+") + im.str() + "i)"; }
};

struct InfiniteFiberTouched : std::invalid_argument {
    InfiniteFiberTouched()
        : std::invalid_argument("edge function support touches an infinite-multiplicity class") {}
};

using EdgeKey = std::tuple<int, int, std::uint64_t>;  // (src, dst, idx)

/// Finitely supported function on the explicit edges of a discrete quiver.
class EdgeFunction {
public:
    EdgeFunction() = default;
    void set(const Edge& e, QC v) {
        if (v.is_zero()) vals_.erase({e.src, e.dst, e.idx});
        else vals_[{e.src, e.dst, e.idx}] = std::move(v);
    }
    QC at(const Edge& e) const {
        auto it = vals_.find({e.src, e.dst, e.idx});
        return it == vals_.end() ? QC{} : it->second;
    }
    const std::map<EdgeKey, QC>& values() const { return vals_; }
    bool is_zero() const { return vals_.empty(); }
    friend bool operator==(const EdgeFunction& a, const EdgeFunction& b) {
        return a.vals_ == b.vals_;
    }

    /// Every supported edge must name an explicit (finite-class) edge.
    void check_support(const DiscreteQuiver& d) const {
        for (const auto& [k, v] : vals_) {
            auto [src, dst, idx] = k;
            const Mult& m = d.mult(src, dst);
            if (m.inf) throw InfiniteFiberTouched{};
            if (idx >= m.m) throw std::invalid_argument("edge function names a missing edge");
        }
    }

private:
    std::map<EdgeKey, QC> vals_;
};

/// Finitely supported function on the vertices.
class VertexFunction {
public:
    VertexFunction() = default;
    void set(int v, QC x) {
        if (x.is_zero()) vals_.erase(v);
        else vals_[v] = std::move(x);
    }
    QC at(int v) const {
        auto it = vals_.find(v);
        return it == vals_.end() ? QC{} : it->second;
    }
    const std::map<int, QC>& values() const { return vals_; }
    bool is_zero() const { return vals_.empty(); }
    VertexFunction conj() const {
        VertexFunction out;
        for (const auto& [v, x] : vals_) out.set(v, x.conj());
        return out;
    }
    friend bool operator==(const VertexFunction& a, const VertexFunction& b) {
        return a.vals_ == b.vals_;
    }

private:
    std::map<int, QC> vals_;
};

/// <xi, eta>(v) = sum over edges with range v of conj(xi) * eta * weight.
inline VertexFunction inner_product(const DiscreteQuiver& d, const EdgeFunction& xi,
                                    const EdgeFunction& eta) {
    xi.check_support(d);
    eta.check_support(d);
    VertexFunction out;
    for (const auto& [k, x] : xi.values()) {
        auto [src, dst, idx] = k;
        QC y = eta.at(Edge{src, dst, idx});
        if (y.is_zero()) continue;
        QC term = x.conj() * y * QC{d.weight(src, dst, idx)};
        out.set(dst, out.at(dst) + term);
    }
    return out;
}

/// phi(f) xi (alpha) = f(s(alpha)) xi(alpha).
inline EdgeFunction left_action(const DiscreteQuiver& d, const VertexFunction& f,
                                const EdgeFunction& xi) {
    xi.check_support(d);
    EdgeFunction out;
    for (const auto& [k, x] : xi.values()) {
        auto [src, dst, idx] = k;
        out.set(Edge{src, dst, idx}, f.at(src) * x);
    }
    return out;
}

/// xi . f (alpha) = xi(alpha) f(r(alpha)).
inline EdgeFunction right_action(const DiscreteQuiver& d, const EdgeFunction& xi,
                                 const VertexFunction& f) {
    xi.check_support(d);
    EdgeFunction out;
    for (const auto& [k, x] : xi.values()) {
        auto [src, dst, idx] = k;
        out.set(Edge{src, dst, idx}, x * f.at(dst));
    }
    return out;
}

inline VertexFunction vf_mul(const VertexFunction& a, const VertexFunction& b) {
    VertexFunction out;
    for (const auto& [v, x] : a.values()) out.set(v, x * b.at(v));
    return out;
}

struct AxiomReport {
    struct Entry {
        std::string axiom;
        bool pass = true;
        std::string counterexample;
    };
    std::vector<Entry> entries;
    int samples = 0;
    bool ok() const {
        for (const auto& e : entries)
            if (!e.pass) return false;
        return true;
    }
};

/// Verifies the correspondence identities on random finitely supported
/// functions: conjugate symmetry, right-linearity of the inner product,
/// positivity and definiteness, and adjointability of the left action for
/// real symbols. All checks are exact.
inline AxiomReport check_correspondence_axioms(const DiscreteQuiver& d, int samples = 1000,
                                               std::uint64_t seed = 1) {
    AxiomReport rep;
    rep.samples = samples;
    AxiomReport::Entry sym{"conjugate symmetry <xi,eta>* = <eta,xi>"};
    AxiomReport::Entry lin{"right linearity <xi, eta.a> = <xi,eta> a"};
    AxiomReport::Entry pos{"positivity <xi,xi> >= 0, zero only at xi = 0"};
    AxiomReport::Entry adj{"adjointability <phi(f)xi, eta> = <xi, phi(conj f)eta>"};
    std::mt19937_64 rng(seed);
    std::vector<Edge> edges;
    for (int v = 0; v < d.n(); ++v)
        for (int w = 0; w < d.n(); ++w) {
            const Mult& m = d.mult(v, w);
            if (m.inf) continue;
            for (std::uint64_t i = 0; i < m.m; ++i) edges.push_back(Edge{v, w, i});
        }
    auto rand_rat = [&] {
        return Rat(std::uniform_int_distribution<long>(-4, 4)(rng),
                   std::uniform_int_distribution<long>(1, 3)(rng));
    };
    auto rand_edge_fn = [&] {
        EdgeFunction f;
        if (edges.empty()) return f;
        int k = std::uniform_int_distribution<int>(0, 3)(rng);
        for (int i = 0; i < k; ++i) {
            const Edge& e = edges[std::uniform_int_distribution<std::size_t>(0, edges.size() - 1)(rng)];
            f.set(e, QC{rand_rat(), rand_rat()});
        }
        return f;
    };
    auto rand_vertex_fn = [&](bool real_only) {
        VertexFunction f;
        if (d.n() == 0) return f;
        int k = std::uniform_int_distribution<int>(0, 2)(rng);
        for (int i = 0; i < k; ++i) {
            int v = std::uniform_int_distribution<int>(0, d.n() - 1)(rng);
            f.set(v, QC{rand_rat(), real_only ? Rat(0) : rand_rat()});
        }
        return f;
    };
    for (int it = 0; it < samples; ++it) {
        EdgeFunction xi = rand_edge_fn(), eta = rand_edge_fn();
        VertexFunction a = rand_vertex_fn(false);
        VertexFunction f = rand_vertex_fn(true);
        VertexFunction ip = inner_product(d, xi, eta);
        VertexFunction ip_rev = inner_product(d, eta, xi);
        if (sym.pass && !(ip.conj() == ip_rev)) {
            sym.pass = false;
            sym.counterexample = "sample " + std::to_string(it);
        }
        if (lin.pass &&
            !(inner_product(d, xi, right_action(d, eta, a)) == vf_mul(ip, a))) {
            lin.pass = false;
            lin.counterexample = "sample " + std::to_string(it);
        }
        VertexFunction norm = inner_product(d, xi, xi);
        bool ok_pos = true;
        for (const auto& [v, x] : norm.values())
            if (x.im.sign() != 0 || x.re.sign() < 0) ok_pos = false;
        if (norm.is_zero() && !xi.is_zero()) ok_pos = false;
        if (pos.pass && !ok_pos) {
            pos.pass = false;
            std::ostringstream os;
            os << "sample " << it << ":";
            for (const auto& [v, x] : norm.values()) os << " " << d.name(v) << "=" << x.str();
            pos.counterexample = os.str();
        }
        if (adj.pass && !(inner_product(d, left_action(d, f, xi), eta) ==
                          inner_product(d, xi, left_action(d, f.conj(), eta)))) {
            adj.pass = false;
            adj.counterexample = "sample " + std::to_string(it);
        }
    }
    rep.entries = {sym, lin, pos, adj};
    return rep;
}

}  // namespace qv
