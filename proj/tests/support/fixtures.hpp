#pragma once

// In-code builders for the recurring example quivers.

#include "quiver/discrete.hpp"
#include "quiver/quiver.hpp"

namespace qvtest {

/// E^0 = {0} u [1,2], one edge with s = 1, r = 0 (counting measure).
inline qv::PLQuiver interval_sink_quiver() {
    using namespace qv;
    auto V = make_complex({Cell{"p0", 0, 0}, Cell{"c1", 1, 2}});
    auto E = make_complex({Cell{"a", 0, 0}});
    PLMap r(E, V, {{Piece{0, 0, 0, 0, 0}}});      // a -> 0
    PLMap s(E, V, {{Piece{0, 0, 0, 1, 1}}});      // a -> 1
    return PLQuiver{V, E, std::move(r), std::move(s)};
}

/// E^0 = [0,2], E^1 = [0,1], r(x) = 2x, s(x) = x.
inline qv::PLQuiver doubling_quiver() {
    using namespace qv;
    auto V = make_complex({Cell{"v", 0, 2}});
    auto E = make_complex({Cell{"e", 0, 1}});
    PLMap r(E, V, {{Piece{0, 1, 2, 0, 0}}});
    PLMap s(E, V, {{Piece{0, 1, 1, 0, 0}}});
    return PLQuiver{V, E, std::move(r), std::move(s)};
}

/// E^0 = E^1 = [0,1], r = tent map, s = id.
inline qv::PLQuiver tent_quiver() {
    using namespace qv;
    auto V = make_complex({Cell{"v", 0, 1}});
    auto E = make_complex({Cell{"e", 0, 1}});
    PLMap r(E, V, {{Piece{0, qv::Rat(1, 2), 2, 0, 0}, Piece{qv::Rat(1, 2), 1, -2, 2, 0}}});
    PLMap s(E, V, {{Piece{0, 1, 1, 0, 0}}});
    return PLQuiver{V, E, std::move(r), std::move(s)};
}

/// Two vertices, countably many edges v -> w.
inline qv::DiscreteQuiver infinite_emitter() {
    qv::DiscreteQuiver d;
    d.add_vertex("v");
    d.add_vertex("w");
    d.add_edges(0, 1, qv::Mult::infinite());
    return d;
}

inline qv::DiscreteQuiver petal_quiver(int loops) {
    qv::DiscreteQuiver d;
    d.add_vertex("v");
    if (loops > 0) d.add_edges(0, 0, qv::Mult{static_cast<std::uint64_t>(loops), false});
    return d;
}

inline qv::DiscreteQuiver cycle_quiver(int n) {
    qv::DiscreteQuiver d;
    for (int i = 0; i < n; ++i) d.add_vertex("v" + std::to_string(i));
    for (int i = 0; i < n; ++i) d.add_edges(i, (i + 1) % n, qv::Mult{1, false});
    return d;
}

/// v -> w (w a sink).
inline qv::DiscreteQuiver one_arrow() {
    qv::DiscreteQuiver d;
    d.add_vertex("v");
    d.add_vertex("w");
    d.add_edges(0, 1, qv::Mult{1, false});
    return d;
}

}  // namespace qvtest
