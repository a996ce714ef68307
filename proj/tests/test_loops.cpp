#include <catch2/catch_amalgamated.hpp>

#include "quiver/loops.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace qv;
using qvtest::cycle_quiver;
using qvtest::doubling_quiver;
using qvtest::infinite_emitter;
using qvtest::one_arrow;
using qvtest::petal_quiver;
using qvtest::tent_quiver;

namespace {
SubSet pt(const OneComplex& X, int cell, const Rat& x) {
    return single_point(X, CellPoint{cell, x});
}
}  // namespace

TEST_CASE("v_geq: doubling quiver reaches 0 only from 0") {
    PLQuiver q = doubling_quiver();
    auto vg = v_geq(q, CellPoint{0, Rat(0)});
    REQUIRE(vg.stabilized());
    CHECK(*vg.value == pt(q.V(), 0, Rat(0)));
}

TEST_CASE("v_geq: discrete reachability") {
    DiscreteQuiver c3 = cycle_quiver(3);
    CHECK(v_geq(c3, 0) == c3.mask_to_subset(0b111));
    DiscreteQuiver d = one_arrow();
    CHECK(v_geq(d, 1) == d.mask_to_subset(0b01));
    // and through the generic machinery
    PLQuiver p = pl_view(d);
    auto vg = v_geq(p, CellPoint{1, Rat(0)});
    REQUIRE(vg.stabilized());
    CHECK(*vg.value == d.mask_to_subset(0b01));
}

TEST_CASE("exitless map of the doubling quiver: W1 = [0,1], h = 2x, L_1 = {0}") {
    PLQuiver q = doubling_quiver();
    ExitlessMap h = build_exitless_map(q);
    SubSet w1(q.V());
    w1.add_interval(0, Iv{0, 1, true, true});
    w1.canonicalize(q.V());
    CHECK(h.domain == w1);
    REQUIRE(h.atoms.size() == 1);
    CHECK(h.atoms[0].slope == Rat(2));
    CHECK(h.atoms[0].icpt == Rat(0));

    ExitlessReport rep = exitless_base_points(q, 6);
    CHECK(rep.levels_exact);
    CHECK(rep.expansion_certified);
    for (int n = 0; n < 6; ++n) CHECK(rep.L[n] == pt(q.V(), 0, Rat(0)));
    CHECK(rep.L_simple[0] == pt(q.V(), 0, Rat(0)));
    for (int n = 1; n < 6; ++n) CHECK(rep.L_simple[n].is_empty());
}

TEST_CASE("L_n^s sets are disjoint and inside L_n (random PL)") {
    qvtest::Rng rng(60901);
    for (int it = 0; it < 40; ++it) {
        PLQuiver q = qvtest::rand_pl_quiver(rng);
        ExitlessReport rep = exitless_base_points(q, 8);
        for (std::size_t n = 0; n < rep.L.size(); ++n) {
            CHECK(is_subset(q.V(), rep.L_simple[n], rep.L[n]));
            for (std::size_t m = 0; m < n; ++m)
                CHECK(set_intersect(q.V(), rep.L_simple[n], rep.L_simple[m]).is_empty());
        }
    }
}

TEST_CASE("periodic points match a sign-change sampling oracle (random PL)") {
    qvtest::Rng rng(8888);
    for (int it = 0; it < 50; ++it) {
        PLQuiver q = qvtest::rand_pl_quiver(rng);
        ExitlessMap h = build_exitless_map(q);
        ExitlessReport rep = exitless_base_points(q, 4);
        if (!rep.levels_exact) continue;
        // oracle: on each atom solve a*x+b = x by endpoint evaluation signs
        SubSet oracle_L1(q.V());
        for (const HAtom& a : h.atoms) {
            if (a.src != a.dst) continue;
            auto g = [&](const Rat& x) { return a.value_at(x) - x; };
            if (a.slope == Rat(1) && a.icpt == Rat(0)) {
                oracle_L1.add_interval(a.src, a.dom);
                continue;
            }
            Rat glo = g(a.dom.lo), ghi = g(a.dom.hi);
            if (glo.sign() == 0 && qv::detail::point_less(Point(CellPoint{a.src, a.dom.lo}),
                                                          Point(CellPoint{a.src, a.dom.lo})) == false)
                if (detail::iv_contains(a.dom, a.dom.lo)) oracle_L1.add_interval(a.src, iv_point(a.dom.lo));
            if (ghi.sign() == 0 && detail::iv_contains(a.dom, a.dom.hi))
                oracle_L1.add_interval(a.src, iv_point(a.dom.hi));
            if (glo.sign() * ghi.sign() < 0) {
                Rat x = a.icpt / (Rat(1) - a.slope);
                oracle_L1.add_interval(a.src, iv_point(x));
            }
        }
        oracle_L1.canonicalize(q.V());
        // the implementation may add glue-identified points; the oracle's
        // points must all be present
        CHECK(is_subset(q.V(), oracle_L1, rep.L[0]));
    }
}

TEST_CASE("condition (L): discrete examples") {
    LoopVerdict one = condition_L(petal_quiver(1));
    CHECK(one.status == Verdict::Fails);
    REQUIRE(one.witness.has_value());
    CHECK(*one.witness == petal_quiver(1).mask_to_subset(0b1));

    CHECK(condition_L(petal_quiver(2)).status == Verdict::Holds);
    CHECK(condition_L(one_arrow()).status == Verdict::Holds);
    CHECK(condition_L(cycle_quiver(4)).status == Verdict::Fails);
    CHECK(condition_L(infinite_emitter()).status == Verdict::Holds);
}

TEST_CASE("condition (L): doubling quiver holds, its quotient fails") {
    PLQuiver q = doubling_quiver();
    LoopVerdict L = condition_L(q);
    CHECK(L.status == Verdict::Holds);
    CHECK(L.complete);

    SubSet U(q.V());
    U.add_interval(0, Iv{0, 2, false, true});
    U.canonicalize(q.V());
    PLQuiver quo = quotient_quiver(q, U);
    LoopVerdict Lq = condition_L(quo);
    CHECK(Lq.status == Verdict::Fails);
    REQUIRE(Lq.witness.has_value());
    CHECK(Lq.witness->contains(quo.V(), CellPoint{0, quo.V().cell(0).lo}));
}

TEST_CASE("condition (L): tent quiver holds via the expansion certificate") {
    LoopVerdict L = condition_L(tent_quiver());
    CHECK(L.status == Verdict::Holds);
    CHECK(L.complete);
}

TEST_CASE("condition (L) agrees between discrete and PL views (random)") {
    qvtest::Rng rng(17);
    for (int it = 0; it < 60; ++it) {
        DiscreteQuiver d = qvtest::rand_discrete_quiver(rng, 1 + it % 5);
        LoopVerdict fast = condition_L(d);
        LoopVerdict generic = condition_L(pl_view(d), 8);
        CHECK(fast.status == generic.status);
        CHECK(fast.status == (qvtest::oracle_condition_L(d) ? Verdict::Holds : Verdict::Fails));
    }
}

TEST_CASE("condition (K): discrete examples and oracle agreement") {
    CHECK(condition_K(petal_quiver(1)).status == Verdict::Fails);
    CHECK(condition_K(petal_quiver(2)).status == Verdict::Holds);
    CHECK(condition_K(one_arrow()).status == Verdict::Holds);
    LoopVerdict c3 = condition_K(cycle_quiver(3));
    CHECK(c3.status == Verdict::Fails);

    qvtest::Rng rng(999);
    for (int it = 0; it < 150; ++it) {
        DiscreteQuiver d = qvtest::rand_discrete_quiver(rng, 1 + it % 5);
        bool holds = condition_K(d).status == Verdict::Holds;
        CHECK(holds == qvtest::oracle_condition_K(d));
    }
}

TEST_CASE("condition (K): doubling quiver fails with witness 0") {
    PLQuiver q = doubling_quiver();
    LoopVerdict K = condition_K(q);
    REQUIRE(K.status == Verdict::Fails);
    REQUIRE(K.witness.has_value());
    CHECK(*K.witness == pt(q.V(), 0, Rat(0)));
}

TEST_CASE("condition (K): tent quiver holds via minimality and (L)") {
    LoopVerdict K = condition_K(tent_quiver());
    CHECK(K.status == Verdict::Holds);
}

TEST_CASE("condition (K) on PL views matches the discrete decision (random)") {
    qvtest::Rng rng(300);
    for (int it = 0; it < 40; ++it) {
        DiscreteQuiver d = qvtest::rand_discrete_quiver(rng, 1 + it % 4);
        LoopVerdict fast = condition_K(d);
        LoopVerdict generic = condition_K(pl_view(d), 8);
        if (generic.status != Verdict::Unknown) CHECK(fast.status == generic.status);
    }
}

TEST_CASE("minimal + (L) implies (K) on random discrete quivers") {
    qvtest::Rng rng(1066);
    for (int it = 0; it < 200; ++it) {
        DiscreteQuiver d = qvtest::rand_discrete_quiver(rng, 1 + it % 6);
        bool minimal = is_minimal(d).status == MinimalityVerdict::Status::Yes;
        bool L = condition_L(d).status == Verdict::Holds;
        if (minimal && L) CHECK(condition_K(d).status == Verdict::Holds);
    }
}

TEST_CASE("simplicity: the smoke examples") {
    SimplicityVerdict two = is_simple(petal_quiver(2));
    CHECK(two.status == SimplicityVerdict::Status::Simple);
    SimplicityVerdict five = is_simple(petal_quiver(5));
    CHECK(five.status == SimplicityVerdict::Status::Simple);

    SimplicityVerdict one = is_simple(petal_quiver(1));
    REQUIRE(one.status == SimplicityVerdict::Status::NotSimple);
    CHECK(one.reason == "Condition (L) fails");

    SimplicityVerdict arrow = is_simple(one_arrow());
    CHECK(arrow.status == SimplicityVerdict::Status::Simple);

    PLQuiver sink = qvtest::interval_sink_quiver();
    SimplicityVerdict is = is_simple(sink);
    REQUIRE(is.status == SimplicityVerdict::Status::NotSimple);
    CHECK(is.reason == "not minimal");
    REQUIRE(is.witness.has_value());
    CHECK(is_hereditary(sink, *is.witness));
    CHECK(is_saturated(sink, *is.witness));

    SimplicityVerdict tent = is_simple(tent_quiver());
    CHECK(tent.status == SimplicityVerdict::Status::Simple);

    SimplicityVerdict dbl = is_simple(doubling_quiver());
    REQUIRE(dbl.status == SimplicityVerdict::Status::NotSimple);
    CHECK(dbl.reason == "not minimal");
}

TEST_CASE("exitless bases: discrete fast path matches the PL engine") {
    qvtest::Rng rng(2718);
    for (int it = 0; it < 40; ++it) {
        DiscreteQuiver d = qvtest::rand_discrete_quiver(rng, 1 + it % 5);
        PLQuiver p = pl_view(d);
        ExitlessReport rep = exitless_base_points(p, d.n() + 1);
        for (int n = 1; n <= d.n(); ++n)
            CHECK(rep.L[n - 1] == d.mask_to_subset(d.exitless_base_mask(n)));
    }
}
