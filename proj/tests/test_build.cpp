#include <catch2/catch_amalgamated.hpp>

#include "quiver/build.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace qv;
using qvtest::cycle_quiver;
using qvtest::infinite_emitter;
using qvtest::one_arrow;
using qvtest::petal_quiver;

TEST_CASE("add_tails removes every sink") {
    qvtest::Rng rng(112233);
    for (int it = 0; it < 100; ++it) {
        DiscreteQuiver d = qvtest::rand_discrete_quiver(rng, 1 + it % 6);
        TailedQuiver t = add_tails(d);
        TailedClassification cls = classify(t);
        CHECK(tailed_is_empty(t, cls.sinks));
        CHECK(validate(t).ok());
    }
    TailedQuiver t = add_tails(qvtest::interval_sink_quiver());
    CHECK(tailed_is_empty(t, classify(t).sinks));
}

TEST_CASE("add_tails on a sink-free quiver attaches nothing") {
    TailedQuiver t = add_tails(petal_quiver(1));
    CHECK(t.tail_base.is_empty());
    CHECK(add_tails(t).tail_base.is_empty());
}

TEST_CASE("tailed classification: regulars are the base finite emitters plus all levels") {
    DiscreteQuiver d = one_arrow();
    TailedQuiver t = add_tails(d);
    TailedClassification cls = classify(t);
    CHECK(cls.reg.base == d.mask_to_subset(0b11));  // v regular, w now emits
    CHECK(cls.reg.rest == t.tail_base);
    CHECK(cls.reg.levels.empty());

    TailedQuiver ti = add_tails(infinite_emitter());
    TailedClassification ci = classify(ti);
    CHECK(ci.reg.base == infinite_emitter().mask_to_subset(0b10));  // v stays infinite
}

TEST_CASE("interval-sink example: tails attach along {0} u (1,2]") {
    PLQuiver q = qvtest::interval_sink_quiver();
    TailedQuiver t = add_tails(q);
    SubSet expect(q.V());
    expect.add_interval(0, iv_point(Rat(0)));
    expect.add_interval(1, Iv{1, 2, false, true});
    expect.canonicalize(q.V());
    CHECK(t.tail_base == expect);
    TailedClassification cls = classify(t);
    CHECK(tailed_is_empty(t, cls.sinks));
    // original sinks become regular (they are finite emitters)
    CHECK(cls.reg.base == SubSet::all(q.V()));
}

TEST_CASE("unitize a tailed quiver preserves the regular vertices") {
    TailedQuiver t = add_tails(one_arrow());
    TailedClassification before = classify(t);
    TailedQuiver t1 = unitize(t);
    TailedClassification after = classify(t1);
    CHECK(after.reg.base == before.reg.base);
    CHECK(after.reg.rest == before.reg.rest);
    CHECK_FALSE(after.reg.infinity);
    CHECK(tailed_is_empty(t1, after.sinks));
    // unitizing twice: the space is now compact
    CHECK_THROWS_AS(unitize(t1), CompactVertexSpace);
}

TEST_CASE("unitize an infinite discrete vertex family: infinity is singular") {
    DiscreteQuiver d;
    d.add_vertex("v");
    d.add_vertex("w");
    d.add_edges(0, 1, Mult{1, false});
    d.add_tail_family("t");
    PLQuiver u = unitize(d);
    CHECK(u.V().compactified());
    Classification cls = classify(u);
    CHECK(cls.sinks.has_infinity());  // nothing maps near infinity here
    CHECK_FALSE(cls.reg.has_infinity());
    // regular vertices unchanged: just v
    CHECK(cls.reg == [&] {
        SubSet s(u.V());
        s.add_interval(0, iv_point(Rat(0)));
        s.canonicalize(u.V());
        return s;
    }());
}

TEST_CASE("unitize rejects compact vertex spaces") {
    CHECK_THROWS_AS(unitize(one_arrow()), CompactVertexSpace);
    CHECK_THROWS_AS(unitize(qvtest::doubling_quiver()), CompactVertexSpace);
}

TEST_CASE("product with a point is structurally the original graph") {
    DiscreteQuiver d = cycle_quiver(3);
    auto X = make_complex({Cell{"p", 0, 0}});
    PLQuiver prod = product_with_space(d, *X);
    REQUIRE(validate(prod).ok());
    CHECK(prod.V().n_cells() == 3);
    CHECK(prod.E().n_cells() == 3);
    Classification cls = classify(prod);
    CHECK(cls.reg == SubSet::all(prod.V()));
}

TEST_CASE("product of an arrow with an interval: reg = {v} x X both ways") {
    DiscreteQuiver d = one_arrow();
    auto X = make_complex({Cell{"c", 0, 1}});
    PLQuiver prod = product_with_space(d, *X);
    REQUIRE(validate(prod).ok());
    Classification cls = classify(prod);
    // reg(E) x X computed independently: v's copy of X
    SubSet expect(prod.V());
    expect.add_interval(0, Iv{0, 1, true, true});  // cell 0 is v.c
    expect.canonicalize(prod.V());
    CHECK(cls.reg == expect);
    CHECK(prod.V().cell(0).name == "v.c");
}

TEST_CASE("product of a cycle with an interval fails Condition (L) openly") {
    DiscreteQuiver c3 = cycle_quiver(3);
    auto X = make_complex({Cell{"c", 0, 1}});
    PLQuiver prod = product_with_space(c3, *X);
    REQUIRE(validate(prod).ok());
    LoopVerdict L = condition_L(prod, 8);
    REQUIRE(L.status == Verdict::Fails);
    REQUIRE(L.witness.has_value());
    CHECK(is_open(prod.V(), *L.witness));
    CHECK(*L.witness == SubSet::all(prod.V()));
    REQUIRE(L.witness_length.has_value());
    CHECK(*L.witness_length == 3);
}

TEST_CASE("product regulars match the product of regulars (random)") {
    qvtest::Rng rng(445566);
    for (int it = 0; it < 40; ++it) {
        DiscreteQuiver d = qvtest::rand_discrete_quiver(rng, 1 + it % 4, false,
                                                        /*allow_inf=*/false);
        auto X = it % 2 == 0 ? make_complex({Cell{"c", 0, 1}})
                             : make_complex({Cell{"c", 0, 1}, Cell{"p", 2, 2}});
        PLQuiver prod = product_with_space(d, *X);
        Classification cls = classify(prod);
        // build reg(E) x X independently from the discrete classification
        SubSet expect(prod.V());
        VMask reg = d.reg_mask();
        for (int v = 0; v < d.n(); ++v) {
            if (!DiscreteQuiver::in(reg, v)) continue;
            for (int c = 0; c < X->n_cells(); ++c) {
                int cell = v * X->n_cells() + c;
                expect.add_interval(cell, Iv{X->cell(c).lo, X->cell(c).hi, true, true});
            }
        }
        expect.canonicalize(prod.V());
        CHECK(cls.reg == expect);
    }
}

TEST_CASE("tailed subsets: closure laws and duality") {
    TailedQuiver t = add_tails(qvtest::interval_sink_quiver());
    qvtest::Rng rng(808);
    for (int it = 0; it < 60; ++it) {
        TailedSubSet a = tailed_empty(t);
        a.base = qvtest::rand_subset(rng, t.base.V());
        a.levels.push_back(set_intersect(t.base.V(), qvtest::rand_subset(rng, t.base.V()), t.tail_base));
        a.rest = set_intersect(t.base.V(), qvtest::rand_subset(rng, t.base.V()), t.tail_base);
        tailed_canonicalize(t, a);
        TailedSubSet cl = tailed_closure(t, a);
        CHECK(tailed_is_empty(t, tailed_difference(t, a, cl)));      // extensive
        CHECK(tailed_equal(t, tailed_closure(t, cl), cl));           // idempotent
        TailedSubSet in = tailed_interior(t, a);
        CHECK(tailed_is_empty(t, tailed_difference(t, in, a)));
        CHECK(tailed_equal(t, tailed_union(t, a, tailed_complement(t, a)), tailed_full(t)));
    }
}

TEST_CASE("tailed saturation cascades through the levels") {
    TailedQuiver t = add_tails(one_arrow());
    // the deep-tail set over {w} saturates all the way back to everything
    SubSet w_only = t.base.V().cell_index("w") ? [&] {
        SubSet s(t.base.V());
        s.add_interval(*t.base.V().cell_index("w"), iv_point(Rat(0)));
        s.canonicalize(t.base.V());
        return s;
    }() : SubSet::empty(t.base.V());
    TailedSubSet deep = tailed_empty(t);
    deep.rest = w_only;
    tailed_canonicalize(t, deep);
    auto sat = tailed_saturation(t, deep);
    REQUIRE(sat.stabilized());
    CHECK(tailed_equal(t, *sat.value, tailed_full(t)));
    // hereditary closure of {v} fills the base and every level
    TailedSubSet v_only = tailed_empty(t);
    v_only.base = [&] {
        SubSet s(t.base.V());
        s.add_interval(*t.base.V().cell_index("v"), iv_point(Rat(0)));
        s.canonicalize(t.base.V());
        return s;
    }();
    auto hc = tailed_hereditary_closure(t, v_only);
    REQUIRE(hc.stabilized());
    CHECK(hc.value->base == SubSet::all(t.base.V()));
    CHECK(hc.value->rest == t.tail_base);
    CHECK(tailed_is_hereditary(t, *hc.value));
}

TEST_CASE("tailed minimality follows the base on the simple examples") {
    CHECK(is_minimal(add_tails(one_arrow())).status == MinimalityVerdict::Status::Yes);
    CHECK(is_minimal(add_tails(petal_quiver(2))).status == MinimalityVerdict::Status::Yes);
    auto inf = is_minimal(add_tails(infinite_emitter()));
    CHECK(inf.status == MinimalityVerdict::Status::No);
}

TEST_CASE("tailed loop conditions delegate to the base") {
    TailedQuiver t = add_tails(petal_quiver(1));
    CHECK(condition_L(t).status == Verdict::Fails);
    CHECK(condition_K(t).status == Verdict::Fails);
    TailedQuiver t2 = add_tails(one_arrow());
    CHECK(condition_L(t2).status == Verdict::Holds);
    CHECK(is_simple(t2).status == SimplicityVerdict::Status::Simple);
}
