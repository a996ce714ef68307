#include <catch2/catch_amalgamated.hpp>

#include "quiver/quiver.hpp"
#include "quiver/xcorr.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace qv;
using qvtest::infinite_emitter;
using qvtest::one_arrow;

TEST_CASE("inner product of a point mass is a point mass at the range") {
    DiscreteQuiver d = one_arrow();
    EdgeFunction delta;
    delta.set(Edge{0, 1, 0}, QC{Rat(1)});
    VertexFunction ip = inner_product(d, delta, delta);
    CHECK(ip.at(1) == QC{Rat(1)});
    CHECK(ip.at(0).is_zero());

    d.set_weight(0, 1, 0, Rat(1, 2));
    VertexFunction weighted = inner_product(d, delta, delta);
    CHECK(weighted.at(1) == QC{Rat(1, 2)});
}

TEST_CASE("disjoint supports have zero inner product") {
    DiscreteQuiver d;
    d.add_vertex("v");
    d.add_vertex("u");
    d.add_vertex("w");
    d.add_edges(0, 2, Mult{1, false});
    d.add_edges(1, 2, Mult{1, false});
    EdgeFunction e, f;
    e.set(Edge{0, 2, 0}, QC{Rat(1)});
    f.set(Edge{1, 2, 0}, QC{Rat(1)});
    CHECK(inner_product(d, e, f).is_zero());
}

TEST_CASE("module actions act pointwise through source and range") {
    DiscreteQuiver d = one_arrow();
    EdgeFunction delta;
    delta.set(Edge{0, 1, 0}, QC{Rat(1)});
    VertexFunction at_v, at_w;
    at_v.set(0, QC{Rat(1)});
    at_w.set(1, QC{Rat(1)});
    CHECK(left_action(d, at_v, delta) == delta);
    CHECK(left_action(d, at_w, delta).is_zero());
    CHECK(right_action(d, delta, at_w) == delta);
    CHECK(right_action(d, delta, at_v).is_zero());
}

TEST_CASE("edge functions may not touch infinite classes") {
    DiscreteQuiver d = infinite_emitter();
    EdgeFunction bad;
    bad.set(Edge{0, 1, 7}, QC{Rat(1)});
    CHECK_THROWS_AS(inner_product(d, bad, bad), InfiniteFiberTouched);
    EdgeFunction missing;
    missing.set(Edge{1, 0, 0}, QC{Rat(1)});
    CHECK_THROWS_AS(inner_product(d, missing, missing), std::invalid_argument);
}

TEST_CASE("axiom suite passes on random weighted quivers") {
    qvtest::Rng rng(90210);
    for (int it = 0; it < 25; ++it) {
        DiscreteQuiver d = qvtest::rand_discrete_quiver(rng, 1 + it % 5, /*with_weights=*/true);
        AxiomReport rep = check_correspondence_axioms(d, 200, /*seed=*/it + 1);
        CHECK(rep.ok());
    }
    AxiomReport empty = check_correspondence_axioms(DiscreteQuiver{}, 50);
    CHECK(empty.ok());
}

TEST_CASE("a negated weight breaks positivity with a verbatim witness") {
    DiscreteQuiver d = one_arrow();
    d.set_weight(0, 1, 0, Rat(-1, 2));  // validator would reject this
    CHECK_FALSE(validate(d).ok());
    AxiomReport rep = check_correspondence_axioms(d, 400);
    CHECK_FALSE(rep.ok());
    bool pos_failed = false;
    for (const auto& e : rep.entries)
        if (!e.pass && e.axiom.find("positivity") != std::string::npos) {
            pos_failed = true;
            CHECK_FALSE(e.counterexample.empty());
        }
    CHECK(pos_failed);
}

TEST_CASE("compact left multiplication of a point mass tracks finite emitters") {
    qvtest::Rng rng(1971);
    for (int it = 0; it < 60; ++it) {
        DiscreteQuiver d = qvtest::rand_discrete_quiver(rng, 1 + it % 5);
        for (int v = 0; v < d.n(); ++v) {
            bool compact = compact_left_mult(d, d.mask_to_subset(VMask(1) << v));
            CHECK(compact == DiscreteQuiver::in(d.fin_mask(), v));
        }
    }
}
