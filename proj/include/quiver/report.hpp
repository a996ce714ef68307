#pragma once

// Machine-readable reports: stable key order, canonical subset syntax for
// every set, no timestamps or environment data, so identical inputs give
// byte-identical output.

#include <json.hpp>
#include <string>

#include "quiver/build.hpp"
#include "quiver/format.hpp"
#include "quiver/ideals.hpp"
#include "quiver/loops.hpp"
#include "quiver/verdicts.hpp"

namespace qv {

using OJson = nlohmann::ordered_json;

inline std::string print_tailed_subset(const TailedQuiver& t, const TailedSubSet& s) {
    std::string out;
    auto add = [&](const std::string& piece) {
        if (!piece.empty()) {
            if (!out.empty()) out += " | ";
            out += piece;
        }
    };
    if (!s.base.is_empty()) add("base: " + print_subset(t.base.V(), s.base));
    for (std::size_t i = 0; i < s.levels.size(); ++i)
        if (!s.levels[i].is_empty())
            add("level " + std::to_string(i + 1) + ": " + print_subset(t.base.V(), s.levels[i]));
    if (!s.rest.is_empty())
        add("levels>" + std::to_string(s.levels.size()) + ": " + print_subset(t.base.V(), s.rest));
    if (s.infinity) add("inf");
    return out.empty() ? "empty" : out;
}

inline OJson loop_verdict_json(const OneComplex& X, const LoopVerdict& v) {
    OJson j;
    j["verdict"] = to_string(v.status);
    j["witnesses"] = OJson::array();
    if (v.witness) j["witnesses"].push_back(print_subset(X, *v.witness));
    j["sets"] = OJson::array();
    j["bound"] = v.bound;
    j["complete"] = v.complete;
    if (v.witness_length) j["witness_length"] = *v.witness_length;
    if (!v.note.empty()) j["note"] = v.note;
    return j;
}

inline OJson simplicity_json(const OneComplex& X, const SimplicityVerdict& v) {
    OJson j;
    switch (v.status) {
        case SimplicityVerdict::Status::Simple: j["verdict"] = "SIMPLE"; break;
        case SimplicityVerdict::Status::NotSimple: j["verdict"] = "NOT_SIMPLE"; break;
        default: j["verdict"] = "UNKNOWN";
    }
    j["witnesses"] = OJson::array();
    if (v.witness) j["witnesses"].push_back(print_subset(X, *v.witness));
    j["sets"] = OJson::array();
    j["bound"] = v.bound;
    j["complete"] = v.status != SimplicityVerdict::Status::Unknown;
    j["reason"] = v.reason;
    return j;
}

inline OJson validation_json(const ValidationReport& rep) {
    OJson j;
    j["verdict"] = rep.ok() ? "VALID" : "INVALID";
    j["witnesses"] = OJson::array();
    j["sets"] = OJson::array();
    j["bound"] = 0;
    j["complete"] = true;
    j["checks"] = OJson::array();
    for (const auto& c : rep.checks) {
        OJson e;
        e["axiom"] = c.axiom;
        e["pass"] = c.pass;
        if (!c.witness.empty()) e["witness"] = c.witness;
        j["checks"].push_back(e);
        if (!c.pass && !c.witness.empty()) j["witnesses"].push_back(c.witness);
    }
    return j;
}

inline OJson classification_json(const OneComplex& X, const Classification& cls) {
    OJson j;
    j["verdict"] = "DECIDED";
    j["witnesses"] = OJson::array();
    j["sets"] = OJson::array({print_subset(X, cls.sinks), print_subset(X, cls.fin),
                              print_subset(X, cls.reg)});
    j["bound"] = 0;
    j["complete"] = true;
    j["sinks"] = print_subset(X, cls.sinks);
    j["fin"] = print_subset(X, cls.fin);
    j["reg"] = print_subset(X, cls.reg);
    return j;
}

inline OJson classification_json(const TailedQuiver& t, const TailedClassification& cls) {
    OJson j;
    j["verdict"] = "DECIDED";
    j["witnesses"] = OJson::array();
    j["sets"] = OJson::array({print_tailed_subset(t, cls.sinks), print_tailed_subset(t, cls.fin),
                              print_tailed_subset(t, cls.reg)});
    j["bound"] = 0;
    j["complete"] = true;
    j["sinks"] = print_tailed_subset(t, cls.sinks);
    j["fin"] = print_tailed_subset(t, cls.fin);
    j["reg"] = print_tailed_subset(t, cls.reg);
    return j;
}

inline OJson minimality_json(const OneComplex& X, const MinimalityVerdict& v) {
    OJson j;
    switch (v.status) {
        case MinimalityVerdict::Status::Yes: j["verdict"] = "MINIMAL"; break;
        case MinimalityVerdict::Status::No: j["verdict"] = "NOT_MINIMAL"; break;
        default: j["verdict"] = "UNKNOWN";
    }
    j["witnesses"] = OJson::array();
    if (v.witness) j["witnesses"].push_back(print_subset(X, *v.witness));
    j["sets"] = OJson::array();
    j["bound"] = v.bound;
    j["complete"] = v.status != MinimalityVerdict::Status::Unknown;
    return j;
}

inline OJson pairs_json(const OneComplex& X, const std::vector<AdmissiblePair>& pairs) {
    OJson j;
    j["verdict"] = "DECIDED";
    j["witnesses"] = OJson::array();
    j["sets"] = OJson::array();
    j["bound"] = 0;
    j["complete"] = true;
    j["count"] = pairs.size();
    j["pairs"] = OJson::array();
    for (const auto& p : pairs) {
        OJson e;
        e["U"] = print_subset(X, p.U);
        e["V"] = print_subset(X, p.V);
        j["pairs"].push_back(e);
        j["sets"].push_back(print_subset(X, p.U));
        j["sets"].push_back(print_subset(X, p.V));
    }
    j["order_note"] =
        "pair order (U,V) <= (U',V') iff U in U' and V in U' u V'; convention from the "
        "graph-algebra literature, conjectural for quivers";
    OJson order = OJson::array();
    for (std::size_t a = 0; a < pairs.size(); ++a)
        for (std::size_t b = 0; b < pairs.size(); ++b)
            if (a != b && pair_leq(X, pairs[a], pairs[b]))
                order.push_back(OJson::array({a, b}));
    j["order"] = order;
    return j;
}

}  // namespace qv
