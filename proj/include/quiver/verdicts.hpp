#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quiver/subset.hpp"

namespace qv {

/// Result of a bounded fixpoint iteration: `value` holds the exact result
/// when the iteration stabilized within `bound` steps; otherwise `partial`
/// is the last iterate (a subset of the true answer for monotone iterations).
template <class T>
struct Iterated {
    std::optional<T> value;
    T partial{};
    int steps = 0;
    int bound = 0;
    bool stabilized() const { return value.has_value(); }
};

enum class Verdict { Holds, Fails, Unknown };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "HOLDS";
        case Verdict::Fails: return "FAILS";
        default: return "UNKNOWN";
    }
}

/// Verdict of a bounded loop-condition check. Fails carries a witness set
/// (for Condition (L): an open set of base points; for Condition (K): a
/// single vertex). Unknown carries the bound that was exhausted.
struct LoopVerdict {
    Verdict status = Verdict::Unknown;
    std::optional<SubSet> witness;
    std::optional<int> witness_length;  // loop length behind the witness, if any
    int bound = 0;
    bool complete = false;
    std::string note;
};

struct MinimalityVerdict {
    enum class Status { Yes, No, Unknown } status = Status::Unknown;
    std::optional<SubSet> witness;  // a proper saturated hereditary open set
    int bound = 0;
};

struct SimplicityVerdict {
    enum class Status { Simple, NotSimple, Unknown } status = Status::Unknown;
    std::string reason;             // which clause decided / blocked
    std::optional<SubSet> witness;
    int bound = 0;
};

struct AxiomCheck {
    std::string axiom;
    bool pass = true;
    std::string witness;  // human-readable failure location, empty when pass
};

struct ValidationReport {
    std::vector<AxiomCheck> checks;
    bool ok() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

}  // namespace qv
