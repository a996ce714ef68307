// quiver — exact structural analyzer for topological quivers.
//
// Subcommands: validate, classify, ideals, conditions, simple, construct,
// xcorr, report. Exit codes: 0 decided, 2 unknown, 1 error, 64 usage.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "quiver/build.hpp"
#include "quiver/format.hpp"
#include "quiver/ideals.hpp"
#include "quiver/loops.hpp"
#include "quiver/report.hpp"
#include "quiver/surgery.hpp"
#include "quiver/xcorr.hpp"

namespace {

using namespace qv;

constexpr int kExitDecided = 0;
constexpr int kExitError = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitUsage = 64;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

AnyQuiver load(const std::string& path) { return parse_quiver(slurp(path)); }

const OneComplex& vertex_space_of(const AnyQuiver& q) {
    if (const auto* d = std::get_if<DiscreteQuiver>(&q)) return *d->vertex_complex();
    if (const auto* p = std::get_if<PLQuiver>(&q)) return p->V();
    return std::get<TailedQuiver>(q).base.V();
}

std::string point_text(const OneComplex& X, const SubSet& single) {
    auto p = pick_point(X, single);
    return p ? print_point(X, *p) : print_subset(X, single);
}

std::string witness_text(const OneComplex& X, const SubSet& w) {
    // single points read as vertices, open sets as sets
    SubSet cl = closure(X, w);
    if (cl == w && [&] {
            int pts = 0;
            bool interval = false;
            for (int c = 0; c < X.n_cells(); ++c)
                for (const Iv& iv : w.cell_part(c)) {
                    if (iv.is_point()) ++pts;
                    else interval = true;
                }
            return !interval && pts == 1 && !w.has_infinity();
        }())
        return "v=" + point_text(X, w);
    return print_subset(X, w);
}

int cmd_validate(const AnyQuiver& q, bool json) {
    ValidationReport rep = validate(q);
    if (json) {
        std::cout << validation_json(rep).dump(2) << "\n";
    } else {
        for (const auto& c : rep.checks)
            std::cout << (c.pass ? "PASS " : "FAIL ") << c.axiom
                      << (c.witness.empty() ? "" : " [" + c.witness + "]") << "\n";
        std::cout << (rep.ok() ? "VALID" : "INVALID") << "\n";
    }
    return kExitDecided;
}

int cmd_classify(const AnyQuiver& q, bool json) {
    if (const auto* t = std::get_if<TailedQuiver>(&q)) {
        TailedClassification cls = classify(*t);
        if (json) {
            std::cout << classification_json(*t, cls).dump(2) << "\n";
        } else {
            std::cout << "sinks: " << print_tailed_subset(*t, cls.sinks) << "\n"
                      << "fin:   " << print_tailed_subset(*t, cls.fin) << "\n"
                      << "reg:   " << print_tailed_subset(*t, cls.reg) << "\n";
        }
        return kExitDecided;
    }
    const OneComplex& X = vertex_space_of(q);
    Classification cls = std::holds_alternative<DiscreteQuiver>(q)
                             ? classify(std::get<DiscreteQuiver>(q))
                             : classify(std::get<PLQuiver>(q));
    if (json) {
        std::cout << classification_json(X, cls).dump(2) << "\n";
    } else {
        std::cout << "sinks: " << print_subset(X, cls.sinks) << "\n"
                  << "fin:   " << print_subset(X, cls.fin) << "\n"
                  << "reg:   " << print_subset(X, cls.reg) << "\n";
    }
    return kExitDecided;
}

int cmd_conditions(const AnyQuiver& q, int maxlen, bool json) {
    const OneComplex& X = vertex_space_of(q);
    LoopVerdict L = condition_L_any(q, maxlen);
    LoopVerdict K = condition_K_any(q, maxlen);
    if (json) {
        OJson j;
        j["condition_L"] = loop_verdict_json(X, L);
        j["condition_K"] = loop_verdict_json(X, K);
        std::cout << j.dump(2) << "\n";
    } else {
        auto show = [&](const char* name, const LoopVerdict& v) {
            std::cout << "Condition (" << name << "): " << to_string(v.status);
            if (v.witness) std::cout << " witness " << witness_text(X, *v.witness);
            if (v.status == Verdict::Unknown) std::cout << " (bound " << v.bound << ")";
            std::cout << "\n";
        };
        show("L", L);
        show("K", K);
    }
    return (L.status == Verdict::Unknown || K.status == Verdict::Unknown) ? kExitUnknown
                                                                          : kExitDecided;
}

int cmd_simple(const AnyQuiver& q, int maxlen, bool json) {
    const OneComplex& X = vertex_space_of(q);
    SimplicityVerdict v = is_simple_any(q, maxlen);
    if (json) {
        std::cout << simplicity_json(X, v).dump(2) << "\n";
    } else {
        switch (v.status) {
            case SimplicityVerdict::Status::Simple: std::cout << "SIMPLE\n"; break;
            case SimplicityVerdict::Status::NotSimple:
                std::cout << "NOT SIMPLE (" << v.reason;
                if (v.witness) std::cout << ", witness " << witness_text(X, *v.witness);
                std::cout << ")\n";
                break;
            default:
                std::cout << "UNKNOWN (" << v.reason << ", bound " << v.bound << ")\n";
        }
    }
    return v.status == SimplicityVerdict::Status::Unknown ? kExitUnknown : kExitDecided;
}

int cmd_ideals(const AnyQuiver& q, bool enumerate, const std::string& u_text,
               const std::string& v_text, int limit, bool json) {
    const OneComplex& X = vertex_space_of(q);
    if (enumerate) {
        const auto* d = std::get_if<DiscreteQuiver>(&q);
        if (!d) {
            std::cerr << "error: enumeration is defined for finite discrete quivers only; "
                         "use --check U V\n";
            return kExitError;
        }
        auto pairs = admissible_pairs(*d, limit);
        if (json) {
            std::cout << pairs_json(X, pairs).dump(2) << "\n";
        } else {
            std::cout << pairs.size() << " admissible pairs (gauge-invariant ideals):\n";
            for (const auto& p : pairs)
                std::cout << "  (U = " << print_subset(X, p.U) << "; V = " << print_subset(X, p.V)
                          << ")\n";
            std::cout << "order note: displayed order is the graph-algebra convention, "
                         "conjectural here\n";
        }
        return kExitDecided;
    }
    if (std::holds_alternative<TailedQuiver>(q)) {
        std::cerr << "error: --check on tailed documents is not supported; analyse the base\n";
        return kExitError;
    }
    SubSet U = parse_subset(X, u_text);
    SubSet V = parse_subset(X, v_text);
    PLQuiver p = std::holds_alternative<DiscreteQuiver>(q) ? pl_view(std::get<DiscreteQuiver>(q))
                                                           : std::get<PLQuiver>(q);
    AdmissibleCheck chk = check_admissible(p, U, V);
    if (json) {
        OJson j;
        j["verdict"] = chk.ok ? "ADMISSIBLE" : "NOT_ADMISSIBLE";
        j["witnesses"] = OJson::array();
        if (!chk.ok) j["witnesses"].push_back(chk.reason);
        j["sets"] = OJson::array({print_subset(X, U), print_subset(X, V)});
        j["bound"] = 0;
        j["complete"] = true;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << (chk.ok ? "ADMISSIBLE" : "NOT ADMISSIBLE: " + chk.reason) << "\n";
    }
    return kExitDecided;
}

int cmd_xcorr(const AnyQuiver& q, int samples, bool json) {
    const auto* d = std::get_if<DiscreteQuiver>(&q);
    if (!d) {
        std::cerr << "error: correspondence arithmetic is exact on discrete weighted quivers "
                     "only\n";
        return kExitError;
    }
    AxiomReport rep = check_correspondence_axioms(*d, samples);
    if (json) {
        OJson j;
        j["verdict"] = rep.ok() ? "PASS" : "FAIL";
        j["witnesses"] = OJson::array();
        j["sets"] = OJson::array();
        j["bound"] = rep.samples;
        j["complete"] = true;
        j["axioms"] = OJson::array();
        for (const auto& e : rep.entries) {
            OJson a;
            a["axiom"] = e.axiom;
            a["pass"] = e.pass;
            if (!e.counterexample.empty()) {
                a["counterexample"] = e.counterexample;
                j["witnesses"].push_back(e.counterexample);
            }
            j["axioms"].push_back(a);
        }
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& e : rep.entries)
            std::cout << (e.pass ? "PASS " : "FAIL ") << e.axiom
                      << (e.counterexample.empty() ? "" : " [" + e.counterexample + "]") << "\n";
        std::cout << (rep.ok() ? "ALL AXIOMS PASS" : "AXIOM FAILURES FOUND") << " (" << rep.samples
                  << " samples)\n";
    }
    return kExitDecided;
}

int cmd_construct(const AnyQuiver& q, const std::string& what, const std::string& arg,
                  const std::string& space_path) {
    if (what == "tails") {
        std::cout << print_quiver(add_tails_any(q));
        return kExitDecided;
    }
    if (what == "unitize") {
        std::cout << print_quiver(unitize_any(q));
        return kExitDecided;
    }
    if (what == "product") {
        const auto* d = std::get_if<DiscreteQuiver>(&q);
        if (!d) {
            std::cerr << "error: products take a finite discrete quiver\n";
            return kExitError;
        }
        if (space_path.empty()) {
            std::cerr << "error: product needs --space <complex file>\n";
            return kExitUsage;
        }
        ComplexPtr X = parse_complex(slurp(space_path));
        std::cout << print_quiver(product_with_space(*d, *X));
        return kExitDecided;
    }
    if (what == "quotient" || what == "relative") {
        if (std::holds_alternative<TailedQuiver>(q)) {
            std::cerr << "error: quotients and doublings of tailed documents are not supported; "
                         "construct from the base instead\n";
            return kExitError;
        }
        const OneComplex& X = vertex_space_of(q);
        SubSet arg_set = parse_subset(X, arg);
        if (const auto* d = std::get_if<DiscreteQuiver>(&q)) {
            auto mask = d->subset_to_mask(arg_set);
            if (!mask) {
                std::cerr << "error: the argument set must be a plain vertex set\n";
                return kExitError;
            }
            std::cout << print_quiver(what == "quotient" ? d->quotient(*mask)
                                                         : d->relative_double(*mask));
            return kExitDecided;
        }
        const PLQuiver& p = std::get<PLQuiver>(q);
        std::cout << print_quiver(what == "quotient" ? quotient_quiver(p, arg_set)
                                                     : relative_quiver(p, arg_set));
        return kExitDecided;
    }
    std::cerr << "error: construct expects tails|unitize|quotient|relative|product\n";
    return kExitUsage;
}

int cmd_report(const AnyQuiver& q, int maxlen, int limit) {
    const OneComplex& X = vertex_space_of(q);
    OJson j;
    j["format"] = "quiver-report-v1";
    j["validate"] = validation_json(validate(q));
    if (const auto* t = std::get_if<TailedQuiver>(&q)) {
        j["classification"] = classification_json(*t, classify(*t));
    } else if (const auto* d = std::get_if<DiscreteQuiver>(&q)) {
        j["classification"] = classification_json(X, classify(*d));
    } else {
        j["classification"] = classification_json(X, classify(std::get<PLQuiver>(q)));
    }
    LoopVerdict L = condition_L_any(q, maxlen);
    LoopVerdict K = condition_K_any(q, maxlen);
    j["condition_L"] = loop_verdict_json(X, L);
    j["condition_K"] = loop_verdict_json(X, K);
    MinimalityVerdict m = std::visit([&](const auto& v) { return is_minimal(v); }, q);
    j["minimality"] = minimality_json(X, m);
    SimplicityVerdict s = is_simple_any(q, maxlen);
    j["simplicity"] = simplicity_json(X, s);
    if (const auto* d = std::get_if<DiscreteQuiver>(&q)) {
        if (!d->has_tails() && d->n() <= limit)
            j["ideals"] = pairs_json(X, admissible_pairs(*d, limit));
    }
    std::cout << j.dump(2) << "\n";
    bool unknown = L.status == Verdict::Unknown || K.status == Verdict::Unknown ||
                   m.status == MinimalityVerdict::Status::Unknown ||
                   s.status == SimplicityVerdict::Status::Unknown;
    return unknown ? kExitUnknown : kExitDecided;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quiver — exact structural analyzer for topological quivers"};
    app.require_subcommand(1);

    std::string file, u_text, v_text, space_path, construct_what, construct_arg;
    bool json = false, enumerate = false;
    int maxlen = qv::kDefaultLoopBound, limit = 20, samples = 1000;

    auto add_file = [&](CLI::App* sub) {
        sub->add_option("file", file, "quiver document")->required();
        sub->add_flag("--json", json, "machine-readable output");
    };

    CLI::App* validate_cmd = app.add_subcommand("validate", "check the quiver axioms");
    add_file(validate_cmd);
    CLI::App* classify_cmd = app.add_subcommand("classify", "sinks / finite emitters / regulars");
    add_file(classify_cmd);
    CLI::App* ideals_cmd = app.add_subcommand("ideals", "gauge-invariant ideal lattice");
    add_file(ideals_cmd);
    ideals_cmd->add_flag("--enumerate", enumerate, "enumerate all admissible pairs");
    ideals_cmd->add_option("--check", u_text, "check one pair: --check U V")->expected(1);
    ideals_cmd->add_option("checkV", v_text, "V of the checked pair");
    ideals_cmd->add_option("--limit-vertices", limit, "enumeration size guard (default 20)");
    CLI::App* conditions_cmd = app.add_subcommand("conditions", "Conditions (L) and (K)");
    add_file(conditions_cmd);
    conditions_cmd->add_option("--maxlen", maxlen, "loop-length bound");
    CLI::App* simple_cmd = app.add_subcommand("simple", "simplicity of the associated algebra");
    add_file(simple_cmd);
    simple_cmd->add_option("--maxlen", maxlen, "loop-length bound");
    CLI::App* construct_cmd =
        app.add_subcommand("construct", "tails | unitize | quotient U | relative V | product");
    construct_cmd->add_option("what", construct_what, "construction")->required();
    construct_cmd->add_option("file", file, "quiver document")->required();
    construct_cmd->add_option("arg", construct_arg, "subset argument for quotient/relative");
    construct_cmd->add_option("--space", space_path, "complex document for product");
    CLI::App* xcorr_cmd = app.add_subcommand("xcorr", "correspondence axioms: xcorr check");
    xcorr_cmd->add_option("action", construct_what, "check")->required();
    add_file(xcorr_cmd);
    xcorr_cmd->add_option("--samples", samples, "random samples (default 1000)");
    CLI::App* report_cmd = app.add_subcommand("report", "full machine-readable report");
    report_cmd->add_option("file", file, "quiver document")->required();
    report_cmd->add_option("--maxlen", maxlen, "loop-length bound");
    report_cmd->add_option("--limit-vertices", limit, "ideal enumeration guard");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        qv::AnyQuiver q = load(file);
        if (validate_cmd->parsed()) return cmd_validate(q, json);
        if (classify_cmd->parsed()) return cmd_classify(q, json);
        if (conditions_cmd->parsed()) return cmd_conditions(q, maxlen, json);
        if (simple_cmd->parsed()) return cmd_simple(q, maxlen, json);
        if (ideals_cmd->parsed()) {
            if (!enumerate && u_text.empty()) {
                std::cerr << "error: ideals needs --enumerate or --check U V\n";
                return kExitUsage;
            }
            return cmd_ideals(q, enumerate, u_text, v_text, limit, json);
        }
        if (construct_cmd->parsed()) return cmd_construct(q, construct_what, construct_arg, space_path);
        if (xcorr_cmd->parsed()) {
            if (construct_what != "check") {
                std::cerr << "error: the xcorr action is 'check'\n";
                return kExitUsage;
            }
            return cmd_xcorr(q, samples, json);
        }
        if (report_cmd->parsed()) return cmd_report(q, maxlen, limit);
    } catch (const qv::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitUsage;
}
