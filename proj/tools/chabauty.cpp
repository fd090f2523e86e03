#include "chabauty/chabauty.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>

using json = nlohmann::json;
using namespace chabauty;

namespace {

struct Options {
    bool json = false;
    std::uint64_t seed = 2026;
    unsigned threads = 1;
    std::string rho = "3";
    std::string eps = "1/4";
    long nmax = 60;
    std::uint64_t denom_bound = 24;
    long imax = 8;
    long jmax = 400;
};

/// Lines of key=value; blank lines and lines starting with '#' or ';' are skipped.
std::map<std::string, std::string> read_config(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw CLI::ValidationError("--config", "cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[')
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--config", "expected key=value, got: " + line);
        auto value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        kv[trim(line.substr(0, eq))] = value;
    }
    return kv;
}

void apply_config(Options &o, const std::map<std::string, std::string> &kv) {
    for (const auto &[k, v] : kv) {
        if (k == "rho")
            o.rho = v;
        else if (k == "eps")
            o.eps = v;
        else if (k == "nmax")
            o.nmax = std::stol(v);
        else if (k == "denom-bound" || k == "denom_bound")
            o.denom_bound = std::stoull(v);
        else if (k == "imax")
            o.imax = std::stol(v);
        else if (k == "jmax")
            o.jmax = std::stol(v);
        else if (k == "threads")
            o.threads = static_cast<unsigned>(std::stoul(v));
        else if (k == "seed")
            o.seed = std::stoull(v);
        else
            throw CLI::ValidationError("--config", "unknown key " + k);
    }
}

Rational rational_arg(const std::string &name, const std::string &text) {
    try {
        return parse_rational(text);
    } catch (const std::invalid_argument &e) {
        throw CLI::ValidationError(name, e.what());
    }
}

json vec_json(const Vec &v) {
    json a = json::array();
    for (const auto &x : v)
        a.push_back(to_string(x));
    return a;
}

json subgroup_json(const ClosedSubgroupRep &h) {
    json v = json::array(), l = json::array();
    for (const auto &row : h.continuous_basis)
        v.push_back(vec_json(row));
    for (const auto &row : h.discrete_gens)
        l.push_back(vec_json(row));
    return {{"continuous_basis", v}, {"lattice", l}};
}

json plan_json(const CertificatePlan &p) {
    json j{{"group", p.group}};
    if (p.operation)
        j["operation"] = to_string(*p.operation);
    if (p.leaf) {
        j["leaf"] = to_string(*p.leaf);
        switch (*p.leaf) {
        case LeafKind::ZnRecipe: j["modulus"] = p.modulus; break;
        case LeafKind::RnRecipe: j["torus_rank"] = p.torus_rank; break;
        case LeafKind::KeyLemmaReference: j["lemma"] = p.lemma; break;
        case LeafKind::DirectedUnionOfCyclics: {
            json d = json::array();
            for (unsigned n = 1; n <= 6; ++n)
                d.push_back(p.schedule.at(n).str());
            j["denominators"] = d;
            break;
        }
        }
    }
    if (!p.note.empty())
        j["note"] = p.note;
    if (!p.children.empty()) {
        j["children"] = json::array();
        for (const auto &c : p.children)
            j["children"].push_back(plan_json(c));
    }
    return j;
}

void print_plan(const CertificatePlan &p, int depth) {
    std::string pad(static_cast<std::size_t>(2 * depth), ' ');
    std::cout << pad << p.group;
    if (p.operation)
        std::cout << "  [" << to_string(*p.operation) << "]";
    if (p.leaf)
        std::cout << "  [" << to_string(*p.leaf) << (p.leaf == LeafKind::KeyLemmaReference ? ": " + p.lemma : "")
                  << "]";
    if (!p.note.empty())
        std::cout << "  " << p.note;
    std::cout << "\n";
    for (const auto &c : p.children)
        print_plan(c, depth + 1);
}

json threshold_json(const ThresholdResult &t) {
    json j{{"found", t.found}, {"n_max", t.n_max}, {"settled", t.settled()}};
    j["n0"] = t.found ? json(t.n0) : json(nullptr);
    j["borderline_at"] = t.borderline_at ? json(*t.borderline_at) : json(nullptr);
    j["blocking_point"] = t.blocking_point ? vec_json(*t.blocking_point) : json(nullptr);
    return j;
}

std::string threshold_text(const ThresholdResult &t) {
    if (!t.found)
        return "NotFound (index " + std::to_string(t.n_max) + " is outside the neighborhood)";
    std::string s = "FoundAt(" + std::to_string(t.n0) + ")";
    if (!t.settled())
        s += ", only in the upper half of [1, " + std::to_string(t.n_max) + "], read as not converging";
    if (t.borderline_at)
        s += ", borderline at n=" + std::to_string(*t.borderline_at);
    return s;
}

/// Error kinds with their exit codes; anything unlisted is a usage error.
int exit_code(const json &out) {
    if (out.contains("error")) {
        const auto kind = out["error"]["kind"].get<std::string>();
        if (kind == "Borderline")
            return 3;
        if (kind == "InternalInconsistency")
            return 4;
        return 2;
    }
    return out.value("answer", false) ? 0 : 1;
}

json error_json(const std::string &kind, const std::string &message) {
    return {{"schema", "chabauty.error/1"}, {"answer", nullptr}, {"error", {{"kind", kind}, {"message", message}}}};
}

std::string kind_of(const std::exception &e) {
    if (dynamic_cast<const PrimeError *>(&e))
        return "PrimeError";
    if (dynamic_cast<const SyntaxError *>(&e))
        return "SyntaxError";
    if (dynamic_cast<const Borderline *>(&e))
        return "Borderline";
    if (dynamic_cast<const InternalInconsistency *>(&e))
        return "InternalInconsistency";
    if (dynamic_cast<const DualUnrepresentable *>(&e))
        return "DualUnrepresentable";
    if (dynamic_cast<const NotApproximable *>(&e))
        return "NotApproximable";
    if (dynamic_cast<const NotCompact *>(&e))
        return "NotCompact";
    if (dynamic_cast<const BoundTooSmall *>(&e))
        return "BoundTooSmall";
    if (dynamic_cast<const EpsilonTooLarge *>(&e))
        return "EpsilonTooLarge";
    if (dynamic_cast<const TooLarge *>(&e))
        return "TooLarge";
    if (dynamic_cast<const NotAHomomorphism *>(&e))
        return "NotAHomomorphism";
    if (dynamic_cast<const RowDivergent *>(&e))
        return "RowDivergent";
    if (dynamic_cast<const Unsupported *>(&e))
        return "Unsupported";
    if (dynamic_cast<const CLI::Error *>(&e))
        return "Usage";
    return "Error";
}

Mode mode_of(const std::string &m) {
    if (m == "integral")
        return Mode::Integral;
    if (m == "numeral")
        return Mode::Numeral;
    return Mode::CompactFree;
}

// Each command fills `out` with its JSON report and prints text unless --json.
json cmd_classify(const std::string &text, const std::string &mode, bool witness, const Options &o) {
    auto g = parse(text);
    auto v = classify(g, mode_of(mode), witness);
    json trace = json::array();
    for (const auto &s : v.trace)
        trace.push_back({{"step", s.step}, {"cite", s.cite}, {"statement", citation_registry().at(s.cite)},
                         {"detail", s.detail}});
    json out{{"schema", "chabauty.classify/1"}, {"group", render(g)}, {"normalized", render(normalize(g))},
             {"mode", mode}, {"answer", v.answer}, {"trace", trace}};
    if (!v.clause.empty())
        out["clause"] = v.clause;
    if (v.witness_plan)
        out["witness"] = plan_json(*v.witness_plan);
    if (!o.json) {
        std::cout << render(normalize(g)) << " is " << (v.answer ? "" : "not ") << mode << "ly approximable\n";
        for (const auto &s : v.trace)
            std::cout << "  " << s.step << " [" << s.cite << "] " << s.detail << "\n";
        if (v.witness_plan)
            print_plan(*v.witness_plan, 1);
    }
    return out;
}

json cmd_dual(const std::string &text, const Options &o) {
    auto g = parse(text);
    auto d = dual(g);
    if (!o.json)
        std::cout << render(d) << "\n";
    return {{"schema", "chabauty.dual/1"}, {"group", render(g)}, {"dual", render(d)}, {"answer", true}};
}

json cmd_structure(const std::string &text, const Options &o) {
    auto g = parse(text);
    auto r = flags(g);
    const auto &f = r.flags;
    json fl{{"compact", f.compact},
            {"discrete", f.discrete},
            {"connected", f.connected},
            {"totally_disconnected", f.totally_disconnected},
            {"periodic", f.periodic},
            {"compact_free", f.compact_free},
            {"torsion_free_discrete", f.torsion_free_discrete}};
    auto im = is_inductively_monothetic(g);
    json out{{"schema", "chabauty.structure/1"},
             {"group", render(normalize(g))},
             {"vector_rank", r.vector_rank},
             {"identity_component", render(r.identity_component)},
             {"comp", render(r.comp_part)},
             {"quotient_mod_identity_component", render(r.quotient_mod_g0)},
             {"inductively_monothetic", im.answer},
             {"flags", fl},
             {"answer", true}};
    if (!o.json) {
        std::cout << "group                 " << render(normalize(g)) << "\n"
                  << "vector rank           " << r.vector_rank << "\n"
                  << "identity component    " << render(r.identity_component) << "\n"
                  << "comp                  " << render(r.comp_part) << "\n"
                  << "G/G0                  " << render(r.quotient_mod_g0) << "\n"
                  << "inductively monothetic " << (im.answer ? "yes" : "no") << "\n";
        for (auto it = fl.begin(); it != fl.end(); ++it)
            std::cout << "  " << it.key() << ": " << (it.value().get<bool>() ? "yes" : "no") << "\n";
    }
    return out;
}

json cmd_witness(const std::string &text, const Options &o) {
    auto g = parse(text);
    auto plan = witness_recipe(g);
    if (!o.json)
        print_plan(plan, 0);
    return {{"schema", "chabauty.witness/1"}, {"group", render(normalize(g))}, {"plan", plan_json(plan)},
            {"answer", true}};
}

json cmd_lab_limit(const std::string &groupText, const std::string &seqName, const std::string &target,
                   bool withDual, const Options &o) {
    auto g = concrete_group(groupText);
    auto seq = families::by_name(seqName, g);
    auto nb = NeighborhoodSpec::ball(rational_arg("--rho", o.rho), rational_arg("--eps", o.eps));
    nb.validate();
    ClosedSubgroupRep tgt;
    if (target == "full" || target == "whole")
        tgt = whole_group(g);
    else if (target == "trivial")
        tgt = trivial_subgroup(g);
    else
        throw CLI::ValidationError("--target", "expected full or trivial");
    json out{{"schema", "chabauty.lab.limit/1"}, {"group", describe(g)},    {"sequence", seqName},
             {"target", target},                 {"rho", to_string(nb.rho)}, {"eps", to_string(nb.eps)},
             {"delta", to_string(nb.delta())}};
    bool answer;
    std::string text;
    if (withDual) {
        auto c = duality_limit_consistency(seq, tgt, nb, nb, g, o.nmax, o.threads);
        out["threshold"] = threshold_json(c.primal);
        out["dual"] = {{"group", describe(dual_group(g))},
                       {"target", subgroup_json(annihilator(tgt, g))},
                       {"threshold", threshold_json(c.dual)}};
        out["consistent"] = c.consistent;
        answer = c.primal.settled() && c.consistent;
        text = "primal: " + threshold_text(c.primal) + "\ndual:   " + threshold_text(c.dual) +
               "\nconsistent: " + (c.consistent ? "yes" : "no") + "\n";
    } else {
        auto t = limit_threshold(seq, tgt, nb, g, o.nmax, o.threads);
        out["threshold"] = threshold_json(t);
        answer = t.settled();
        text = threshold_text(t) + "\n";
    }
    if (target == "trivial") {
        auto rep = trivial_limit_check(seq, nb, g, o.nmax, o.threads);
        json tl{{"verdict", rep.verdict}, {"converges", rep.converges}};
        if (rep.witness) {
            tl["witness"] = {{"center", vec_json(rep.witness->center)},
                             {"indices", rep.witness->indices},
                             {"approached_along_every_tail_index", rep.all_index_selection}};
        }
        tl["even_subsequence"] = rep.parity.even ? json(*rep.parity.even) : json(nullptr);
        tl["odd_subsequence"] = rep.parity.odd ? json(*rep.parity.odd) : json(nullptr);
        out["trivial_limit"] = tl;
        text += rep.verdict + "\n";
        if (rep.witness)
            text += "cluster witness near " + to_string(rep.witness->center) + " over " +
                    std::to_string(rep.witness->indices.size()) + " indices\n";
    }
    out["answer"] = answer;
    if (!o.json)
        std::cout << describe(g) << ", " << seqName << " -> " << target << " at " << nb.describe() << " (delta "
                  << to_string(nb.delta()) << ")\n"
                  << text;
    return out;
}

json cmd_lab_probe(const std::string &groupText, const Options &o) {
    auto g = concrete_group(groupText);
    if (g.d != 1 || g.t != 0 || g.z != 0)
        throw Unsupported("probe needs a group R x F");
    auto rho = rational_arg("--rho", o.rho), eps = rational_arg("--eps", o.eps);
    auto p = probe_integral(g.moduli, rho, eps, o.denom_bound, o.threads);
    json out{{"schema", "chabauty.lab.probe/1"}, {"group", describe(g)},     {"rho", to_string(rho)},
             {"eps", to_string(eps)},            {"denom_bound", o.denom_bound}, {"candidates", p.candidates},
             {"answer", p.witness}};
    if (p.witness)
        out["witness"] = {{"a", to_string(p.a)}, {"f", p.f}};
    else
        out["witness"] = nullptr;
    if (!o.json) {
        if (p.witness) {
            std::cout << "Witness(a=" << to_string(p.a) << ", f=(";
            for (std::size_t i = 0; i < p.f.size(); ++i)
                std::cout << (i ? ", " : "") << p.f[i];
            std::cout << "))\n";
        } else {
            std::cout << "Exhausted (" << p.candidates << " candidates)\n";
        }
    }
    return out;
}

json cmd_lab_duality(const std::string &text, const Options &o) {
    auto g = concrete_group(text);
    if (g.continuous() + g.z != 0)
        throw Unsupported("--finite needs a product of cyclic groups");
    auto subs = subgroup_lattice_finite(g);
    Integer order = 1;
    for (auto m : g.moduli)
        order *= m;
    std::size_t bad = 0;
    std::vector<ClosedSubgroupRep> perps;
    for (const auto &h : subs) {
        auto p = annihilator(h, g);
        if (annihilator(p, g) != h || finite_order(h, g) * finite_order(p, g) != order)
            ++bad;
        perps.push_back(std::move(p));
    }
    for (std::size_t i = 0; i < subs.size(); ++i)
        for (std::size_t j = 0; j < subs.size(); ++j)
            if (contains(subs[j], subs[i], g) != contains(perps[i], perps[j], g))
                ++bad;
    if (bad)
        throw InternalInconsistency(std::to_string(bad) + " annihilator checks failed on " + describe(g));
    json list = json::array();
    for (std::size_t i = 0; i < subs.size(); ++i)
        list.push_back({{"subgroup", subgroup_json(subs[i])},
                        {"order", finite_order(subs[i], g).str()},
                        {"annihilator", subgroup_json(perps[i])}});
    if (!o.json) {
        std::cout << describe(g) << ": " << subs.size() << " subgroups; annihilator is an inclusion-reversing "
                  << "involution with |H|·|H^perp| = " << order.str() << "\n";
        for (std::size_t i = 0; i < subs.size(); ++i)
            std::cout << "  " << to_string(subs[i]) << "  perp " << to_string(perps[i]) << "\n";
    }
    return {{"schema", "chabauty.lab.duality/1"}, {"group", describe(g)}, {"subgroups", list}, {"answer", true}};
}

json cmd_demo(const Options &o) {
    auto rho = rational_arg("--rho", o.rho), eps = rational_arg("--eps", o.eps);
    auto demo = demo_corollary(rho, eps, o.imax, o.jmax, o.threads);
    json rows = json::array();
    for (const auto &r : demo.rows) {
        json row{{"i", r.i}, {"j", r.j}, {"tol", to_string(r.tol)}, {"in_U_whole", to_string(r.whole)}};
        row["blocking_point"] = r.blocking ? vec_json(*r.blocking) : json(nullptr);
        rows.push_back(row);
    }
    json out{{"schema", "chabauty.nets.demo/1"}, {"group", "R x T"}, {"rho", to_string(rho)},
             {"eps", to_string(eps)},            {"i_max", o.imax},  {"rows", rows},
             {"stays", demo.stays},              {"answer", demo.stays}};
    out["entered_at"] = demo.entered_at ? json(*demo.entered_at) : json(nullptr);
    if (!o.json) {
        std::cout << "approximants <(1/j, i/j)> of the slope-i lines in R x T, rho=" << to_string(rho)
                  << ", eps=" << to_string(eps) << "\n";
        for (const auto &r : demo.rows)
            std::cout << "  i=" << r.i << "  j(i)=" << r.j << "  tol=" << to_string(r.tol)
                      << "  in U(whole)=" << to_string(r.whole) << "\n";
        if (demo.entered_at)
            std::cout << "enters the neighborhood at i=" << *demo.entered_at << " and stays through i=" << o.imax
                      << "\n";
        else
            std::cout << "does not settle inside the neighborhood by i=" << o.imax << "\n";
    }
    return out;
}

json cmd_selftest(const Options &o) {
    auto results = run_acceptance(o.seed, o.threads, o.json ? nullptr : &std::cout);
    json list = json::array();
    bool all = true;
    for (const auto &r : results) {
        list.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds}});
        all = all && r.pass;
        if (!o.json)
            std::cout << format_result(r) << "\n";
    }
    return {{"schema", "chabauty.selftest/1"}, {"seed", o.seed}, {"criteria", list}, {"answer", all}};
}

} // namespace

int main(int argc, char **argv) {
    Options o;
    bool jsonRequested = false;
    for (int i = 1; i < argc; ++i)
        jsonRequested = jsonRequested || std::string(argv[i]) == "--json";
    auto fail = [&](const std::string &kind, const std::string &message) {
        json err = error_json(kind, message);
        if (jsonRequested)
            std::cout << err.dump(2) << "\n";
        else
            std::cerr << "error (" << kind << "): " << message << "\n";
        return exit_code(err);
    };

    // --config supplies defaults, so it is read before the flags are parsed
    try {
        for (int i = 1; i + 1 < argc; ++i)
            if (std::string(argv[i]) == "--config")
                apply_config(o, read_config(argv[i + 1]));
    } catch (const std::exception &e) {
        return fail("Usage", e.what());
    }

    CLI::App app{"Chabauty approximability toolkit"};
    app.require_subcommand(1);
    std::string configPath;
    app.add_option("--config", configPath, "key=value file with defaults (rho, eps, nmax, ...)");
    app.add_option("--seed", o.seed, "seed for randomized checks");
    app.add_option("--threads", o.threads, "worker threads for parallel searches");
    app.add_flag("--json", o.json, "machine-readable output");

    std::string expr, mode = "integral", group, seq = "zn", target = "full", finite;
    bool witness = false, withDual = false;
    auto *classifyCmd = app.add_subcommand("classify", "decide integral or numeral approximability");
    classifyCmd->add_option("group", expr, "group expression")->required();
    classifyCmd->add_option("--mode", mode)->check(CLI::IsMember({"integral", "numeral", "compact-free"}));
    classifyCmd->add_flag("--witness", witness, "attach a certificate plan");

    auto *dualCmd = app.add_subcommand("dual", "Pontryagin dual");
    dualCmd->add_option("group", expr)->required();
    auto *structureCmd = app.add_subcommand("structure", "structural invariants");
    structureCmd->add_option("group", expr)->required();
    auto *witnessCmd = app.add_subcommand("witness", "certificate plan of an approximable group");
    witnessCmd->add_option("group", expr)->required();

    auto *lab = app.add_subcommand("lab", "exact concrete-group experiments");
    lab->require_subcommand(1);
    auto *limit = lab->add_subcommand("limit", "threshold of a built-in sequence");
    limit->add_option("--group", group)->required();
    limit->add_option("--seq", seq)->check(CLI::IsMember(families::names()));
    limit->add_option("--target", target)->check(CLI::IsMember({"full", "whole", "trivial"}));
    limit->add_option("--rho", o.rho);
    limit->add_option("--eps", o.eps);
    limit->add_option("--nmax", o.nmax)->check(CLI::Range(1L, 100000L));
    limit->add_flag("--dual", withDual, "also run the annihilator sequence");
    auto *probe = lab->add_subcommand("probe", "search for an integral witness in R x F");
    probe->add_option("--group", group)->required();
    probe->add_option("--rho", o.rho);
    probe->add_option("--eps", o.eps);
    probe->add_option("--denom-bound", o.denom_bound)->check(CLI::Range(std::uint64_t{1}, std::uint64_t{10000}));
    auto *duality = lab->add_subcommand("duality", "annihilator checks on a finite group");
    duality->add_option("--finite", finite)->required();

    auto *nets = app.add_subcommand("nets", "diagonal constructions");
    nets->require_subcommand(1);
    auto *demo = nets->add_subcommand("demo-corollary", "cyclic approximants of R x T through the diagonal");
    demo->add_option("--rho", o.rho);
    demo->add_option("--eps", o.eps);
    demo->add_option("--imax", o.imax)->check(CLI::Range(1L, 64L));
    demo->add_option("--jmax", o.jmax)->check(CLI::Range(1L, 100000L));

    auto *selftest = app.add_subcommand("selftest", "run the acceptance criteria");

    // subcommands accept the global flags after their own arguments too
    for (auto *sub : {classifyCmd, dualCmd, structureCmd, witnessCmd, limit, probe, duality, demo, selftest})
        sub->fallthrough();
    lab->fallthrough();
    nets->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        return fail("Usage", e.what());
    }
    default_threads() = std::max(1u, o.threads);

    json out;
    try {
        if (*classifyCmd)
            out = cmd_classify(expr, mode, witness, o);
        else if (*dualCmd)
            out = cmd_dual(expr, o);
        else if (*structureCmd)
            out = cmd_structure(expr, o);
        else if (*witnessCmd)
            out = cmd_witness(expr, o);
        else if (*limit)
            out = cmd_lab_limit(group, seq, target, withDual, o);
        else if (*probe)
            out = cmd_lab_probe(group, o);
        else if (*duality)
            out = cmd_lab_duality(finite, o);
        else if (*demo)
            out = cmd_demo(o);
        else
            out = cmd_selftest(o);
    } catch (const std::exception &e) {
        return fail(kind_of(e), e.what());
    }
    if (o.json)
        std::cout << out.dump(2) << "\n";
    return exit_code(out);
}
