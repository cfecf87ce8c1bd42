#pragma once

// Command layer behind tools/sandwichkit: one scenario file in, one report out.

#include "sandwichkit/io/scenario.hpp"
#include "sandwichkit/oracle.hpp"
#include "sandwichkit/properties.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <future>

namespace sandwichkit::app {

using io::json;

inline constexpr const char* tool_name = "sandwichkit";
inline constexpr const char* tool_version = "0.1.0";

namespace exit_code {
inline constexpr int pass = 0;
inline constexpr int failure = 1;
inline constexpr int unmet = 2;
inline constexpr int input = 3;
}  // namespace exit_code

struct Options {
    std::string command;
    std::string input;
    std::string mode = "exact";
    std::string tolerance;
    std::string report = "json";
    bool crosscheck = false;
    std::uint64_t seed = 1;
    std::string function;
    std::string at;
};

struct Outcome {
    int exit_code = exit_code::pass;
    std::string out;
    std::string err;
};

/// Mode from SANDWICHKIT_MODE when set, else exact.
inline std::string default_mode()
{
    const char* m = std::getenv("SANDWICHKIT_MODE");
    return m && *m ? std::string(m) : std::string("exact");
}

/// Worst of two exit codes: input error, then failure, then unmet hypotheses.
inline int combine_exit(int a, int b)
{
    auto rank = [](int c) { return c == exit_code::input ? 3 : c == exit_code::failure ? 2 : c == exit_code::unmet ? 1 : 0; };
    return rank(a) >= rank(b) ? a : b;
}

inline std::string verdict_of(int code)
{
    switch (code) {
    case exit_code::pass: return "pass";
    case exit_code::failure: return "fail";
    case exit_code::unmet: return "hypotheses_unmet";
    default: return "input_error";
    }
}

inline int exit_of(const std::string& verdict)
{
    if (verdict == "pass")
        return exit_code::pass;
    if (verdict == "fail")
        return exit_code::failure;
    if (verdict == "input_error")
        return exit_code::input;
    return exit_code::unmet;
}

inline std::string sha256_hex(const std::string& data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

// ---- number formatting -------------------------------------------------

template <class F>
json num(const F& x)
{
    return sandwichkit::to_string(x);
}

template <class F>
json num(const Extended<F>& x)
{
    return x.str();
}

template <class F>
json vec(const Vec<F>& v)
{
    json out = json::array();
    for (const auto& x : v)
        out.push_back(num(x));
    return out;
}

template <class F>
json mat(const Mat<F>& m)
{
    json out = json::array();
    for (const auto& r : m)
        out.push_back(vec(r));
    return out;
}

template <class F>
json functional(const AffineFunctional<F>& q)
{
    return json{{"coeffs", vec(q.coeffs)}, {"constant", num(q.constant)}};
}

/// Parses "1/2, -3" or "[1/2, -3]" into a vector.
template <class F>
Vec<F> parse_point(std::string s, const std::string& what)
{
    s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == '[' || c == ']' || c == '(' || c == ')'; }),
            s.end());
    Vec<F> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(from_rational<F>(parse_rational(item)));
        } catch (const StructuralError& e) {
            throw io::InputError(what + ": " + e.what());
        }
    }
    return out;
}

// ---- commands ------------------------------------------------------------

/// Result of one command on one document, before the envelope is added.
struct Body {
    std::string kind;
    json records = json::array();
    int exit = exit_code::pass;
};

template <class F>
json duality_record(const DualityReport<F>& r)
{
    json flags = json::object();
    for (const auto& f : r.flags)
        flags[f.name] = f.value;
    json rec{{"query", functional(r.query)},
             {"lhs", num(r.lhs)},
             {"rhs", num(r.rhs)},
             {"gap", num(r.gap)},
             {"witness", r.witness.empty() ? json(nullptr) : vec(r.witness)},
             {"attained", r.attained},
             {"hypothesis_flags", flags},
             {"verdict", r.verdict()}};
    if (!r.notes.empty())
        rec["notes"] = r.notes;
    return rec;
}

inline json bracket(const oracle::Bracket<Rational>& b)
{
    json out{{"lower", b.lower.str()}, {"upper", b.upper.str()}, {"conclusive", b.conclusive}};
    if (!b.note.empty())
        out["note"] = b.note;
    return out;
}

/// Oracle runs for one exact report. Skipped above dimension 2, where the
/// naive grid is not meant to run.
inline json crosscheck_record(const DualityScenario<Rational>& s, const DualityReport<Rational>& r, bool& disagrees)
{
    const std::size_t d = oracle::instance_dim(s.data, r.query);
    if (d > 2)
        return json{{"skipped", "instance dimension " + std::to_string(d) + " exceeds 2"}};
    oracle::QueryOracle<Rational> o;
    for (long R : {4, 16, 64, 256, 1024}) {
        o = oracle::bracket_query(s.data, r.query, 8, Rational(R), Rational(1, 64));
        if (o.lhs.conclusive && o.rhs.conclusive)
            break;
    }
    json out{{"resolution", 8}, {"lhs", bracket(o.lhs)}, {"rhs", bracket(o.rhs)}};
    if (o.lhs.conclusive && o.rhs.conclusive) {
        const bool agrees = o.lhs.contains(r.lhs) && o.rhs.contains(r.rhs);
        out["agrees"] = agrees;
        disagrees = disagrees || !agrees;
    } else {
        out["agrees"] = nullptr;
    }
    return out;
}

template <class F>
Body verify_duality(const io::ScenarioReader<F>& reader, const json& doc, bool crosscheck)
{
    auto s = reader.duality();
    if (s.queries.empty() && s.kind != Kind::sublevel)
        throw io::InputError("task.queries: at least one query is required");
    Body b;
    b.kind = to_string(s.kind);
    auto reports = verify(s);
    // The oracle is exact only, so float runs are cross-checked through an exact re-run.
    std::optional<DualityScenario<Rational>> exact;
    std::vector<DualityReport<Rational>> exact_reports;
    if (crosscheck) {
        exact = io::ScenarioReader<Rational>(doc).duality();
        if constexpr (std::is_same_v<F, Rational>)
            exact_reports = reports;
        else
            exact_reports = verify(*exact);
    }
    bool disagrees = false;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        json rec = duality_record(reports[i]);
        b.exit = combine_exit(b.exit, exit_of(reports[i].verdict()));
        if (exact)
            rec["crosscheck"] = crosscheck_record(*exact, exact_reports[i], disagrees);
        b.records.push_back(std::move(rec));
    }
    if (disagrees)
        b.exit = combine_exit(b.exit, exit_code::failure);
    return b;
}

template <class F>
std::vector<Vec<F>> default_sandwich_probes(std::size_t dim)
{
    std::vector<Vec<F>> out{Vec<F>(dim, F(0))};
    for (std::size_t j = 0; j < dim; ++j)
        for (int sgn : {1, -1}) {
            Vec<F> e(dim, F(0));
            e[j] = F(sgn);
            out.push_back(std::move(e));
        }
    return out;
}

template <class F>
Body run_sandwich(const io::ScenarioReader<F>& reader)
{
    auto task = reader.sandwich();
    const auto& inst = task.instance;
    Body b;
    b.kind = "sandwich";
    json rec = json::object();
    auto hyp = verify_hypothesis(inst);
    rec["hypothesis"] = json{{"holds", hyp.holds}, {"min_value", num(hyp.min_value)}, {"argmin", vec(hyp.argmin)}};
    auto fc = fenchel_sandwich_check(inst);
    const bool dual_agrees = fc.hypothesis_holds == hyp.holds && fc.conjugate_at_zero == Extended<F>(F(-hyp.min_value));
    rec["conjugate_form"] = json{{"conjugate_at_zero", num(fc.conjugate_at_zero)},
                                 {"dual_min", num(fc.dual_min)},
                                 {"witness", vec(fc.witness)},
                                 {"agrees", dual_agrees}};
    if (!dual_agrees)
        b.exit = exit_code::failure;
    if (!hyp.holds) {
        rec["separator"] = nullptr;
        rec["violation"] = json{{"point", vec(hyp.argmin)}, {"value", num(hyp.min_value)}};
        rec["verdict"] = "hypotheses_unmet";
        b.exit = combine_exit(b.exit, exit_code::unmet);
        b.records.push_back(std::move(rec));
        return b;
    }
    auto sep = find_separator(inst);
    if (!sep.xprime) {
        rec["separator"] = nullptr;
        rec["verdict"] = "fail";
        b.exit = exit_code::failure;
        b.records.push_back(std::move(rec));
        return b;
    }
    const auto& xp = *sep.xprime;
    auto check = check_separator(inst, xp);
    rec["separator"] = vec(xp);
    rec["separator_check"] = json{{"dominated_by_S", check.dominated_by_S}, {"supports_k", check.supports_k}};
    bool ok = check.ok();
    auto probes = task.probes.empty() ? default_sandwich_probes<F>(inst.S.dim()) : task.probes;
    json samples = json::array();
    for (const auto& x : probes) {
        auto t = aux_T(inst, x);
        const F lin = dot(xp, x);
        const F s = inst.S(x);
        const bool ordered = Extended<F>(lin) <= t && t <= Extended<F>(s);
        ok = ok && ordered;
        samples.push_back(json{{"x", vec(x)}, {"separator", num(lin)}, {"T", num(t)}, {"S", num(s)}, {"ordered", ordered}});
    }
    rec["probes"] = samples;
    rec["verdict"] = ok ? "pass" : "fail";
    b.exit = combine_exit(b.exit, ok ? exit_code::pass : exit_code::failure);
    b.records.push_back(std::move(rec));
    return b;
}

template <class F>
json margin_json(const MarginResult<F>& m)
{
    return json{{"holds", m.holds},
                {"margin", num(m.margin)},
                {"level_used", num(m.level_used)},
                {"fiber_inf", num(m.fiber_inf)},
                {"levels_tried", m.levels_tried}};
}

template <class F>
Body run_interiority(const io::ScenarioReader<F>& reader, std::uint64_t seed)
{
    auto task = reader.sublevel();
    Body b;
    b.kind = "interiority";
    json rec = json::object();
    auto sub = subspace_condition(task.phi, task.B);
    rec["gamma"] = num(task.gamma);
    rec["subspace"] = sub.is_subspace;
    if (!sub.is_subspace) {
        rec["verdict"] = "hypotheses_unmet";
        rec["notes"] = json::array({"the cone generated by B(dom phi) is not a linear subspace"});
        b.exit = exit_code::unmet;
        b.records.push_back(std::move(rec));
        return b;
    }
    rec["Y_basis"] = mat(sub.basis.basis());
    SublevelQuery<F> q{task.phi, task.B, task.gamma, sub.basis};
    auto m = interiority_margin(q);
    rec["interiority"] = margin_json(m);
    // The margin test and the fiber infimum are separate procedures; they must agree.
    const bool above_inf = m.fiber_inf.is_finite() && Extended<F>(task.gamma) > m.fiber_inf;
    rec["gamma_above_fiber_inf"] = above_inf;
    bool ok = above_inf == m.holds;
    bool unmet = false;
    if (m.fiber_inf.is_finite()) {
        auto c = corollary21_auto(task.phi, task.B);
        rec["automatic_level"] = json{{"gamma", num(c.gamma)}, {"holds", c.holds}};
        ok = ok && c.holds;
    }
    if (task.delta) {
        auto probes = task.probes.empty() ? default_probes(sub.basis, 4, seed) : task.probes;
        auto l = lemma19a_check(q, *task.delta, probes, task.i_max);
        json mult = json::array();
        for (auto i : l.multipliers)
            mult.push_back(i);
        rec["covering"] = json{{"delta", num(*task.delta)},
                               {"i_max", task.i_max},
                               {"probes", mat(probes)},
                               {"multipliers", mult},
                               {"holds", l.holds}};
        if (!l.holds) {
            unmet = true;
            rec["notes"] = json::array({"probe " + std::to_string(*l.failing_probe) + " is not covered up to i_max"});
        }
    }
    const int code = !ok ? exit_code::failure : unmet ? exit_code::unmet : exit_code::pass;
    rec["verdict"] = verdict_of(code);
    b.exit = code;
    b.records.push_back(std::move(rec));
    return b;
}

template <class F>
Body run_theorem20(const io::ScenarioReader<F>& reader)
{
    auto task = reader.sublevel();
    Body b;
    b.kind = "sublevel_equivalence";
    auto sub = subspace_condition(task.phi, task.B);
    if (!sub.is_subspace)
        throw PreconditionError("the cone generated by B(dom phi) is not a linear subspace");
    auto t = theorem20_equivalence(make_sublevel_query(task.phi, task.B, task.gamma));
    json rec{{"gamma", num(task.gamma)},
             {"interior", t.interior},
             {"zero_in_image", t.in_image},
             {"gamma_above_fiber_inf", t.above_inf},
             {"fiber_inf", num(t.fiber_inf)},
             {"margin", margin_json(t.margin)},
             {"agree", t.agree()},
             {"verdict", t.agree() ? "pass" : "fail"}};
    b.exit = t.agree() ? exit_code::pass : exit_code::failure;
    b.records.push_back(std::move(rec));
    return b;
}

template <class F>
Body run_function(const io::ScenarioReader<F>& reader, const Options& o)
{
    if (o.function.empty())
        throw io::InputError("--function is required");
    if (o.at.empty())
        throw io::InputError("--at is required");
    auto f = reader.function(o.function);
    auto at = parse_point<F>(o.at, "--at");
    if (at.size() != f.dim())
        throw io::InputError("--at has dimension " + std::to_string(at.size()) + " but function '" + o.function +
                             "' has dimension " + std::to_string(f.dim()));
    Body b;
    b.kind = o.command;
    json rec{{"function", o.function}, {"form", f.is_vform() ? "V" : "H"}, {"at", vec(at)}};
    if (o.command == "eval") {
        rec["value"] = num(eval(f, at));
    } else {
        auto r = sup_affine_minus_convex(AffineFunctional<F>(at), {{f, AffineMap<F>::identity(f.dim())}});
        rec["value"] = num(r.value);
        rec["maximizer"] = r.value.is_finite() ? vec(r.argmax) : json(nullptr);
    }
    rec["verdict"] = "pass";
    b.records.push_back(std::move(rec));
    return b;
}

template <class F>
Body dispatch(const Options& o, const json& doc)
{
    io::ScenarioReader<F> reader(doc);
    const std::string& c = o.command;
    if (c == "sandwich")
        return run_sandwich(reader);
    if (c == "interiority")
        return run_interiority(reader, o.seed);
    if (c == "theorem20")
        return run_theorem20(reader);
    if (c == "eval" || c == "conjugate")
        return run_function(reader, o);
    // verify: the task kind picks the procedure
    const auto kind = reader.task_kind();
    if (kind == "sandwich")
        return run_sandwich(reader);
    if (kind == "interiority")
        return run_interiority(reader, o.seed);
    if (kind == "sublevel_equivalence")
        return run_theorem20(reader);
    return verify_duality(reader, doc, o.crosscheck);
}

inline double parse_tolerance(const std::string& t)
{
    if (t.empty())
        return 1e-9;
    Rational q;
    try {
        q = parse_rational(t);
    } catch (const StructuralError& e) {
        throw io::InputError(std::string("--tolerance: ") + e.what());
    }
    if (sgn(q) <= 0)
        throw io::InputError("--tolerance must be positive");
    return q.get_d();
}

/// One file: the full report document with its exit code.
inline json run_file(const Options& o, const std::string& path, const std::string& shown)
{
    json rep{{"tool", tool_name}, {"version", tool_version}, {"command", o.command}, {"file", shown}, {"mode", o.mode}};
    int code = exit_code::pass;
    try {
        const std::string text = io::read_file(path);
        rep["input_digest"] = "sha256:" + sha256_hex(text);
        const json doc = io::parse_document(text);
        Body b;
        if (o.mode == "float") {
            ScopedTolerance tol(parse_tolerance(o.tolerance));
            b = dispatch<double>(o, doc);
        } else {
            b = dispatch<Rational>(o, doc);
        }
        rep["kind"] = b.kind;
        rep["records"] = std::move(b.records);
        code = b.exit;
    } catch (const io::InputError& e) {
        rep["error"] = e.what();
        code = exit_code::input;
    } catch (const StructuralError& e) {
        rep["error"] = e.what();
        code = exit_code::input;
    } catch (const PreconditionError& e) {
        rep["error"] = std::string("precondition: ") + e.what();
        code = exit_code::unmet;
    } catch (const std::exception& e) {
        rep["error"] = std::string("internal: ") + e.what();
        code = exit_code::failure;
    }
    rep["verdict"] = verdict_of(code);
    rep["exit_code"] = code;
    return rep;
}

inline json run_selftest(const Options& o)
{
    props::Rng rng(o.seed);
    std::vector<props::SuiteResult> suites;
    suites.push_back(props::biconjugation(rng, 100, 20));
    suites.push_back(props::sandwich_soundness(rng, 100, 50));
    suites.push_back(props::strong_fenchel(rng, 50));
    suites.push_back(props::strong_trivariate(rng, 50));
    suites.push_back(props::weak_duality(rng, 50, 50));
    suites.push_back(props::theorem20(rng, 100));
    suites.push_back(props::reductions(rng, 20));
    suites.push_back(props::worked_examples());
    suites.push_back(props::oracle_crosscheck(rng, 20));
    json records = json::array();
    int code = exit_code::pass;
    for (const auto& s : suites) {
        json r{{"suite", s.name}, {"cases", s.cases}, {"failures", s.failures}, {"inconclusive", s.inconclusive}};
        if (!s.first_failure.empty())
            r["first_failure"] = s.first_failure;
        r["verdict"] = s.passed() ? "pass" : "fail";
        if (!s.passed())
            code = exit_code::failure;
        records.push_back(std::move(r));
    }
    return json{{"tool", tool_name}, {"version", tool_version}, {"command", "selftest"}, {"seed", o.seed},
                {"mode", "exact"},   {"records", records},        {"verdict", verdict_of(code)}, {"exit_code", code}};
}

/// Every *.json in a directory, run concurrently, reported in filename order.
inline json run_directory(const Options& o, const std::filesystem::path& dir)
{
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<std::future<json>> jobs;
    for (const auto& f : files)
        jobs.push_back(std::async(std::launch::async, [&o, f] { return run_file(o, f.string(), f.filename().string()); }));
    json reports = json::array();
    int code = exit_code::pass;
    for (auto& j : jobs) {
        json r = j.get();
        code = combine_exit(code, r["exit_code"].get<int>());
        reports.push_back(std::move(r));
    }
    if (files.empty())
        code = exit_code::input;
    return json{{"tool", tool_name}, {"version", tool_version}, {"command", o.command}, {"directory", dir.filename().string()},
                {"mode", o.mode},    {"reports", reports},        {"verdict", verdict_of(code)}, {"exit_code", code}};
}

// ---- text rendering ------------------------------------------------------

inline void render_text(const json& v, const std::string& indent, std::string& out)
{
    std::size_t index = 0;
    for (auto it = v.begin(); it != v.end(); ++it, ++index) {
        const std::string key = v.is_object() ? it.key() : "[" + std::to_string(index) + "]";
        const json& x = it.value();
        if (x.is_structured() && !x.empty() && !(x.is_array() && !x[0].is_structured())) {
            out += indent + key + ":\n";
            render_text(x, indent + "  ", out);
        } else if (x.is_array()) {
            std::string line;
            for (const auto& e : x)
                line += (line.empty() ? "" : ", ") + (e.is_string() ? e.get<std::string>() : e.dump());
            out += indent + key + ": (" + line + ")\n";
        } else {
            out += indent + key + ": " + (x.is_string() ? x.get<std::string>() : x.dump()) + "\n";
        }
    }
}

inline std::string render(const json& rep, const std::string& format)
{
    if (format == "text") {
        std::string out;
        render_text(rep, "", out);
        return out;
    }
    return rep.dump(2) + "\n";
}

inline Outcome run(const Options& o)
{
    static const std::set<std::string> commands{"verify", "sandwich", "interiority", "theorem20", "conjugate", "eval", "selftest"};
    Outcome out;
    if (!commands.count(o.command)) {
        out.exit_code = exit_code::input;
        out.err = "unknown command '" + o.command + "'\n";
        return out;
    }
    if (o.mode != "exact" && o.mode != "float") {
        out.exit_code = exit_code::input;
        out.err = "--mode must be exact or float\n";
        return out;
    }
    if (o.report != "json" && o.report != "text") {
        out.exit_code = exit_code::input;
        out.err = "--report must be json or text\n";
        return out;
    }
    json rep;
    if (o.command == "selftest") {
        rep = run_selftest(o);
    } else if (o.input.empty()) {
        out.exit_code = exit_code::input;
        out.err = o.command + ": an input file is required\n";
        return out;
    } else if (o.command == "verify" && std::filesystem::is_directory(o.input)) {
        rep = run_directory(o, o.input);
    } else {
        rep = run_file(o, o.input, o.input);
    }
    out.exit_code = rep["exit_code"].get<int>();
    out.out = render(rep, o.report);
    if (rep.contains("error"))
        out.err = rep["error"].get<std::string>() + "\n";
    return out;
}

}  // namespace sandwichkit::app
