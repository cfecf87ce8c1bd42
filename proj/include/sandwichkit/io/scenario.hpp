#pragma once

#include "sandwichkit/duality.hpp"
#include "sandwichkit/interiority.hpp"
#include "sandwichkit/io/json_exact.hpp"
#include "sandwichkit/sandwich.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace sandwichkit::io {

namespace detail {

inline bool is_numeral(const std::string& s)
{
    static const std::regex re(R"(\s*[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?(\s*/\s*[+-]?\d+(\.\d*)?([eE][+-]?\d+)?)?\s*)");
    return std::regex_match(s, re);
}

}  // namespace detail

/// Rewrites every numeral string to its reduced "p/q" form; integers and other
/// strings are kept. Idempotent, so parse -> serialize -> parse is stable.
inline json canonicalize(const json& v)
{
    if (v.is_array()) {
        json out = json::array();
        for (const auto& e : v)
            out.push_back(canonicalize(e));
        return out;
    }
    if (v.is_object()) {
        json out = json::object();
        for (auto it = v.begin(); it != v.end(); ++it)
            out[it.key()] = it.key() == "comment" ? it.value() : canonicalize(it.value());
        return out;
    }
    if (v.is_string() && detail::is_numeral(v.get<std::string>()))
        return json(sandwichkit::to_string(parse_rational(v.get<std::string>())));
    return v;
}

/// Reads a scenario document from text: exact numbers, canonical numerals.
inline json parse_document(const std::string& text)
{
    json doc = parse_exact_json(text);
    if (!doc.is_object())
        throw InputError("scenario: top level must be an object");
    static const std::set<std::string> allowed{"comment", "dims", "functions", "maps", "spaces", "task"};
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (!allowed.count(it.key()))
            throw InputError("scenario: unknown section '" + it.key() + "'");
    return canonicalize(doc);
}

inline std::string serialize_document(const json& doc)
{
    return doc.dump(2) + "\n";
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Sandwich task data together with the points at which T is sampled.
template <class F>
struct SandwichTask {
    SandwichInstance<F> instance;
    std::vector<Vec<F>> probes;
};

/// Sublevel query task for the interiority and theorem20 commands.
template <class F>
struct SublevelTask {
    SeparableFunction<F> phi;
    AffineMap<F> B;
    F gamma;
    std::optional<F> delta;
    std::vector<Vec<F>> probes;
    std::size_t i_max = 64;
};

/// Typed access to a parsed document; every error names the offending field path.
template <class F>
class ScenarioReader {
public:
    explicit ScenarioReader(json doc) : doc_(std::move(doc)) {}

    const json& document() const { return doc_; }

    std::string task_kind() const { return str(task(), "task.kind", "kind"); }

    F number(const json& v, const std::string& path) const
    {
        try {
            if (v.is_number_integer())
                return from_rational<F>(Rational(std::to_string(v.get<long long>())));
            if (v.is_number_unsigned())
                return from_rational<F>(parse_rational(std::to_string(v.get<unsigned long long>())));
            if (v.is_string())
                return from_rational<F>(parse_rational(v.get<std::string>()));
        } catch (const StructuralError& e) {
            throw InputError(path + ": " + e.what());
        }
        throw InputError(path + ": expected a number or a numeral string");
    }

    Vec<F> vector(const json& v, const std::string& path) const
    {
        if (!v.is_array())
            throw InputError(path + ": expected an array of numbers");
        Vec<F> out;
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
        return out;
    }

    std::vector<Vec<F>> points(const json& v, const std::string& path, std::optional<std::size_t> dim = std::nullopt) const
    {
        if (!v.is_array())
            throw InputError(path + ": expected an array of points");
        std::vector<Vec<F>> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            auto p = vector(v[i], path + "[" + std::to_string(i) + "]");
            if (dim && p.size() != *dim)
                throw InputError(path + "[" + std::to_string(i) + "]: point has dimension " + std::to_string(p.size()) +
                                 ", expected " + std::to_string(*dim));
            out.push_back(std::move(p));
        }
        return out;
    }

    std::size_t dim_value(const json& v, const std::string& path) const
    {
        if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0))
            return v.get<std::size_t>();
        if (v.is_string()) {
            const auto& dims = section("dims");
            const auto name = v.get<std::string>();
            if (!dims.contains(name))
                throw InputError(path + ": unknown dimension '" + name + "'");
            return dim_value(dims[name], "dims." + name);
        }
        throw InputError(path + ": expected a nonnegative integer or a dimension name");
    }

    PolyhedralFunction<F> function(const std::string& name) const
    {
        const std::string path = "functions." + name;
        const auto& spec = entry("functions", name);
        const auto form = str(spec, path + ".form", "form");
        std::optional<std::size_t> dim;
        if (spec.contains("dim"))
            dim = dim_value(spec["dim"], path + ".dim");
        try {
            if (form == "V") {
                const auto& s = field(spec, path, "samples");
                if (!s.is_array() || s.empty())
                    throw InputError(path + ".samples: expected a nonempty array of [point, value] pairs");
                std::vector<std::pair<Vec<F>, F>> pairs;
                for (std::size_t i = 0; i < s.size(); ++i) {
                    const std::string sp = path + ".samples[" + std::to_string(i) + "]";
                    if (!s[i].is_array() || s[i].size() != 2)
                        throw InputError(sp + ": expected [point, value]");
                    auto p = vector(s[i][0], sp + "[0]");
                    if (dim && p.size() != *dim)
                        throw InputError(sp + "[0]: point has dimension " + std::to_string(p.size()) + " but function '" +
                                         name + "' has dimension " + std::to_string(*dim));
                    pairs.emplace_back(std::move(p), number(s[i][1], sp + "[1]"));
                }
                return PolyhedralFunction<F>::vform(std::move(pairs));
            }
            if (form == "H") {
                const auto& s = field(spec, path, "pieces");
                if (!s.is_array() || s.empty())
                    throw InputError(path + ".pieces: expected a nonempty array of [coeffs, constant] pairs");
                std::vector<AffineFunctional<F>> pieces;
                for (std::size_t i = 0; i < s.size(); ++i) {
                    const std::string sp = path + ".pieces[" + std::to_string(i) + "]";
                    if (!s[i].is_array() || s[i].size() != 2)
                        throw InputError(sp + ": expected [coeffs, constant]");
                    pieces.emplace_back(vector(s[i][0], sp + "[0]"), number(s[i][1], sp + "[1]"));
                }
                return PolyhedralFunction<F>::hform(std::move(pieces));
            }
        } catch (const StructuralError& e) {
            throw InputError(path + ": " + e.what());
        }
        throw InputError(path + ".form: expected \"V\" or \"H\", got \"" + form + "\"");
    }

    AffineMap<F> map(const std::string& name) const
    {
        const std::string path = "maps." + name;
        const auto& spec = entry("maps", name);
        const auto& m = field(spec, path, "matrix");
        if (!m.is_array())
            throw InputError(path + ".matrix: expected an array of rows");
        Mat<F> rows;
        for (std::size_t r = 0; r < m.size(); ++r)
            rows.push_back(vector(m[r], path + ".matrix[" + std::to_string(r) + "]"));
        std::size_t in = rows.empty() ? 0 : rows[0].size();
        if (spec.contains("from"))
            in = dim_value(spec["from"], path + ".from");
        if (rows.empty() && spec.contains("to") && dim_value(spec["to"], path + ".to") != 0)
            throw InputError(path + ": empty matrix but nonzero output dimension");
        Vec<F> off = spec.contains("offset") ? vector(spec["offset"], path + ".offset") : Vec<F>(rows.size(), F(0));
        try {
            return AffineMap<F>(in, std::move(rows), std::move(off));
        } catch (const StructuralError& e) {
            throw InputError(path + ": " + e.what());
        }
    }

    /// A named polytope (vertices or box); nullopt for a vector space entry.
    std::optional<Polytope<F>> space(const std::string& name, std::size_t* vector_dim = nullptr) const
    {
        const std::string path = "spaces." + name;
        const auto& spec = entry("spaces", name);
        if (spec.contains("vector_space")) {
            if (vector_dim)
                *vector_dim = dim_value(spec["vector_space"], path + ".vector_space");
            return std::nullopt;
        }
        try {
            if (spec.contains("box"))
                return Polytope<F>::box(vector(field(spec["box"], path + ".box", "lo"), path + ".box.lo"),
                                        vector(field(spec["box"], path + ".box", "hi"), path + ".box.hi"));
            auto verts = points(field(spec, path, "vertices"), path + ".vertices");
            if (verts.empty())
                throw InputError(path + ".vertices: expected at least one vertex");
            const std::size_t d = verts[0].size();
            return Polytope<F>(d, std::move(verts));
        } catch (const StructuralError& e) {
            throw InputError(path + ": " + e.what());
        }
    }

    AffineFunctional<F> functional(const json& v, const std::string& path) const
    {
        if (v.is_array())
            return AffineFunctional<F>(vector(v, path));
        if (v.is_object()) {
            auto c = vector(field(v, path, "coeffs"), path + ".coeffs");
            F k = v.contains("constant") ? number(v["constant"], path + ".constant") : F(0);
            return AffineFunctional<F>(std::move(c), std::move(k));
        }
        throw InputError(path + ": expected a covector array or {\"coeffs\", \"constant\"}");
    }

    /// A function name (single block) or {"blocks": [{"function", "coords"}], "shift"}.
    SeparableFunction<F> separable(const json& v, const std::string& path) const
    {
        if (v.is_string())
            return SeparableFunction<F>::single(function(v.get<std::string>()));
        if (!v.is_object())
            throw InputError(path + ": expected a function name or a blocks object");
        const auto& blocks = field(v, path, "blocks");
        if (!blocks.is_array() || blocks.empty())
            throw InputError(path + ".blocks: expected a nonempty array");
        std::vector<Block<F>> out;
        std::size_t dim = 0;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            const std::string bp = path + ".blocks[" + std::to_string(i) + "]";
            auto f = function(str(blocks[i], bp + ".function", "function"));
            std::vector<std::size_t> coords;
            if (blocks[i].contains("coords")) {
                for (const auto& c : blocks[i]["coords"]) {
                    if (!c.is_number_unsigned() && !(c.is_number_integer() && c.get<long long>() >= 0))
                        throw InputError(bp + ".coords: expected nonnegative integers");
                    coords.push_back(c.get<std::size_t>());
                }
            } else {
                for (std::size_t j = 0; j < f.dim(); ++j)
                    coords.push_back(dim + j);
            }
            dim += f.dim();
            out.push_back(Block<F>{std::move(f), std::move(coords)});
        }
        try {
            if (v.contains("shift"))
                return SeparableFunction<F>(dim, std::move(out), functional(v["shift"], path + ".shift"));
            return SeparableFunction<F>(dim, std::move(out));
        } catch (const StructuralError& e) {
            throw InputError(path + ": " + e.what());
        }
    }

    DualityScenario<F> duality() const
    {
        const auto& t = task();
        const std::string kind_name = task_kind();
        Kind kind;
        try {
            kind = parse_kind(kind_name);
        } catch (const StructuralError& e) {
            throw InputError(std::string("task.kind: ") + e.what());
        }
        HypothesisMode mode = HypothesisMode::boundedness;
        if (t.contains("hypothesis_mode")) {
            try {
                mode = parse_mode(str(t, "task.hypothesis_mode", "hypothesis_mode"));
            } catch (const StructuralError& e) {
                throw InputError(std::string("task.hypothesis_mode: ") + e.what());
            }
        }
        auto role = [&](const char* r) { return str(t, std::string("task.") + r, r); };
        auto fn = [&](const char* r) { return function(role(r)); };
        auto mp = [&](const char* r) { return map(role(r)); };

        ScenarioData<F> data = [&]() -> ScenarioData<F> {
            switch (kind) {
            case Kind::sublevel: {
                auto psi = separable(field(t, "task", "psi"), "task.psi");
                auto B = mp("B");
                need_in(role("B"), B, "task.psi", psi.dim());
                return TrivariateData<F>{psi, AffineMap<F>::zero(psi.dim(), 0), B};
            }
            case Kind::trivariate: {
                auto psi = separable(field(t, "task", "psi"), "task.psi");
                auto A = mp("A");
                auto B = mp("B");
                need_in(role("A"), A, "task.psi", psi.dim());
                need_in(role("B"), B, "task.psi", psi.dim());
                return TrivariateData<F>{psi, A, B};
            }
            case Kind::fenchel: {
                auto f = fn("f");
                auto g = fn("g");
                auto C = mp("C");
                need_in(role("C"), C, "function '" + role("f") + "'", f.dim());
                need_out(role("C"), C, "function '" + role("g") + "'", g.dim());
                return FenchelData<F>{f, g, C};
            }
            case Kind::quadrivariate: {
                auto psi = separable(field(t, "task", "psi"), "task.psi");
                auto C = mp("C");
                auto D = mp("D");
                const std::size_t want = C.in_dim() + C.out_dim() + D.in_dim() + D.out_dim();
                if (psi.dim() != want)
                    throw InputError("task.psi has dimension " + std::to_string(psi.dim()) + " but maps '" + role("C") +
                                     "' and '" + role("D") + "' need U x V x W x X of dimension " + std::to_string(want));
                return QuadrivariateData<F>{psi, C, D};
            }
            case Kind::bibivariate:
            case Kind::partial_infconv: {
                auto f = fn("f");
                auto g = fn("g");
                AffineMap<F> C, D;
                if (kind == Kind::partial_infconv) {
                    const std::size_t dw = dim_value(field(t, "task", "w_dim"), "task.w_dim");
                    if (dw > f.dim() || dw > g.dim())
                        throw InputError("task.w_dim exceeds the dimension of function '" + role("f") + "' or '" +
                                         role("g") + "'");
                    C = AffineMap<F>::identity(dw);
                    D = AffineMap<F>::identity(f.dim() - dw);
                } else {
                    C = mp("C");
                    D = mp("D");
                }
                if (f.dim() != C.in_dim() + D.out_dim())
                    throw InputError("function '" + role("f") + "' has dimension " + std::to_string(f.dim()) +
                                     " but W x V from the maps has dimension " + std::to_string(C.in_dim() + D.out_dim()));
                if (g.dim() != C.out_dim() + D.in_dim())
                    throw InputError("function '" + role("g") + "' has dimension " + std::to_string(g.dim()) +
                                     " but X x U from the maps has dimension " + std::to_string(C.out_dim() + D.in_dim()));
                return BibivariateData<F>{f, g, C, D};
            }
            case Kind::indicator_linear: {
                auto g = fn("g");
                auto C = mp("C");
                auto D = mp("D");
                if (t.contains("W")) {
                    std::size_t wd = 0;
                    if (space(role("W"), &wd) || wd != C.in_dim())
                        throw InputError("space '" + role("W") + "' must be a vector space of dimension " +
                                         std::to_string(C.in_dim()) + " to match map '" + role("C") + "'");
                }
                if (g.dim() != C.out_dim() + D.in_dim())
                    throw InputError("function '" + role("g") + "' has dimension " + std::to_string(g.dim()) +
                                     " but X x U from maps '" + role("C") + "' and '" + role("D") +
                                     "' has dimension " + std::to_string(C.out_dim() + D.in_dim()));
                return IndicatorLinearData<F>{g, C, D};
            }
            }
            throw InputError("task.kind: unsupported");
        }();

        DualityScenario<F> s(kind, std::move(data));
        s.mode = mode;
        if (t.contains("queries")) {
            const auto& q = t["queries"];
            if (!q.is_array())
                throw InputError("task.queries: expected an array");
            for (std::size_t i = 0; i < q.size(); ++i)
                s.queries.push_back(functional(q[i], "task.queries[" + std::to_string(i) + "]"));
        }
        if (t.contains("z0"))
            s.z0 = vector(t["z0"], "task.z0");
        if (t.contains("delta"))
            s.delta = number(t["delta"], "task.delta");
        if (t.contains("gamma"))
            s.gamma = number(t["gamma"], "task.gamma");
        try {
            validate(s);
        } catch (const StructuralError& e) {
            throw InputError(std::string("task: ") + e.what());
        }
        return s;
    }

    SandwichTask<F> sandwich() const
    {
        const auto& t = task();
        auto sname = str(t, "task.S", "S");
        auto S = function(sname);
        if (S.is_vform())
            throw InputError("function '" + sname + "' used as S must be in H-form with zero constants");
        for (const auto& c : S.values())
            if (!is_zero(c))
                throw InputError("function '" + sname + "' used as S must have zero constants (a sublinear functional)");
        auto zname = str(t, "task.Z", "Z");
        auto Z = space(zname);
        if (!Z)
            throw InputError("space '" + zname + "' must be a polytope");
        auto kname = str(t, "task.k", "k");
        auto k = function(kname);
        auto bname = str(t, "task.B", "B");
        auto B = map(bname);
        if (k.dim() != Z->dim())
            throw InputError("function '" + kname + "' has dimension " + std::to_string(k.dim()) + " but space '" + zname +
                             "' has dimension " + std::to_string(Z->dim()));
        need_in(bname, B, "space '" + zname + "'", Z->dim());
        need_out(bname, B, "function '" + sname + "'", S.dim());
        SandwichTask<F> out{{SublinearFunctional<F>(S.points()), *Z, k, B}, {}};
        try {
            out.instance.validate();
        } catch (const StructuralError& e) {
            throw InputError(std::string("task: ") + e.what());
        }
        if (t.contains("probes"))
            out.probes = points(t["probes"], "task.probes", S.dim());
        return out;
    }

    SublevelTask<F> sublevel() const
    {
        const auto& t = task();
        auto phi = separable(field(t, "task", "phi"), "task.phi");
        auto bname = str(t, "task.B", "B");
        auto B = map(bname);
        need_in(bname, B, "task.phi", phi.dim());
        if (!phi.all_vform())
            throw InputError("task.phi: every block must be in V-form");
        SublevelTask<F> out{phi, B, number(field(t, "task", "gamma"), "task.gamma"), std::nullopt, {}, 64};
        if (t.contains("delta"))
            out.delta = number(t["delta"], "task.delta");
        if (t.contains("probes"))
            out.probes = points(t["probes"], "task.probes", B.out_dim());
        if (t.contains("i_max"))
            out.i_max = dim_value(t["i_max"], "task.i_max");
        return out;
    }

private:
    const json& section(const char* name) const
    {
        static const json empty = json::object();
        if (!doc_.contains(name))
            return empty;
        const auto& s = doc_[name];
        if (!s.is_object())
            throw InputError(std::string(name) + ": expected an object");
        return s;
    }

    const json& entry(const char* sec, const std::string& name) const
    {
        const auto& s = section(sec);
        if (!s.contains(name))
            throw InputError(std::string(sec) + ": no entry named '" + name + "'");
        const auto& e = s[name];
        if (!e.is_object())
            throw InputError(std::string(sec) + "." + name + ": expected an object");
        return e;
    }

    const json& task() const
    {
        if (!doc_.contains("task") || !doc_["task"].is_object())
            throw InputError("task: missing or not an object");
        return doc_["task"];
    }

    static const json& field(const json& obj, const std::string& path, const char* key)
    {
        if (!obj.is_object() || !obj.contains(key))
            throw InputError(path + "." + key + ": missing");
        return obj[key];
    }

    static std::string str(const json& obj, const std::string& path, const char* key)
    {
        if (!obj.is_object() || !obj.contains(key))
            throw InputError(path + ": missing");
        if (!obj[key].is_string())
            throw InputError(path + ": expected a string");
        return obj[key].get<std::string>();
    }

    static void need_in(const std::string& map_name, const AffineMap<F>& m, const std::string& what, std::size_t d)
    {
        if (m.in_dim() != d)
            throw InputError("map '" + map_name + "' has input dimension " + std::to_string(m.in_dim()) + " but " + what +
                             " has dimension " + std::to_string(d));
    }

    static void need_out(const std::string& map_name, const AffineMap<F>& m, const std::string& what, std::size_t d)
    {
        if (m.out_dim() != d)
            throw InputError("map '" + map_name + "' has output dimension " + std::to_string(m.out_dim()) +
                             " but " + what + " has dimension " + std::to_string(d));
    }

    json doc_;
};

}  // namespace sandwichkit::io
