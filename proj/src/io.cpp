#include "bautlab/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "toml.hpp"

#include "bautlab/error.hpp"

namespace bautlab {

namespace {

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorKind::SchemaError, what); }

const Json& need(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) schema(where + ": missing \"" + key + "\"");
    return j.at(key);
}

std::string str(const Json& j, const std::string& where) {
    if (!j.is_string()) schema(where + ": expected a string");
    return j.get<std::string>();
}

int integer(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) schema(where + ": expected an integer");
    return j.get<int>();
}

Rational rational(const Json& j, const std::string& where) {
    // integers are accepted as a convenience; fractions must be strings
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (!j.is_string()) schema(where + ": rationals are written as strings \"p/q\"");
    try {
        return Rational::parse(j.get<std::string>());
    } catch (const std::exception&) {
        schema(where + ": cannot read rational \"" + j.get<std::string>() + "\"");
    }
}

// [{name, degree}]
std::vector<std::pair<std::string, int>> generators(const Json& j, const std::string& where) {
    if (!j.is_array()) schema(where + ": expected a list of generators");
    std::vector<std::pair<std::string, int>> out;
    for (const auto& g : j) {
        std::string name = str(need(g, "name", where), where + ".name");
        int d = integer(need(g, "degree", where), where + "." + name + ".degree");
        if (d < 1) schema("generator " + name + " has degree " + std::to_string(d) +
                          ": simply connected requires degree ≥ 1");
        for (const auto& [n, _] : out)
            if (n == name) schema(where + ": duplicate generator " + name);
        out.emplace_back(name, d);
    }
    return out;
}

// [[coeff, element]]
std::vector<std::pair<Rational, std::string>> terms(const Json& j, const std::string& where) {
    if (!j.is_array()) schema(where + ": expected a list of [coefficient, element] terms");
    std::vector<std::pair<Rational, std::string>> out;
    for (const auto& t : j) {
        if (!t.is_array() || t.size() != 2) schema(where + ": a term is [coefficient, element]");
        out.emplace_back(rational(t[0], where), str(t[1], where));
    }
    return out;
}

QuillenModel parse_space(const Json& j) {
    QuillenModel q;
    q.name = j.contains("name") ? str(j["name"], "space.name") : "X";
    for (auto& [n, d] : generators(need(j, "generators", "space"), "space.generators")) q.generators.push_back({n, d});
    if (q.generators.empty()) schema("space: at least one generator is required");
    q.differential.assign(q.generators.size(), {});
    if (j.contains("differential")) {
        const Json& d = j["differential"];
        if (!d.is_object()) schema("space.differential: expected an object keyed by generator");
        for (const auto& [gen, value] : d.items()) {
            std::size_t k = 0;
            while (k < q.generators.size() && q.generators[k].name != gen) ++k;
            if (k == q.generators.size()) throw Error(ErrorKind::UnknownGenerator, "space.differential: " + gen);
            q.differential[k] = terms(value, "space.differential." + gen);
        }
    }
    return q;
}

Variant parse_variant(const std::string& v) {
    if (v == "full") return Variant::Full;
    if (v == "simplified") return Variant::Simplified;
    schema("options.variant: expected \"full\" or \"simplified\", got \"" + v + "\"");
}

SparseVec pi_terms(const GradedSpace& s, const Json& j, const std::string& where) {
    SparseVec v;
    for (const auto& [c, name] : terms(j, where)) {
        auto k = s.find(name);
        if (!k) throw Error(ErrorKind::UnknownGenerator, where + ": no structure element " + name);
        v.add(*k, c);
    }
    return v;
}

Json from_toml(const std::string& text) {
    toml::table t;
    try {
        t = toml::parse(text);
    } catch (const toml::parse_error& e) {
        throw Error(ErrorKind::ParseError, std::string(e.description()));
    }
    std::ostringstream os;
    os << toml::json_formatter{t};
    return Json::parse(os.str());
}

Json report_json(const ValidationReport& r) {
    Json defects = Json::array();
    for (const auto& d : r.defects) defects.push_back({{"kind", d.kind}, {"where", d.where}, {"value", d.value}});
    Json trunc = Json::array();
    for (int n : r.truncated_degrees) trunc.push_back(n);
    return {{"ok", r.ok()}, {"checks", r.checks}, {"defects", defects}, {"truncated_degrees", trunc}};
}

std::string twisting_kind(const ModelSpec& s) {
    if (s.has_classes) return "characteristic_classes";
    if (!s.explicit_twist.empty()) return "explicit";
    return "none";
}

Json model_json(const AssembledModel& m) {
    Json tau = Json::array();
    for (const auto& [k, c] : m.tau)
        tau.push_back({{"element", m.hom.algebra->space().name(k)}, {"coefficient", c.str()}});
    Json words = Json::array();
    for (const auto& [w, s] : m.normalized_words) words.push_back({{"word", w}, {"sign", s}});
    return {{"space", m.spec.space.name},
            {"variant", variant_name(m.spec.variant)},
            {"reduced", m.spec.reduced},
            {"max_degree", m.spec.max_degree},
            {"trust_margin", m.spec.trust_margin},
            {"twisting", {{"kind", twisting_kind(m.spec)}, {"tau", tau}, {"normalized_words", words}}},
            {"dims", {{"fiber", m.fiber.algebra->dim()}, {"base", m.base.algebra->dim()}, {"total", m.total.algebra->dim()}}},
            {"checks",
             {{"maurer_cartan", m.mc.ok()},
              {"outer_action", m.outer.ok()},
              {"dg_lie", m.algebra.ok()},
              {"short_exact", m.exactness.ok()},
              {"twist_identity", m.identity.ok}}}};
}

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : std::string(w - s.size(), ' ') + s; }

std::string yes(bool b) { return b ? "yes" : "no"; }

}  // namespace

std::string variant_name(Variant v) { return v == Variant::Full ? "full" : "simplified"; }

DgLiePtr parse_structure(const Json& j) {
    if (j.is_null()) return nullptr;
    auto gens = generators(need(j, "generators", "structure"), "structure.generators");
    if (gens.empty()) return nullptr;
    int top = 1;
    std::map<int, std::vector<std::string>> names;
    for (const auto& [n, d] : gens) {
        top = std::max(top, d);
        names[d].push_back(n);
    }
    auto s = std::make_shared<GradedSpace>(Window(1, top, true, true), names);
    auto g = std::make_shared<DgLie>(s);
    if (j.contains("brackets")) {
        // [[x, y, [[coeff, z], ...]], ...]
        for (const auto& b : j["brackets"]) {
            if (!b.is_array() || b.size() != 3) schema("structure.brackets: an entry is [x, y, terms]");
            std::string x = str(b[0], "structure.brackets"), y = str(b[1], "structure.brackets");
            auto i = s->find(x), k = s->find(y);
            if (!i || !k) throw Error(ErrorKind::UnknownGenerator, "structure.brackets: [" + x + "," + y + "]");
            SparseVec v = pi_terms(*s, b[2], "structure.brackets[" + x + "," + y + "]");
            for (const auto& [e, c] : v)
                if (s->degree_of(e) != s->degree_of(*i) + s->degree_of(*k))
                    throw Error(ErrorKind::DegreeMismatch, "structure.brackets: [" + x + "," + y + "] has a term " +
                                                               s->name(e) + " of the wrong degree");
            g->set_bracket(*i, *k, v);
        }
    }
    if (j.contains("differential")) {
        if (!j["differential"].is_object()) schema("structure.differential: expected an object");
        for (const auto& [x, value] : j["differential"].items()) {
            auto i = s->find(x);
            if (!i) throw Error(ErrorKind::UnknownGenerator, "structure.differential: " + x);
            SparseVec v = pi_terms(*s, value, "structure.differential." + x);
            for (const auto& [e, c] : v)
                if (s->degree_of(e) != s->degree_of(*i) - 1)
                    throw Error(ErrorKind::DegreeMismatch, "structure.differential: d" + x + " has a term " +
                                                               s->name(e) + " of the wrong degree");
            g->set_differential(*i, v);
        }
    }
    return g;
}

ModelSpec parse_document(const std::string& text, bool toml) {
    Json j;
    if (toml) {
        j = from_toml(text);
    } else {
        try {
            j = Json::parse(text);
        } catch (const Json::parse_error& e) {
            throw Error(ErrorKind::ParseError, e.what());
        }
    }
    if (!j.is_object()) schema("the document must be an object");

    ModelSpec spec;
    spec.space = parse_space(need(j, "space", "document"));
    if (j.contains("structure")) spec.pi = parse_structure(j["structure"]);

    if (j.contains("twisting") && !j["twisting"].is_null()) {
        const Json& t = j["twisting"];
        bool cc = t.contains("characteristic_classes"), ex = t.contains("explicit");
        if (cc == ex) schema("twisting: give exactly one of characteristic_classes or explicit");
        if (cc) {
            spec.has_classes = true;
            for (const auto& c : t["characteristic_classes"]) {
                CharacteristicClass k;
                k.name = str(need(c, "name", "characteristic class"), "characteristic class name");
                k.degree = integer(need(c, "degree", k.name), k.name + ".degree");
                k.pi_generator = str(need(c, "pi_generator", k.name), k.name + ".pi_generator");
                const Json& p = need(c, "pairing", k.name);
                if (!p.is_object()) schema(k.name + ".pairing: expected an object");
                for (const auto& [h, v] : p.items()) k.pairing.emplace_back(h, rational(v, k.name + ".pairing." + h));
                spec.classes.push_back(std::move(k));
            }
        } else {
            for (const auto& e : t["explicit"]) {
                if (!e.is_array() || e.size() != 3) schema("twisting.explicit: an entry is [word, element, coefficient]");
                ExplicitTerm term;
                if (!e[0].is_array()) schema("twisting.explicit: a word is a list of free Lie basis names");
                for (const auto& w : e[0]) term.word.push_back(str(w, "twisting.explicit word"));
                term.pi_element = str(e[1], "twisting.explicit element");
                term.coeff = rational(e[2], "twisting.explicit coefficient");
                spec.explicit_twist.push_back(std::move(term));
            }
        }
    }

    bool reduced_given = false;
    if (j.contains("options")) {
        const Json& o = j["options"];
        if (o.contains("max_degree")) spec.max_degree = integer(o["max_degree"], "options.max_degree");
        if (o.contains("variant")) spec.variant = parse_variant(str(o["variant"], "options.variant"));
        if (o.contains("reduced")) {
            if (!o["reduced"].is_boolean()) schema("options.reduced: expected a boolean");
            spec.reduced = o["reduced"].get<bool>();
            reduced_given = true;
        }
        if (o.contains("trust_margin")) spec.trust_margin = integer(o["trust_margin"], "options.trust_margin");
        if (o.contains("allow_nonminimal")) {
            if (!o["allow_nonminimal"].is_boolean()) schema("options.allow_nonminimal: expected a boolean");
            spec.options.allow_nonminimal = o["allow_nonminimal"].get<bool>();
        }
    }
    // the simplified model only exists in the based form
    if (!reduced_given && spec.variant == Variant::Simplified) spec.reduced = true;
    if (spec.max_degree < 1) schema("options.max_degree must be at least 1");
    if (spec.trust_margin < 0) schema("options.trust_margin must be nonnegative");
    return spec;
}

ModelSpec load_document(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    bool toml = path.size() >= 5 && path.compare(path.size() - 5, 5, ".toml") == 0;
    return parse_document(buf.str(), toml);
}

bool ValidationSummary::ok() const {
    for (const auto& [_, r] : checks)
        if (!r.ok()) return false;
    return true;
}

ValidationSummary validate_spec(const ModelSpec& spec) {
    ValidationSummary out;
    LieModel lie(spec.space, spec.window() + 1, spec.options);
    for (const auto& w : lie.warnings()) out.warnings.push_back(w);
    out.checks.emplace_back("L", validate(*lie.as_dglie()));

    if (spec.pi) {
        out.checks.emplace_back("Pi", validate(*spec.pi));
        StructureAlgebra sa = structure_algebra(spec.pi);
        ValidationReport nil;
        for (const auto& [n, r] : sa.nilpotency) {
            ++nil.checks;
            if (!r.nilpotent) nil.defects.push_back({"nilpotency", "degree " + std::to_string(n), "not nilpotent"});
        }
        out.checks.emplace_back("Pi nilpotency", nil);
    }

    AssembledModel m = build_model(spec);
    out.checks.emplace_back("Maurer-Cartan", m.mc);
    out.checks.emplace_back("outer action", m.outer);
    out.checks.emplace_back("model", m.algebra);
    ValidationReport ex;
    ex.defects = m.exactness.defects;
    ex.checks = m.exactness.rows.size();
    out.checks.emplace_back("short exact", ex);
    ValidationReport id;
    id.checks = 1;
    for (const auto& s : m.identity.mismatches) id.defects.push_back({"twist identity", s, ""});
    out.checks.emplace_back("twist identity", id);
    return out;
}

Json to_json(const ValidationSummary& v) {
    Json checks = Json::object();
    for (const auto& [name, r] : v.checks) checks[name] = report_json(r);
    return {{"ok", v.ok()}, {"warnings", v.warnings}, {"checks", checks}};
}

Json to_json(const AssembledModel& m, const HomotopyReport& r) {
    Json rows = Json::array(), homotopy = Json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"n", row.n}, {"total", row.total}, {"fiber", row.fiber}, {"base", row.base}, {"trusted", row.trusted}});
        homotopy.push_back({{"group", "pi_" + std::to_string(row.n + 1)}, {"dim", row.total}, {"trusted", row.trusted}});
    }
    Json j = model_json(m);
    j["homology"] = rows;
    j["rational_homotopy"] = homotopy;
    j["convention"] = "pi_{n+1} = H_n";
    j["trusted"] = {{"lo", r.trusted.first}, {"hi", r.trusted.second}};
    j["next_window"] = r.next_window;
    j["euler_defect"] = r.euler_defect ? Json(*r.euler_defect) : Json(nullptr);
    return j;
}

Json to_json(const AssembledModel& s, const AssembledModel& f, const ComparisonReport& c) {
    Json rows = Json::array();
    for (const auto& row : c.rows)
        rows.push_back({{"n", row.n}, {"simplified", row.simplified}, {"full", row.full}, {"trusted", row.trusted}, {"iso", row.iso}});
    return {{"simplified", model_json(s)},
            {"full", model_json(f)},
            {"morphism", report_json(c.morphism_check)},
            {"homology", rows},
            {"quasi_isomorphism", c.quasi_iso}};
}

std::string to_text(const ValidationSummary& v) {
    std::ostringstream os;
    for (const auto& w : v.warnings) os << "warning: " << w << "\n";
    for (const auto& [name, r] : v.checks) {
        os << std::left << std::setw(16) << name << (r.ok() ? "ok" : "FAILED") << "  (" << r.checks << " checks";
        if (!r.truncated_degrees.empty()) os << ", truncated in " << r.truncated_degrees.size() << " degrees";
        os << ")\n";
        for (const auto& d : r.defects) {
            os << "  " << d.kind << " at " << d.where;
            if (!d.value.empty()) os << ": " << d.value;
            os << "\n";
        }
    }
    os << (v.ok() ? "valid\n" : "invalid\n");
    return os.str();
}

std::string to_text(const AssembledModel& m, const HomotopyReport& r) {
    std::ostringstream os;
    os << "model " << m.spec.space.name << " (" << variant_name(m.spec.variant) << ", "
       << (m.spec.reduced ? "reduced" : "unreduced") << "), max degree " << m.spec.max_degree << "\n";
    os << "twisting: " << twisting_kind(m.spec);
    if (!m.tau.empty()) os << "  tau = " << m.hom.algebra->format(m.tau);
    os << "\n";
    for (const auto& [w, s] : m.normalized_words)
        if (s != 1) os << "  word " << w << " normalized with sign " << s << "\n";
    os << "\n   n  H_n(total)  H_n(fiber)  H_n(base)  trusted\n";
    for (const auto& row : r.rows)
        os << pad(std::to_string(row.n), 4) << pad(std::to_string(row.total), 12) << pad(std::to_string(row.fiber), 12)
           << pad(std::to_string(row.base), 11) << "  " << yes(row.trusted) << "\n";
    os << "\nrational homotopy (pi_{n+1} = H_n):\n";
    bool any = false;
    for (const auto& row : r.rows) {
        if (row.total == 0 || !row.trusted) continue;
        any = true;
        os << "  pi_" << row.n + 1 << " (x) Q = Q";
        if (row.total > 1) os << "^" << row.total;
        os << "\n";
    }
    if (!any) os << "  zero in all trusted degrees\n";
    if (r.trusted.first <= r.trusted.second)
        os << "trusted degrees: " << r.trusted.first << ".." << r.trusted.second << "\n";
    else
        os << "trusted degrees: none\n";
    os << "next window: --max-degree " << r.next_window << "\n";
    if (r.euler_defect) os << "euler defect: " << *r.euler_defect << "\n";
    os << "checks: MC " << yes(m.mc.ok()) << ", outer action " << yes(m.outer.ok()) << ", dg Lie "
       << yes(m.algebra.ok()) << ", short exact " << yes(m.exactness.ok()) << ", twist identity "
       << yes(m.identity.ok) << "\n";
    return os.str();
}

std::string to_text(const AssembledModel& s, const AssembledModel& f, const ComparisonReport& c) {
    std::ostringstream os;
    os << "compare " << s.spec.space.name << ": simplified (dim " << s.total.algebra->dim() << ") vs full reduced (dim "
       << f.total.algebra->dim() << "), max degree " << s.spec.max_degree << "\n";
    os << "   n  simplified  full  trusted  iso\n";
    for (const auto& row : c.rows)
        os << pad(std::to_string(row.n), 4) << pad(std::to_string(row.simplified), 12) << pad(std::to_string(row.full), 6)
           << pad(yes(row.trusted), 9) << pad(row.trusted ? yes(row.iso) : "-", 5) << "\n";
    os << "dg Lie morphism: " << yes(c.morphism_check.ok()) << "\n";
    for (const auto& d : c.morphism_check.defects) os << "  " << d.kind << " at " << d.where << ": " << d.value << "\n";
    os << "quasi-isomorphism: " << yes(c.quasi_iso) << "\n";
    return os.str();
}

}  // namespace bautlab
