#include "bautlab/models.hpp"

#include <algorithm>

#include "bautlab/error.hpp"
#include "bautlab/parallel.hpp"

namespace bautlab {

namespace {

DgLiePtr pi_or_zero(const DgLiePtr& pi) {
    if (pi) return pi;
    return std::make_shared<DgLie>(std::make_shared<GradedSpace>(Window(1, 1, true, true),
                                                                 std::map<int, std::vector<std::string>>{}));
}

int max_gen_degree(const QuillenModel& q) {
    int m = 1;
    for (const auto& g : q.generators) m = std::max(m, g.degree);
    return m;
}

std::shared_ptr<const LieModel> make_lie(const ModelSpec& spec, int pi_top) {
    int need = std::max(max_gen_degree(spec.space) + spec.window(), pi_top + 1);
    return std::make_shared<LieModel>(spec.space, need, spec.options);
}

ValidationReport mc_report(const ConvolutionLie& h, const McDefect& d) {
    ValidationReport r;
    r.checks = h.coalgebra->dim();
    for (const auto& [w, v] : d.values) r.defects.push_back({"mc", h.coalgebra->space->name(w), h.pi.algebra->format(v)});
    return r;
}

// Everything after the Hom action on Hom^tau is known.
void finish(AssembledModel& m, const HomAction& tw) {
    m.fiber = connected_cover(m.hom_tau, 0);
    m.action = restrict_action(tw.action, m.fiber);
    m.outer = validate_outer_action(m.action);
    if (!m.outer.ok()) {
        const Defect& d = m.outer.defects.front();
        throw Error(ErrorKind::InvalidOuterAction, d.kind + " at " + d.where + ": " + d.value);
    }
    m.total = twisted_semidirect(m.action, false);
    m.algebra = validate(*m.total.algebra);
    m.algebra.merge(validate(*m.hom_tau));
    m.exactness = short_exact_check(m.total.inclusion, m.total.projection);
    HomAction un = hom_outer_action(m.hom, m.hom.algebra, tw.action.g, tw.chi, SparseVec());
    m.identity = twist_identity_check(m.hom, un.action, tw.action, m.tau);
}

std::optional<std::size_t> find_homology_element(const GradedSpace& hv, const std::string& name) {
    if (auto k = hv.find(name)) return k;
    return hv.find("s" + name);
}

}  // namespace

bool Rho::zero() const {
    return std::all_of(values.begin(), values.end(), [](const SparseVec& v) { return v.empty(); });
}

Rho char_class_rho(const std::vector<CharacteristicClass>& classes, const LieModel& model, const DgLie& pi) {
    Rho out;
    auto hv = std::make_shared<Coalgebra>(suspended_indecomposables(model.lie()));
    out.hv = hv;
    out.values.assign(hv->dim(), SparseVec());
    for (const auto& cc : classes) {
        auto p = pi.space().find(cc.pi_generator);
        if (!p) throw Error(ErrorKind::UnknownGenerator, "class " + cc.name + ": no structure generator " + cc.pi_generator);
        if (pi.degree(*p) != cc.degree - 1)
            throw Error(ErrorKind::DegreeMismatch, "class " + cc.name + " of degree " + std::to_string(cc.degree) +
                                                       " pairs with " + cc.pi_generator + " of degree " +
                                                       std::to_string(pi.degree(*p)) + ", expected " +
                                                       std::to_string(cc.degree - 1));
        for (const auto& [name, value] : cc.pairing) {
            auto e = find_homology_element(*hv->space, name);
            if (!e) throw Error(ErrorKind::UnknownGenerator, "class " + cc.name + ": no homology element " + name);
            if (hv->degree(*e) != cc.degree)
                throw Error(ErrorKind::DegreeMismatch, "class " + cc.name + " of degree " + std::to_string(cc.degree) +
                                                           " paired with " + hv->space->name(*e) + " of degree " +
                                                           std::to_string(hv->degree(*e)));
            out.values[*e].add(*p, value);
        }
    }
    return out;
}

bool AssembledModel::ok() const {
    return mc.ok() && outer.ok() && algebra.ok() && exactness.ok() && identity.ok;
}

AssembledModel full_model(const ModelSpec& spec) {
    AssembledModel m;
    m.spec = spec;
    DgLiePtr pi = pi_or_zero(spec.pi);
    StructureAlgebra sa = structure_algebra(pi);
    m.lie = make_lie(spec, sa.top);
    const int W = spec.window();

    auto ce = std::make_shared<CeComplex>(m.lie, sa.top + 2, spec.reduced);
    m.ce = ce;
    m.chains = std::make_shared<Coalgebra>(ce->coalgebra());
    m.hom = convolution_dgla(m.chains, sa, -1);
    m.der = spec.reduced ? der_algebra(*m.lie, W) : der_semidirect(*m.lie, W);

    if (spec.has_classes) {
        Rho rho = char_class_rho(spec.classes, *m.lie, *pi);
        IndecomposableMap g = indec_projection(*ce);
        std::vector<SparseVec> f(ce->dim());
        for (std::size_t w = 0; w < ce->dim(); ++w)
            for (const auto& [v, c] : g.images[w]) f[w].axpy(c, rho.values[v]);
        m.tau = m.hom.from_function(f);
    } else {
        const FreeLie& L = m.lie->lie();
        for (const auto& t : spec.explicit_twist) {
            std::vector<std::size_t> factors;
            std::string label;
            for (const auto& name : t.word) {
                auto k = L.space().find(name);
                if (!k) throw Error(ErrorKind::UnknownGenerator, "twisting word: no free Lie basis element " + name);
                factors.push_back(*k);
            }
            auto p = pi->space().find(t.pi_element);
            if (!p) throw Error(ErrorKind::UnknownGenerator, "twisting: no structure element " + t.pi_element);
            auto nw = ce->normalize(factors);
            for (std::size_t i = 0; i < t.word.size(); ++i) label += (i ? "^s" : "s") + t.word[i];
            if (!nw) {
                m.normalized_words.emplace_back(label, 0);
                continue;
            }
            m.normalized_words.emplace_back(ce->space().name(nw->first), nw->second);
            int deg = pi->degree(*p) - ce->degree(nw->first);
            if (deg != -1)
                throw Error(ErrorKind::DegreeMismatch, "twisting term " + label + " -> " + t.pi_element +
                                                           " has degree " + std::to_string(deg) + ", expected -1");
            auto k = m.hom.find(nw->first, *p);
            if (!k) throw Error(ErrorKind::WindowTooSmall, "twisting term " + label + " outside the window");
            m.tau.add(*k, t.coeff * Rational(nw->second));
        }
    }
    McDefect def = is_mc(m.hom, m.tau);
    m.mc = mc_report(m.hom, def);
    m.hom_tau = twist_by(m.hom, m.tau);

    m.base = connected_cover(m.der.algebra, 1);
    HomAction tw = hom_outer_action(m.hom, m.hom_tau, *ce, m.der, m.base.inclusion, m.tau);
    finish(m, tw);
    return m;
}

AssembledModel simplified_model(const ModelSpec& spec) {
    if (!spec.reduced)
        throw Error(ErrorKind::SpecMismatch, "the simplified model is the based (reduced) variant");
    if (!spec.has_classes)
        throw Error(ErrorKind::SpecMismatch, "the simplified model needs characteristic-class twisting");
    DgLiePtr pi = pi_or_zero(spec.pi);
    if (!pi->is_abelian())
        throw Error(ErrorKind::NonAbelianStructure, "the simplified model needs an abelian structure algebra");

    AssembledModel m;
    m.spec = spec;
    StructureAlgebra sa = structure_algebra(pi);
    m.lie = make_lie(spec, sa.top);
    if (!m.lie->minimal())
        throw Error(ErrorKind::NotMinimal, "the simplified model needs a minimal Quillen model");
    const int W = spec.window();
    Rho rho = char_class_rho(spec.classes, *m.lie, *pi);
    m.chains = rho.hv;
    m.hom = convolution_dgla(m.chains, sa, -1);
    m.tau = m.hom.from_function(rho.values);
    m.mc = mc_report(m.hom, is_mc(m.hom, m.tau));
    m.hom_tau = twist_by(m.hom, m.tau);
    m.der = der_algebra(*m.lie, W);
    m.base = connected_cover(m.der.algebra, 1);

    // Der L acts on sV through its linear part: s v -> (-1)^|theta| s (theta v mod [L,L])
    const FreeLie& L = m.lie->lie();
    const GradedSpace& hv = *m.chains->space;
    const auto& gens = L.generators();
    std::vector<std::size_t> sv_of(L.dim(), static_cast<std::size_t>(-1));
    std::vector<std::size_t> sv_gen(gens.size());
    for (std::size_t k = 0; k < gens.size(); ++k) {
        sv_gen[k] = *hv.find("s" + gens[k].name);
        sv_of[L.generator_index(k)] = sv_gen[k];
    }
    const DgLie& g = *m.base.algebra;
    std::vector<CoderivationImage> chi(g.dim());
    parallel_for(g.dim(), [&](std::size_t x) {
        CoderivationImage& c = chi[x];
        c.degree = g.degree(x);
        c.images.assign(hv.total_dim(), SparseVec());
        const SparseVec& element = m.base.inclusion.images[x];
        Rational sign(parity_sign(c.degree));
        for (std::size_t k = 0; k < gens.size(); ++k) {
            SparseVec v = m.der.apply(element, SparseVec::unit(L.generator_index(k)));
            for (const auto& [j, a] : v)
                if (sv_of[j] != static_cast<std::size_t>(-1)) c.images[sv_gen[k]].add(sv_of[j], sign * a);
        }
    });
    HomAction tw = hom_outer_action(m.hom, m.hom_tau, m.base.algebra, std::move(chi), m.tau);
    finish(m, tw);
    return m;
}

AssembledModel build_model(const ModelSpec& spec) {
    return spec.variant == Variant::Simplified ? simplified_model(spec) : full_model(spec);
}

// ------------------------------------------------------------ comparison

namespace {

bool same_input(const QuillenModel& a, const QuillenModel& b) {
    if (a.name != b.name || a.generators.size() != b.generators.size()) return false;
    for (std::size_t i = 0; i < a.generators.size(); ++i)
        if (a.generators[i].name != b.generators[i].name || a.generators[i].degree != b.generators[i].degree)
            return false;
    return true;
}

// Does f induce an isomorphism H_n(S) -> H_n(F)?
bool induces_iso(const DgLie& S, const DgLie& F, const DgLieMorphism& f, int n, std::size_t hs, std::size_t hf) {
    if (hs != hf) return false;
    auto zs = exactla::kernel(S.d_block(n)).vectors;
    const GradedSpace& fs = F.space();
    RationalMatrix bf = F.window().contains(n + 1) ? F.d_block(n + 1) : RationalMatrix(fs.dim(n), 0);
    RationalMatrix both(fs.dim(n), zs.size() + bf.cols());
    for (std::size_t k = 0; k < zs.size(); ++k)
        both.set_column(k, fs.restrict_to(f.apply(S.space().lift(zs[k], n)), n));
    for (std::size_t k = 0; k < bf.cols(); ++k) both.set_column(zs.size() + k, bf.column(k));
    return exactla::rank(both) - exactla::rank(bf) == hs;
}

}  // namespace

ComparisonReport comparison_morphism(const AssembledModel& S, const AssembledModel& F) {
    if (S.spec.variant != Variant::Simplified || F.spec.variant != Variant::Full)
        throw Error(ErrorKind::SpecMismatch, "compare a simplified model with a full model");
    if (!F.spec.reduced || !F.ce)
        throw Error(ErrorKind::SpecMismatch, "the comparison targets the reduced (based) full model");
    if (!same_input(S.spec.space, F.spec.space))
        throw Error(ErrorKind::SpecMismatch, "models are built from different spaces");
    if (S.spec.window() != F.spec.window() || S.spec.max_degree != F.spec.max_degree)
        throw Error(ErrorKind::SpecMismatch, "models are built in different windows");
    if (S.base.algebra->space() != F.base.algebra->space())
        throw Error(ErrorKind::SpecMismatch, "the derivation parts differ");

    IndecomposableMap gl = indec_projection(*F.ce);
    if (gl.target.space->total_dim() != S.chains->space->total_dim() || *gl.target.space != *S.chains->space)
        throw Error(ErrorKind::SpecMismatch, "indecomposables differ");
    // g*(e_{v,p}) = sum_w g_L(w)_v e_{w,p}
    std::vector<std::vector<std::pair<std::size_t, Rational>>> gT(S.chains->dim());
    for (std::size_t w = 0; w < gl.images.size(); ++w)
        for (const auto& [v, c] : gl.images[w]) gT[v].emplace_back(w, c);
    auto gstar = [&](const SparseVec& f) {
        SparseVec out;
        for (const auto& [i, c] : f) {
            auto [v, p] = S.hom.pairs[i];
            for (const auto& [w, x] : gT[v]) {
                auto k = F.hom.find(w, p);
                if (!k) throw Error(ErrorKind::WindowTooSmall, "g* leaves the Hom window");
                out.add(*k, c * x);
            }
        }
        return out;
    };

    const DgLie& st = *S.total.algebra;
    std::vector<SparseVec> images(st.dim());
    for (std::size_t a = 0; a < S.fiber.algebra->dim(); ++a) {
        SparseVec v = F.fiber.restrict(gstar(S.fiber.inclusion.images[a]));
        SparseVec out;
        for (const auto& [k, c] : v) out.add(F.total.from_target[k], c);
        images[S.total.from_target[a]] = std::move(out);
    }
    for (std::size_t x = 0; x < S.base.algebra->dim(); ++x)
        if (S.total.from_g[x] != static_cast<std::size_t>(-1))
            images[S.total.from_g[x]] = SparseVec::unit(F.total.from_g[x]);

    ComparisonReport rep;
    rep.morphism = DgLieMorphism{S.total.algebra, F.total.algebra, std::move(images)};
    rep.morphism_check = rep.morphism.check();
    HomologyReport hs = homology(st), hf = homology(*F.total.algebra);
    rep.quasi_iso = rep.morphism_check.ok();
    for (int n = std::min(st.window().lo, F.total.algebra->window().lo); n <= S.spec.max_degree; ++n) {
        HomologyComparison row{n, hs.dim(n), hf.dim(n), hs.is_trusted(n) && hf.is_trusted(n), false};
        if (row.trusted) {
            row.iso = induces_iso(st, *F.total.algebra, rep.morphism, n, row.simplified, row.full);
            rep.quasi_iso = rep.quasi_iso && row.iso;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

// ----------------------------------------------------------------- report

HomotopyReport rational_homotopy_report(const AssembledModel& m) {
    HomotopyReport rep;
    rep.name = m.spec.space.name;
    rep.max_degree = m.spec.max_degree;
    HomologyReport ht = homology(*m.total.algebra);
    HomologyReport hf = homology(*m.fiber.algebra);
    HomologyReport hb = homology(*m.base.algebra);
    rep.trusted = ht.trusted_range();
    int lo = std::max(0, m.total.algebra->window().lo);
    for (int n = lo; n <= m.spec.max_degree; ++n)
        rep.rows.push_back({n, ht.dim(n), hf.dim(n), hb.dim(n), ht.is_trusted(n)});
    // trusting degree t needs chains in degree t + 1 = max_degree + margin
    rep.next_window = rep.trusted.second + 2 - m.spec.trust_margin;

    bool all_trusted = std::all_of(rep.rows.begin(), rep.rows.end(), [](const HomotopyRow& r) { return r.trusted; });
    auto vanish = [](const HomotopyRow& r) { return r.total == 0 && r.fiber == 0 && r.base == 0; };
    if (all_trusted && !rep.rows.empty() && vanish(rep.rows.back())) {
        long long s = 0;
        for (const auto& r : rep.rows)
            s += parity_sign(r.n) * (static_cast<long long>(r.total) - static_cast<long long>(r.fiber) -
                                     static_cast<long long>(r.base));
        rep.euler_defect = s;
    }
    return rep;
}

}  // namespace bautlab
