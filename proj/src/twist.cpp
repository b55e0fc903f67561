#include "bautlab/twist.hpp"

#include <algorithm>
#include <climits>

#include "bautlab/error.hpp"
#include "bautlab/parallel.hpp"

namespace bautlab {

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

// Is the object known in degree m: inside the window, or beyond a closed end.
bool known(const Window& w, int m) {
    return w.contains(m) || (m > w.hi && w.closed_above) || (m < w.lo && w.closed_below);
}

long long sgn(long long e) { return parity_sign(e); }

std::string pair_name(const GradedSpace& s, std::size_t i, std::size_t j) { return s.name(i) + "," + s.name(j); }

}  // namespace

// ------------------------------------------------------------- structure algebra

StructureAlgebra structure_algebra(DgLiePtr pi) {
    const GradedSpace& s = pi->space();
    const Window& w = s.window();
    if (!w.closed_above)
        throw Error(ErrorKind::UnboundedStructureAlgebra,
                    "the structure algebra must be bounded; truncate it by hand to a finite window closed above");
    StructureAlgebra out;
    out.algebra = pi;
    for (std::size_t i = 0; i < s.total_dim(); ++i) {
        int n = s.degree_of(i);
        if (n < 1)
            throw Error(ErrorKind::InvalidStructure, "structure algebra must be connected (basis element " +
                                                         s.name(i) + " in degree " + std::to_string(n) + ")");
        out.top = std::max(out.top, n);
    }
    for (int n = 1; n <= out.top; ++n) out.nilpotency[n] = lcs_class(*pi, n, n + 1);
    return out;
}

// --------------------------------------------------------------- convolution

std::optional<std::size_t> ConvolutionLie::find(std::size_t c, std::size_t p) const {
    std::size_t k = c * pi_dim + p;
    if (k >= table.size() || table[k] == npos) return std::nullopt;
    return table[k];
}

std::vector<SparseVec> ConvolutionLie::to_function(const SparseVec& f) const {
    std::vector<SparseVec> out(coalgebra->dim());
    for (const auto& [i, x] : f) out[pairs[i].first].add(pairs[i].second, x);
    return out;
}

SparseVec ConvolutionLie::from_function(const std::vector<SparseVec>& values) const {
    SparseVec out;
    for (std::size_t c = 0; c < values.size(); ++c)
        for (const auto& [p, x] : values[c]) {
            auto k = find(c, p);
            if (!k)
                throw Error(ErrorKind::WindowTooSmall, "no Hom basis element " + coalgebra->space->name(c) + "->" +
                                                           pi.algebra->space().name(p) + " in the window");
            out.add(*k, x);
        }
    return out;
}

ConvolutionLie convolution_dgla(std::shared_ptr<const Coalgebra> cp, const StructureAlgebra& pi, int lo) {
    const Coalgebra& c = *cp;
    const DgLie& P = *pi.algebra;
    const GradedSpace& cs = *c.space;
    const GradedSpace& ps = P.space();
    const Window& cw = cs.window();
    const int top = std::max(pi.top, lo);
    if (pi.top > 0 && cw.hi < pi.top - lo && !cw.closed_above)
        throw Error(ErrorKind::WindowTooSmall, "Hom(C, Pi) down to degree " + std::to_string(lo) +
                                                   " needs C up to degree " + std::to_string(pi.top - lo));

    ConvolutionLie h;
    h.coalgebra = cp;
    h.pi = pi;
    h.pi_dim = P.dim();
    h.table.assign(c.dim() * h.pi_dim, npos);

    std::map<int, std::vector<std::string>> names;
    for (int n = lo; n <= top; ++n) {
        auto& nm = names[n];
        for (int k = cw.lo; k <= cw.hi; ++k) {
            int m = k + n;
            if (!ps.window().contains(m) || ps.dim(m) == 0) continue;
            for (std::size_t ci = 0; ci < cs.dim(k); ++ci)
                for (std::size_t pj = 0; pj < ps.dim(m); ++pj) {
                    std::size_t cg = cs.global(k, ci), pg = ps.global(m, pj);
                    h.table[cg * h.pi_dim + pg] = h.pairs.size();
                    h.pairs.emplace_back(cg, pg);
                    nm.push_back(cs.name(cg) + "->" + ps.name(pg));
                }
        }
    }
    int pi_lo = INT_MAX;
    for (std::size_t p = 0; p < P.dim(); ++p) pi_lo = std::min(pi_lo, P.degree(p));
    bool closed_below = P.dim() == 0 || (cw.closed_above && cw.hi <= pi_lo - lo);
    auto space = std::make_shared<GradedSpace>(Window(lo, top, closed_below, true), names);
    h.algebra = std::make_shared<DgLie>(space);
    DgLie& H = *h.algebra;
    const std::size_t n = h.pairs.size();

    // d e_{c,p} = sum e_{c,dp} - (-1)^n sum_w (dw)_c e_{w,p}
    std::vector<std::vector<std::pair<std::size_t, Rational>>> dT(c.dim());
    for (std::size_t w = 0; w < c.dim(); ++w)
        for (const auto& [k, x] : c.d[w]) dT[k].emplace_back(w, x);
    std::vector<SparseVec> diffs(n);
    parallel_for(n, [&](std::size_t i) {
        auto [ci, pi_] = h.pairs[i];
        int deg = space->degree_of(i);
        if (!space->window().contains(deg - 1)) return;
        SparseVec v;
        for (const auto& [q, x] : P.differential(pi_))
            if (auto k = h.find(ci, q)) v.add(*k, x);
        Rational s(-sgn(deg));
        for (const auto& [w, x] : dT[ci])
            if (auto k = h.find(w, pi_)) v.add(*k, s * x);
        diffs[i] = std::move(v);
    });
    for (std::size_t i = 0; i < n; ++i) H.set_differential(i, std::move(diffs[i]));

    if (P.is_abelian()) return h;

    // [e_{a,p}, e_{b,q}] = sum over terms eps a (x) b of Delta w: eps (-1)^{|e_bq||a|} e_{w,[p,q]}
    struct Term {
        std::size_t w, right;
        Rational coeff;
    };
    std::vector<std::vector<Term>> by_left(c.dim());
    for (std::size_t w = 0; w < c.dim(); ++w)
        for (const auto& t : c.coproduct[w]) by_left[t.left].push_back({w, t.right, t.coeff});
    std::vector<std::vector<std::size_t>> pi_of(c.dim());
    for (std::size_t i = 0; i < n; ++i) pi_of[h.pairs[i].first].push_back(i);

    std::vector<std::map<std::size_t, SparseVec>> rows(n);
    parallel_for(n, [&](std::size_t i) {
        auto [a, p] = h.pairs[i];
        int deg_i = space->degree_of(i);
        for (const auto& t : by_left[a])
            for (std::size_t j : pi_of[t.right]) {
                if (j < i) continue;
                int deg_j = space->degree_of(j);
                if (!space->window().contains(deg_i + deg_j)) continue;
                SparseVec pq = P.bracket(p, h.pairs[j].second);
                if (pq.empty()) continue;
                Rational s = t.coeff * Rational(sgn(static_cast<long long>(deg_j) * cs.degree_of(a)));
                SparseVec& out = rows[i][j];
                for (const auto& [r, x] : pq) {
                    auto k = h.find(t.w, r);
                    if (!k) throw Error(ErrorKind::WindowTooSmall, "convolution bracket leaves the coalgebra window");
                    out.add(*k, s * x);
                }
            }
    });
    for (std::size_t i = 0; i < n; ++i)
        for (auto& [j, v] : rows[i])
            if (!v.empty()) H.set_bracket(i, j, std::move(v));
    return h;
}

McDefect is_mc(const ConvolutionLie& h, const SparseVec& tau) {
    const DgLie& H = *h.algebra;
    for (const auto& [i, x] : tau)
        if (H.degree(i) != -1) throw Error(ErrorKind::DegreeMismatch, "twisting functions have degree -1");
    const DgLie& P = *h.pi.algebra;
    auto f = h.to_function(tau);
    McDefect out = mc_defect(
        *h.coalgebra, f, -1, [&](const SparseVec& a, const SparseVec& b) { return P.bracket(a, b); },
        [&](const SparseVec& a) { return P.d(a); }, INT_MAX / 2);
    // the defect lives on words of degree <= top + 2
    const Window& cw = h.coalgebra->space->window();
    if (!cw.closed_above)
        for (int n = cw.hi + 1; n <= h.pi.top + 2; ++n) ++out.skipped;
    return out;
}

std::shared_ptr<DgLie> twist_dglie(const DgLie& g, const SparseVec& m) {
    auto out = std::make_shared<DgLie>(g);
    std::vector<SparseVec> diffs(g.dim());
    parallel_for(g.dim(), [&](std::size_t i) {
        SparseVec v = g.differential(i);
        if (g.window().contains(g.degree(i) - 1)) v += g.bracket(m, SparseVec::unit(i));
        diffs[i] = std::move(v);
    });
    for (std::size_t i = 0; i < g.dim(); ++i) out->set_differential(i, std::move(diffs[i]));
    return out;
}

std::shared_ptr<DgLie> twist_by(const ConvolutionLie& h, const SparseVec& tau) {
    McDefect def = is_mc(h, tau);
    if (!def.zero()) {
        const auto& [w, v] = def.values.front();
        throw Error(ErrorKind::NotMaurerCartan, "defect on " + h.coalgebra->space->name(w) + ": " +
                                                    h.pi.algebra->format(v));
    }
    if (def.skipped)
        throw Error(ErrorKind::WindowTooSmall, "the Maurer-Cartan equation cannot be checked in this window");
    return twist_dglie(*h.algebra, tau);
}

// ------------------------------------------------------------- outer actions

OuterAction::OuterAction(DgLiePtr g_, DgLiePtr target_) : g(std::move(g_)), target(std::move(target_)) {
    action.resize(target->dim());
    xi.resize(g->dim());
}

SparseVec OuterAction::right(std::size_t a, std::size_t x) const {
    auto it = action[a].find(x);
    return it == action[a].end() ? SparseVec() : it->second;
}

SparseVec OuterAction::left(std::size_t x, std::size_t a) const {
    SparseVec v = right(a, x);
    if (!v.empty()) v.scale(Rational(-sgn(static_cast<long long>(target->degree(a)) * g->degree(x))));
    return v;
}

SparseVec OuterAction::right(const SparseVec& a, const SparseVec& x) const {
    SparseVec out;
    for (const auto& [i, c] : a)
        for (const auto& [j, e] : x)
            if (auto it = action[i].find(j); it != action[i].end()) out.axpy(c * e, it->second);
    return out;
}

SparseVec OuterAction::left(const SparseVec& x, const SparseVec& a) const {
    SparseVec out;
    for (const auto& [j, e] : x)
        for (const auto& [i, c] : a) out.axpy(c * e, left(j, i));
    return out;
}

SparseVec OuterAction::xi_of(const SparseVec& x) const {
    SparseVec out;
    for (const auto& [j, e] : x) out.axpy(e, xi[j]);
    return out;
}

ValidationReport validate_outer_action(const OuterAction& A) {
    const DgLie& g = *A.g;
    const DgLie& L = *A.target;
    const Window& gw = g.window();
    const Window& lw = L.window();
    const std::size_t ng = g.dim(), nl = L.dim();

    struct Local {
        std::vector<Defect> defects;
        std::set<int> truncated;
        std::size_t checks = 0;
    };
    auto merge = [](ValidationReport& r, std::vector<Local>& parts) {
        for (auto& p : parts) {
            for (auto& d : p.defects) r.defects.push_back(std::move(d));
            r.truncated_degrees.insert(p.truncated.begin(), p.truncated.end());
            r.checks += p.checks;
        }
    };
    auto report = [&](Local& loc, const char* kind, std::string where, const SparseVec& v) {
        loc.defects.push_back({kind, std::move(where), L.format(v)});
    };
    // Returns true when degree m of L can be compared; records truncation otherwise.
    auto usable = [&](Local& loc, int m) {
        if (lw.contains(m)) return true;
        if (!known(lw, m)) loc.truncated.insert(m);
        return false;
    };

    ValidationReport rep;

    // [x,y].a = x.(y.a) - (-1)^{|x||y|} y.(x.a)
    {
        std::vector<Local> parts(nl);
        parallel_for(nl, [&](std::size_t a) {
            Local& loc = parts[a];
            SparseVec ua = SparseVec::unit(a);
            for (std::size_t x = 0; x < ng; ++x)
                for (std::size_t y = x; y < ng; ++y) {
                    int dx = g.degree(x), dy = g.degree(y), da = L.degree(a);
                    int m = dx + dy + da;
                    if (!usable(loc, m)) continue;
                    if (!known(gw, dx + dy) || !known(lw, dx + da) || !known(lw, dy + da)) {
                        loc.truncated.insert(m);
                        continue;
                    }
                    SparseVec ux = SparseVec::unit(x), uy = SparseVec::unit(y);
                    SparseVec lhs = A.left(g.bracket(x, y), ua);
                    SparseVec rhs = A.left(ux, A.left(uy, ua));
                    rhs.axpy(Rational(-sgn(static_cast<long long>(dx) * dy)), A.left(uy, A.left(ux, ua)));
                    ++loc.checks;
                    if (lhs != rhs)
                        report(loc, "action", "[" + pair_name(g.space(), x, y) + "]." + L.space().name(a), lhs - rhs);
                }
        });
        merge(rep, parts);
    }

    // x.[a,b] = [x.a,b] + (-1)^{|x||a|} [a,x.b]
    if (!L.is_abelian()) {
        std::vector<Local> parts(ng);
        parallel_for(ng, [&](std::size_t x) {
            Local& loc = parts[x];
            SparseVec ux = SparseVec::unit(x);
            int dx = g.degree(x);
            for (std::size_t a = 0; a < nl; ++a)
                for (std::size_t b = a; b < nl; ++b) {
                    int da = L.degree(a), db = L.degree(b);
                    int m = dx + da + db;
                    if (!usable(loc, m)) continue;
                    if (!known(lw, da + db) || !known(lw, dx + da) || !known(lw, dx + db)) {
                        loc.truncated.insert(m);
                        continue;
                    }
                    SparseVec ua = SparseVec::unit(a), ub = SparseVec::unit(b);
                    SparseVec lhs = A.left(ux, L.bracket(a, b));
                    SparseVec rhs = L.bracket(A.left(ux, ua), ub);
                    rhs.axpy(Rational(sgn(static_cast<long long>(dx) * da)), L.bracket(ua, A.left(ux, ub)));
                    ++loc.checks;
                    if (lhs != rhs)
                        report(loc, "derivation", g.space().name(x) + ".[" + pair_name(L.space(), a, b) + "]",
                               lhs - rhs);
                }
        });
        merge(rep, parts);
    }

    // d xi(x) = -xi(dx),  xi[x,y] = xi(x).y + (-1)^|x| x.xi(y)
    {
        std::vector<Local> parts(ng);
        parallel_for(ng, [&](std::size_t x) {
            Local& loc = parts[x];
            int dx = g.degree(x);
            SparseVec ux = SparseVec::unit(x);
            if (usable(loc, dx - 2)) {
                if (!known(gw, dx - 1)) {
                    loc.truncated.insert(dx - 2);
                } else {
                    SparseVec v = L.d(A.xi[x]) + A.xi_of(g.differential(x));
                    ++loc.checks;
                    if (!v.empty()) report(loc, "xi-chain", g.space().name(x), v);
                }
            }
            for (std::size_t y = x; y < ng; ++y) {
                int dy = g.degree(y);
                int m = dx + dy - 1;
                if (!usable(loc, m)) continue;
                if (!known(gw, dx + dy)) {
                    loc.truncated.insert(m);
                    continue;
                }
                SparseVec lhs = A.xi_of(g.bracket(x, y));
                SparseVec rhs = A.right(A.xi[x], SparseVec::unit(y));
                rhs.axpy(Rational(sgn(dx)), A.left(ux, A.xi[y]));
                ++loc.checks;
                if (lhs != rhs) report(loc, "xi-derivation", "[" + pair_name(g.space(), x, y) + "]", lhs - rhs);
            }
        });
        merge(rep, parts);
    }

    // d(x.a) = dx.a + (-1)^|x| x.da + [xi(x), a]
    {
        std::vector<Local> parts(ng);
        parallel_for(ng, [&](std::size_t x) {
            Local& loc = parts[x];
            int dx = g.degree(x);
            SparseVec ux = SparseVec::unit(x);
            for (std::size_t a = 0; a < nl; ++a) {
                int da = L.degree(a);
                int m = dx + da - 1;
                if (!usable(loc, m)) continue;
                if (!known(lw, dx + da) || !known(gw, dx - 1) || !known(lw, da - 1)) {
                    loc.truncated.insert(m);
                    continue;
                }
                SparseVec ua = SparseVec::unit(a);
                SparseVec lhs = L.d(A.left(ux, ua));
                SparseVec rhs = A.left(g.differential(x), ua);
                rhs.axpy(Rational(sgn(dx)), A.left(ux, L.differential(a)));
                rhs += L.bracket(A.xi[x], ua);
                ++loc.checks;
                if (lhs != rhs) report(loc, "mixed", g.space().name(x) + "." + L.space().name(a), lhs - rhs);
            }
        });
        merge(rep, parts);
    }
    return rep;
}

// ------------------------------------------------------ twisted semi-direct

TwistedProduct twisted_semidirect(const OuterAction& A, bool check) {
    if (check) {
        ValidationReport r = validate_outer_action(A);
        if (!r.ok())
            throw Error(ErrorKind::InvalidOuterAction,
                        r.defects.front().kind + " at " + r.defects.front().where + ": " + r.defects.front().value);
    }
    const DgLie& g = *A.g;
    const DgLie& L = *A.target;
    const GradedSpace& gs = g.space();
    const GradedSpace& ls = L.space();
    const Window& gw = gs.window();
    const Window& lw = ls.window();

    // a degree is kept only where both summands are known
    int lo = std::min(lw.lo, gw.lo), hi = std::max(lw.hi, gw.hi);
    if (!lw.closed_below) lo = std::max(lo, lw.lo);
    if (!gw.closed_below) lo = std::max(lo, gw.lo);
    if (!lw.closed_above) hi = std::min(hi, lw.hi);
    if (!gw.closed_above) hi = std::min(hi, gw.hi);
    Window w(lo, hi, lw.closed_below && gw.closed_below, lw.closed_above && gw.closed_above);

    std::map<int, std::vector<std::string>> names;
    std::set<std::string> used;
    for (int n = lo; n <= hi; ++n) {
        names[n];
        if (lw.contains(n))
            for (const auto& s : ls.names(n)) {
                names[n].push_back(s);
                used.insert(s);
            }
    }
    for (int n = lo; n <= hi; ++n)
        if (gw.contains(n))
            for (std::string s : gs.names(n)) {
                while (used.count(s)) s += "'";
                used.insert(s);
                names[n].push_back(s);
            }
    auto space = std::make_shared<GradedSpace>(w, names);

    TwistedProduct out;
    out.from_target.assign(L.dim(), npos);
    out.from_g.assign(g.dim(), npos);
    for (int n = lo; n <= hi; ++n) {
        std::size_t k = 0;
        if (lw.contains(n))
            for (; k < ls.dim(n); ++k) out.from_target[ls.global(n, k)] = space->global(n, k);
        if (gw.contains(n))
            for (std::size_t j = 0; j < gs.dim(n); ++j) out.from_g[gs.global(n, j)] = space->global(n, k + j);
    }
    const std::size_t N = space->total_dim();
    std::vector<char> is_g(N, 0);
    std::vector<std::size_t> back(N, npos);
    for (std::size_t a = 0; a < L.dim(); ++a)
        if (out.from_target[a] != npos) back[out.from_target[a]] = a;
    for (std::size_t x = 0; x < g.dim(); ++x)
        if (out.from_g[x] != npos) {
            back[out.from_g[x]] = x;
            is_g[out.from_g[x]] = 1;
        }
    out.split = 0;
    auto alg = std::make_shared<DgLie>(space);

    auto map_l = [&](const SparseVec& v) {
        SparseVec r;
        for (const auto& [k, c] : v)
            if (out.from_target[k] != npos) r.add(out.from_target[k], c);
        return r;
    };
    auto map_g = [&](const SparseVec& v) {
        SparseVec r;
        for (const auto& [k, c] : v)
            if (out.from_g[k] != npos) r.add(out.from_g[k], c);
        return r;
    };

    std::vector<SparseVec> diffs(N);
    std::vector<std::vector<std::pair<std::size_t, SparseVec>>> rows(N);
    parallel_for(N, [&](std::size_t i) {
        std::size_t u = back[i];
        int di = space->degree_of(i);
        if (w.contains(di - 1)) {
            if (is_g[i]) diffs[i] = map_l(A.xi[u]) + map_g(g.differential(u));
            else diffs[i] = map_l(L.differential(u));
        }
        for (std::size_t j = i; j < N; ++j) {
            if (!w.contains(di + space->degree_of(j))) continue;
            std::size_t v = back[j];
            SparseVec b;
            if (!is_g[i] && !is_g[j]) b = map_l(L.bracket(u, v));
            else if (is_g[i] && is_g[j]) b = map_g(g.bracket(u, v));
            else if (!is_g[i]) b = map_l(A.right(u, v));   // (a,0),(0,y) -> a.y
            else b = map_l(A.left(u, v));                   // (0,x),(b,0) -> x.b
            if (!b.empty()) rows[i].emplace_back(j, std::move(b));
        }
    });
    for (std::size_t i = 0; i < N; ++i) {
        alg->set_differential(i, std::move(diffs[i]));
        for (auto& [j, b] : rows[i]) alg->set_bracket(i, j, std::move(b));
    }

    std::vector<SparseVec> incl(L.dim()), proj(N);
    for (std::size_t a = 0; a < L.dim(); ++a)
        if (out.from_target[a] != npos) incl[a] = SparseVec::unit(out.from_target[a]);
    for (std::size_t i = 0; i < N; ++i)
        if (is_g[i]) proj[i] = SparseVec::unit(back[i]);
    out.algebra = alg;
    out.inclusion = DgLieMorphism{A.target, alg, std::move(incl)};
    out.projection = DgLieMorphism{alg, A.g, std::move(proj)};
    return out;
}

// --------------------------------------------------- Der L |x sL and L

OuterAction outer_action_from_morphism(const DgLieMorphism& phi, const DerAlgebra& der, DgLiePtr lie) {
    OuterAction A(phi.source, lie);
    const DgLie& L = *lie;
    const std::size_t ng = phi.source->dim();
    std::vector<std::vector<std::pair<std::size_t, SparseVec>>> acts(ng);
    parallel_for(ng, [&](std::size_t x) {
        const SparseVec& e = phi.images[x];
        if (e.empty()) return;
        int dx = phi.source->degree(x);
        for (std::size_t a = 0; a < L.dim(); ++a) {
            if (!L.window().contains(L.degree(a) + dx)) continue;
            SparseVec v = der.apply(e, SparseVec::unit(a));
            if (v.empty()) continue;
            v.scale(Rational(-sgn(static_cast<long long>(L.degree(a)) * dx)));
            acts[x].emplace_back(a, std::move(v));
        }
        SparseVec z = der.sl_part(e);
        z.scale(Rational(-1));
        A.xi[x] = std::move(z);
    });
    for (std::size_t x = 0; x < ng; ++x)
        for (auto& [a, v] : acts[x]) A.action[a][x] = std::move(v);
    return A;
}

OuterAction tautological_action(const DerAlgebra& der, DgLiePtr lie) {
    std::vector<SparseVec> id(der.algebra->dim());
    for (std::size_t i = 0; i < id.size(); ++i) id[i] = SparseVec::unit(i);
    return outer_action_from_morphism(DgLieMorphism{der.algebra, der.algebra, std::move(id)}, der, std::move(lie));
}

DgLieMorphism morphism_from_outer_action(const OuterAction& A, const DerAlgebra& der, DgLiePtr der_algebra) {
    const FreeLie& F = *der.lie;
    const std::size_t ng = A.g->dim();
    std::vector<SparseVec> images(ng);
    for (std::size_t x = 0; x < ng; ++x) {
        std::vector<SparseVec> vals(der.num_generators);
        for (std::size_t k = 0; k < der.num_generators; ++k) vals[k] = A.left(x, F.generator_index(k));
        SparseVec e = der.from_values(vals);
        if (!A.xi[x].empty()) {
            if (!der.with_sl)
                throw Error(ErrorKind::SpecMismatch, "a nonzero xi needs the sL part of the classifying algebra");
            e.axpy(Rational(-1), der.suspended(A.xi[x]));
        }
        images[x] = std::move(e);
    }
    return DgLieMorphism{A.g, std::move(der_algebra), std::move(images)};
}

// ----------------------------------------------------------- Hom action

HomAction hom_outer_action(const ConvolutionLie& h, DgLiePtr hom_tau, const CeComplex& c, const DerAlgebra& der,
                           const DgLieMorphism& g_inclusion, const SparseVec& tau) {
    const DgLie& g = *g_inclusion.source;
    const DgLie& H = *h.algebra;
    // elements of higher degree act by zero on a Hom bounded by the structure algebra
    const int reach = H.window().hi - H.window().lo;
    std::vector<CoderivationImage> chi(g.dim());
    parallel_for(g.dim(), [&](std::size_t x) {
        if (g.degree(x) > reach) chi[x].degree = g.degree(x);
        else chi[x] = coder_action_chi(c, der, g_inclusion.images[x]);
    });
    return hom_outer_action(h, std::move(hom_tau), g_inclusion.source, std::move(chi), tau);
}

HomAction hom_outer_action(const ConvolutionLie& h, DgLiePtr hom_tau, DgLiePtr gp, std::vector<CoderivationImage> chi,
                           const SparseVec& tau) {
    HomAction out;
    out.action = OuterAction(gp, std::move(hom_tau));
    out.chi = std::move(chi);
    const DgLie& g = *gp;
    const DgLie& H = *h.algebra;
    const std::size_t ng = g.dim();
    auto f = h.to_function(tau);
    const bool any_tau = !tau.empty();

    std::vector<std::vector<std::pair<std::size_t, SparseVec>>> acts(ng);
    parallel_for(ng, [&](std::size_t x) {
        const auto& images = out.chi[x].images;
        if (images.empty()) return;
        int dx = g.degree(x);
        // (e_{c0,p} o chi)(w) = chi(w)_{c0} p
        std::map<std::size_t, SparseVec> acc;
        std::vector<SparseVec> xi_vals(images.size());
        for (std::size_t w = 0; w < images.size(); ++w)
            for (const auto& [c0, coef] : images[w]) {
                for (std::size_t p = 0; p < h.pi_dim; ++p) {
                    auto i = h.find(c0, p);
                    if (!i) continue;
                    auto j = h.find(w, p);
                    if (!j) {
                        if (H.window().contains(H.degree(*i) + dx))
                            throw Error(ErrorKind::WindowTooSmall, "Hom action leaves the coalgebra window");
                        continue;
                    }
                    acc[*i].add(*j, coef);
                }
                if (any_tau && !f[c0].empty()) xi_vals[w].axpy(coef, f[c0]);
            }
        for (auto& [i, v] : acc)
            if (!v.empty()) acts[x].emplace_back(i, std::move(v));
        if (any_tau) out.action.xi[x] = h.from_function(xi_vals);
    });
    for (std::size_t x = 0; x < ng; ++x)
        for (auto& [i, v] : acts[x]) out.action.action[i][x] = std::move(v);
    return out;
}

OuterAction restrict_action(const OuterAction& A, const Cover& cover) {
    OuterAction out(A.g, cover.algebra);
    const std::size_t nc = cover.algebra->dim();
    std::vector<std::map<std::size_t, SparseVec>> acts(nc);
    parallel_for(nc, [&](std::size_t a) {
        std::map<std::size_t, SparseVec> parent;
        for (const auto& [k, c] : cover.inclusion.images[a])
            for (const auto& [x, v] : A.action[k]) parent[x].axpy(c, v);
        for (auto& [x, v] : parent)
            if (!v.empty()) acts[a][x] = cover.restrict(v);
    });
    for (std::size_t a = 0; a < nc; ++a)
        for (auto& [x, v] : acts[a]) out.action[a].emplace(x, std::move(v));
    for (std::size_t x = 0; x < A.g->dim(); ++x)
        if (!A.xi[x].empty()) out.xi[x] = cover.restrict(A.xi[x]);
    return out;
}

// ------------------------------------------------------------ eq. twist

TwistIdentityReport twist_identity_check(const ConvolutionLie& h, const OuterAction& untwisted,
                                         const OuterAction& twisted, const SparseVec& tau) {
    TwistIdentityReport rep;
    TwistedProduct lp = twisted_semidirect(untwisted, false);
    SparseVec m;
    for (const auto& [i, c] : tau) m.add(lp.from_target[i], c);
    auto left = twist_dglie(*lp.algebra, m);
    TwistedProduct rp = twisted_semidirect(twisted, false);
    const DgLie& right = *rp.algebra;
    (void)h;

    if (left->space() != right.space()) {
        rep.mismatches.push_back("underlying graded spaces differ");
        return rep;
    }
    const GradedSpace& s = right.space();
    for (std::size_t i = 0; i < right.dim(); ++i) {
        if (left->differential(i) != right.differential(i))
            rep.mismatches.push_back("d(" + s.name(i) + "): " + s.format(left->differential(i)) + " vs " +
                                     s.format(right.differential(i)));
        if (left->bracket_row(i) != right.bracket_row(i))
            rep.mismatches.push_back("brackets with " + s.name(i) + " differ");
    }
    rep.left = validate(*left);
    rep.right = validate(right);
    rep.ok = rep.mismatches.empty() && rep.left.ok() && rep.right.ok();
    return rep;
}

}  // namespace bautlab
