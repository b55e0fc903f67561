#include "bautlab/ce.hpp"

#include <algorithm>
#include <map>

#include "bautlab/error.hpp"
#include "bautlab/parallel.hpp"

namespace bautlab {

namespace {

using PairKey = std::pair<std::size_t, std::size_t>;

void add_pair(std::map<PairKey, Rational>& m, std::size_t a, std::size_t b, const Rational& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = m.try_emplace({a, b}, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) m.erase(it);
    }
}

std::string pair_str(const GradedSpace& s, const std::map<PairKey, Rational>& m) {
    std::string out;
    for (const auto& [k, c] : m) {
        if (!out.empty()) out += " + ";
        out += c.str() + "*" + s.name(k.first) + "(x)" + s.name(k.second);
    }
    return out.empty() ? "0" : out;
}

RationalMatrix block_of(const Coalgebra& c, int n) {
    const GradedSpace& s = *c.space;
    std::size_t cols = s.dim(n), rows = s.dim(n - 1);
    RationalMatrix m(rows, cols);
    for (std::size_t k = 0; k < cols; ++k) {
        const SparseVec& img = c.d[s.global(n, k)];
        if (!img.empty()) m.set_column(k, s.restrict_to(img, n - 1));
    }
    return m;
}

}  // namespace

// ---------------------------------------------------------------- Coalgebra

ValidationReport validate(const Coalgebra& c) {
    const GradedSpace& s = *c.space;
    std::size_t n = c.dim();
    std::vector<ValidationReport> parts(n);
    parallel_for(n, [&](std::size_t w) {
        ValidationReport& r = parts[w];
        // d^2
        SparseVec dd;
        for (const auto& [k, x] : c.d[w]) dd.axpy(x, c.d[k]);
        ++r.checks;
        if (!dd.empty()) r.defects.push_back({"d2", s.name(w), s.format(dd)});

        // coassociativity as triples
        std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Rational> lhs, rhs;
        for (const auto& t : c.coproduct[w]) {
            for (const auto& u : c.coproduct[t.left]) lhs[{u.left, u.right, t.right}] += t.coeff * u.coeff;
            for (const auto& u : c.coproduct[t.right]) rhs[{t.left, u.left, u.right}] += t.coeff * u.coeff;
        }
        auto clean = [](auto& m) {
            for (auto it = m.begin(); it != m.end();) it = it->second.is_zero() ? m.erase(it) : std::next(it);
        };
        clean(lhs);
        clean(rhs);
        ++r.checks;
        if (lhs != rhs) r.defects.push_back({"coassociativity", s.name(w), "(D(x)1)D != (1(x)D)D"});

        if (c.unit) {
            SparseVec left, right;
            for (const auto& t : c.coproduct[w]) {
                if (t.left == *c.unit) left.add(t.right, t.coeff);
                if (t.right == *c.unit) right.add(t.left, t.coeff);
            }
            ++r.checks;
            if (left != SparseVec::unit(w) || right != SparseVec::unit(w))
                r.defects.push_back({"counit", s.name(w), s.format(left) + " / " + s.format(right)});
        }

        // D d = (d (x) 1 + 1 (x) d) D
        std::map<PairKey, Rational> a, b;
        for (const auto& [k, x] : c.d[w])
            for (const auto& t : c.coproduct[k]) add_pair(a, t.left, t.right, x * t.coeff);
        for (const auto& t : c.coproduct[w]) {
            for (const auto& [k, x] : c.d[t.left]) add_pair(b, k, t.right, x * t.coeff);
            Rational sign(parity_sign(c.degree(t.left)));
            for (const auto& [k, x] : c.d[t.right]) add_pair(b, t.left, k, sign * x * t.coeff);
        }
        ++r.checks;
        if (a != b) r.defects.push_back({"coderivation", s.name(w), pair_str(s, a) + " vs " + pair_str(s, b)});
    });
    ValidationReport out;
    for (const auto& p : parts) out.merge(p);
    return out;
}

HomologyReport homology(const Coalgebra& c) {
    const Window& w = c.space->window();
    HomologyReport h;
    h.lo = w.lo;
    h.hi = w.hi;
    std::size_t count = static_cast<std::size_t>(w.hi - w.lo + 2);
    std::vector<RationalMatrix> blocks(count);
    for (int n = w.lo; n <= w.hi + 1; ++n) blocks[static_cast<std::size_t>(n - w.lo)] = block_of(c, n);
    std::vector<std::size_t> ranks(count);
    parallel_for(count, [&](std::size_t k) { ranks[k] = exactla::rank(blocks[k]); });
    for (int n = w.lo; n <= w.hi; ++n) {
        std::size_t k = static_cast<std::size_t>(n - w.lo);
        if (!(blocks[k] * blocks[k + 1]).is_zero())
            throw Error(ErrorKind::CompositionNotZero, "d^2 != 0 in degree " + std::to_string(n + 1));
        h.dims.push_back(c.space->dim(n) - ranks[k] - ranks[k + 1]);
        h.trusted.push_back((n > w.lo || w.closed_below) && (n < w.hi || w.closed_above));
    }
    return h;
}

// ---------------------------------------------------------------- CeComplex

std::size_t CeComplex::VecHash::operator()(const std::vector<std::size_t>& v) const {
    std::size_t h = v.size() * 0x9E3779B97F4A7C15ULL;
    for (auto x : v) h = (h ^ x) * 0x100000001B3ULL + (h >> 29);
    return h;
}

CeComplex::CeComplex(std::shared_ptr<const LieModel> model, int max_degree, bool reduced)
    : model_(std::move(model)), max_degree_(max_degree), reduced_(reduced) {
    if (max_degree_ < 1) throw Error(ErrorKind::WindowTooSmall, "Chevalley-Eilenberg window must reach degree 1");
    if (lie().max_degree() < max_degree_ - 1)
        throw Error(ErrorKind::WindowTooSmall, "free Lie algebra must reach degree " + std::to_string(max_degree_ - 1) +
                                                   " for chains up to degree " + std::to_string(max_degree_));
    enumerate();
}

void CeComplex::enumerate() {
    const FreeLie& L = lie();
    const std::size_t nl = L.dim();
    std::vector<std::vector<std::size_t>> found;
    std::vector<std::size_t> cur;
    std::function<void(std::size_t, int)> rec = [&](std::size_t start, int deg) {
        found.push_back(cur);
        for (std::size_t k = start; k < nl; ++k) {
            int sd = L.degree(k) + 1;
            if (deg + sd > max_degree_) break;
            cur.push_back(k);
            rec(sd % 2 != 0 ? k + 1 : k, deg + sd);
            cur.pop_back();
        }
    };
    rec(0, 0);
    if (reduced_) found.erase(found.begin());

    auto word_degree = [&](const std::vector<std::size_t>& w) {
        int d = 0;
        for (auto k : w) d += L.degree(k) + 1;
        return d;
    };
    std::stable_sort(found.begin(), found.end(), [&](const auto& a, const auto& b) {
        int da = word_degree(a), db = word_degree(b);
        if (da != db) return da < db;
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    std::map<int, std::vector<std::string>> names;
    for (const auto& w : found) {
        std::string name;
        for (auto k : w) {
            if (!name.empty()) name += "^";
            name += "s" + L.space().name(k);
        }
        names[word_degree(w)].push_back(w.empty() ? "1" : name);
    }
    words_ = std::move(found);
    for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], i);
    co_.space = std::make_shared<GradedSpace>(Window(reduced_ ? 1 : 0, max_degree_, true, false), names);
    if (!reduced_) co_.unit = 0;

    const std::size_t n = words_.size();
    co_.d.assign(n, SparseVec());
    co_.coproduct.assign(n, {});
    const LieModel& M = *model_;
    parallel_for(n, [&](std::size_t i) {
        const auto& w = words_[i];
        const std::size_t len = w.size();
        std::vector<int> sd(len);
        for (std::size_t p = 0; p < len; ++p) sd[p] = L.degree(w[p]) + 1;

        // differential
        SparseVec out;
        std::vector<std::size_t> rest;
        for (std::size_t a = 0; a < len; ++a) {
            int before = 0;
            for (std::size_t p = 0; p < a; ++p) before += sd[p];
            Rational eps(parity_sign(static_cast<long long>(sd[a]) * before));
            rest.assign(w.begin(), w.end());
            rest.erase(rest.begin() + static_cast<long>(a));
            SparseVec dx = M.delta().on_basis(w[a]);
            if (!dx.empty()) out += wedge_front(dx, rest, -eps);
            for (std::size_t b = a + 1; b < len; ++b) {
                int before_b = 0;
                for (std::size_t p = 0; p < b; ++p)
                    if (p != a) before_b += sd[p];
                Rational eps2 = eps * Rational(parity_sign(static_cast<long long>(sd[b]) * before_b));
                std::vector<std::size_t> rest2 = rest;
                rest2.erase(rest2.begin() + static_cast<long>(b - 1));
                SparseVec br = L.bracket(w[a], w[b]);
                if (!br.empty())
                    out += wedge_front(br, rest2, eps2 * Rational(parity_sign(L.degree(w[a]))));
            }
        }
        co_.d[i] = std::move(out);

        // coproduct over subsets of positions
        std::map<PairKey, Rational> terms;
        const std::size_t full = (std::size_t{1} << len) - 1;
        for (std::size_t mask = 0; mask <= full; ++mask) {
            if (reduced_ && (mask == 0 || mask == full)) continue;
            std::vector<std::size_t> left, right;
            long long sign_exp = 0;
            int rest_deg = 0;
            for (std::size_t p = 0; p < len; ++p) {
                if (mask >> p & 1) {
                    left.push_back(w[p]);
                    sign_exp += static_cast<long long>(sd[p]) * rest_deg;
                } else {
                    right.push_back(w[p]);
                    rest_deg += sd[p];
                }
            }
            add_pair(terms, index_.at(left), index_.at(right), Rational(parity_sign(sign_exp)));
        }
        for (const auto& [k, c] : terms) co_.coproduct[i].push_back({k.first, k.second, c});
    });
}

std::optional<std::size_t> CeComplex::find(const std::vector<std::size_t>& sorted_factors) const {
    auto it = index_.find(sorted_factors);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::pair<std::size_t, int>> CeComplex::normalize(const std::vector<std::size_t>& factors) const {
    std::vector<std::size_t> w = factors;
    int sign = 1;
    // insertion sort, tracking swaps of two odd factors
    for (std::size_t i = 1; i < w.size(); ++i)
        for (std::size_t j = i; j > 0 && w[j - 1] > w[j]; --j) {
            if (suspended_degree(w[j - 1]) % 2 != 0 && suspended_degree(w[j]) % 2 != 0) sign = -sign;
            std::swap(w[j - 1], w[j]);
        }
    for (std::size_t i = 1; i < w.size(); ++i)
        if (w[i] == w[i - 1] && suspended_degree(w[i]) % 2 != 0) return std::nullopt;
    auto idx = find(w);
    if (!idx) return std::nullopt;
    return std::make_pair(*idx, sign);
}

SparseVec CeComplex::d(const SparseVec& v) const {
    SparseVec out;
    for (const auto& [i, c] : v) out.axpy(c, co_.d[i]);
    return out;
}

SparseVec CeComplex::wedge_front(const SparseVec& lie_elem, const std::vector<std::size_t>& rest,
                                 const Rational& coeff) const {
    const FreeLie& L = lie();
    int rest_deg = 0;
    for (auto k : rest) rest_deg += L.degree(k) + 1;
    std::vector<SparseVec::Entry> out;
    std::vector<std::size_t> w;
    for (const auto& [k, c] : lie_elem) {
        int sk = L.degree(k) + 1;
        if (sk + rest_deg > max_degree_) continue;
        auto pos = std::lower_bound(rest.begin(), rest.end(), k);
        if (pos != rest.end() && *pos == k && sk % 2 != 0) continue;
        int before = 0;
        for (auto it = rest.begin(); it != pos; ++it) before += L.degree(*it) + 1;
        w.assign(rest.begin(), pos);
        w.push_back(k);
        w.insert(w.end(), pos, rest.end());
        out.emplace_back(index_.at(w), coeff * c * Rational(parity_sign(static_cast<long long>(sk) * before)));
    }
    return SparseVec::from_terms(std::move(out));
}

SparseVec CeComplex::coderivation(std::size_t wi, int degree, const SparseVec* u0,
                                  const std::function<SparseVec(std::size_t)>* u1) const {
    const FreeLie& L = lie();
    const auto& w = words_[wi];
    if (co_.degree(wi) + degree > max_degree_) return {};
    SparseVec out;
    if (u0 && !u0->empty()) out += wedge_front(*u0, w, Rational(1));
    if (u1) {
        int before = 0;
        std::vector<std::size_t> rest;
        for (std::size_t a = 0; a < w.size(); ++a) {
            int sa = L.degree(w[a]) + 1;
            SparseVec v = (*u1)(w[a]);
            if (!v.empty()) {
                rest.assign(w.begin(), w.end());
                rest.erase(rest.begin() + static_cast<long>(a));
                out += wedge_front(v, rest, Rational(parity_sign(static_cast<long long>(sa) * before)));
            }
            before += sa;
        }
    }
    return out;
}

// ------------------------------------------------------------- twisting maps

std::vector<SparseVec> universal_twisting(const CeComplex& c) {
    std::vector<SparseVec> tau(c.dim());
    for (std::size_t i = 0; i < c.dim(); ++i)
        if (c.length(i) == 1) tau[i] = SparseVec::unit(c.word(i)[0]);
    return tau;
}

McDefect mc_defect(const Coalgebra& c, const std::vector<SparseVec>& f, int f_degree,
                   const std::function<SparseVec(const SparseVec&, const SparseVec&)>& bracket,
                   const std::function<SparseVec(const SparseVec&)>& d,
                   int target_max_degree) {
    const std::size_t n = c.dim();
    std::vector<SparseVec> vals(n);
    std::vector<char> skipped(n, 0);
    Rational half(1, 2);
    Rational fsign(parity_sign(f_degree));
    parallel_for(n, [&](std::size_t w) {
        if (c.degree(w) + f_degree - 1 > target_max_degree) {
            skipped[w] = 1;
            return;
        }
        SparseVec v = d(f[w]);
        for (const auto& [k, x] : c.d[w])
            if (!f[k].empty()) v.axpy(-fsign * x, f[k]);
        for (const auto& t : c.coproduct[w]) {
            if (f[t.left].empty() || f[t.right].empty()) continue;
            Rational s = half * t.coeff * Rational(parity_sign(static_cast<long long>(f_degree) * c.degree(t.left)));
            v.axpy(s, bracket(f[t.left], f[t.right]));
        }
        vals[w] = std::move(v);
    });
    McDefect out;
    for (std::size_t w = 0; w < n; ++w) {
        if (skipped[w]) ++out.skipped;
        if (!vals[w].empty()) out.values.emplace_back(w, std::move(vals[w]));
    }
    return out;
}

McDefect universal_twisting_defect(const CeComplex& c) {
    const FreeLie& L = c.lie();
    const LieModel& M = c.model();
    auto tau = universal_twisting(c);
    return mc_defect(
        c.coalgebra(), tau, -1, [&](const SparseVec& a, const SparseVec& b) { return L.bracket(a, b); },
        [&](const SparseVec& a) { return M.d(a); }, L.max_degree());
}

Coalgebra suspended_indecomposables(const FreeLie& L) {
    std::map<int, std::vector<std::string>> names;
    int hi = 1;
    for (const auto& g : L.generators()) {
        names[g.degree + 1].push_back("s" + g.name);
        hi = std::max(hi, g.degree + 1);
    }
    Coalgebra out;
    out.space = std::make_shared<GradedSpace>(Window(1, hi, true, true), names);
    out.d.assign(out.space->total_dim(), SparseVec());
    out.coproduct.assign(out.space->total_dim(), {});
    return out;
}

IndecomposableMap indec_projection(const CeComplex& c) {
    const LieModel& M = c.model();
    if (!M.minimal())
        throw Error(ErrorKind::NotMinimal, "g_L needs a decomposable differential; " + M.input().name +
                                               " has a linear part");
    const FreeLie& L = c.lie();
    const auto& gens = L.generators();
    IndecomposableMap out;
    out.target = suspended_indecomposables(L);
    SpacePtr space = out.target.space;
    std::unordered_map<std::size_t, std::size_t> gen_to_sv;
    for (std::size_t k = 0; k < gens.size(); ++k)
        gen_to_sv[L.generator_index(k)] = *space->find(gens[k].degree + 1, "s" + gens[k].name);

    out.images.assign(c.dim(), SparseVec());
    for (std::size_t i = 0; i < c.dim(); ++i) {
        if (c.length(i) != 1) continue;
        auto it = gen_to_sv.find(c.word(i)[0]);
        if (it != gen_to_sv.end()) out.images[i] = SparseVec::unit(it->second);
    }
    // chain map: g o d = 0 since sV has zero differential
    for (std::size_t i = 0; i < c.dim(); ++i) {
        SparseVec gd;
        for (const auto& [k, x] : c.d(i)) gd.axpy(x, out.images[k]);
        ++out.certificate.checks;
        if (!gd.empty()) out.certificate.defects.push_back({"chain", c.space().name(i), space->format(gd)});
    }
    return out;
}

CoderivationImage coder_action_chi(const CeComplex& c, const DerAlgebra& der, const SparseVec& element) {
    CoderivationImage out;
    out.images.assign(c.dim(), SparseVec());
    if (element.empty()) return out;
    const DgLie& g = *der.algebra;
    out.degree = g.degree(element.leading());
    for (const auto& [i, x] : element)
        if (g.degree(i) != out.degree) throw Error(ErrorKind::DegreeMismatch, "chi: element is not homogeneous");
    SparseVec z = der.sl_part(element);
    if (!z.empty() && c.reduced())
        throw Error(ErrorKind::SpecMismatch, "sL acts only on the unreduced Chevalley-Eilenberg chains");
    const bool has_der = std::any_of(element.begin(), element.end(), [&](const auto& e) { return !der.elems[e.first].sl; });
    Rational sign(parity_sign(out.degree));
    std::function<SparseVec(std::size_t)> u1 = [&](std::size_t k) {
        SparseVec v = der.apply(element, SparseVec::unit(k));
        v.scale(sign);
        return v;
    };
    for (std::size_t w = 0; w < c.dim(); ++w) {
        if (c.degree(w) + out.degree > c.max_degree()) {
            out.truncated.push_back(w);
            continue;
        }
        out.images[w] = c.coderivation(w, out.degree, z.empty() ? nullptr : &z, has_der ? &u1 : nullptr);
    }
    return out;
}

ValidationReport check_coderivation(const CeComplex& c, const CoderivationImage& D) {
    ValidationReport rep;
    std::vector<char> cut(c.dim(), 0);
    for (auto w : D.truncated) cut[w] = 1;
    for (std::size_t w = 0; w < c.dim(); ++w) {
        if (cut[w]) {
            rep.truncated_degrees.insert(c.degree(w));
            continue;
        }
        std::map<PairKey, Rational> a, b;
        for (const auto& [k, x] : D.images[w])
            for (const auto& t : c.coproduct(k)) add_pair(a, t.left, t.right, x * t.coeff);
        for (const auto& t : c.coproduct(w)) {
            for (const auto& [k, x] : D.images[t.left]) add_pair(b, k, t.right, x * t.coeff);
            Rational s(parity_sign(static_cast<long long>(D.degree) * c.degree(t.left)));
            for (const auto& [k, x] : D.images[t.right]) add_pair(b, t.left, k, s * x * t.coeff);
        }
        ++rep.checks;
        if (a != b)
            rep.defects.push_back({"coderivation", c.space().name(w), pair_str(c.space(), a) + " vs " + pair_str(c.space(), b)});
    }
    return rep;
}

}  // namespace bautlab
