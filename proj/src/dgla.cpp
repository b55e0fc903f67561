#include "bautlab/dgla.hpp"

#include <algorithm>
#include <sstream>

#include "bautlab/error.hpp"
#include "bautlab/parallel.hpp"

namespace bautlab {

namespace {

int antisym_sign(int a, int b) { return (a % 2 != 0 && b % 2 != 0) ? 1 : -1; }

std::string names_of(const GradedSpace& s, std::initializer_list<std::size_t> idx) {
    std::string out;
    for (auto i : idx) {
        if (!out.empty()) out += ", ";
        out += s.name(i);
    }
    return out;
}

}  // namespace

void ValidationReport::merge(const ValidationReport& other) {
    defects.insert(defects.end(), other.defects.begin(), other.defects.end());
    truncated_degrees.insert(other.truncated_degrees.begin(), other.truncated_degrees.end());
    checks += other.checks;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    os << (ok() ? "valid" : "INVALID") << " (" << checks << " checks, " << defects.size() << " defects";
    if (!truncated_degrees.empty()) {
        os << ", truncated in degrees";
        for (int d : truncated_degrees) os << " " << d;
    }
    os << ")";
    return os.str();
}

// -------------------------------------------------------------------- DgLie

DgLie::DgLie(SpacePtr space) : space_(std::move(space)) {
    brackets_.resize(space_->total_dim());
    d_.resize(space_->total_dim());
}

void DgLie::set_bracket(std::size_t i, std::size_t j, SparseVec value) {
    int deg = degree(i) + degree(j);
    for (const auto& [k, c] : value)
        if (k >= dim() || degree(k) != deg)
            throw Error(ErrorKind::DegreeMismatch, "bracket [" + names_of(*space_, {i, j}) + "] has wrong degree");
    if (i > j) {
        value.scale(Rational(antisym_sign(degree(i), degree(j))));
        std::swap(i, j);
    }
    auto& row = brackets_[i];
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const auto& e, std::size_t k) { return e.first < k; });
    if (it != row.end() && it->first == j) {
        if (value.empty()) row.erase(it);
        else it->second = std::move(value);
    } else if (!value.empty()) {
        row.insert(it, {j, std::move(value)});
    }
}

const SparseVec* DgLie::stored_bracket(std::size_t i, std::size_t j) const {
    const auto& row = brackets_[i];
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const auto& e, std::size_t k) { return e.first < k; });
    if (it != row.end() && it->first == j) return &it->second;
    return nullptr;
}

SparseVec DgLie::bracket(std::size_t i, std::size_t j) const {
    if (i <= j) {
        const SparseVec* v = stored_bracket(i, j);
        return v ? *v : SparseVec();
    }
    const SparseVec* v = stored_bracket(j, i);
    if (!v) return {};
    SparseVec out = *v;
    out.scale(Rational(antisym_sign(degree(i), degree(j))));
    return out;
}

SparseVec DgLie::bracket(const SparseVec& a, const SparseVec& b) const {
    SparseVec out;
    for (const auto& [i, ci] : a)
        for (const auto& [j, cj] : b) {
            if (i <= j) {
                if (const SparseVec* v = stored_bracket(i, j)) out.axpy(ci * cj, *v);
            } else if (const SparseVec* v = stored_bracket(j, i)) {
                out.axpy(ci * cj * Rational(antisym_sign(degree(i), degree(j))), *v);
            }
        }
    return out;
}

void DgLie::set_differential(std::size_t i, SparseVec value) {
    int deg = degree(i) - 1;
    for (const auto& [k, c] : value)
        if (k >= dim() || degree(k) != deg)
            throw Error(ErrorKind::DegreeMismatch, "differential of " + space_->name(i) + " has wrong degree");
    d_[i] = std::move(value);
}

SparseVec DgLie::d(const SparseVec& v) const {
    SparseVec out;
    for (const auto& [i, c] : v) out.axpy(c, d_[i]);
    return out;
}

GradedMap DgLie::differential_map() const {
    return GradedMap::from_images(space_, space_, -1, d_);
}

RationalMatrix DgLie::d_block(int n) const {
    std::size_t cols = space_->dim(n), rows = space_->dim(n - 1);
    RationalMatrix m(rows, cols);
    if (rows == 0) return m;
    for (std::size_t k = 0; k < cols; ++k)
        m.set_column(k, space_->restrict_to(d_[space_->global(n, k)], n - 1));
    return m;
}

bool DgLie::is_abelian() const {
    return std::all_of(brackets_.begin(), brackets_.end(), [](const auto& r) { return r.empty(); });
}

bool DgLie::has_zero_differential() const {
    return std::all_of(d_.begin(), d_.end(), [](const SparseVec& v) { return v.empty(); });
}

bool operator==(const DgLie& a, const DgLie& b) {
    if (*a.space_ != *b.space_) return false;
    return a.brackets_ == b.brackets_ && a.d_ == b.d_;
}

// --------------------------------------------------------------- validation

ValidationReport validate(const DgLie& g) {
    const GradedSpace& s = g.space();
    const Window& w = g.window();
    const std::size_t n = g.dim();
    // d is known on degree k when k-1 is inside the window or nothing lives below it
    auto d_known = [&](int deg) { return w.contains(deg - 1) || (w.closed_below && deg - 1 < w.lo); };

    std::vector<ValidationReport> parts(n);
    parallel_for(n, [&](std::size_t i) {
        ValidationReport& r = parts[i];
        int di = g.degree(i);

        // d^2 = 0
        if (d_known(di) && d_known(di - 1)) {
            ++r.checks;
            SparseVec dd = g.d(g.differential(i));
            if (!dd.empty()) r.defects.push_back({"d2", s.name(i), g.format(dd)});
        } else if (!g.differential(i).empty()) {
            r.truncated_degrees.insert(di);
        }

        // [x,x] = 0 for even x
        if (di % 2 == 0 && g.bracket_in_window(i, i)) {
            ++r.checks;
            if (const SparseVec* v = g.stored_bracket(i, i))
                r.defects.push_back({"antisymmetry", s.name(i) + ", " + s.name(i), g.format(*v)});
        }

        for (std::size_t j = i; j < n; ++j) {
            int dj = g.degree(j);
            int dij = di + dj;
            if (dij > w.hi) break;  // basis is sorted by degree
            if (!w.contains(dij)) {
                r.truncated_degrees.insert(dij);
                continue;
            }
            SparseVec bij = g.bracket(i, j);

            // Leibniz: d[x,y] = [dx,y] + (-1)^|x| [x,dy]
            if (d_known(di) && d_known(dj) && d_known(dij)) {
                ++r.checks;
                SparseVec lhs = g.d(bij);
                SparseVec rhs = g.bracket(g.differential(i), SparseVec::unit(j));
                rhs.axpy(Rational(parity_sign(di)), g.bracket(SparseVec::unit(i), g.differential(j)));
                lhs -= rhs;
                if (!lhs.empty()) r.defects.push_back({"leibniz", names_of(s, {i, j}), g.format(lhs)});
            } else {
                r.truncated_degrees.insert(dij);
            }

            // Jacobi: [x,[y,z]] = [[x,y],z] + (-1)^{|x||y|} [y,[x,z]]
            int kmax_deg = w.hi - dij;
            std::size_t kend = kmax_deg < w.lo ? j : s.offset(kmax_deg + 1);
            if (kend <= j) {
                // the triple leaves the window
                continue;
            }
            for (std::size_t k = j; k < kend; ++k) {
                int dk = g.degree(k);
                if (!w.contains(dj + dk) || !w.contains(di + dk)) {
                    r.truncated_degrees.insert(dij + dk);
                    continue;
                }
                ++r.checks;
                SparseVec ex = SparseVec::unit(i), ey = SparseVec::unit(j), ez = SparseVec::unit(k);
                SparseVec lhs = g.bracket(ex, g.bracket(j, k));
                lhs -= g.bracket(bij, ez);
                lhs.axpy(Rational(-parity_sign(static_cast<long long>(di) * dj)), g.bracket(ey, g.bracket(i, k)));
                if (!lhs.empty()) r.defects.push_back({"jacobi", names_of(s, {i, j, k}), g.format(lhs)});
            }
        }
    });
    ValidationReport out;
    for (auto& p : parts) out.merge(p);
    // triples whose total degree leaves the window were not checked
    if (!w.closed_above) out.truncated_degrees.insert(w.hi + 1);
    return out;
}

// ---------------------------------------------------------------- morphisms

SparseVec DgLieMorphism::apply(const SparseVec& v) const {
    SparseVec out;
    for (const auto& [i, c] : v) out.axpy(c, images.at(i));
    return out;
}

ValidationReport DgLieMorphism::check() const {
    ValidationReport r;
    const DgLie& a = *source;
    const DgLie& b = *target;
    if (images.size() != a.dim())
        throw Error(ErrorKind::LengthMismatch, "morphism: one image per source basis element required");
    const Window& wa = a.window();
    const Window& wb = b.window();
    for (std::size_t i = 0; i < a.dim(); ++i) {
        int di = a.degree(i);
        for (const auto& [k, c] : images[i])
            if (k >= b.dim() || b.degree(k) != di) {
                r.defects.push_back({"degree", a.space().name(i), "image has wrong degree"});
                break;
            }
        // chain map
        bool src_known = wa.contains(di - 1) || (wa.closed_below && di - 1 < wa.lo);
        bool tgt_known = wb.contains(di - 1) || (wb.closed_below && di - 1 < wb.lo);
        if (src_known && tgt_known) {
            ++r.checks;
            SparseVec diff = apply(a.differential(i)) - b.d(images[i]);
            if (!diff.empty()) r.defects.push_back({"chain", a.space().name(i), b.format(diff)});
        } else {
            r.truncated_degrees.insert(di);
        }
        // brackets
        for (std::size_t j = i; j < a.dim(); ++j) {
            int dij = di + a.degree(j);
            if (dij > wa.hi) break;
            if (!wa.contains(dij) || !wb.contains(dij)) {
                r.truncated_degrees.insert(dij);
                continue;
            }
            ++r.checks;
            SparseVec diff = apply(a.bracket(i, j)) - b.bracket(images[i], images[j]);
            if (!diff.empty())
                r.defects.push_back({"bracket", a.space().name(i) + ", " + a.space().name(j), b.format(diff)});
        }
    }
    return r;
}

// ------------------------------------------------------------------- covers

SparseVec Cover::restrict(const SparseVec& v) const {
    const GradedSpace& parent = inclusion.target->space();
    const GradedSpace& cover = algebra->space();
    SparseVec out;
    SparseVec at_n;
    for (const auto& [i, c] : v) {
        int d = parent.degree_of(i);
        if (d < n) throw Error(ErrorKind::InvalidStructure, "vector has a component below the cover");
        if (d == n) at_n.add(parent.local_of(i), c);
        else out.add(cover.global(d, parent.local_of(i)), c);
    }
    if (!at_n.empty()) {
        SparseVec coords = cycles.coordinates(at_n);
        SparseVec back;
        for (const auto& [k, c] : coords) back.axpy(c, cycles.vectors[k]);
        if (back != at_n) throw Error(ErrorKind::InvalidStructure, "vector is not a cycle in the cover degree");
        for (const auto& [k, c] : coords) out.add(cover.global(n, k), c);
    }
    return out;
}

Cover connected_cover(const DgLiePtr& gp, int n) {
    const DgLie& g = *gp;
    const GradedSpace& s = g.space();
    const Window& w = s.window();
    if (!w.contains(n)) throw Error(ErrorKind::WindowTooSmall, "cover degree outside the window");

    Cover cov;
    cov.n = n;
    cov.cycles = exactla::kernel(g.d_block(n));

    std::map<int, std::vector<std::string>> names;
    auto& cyc_names = names[n];
    for (std::size_t k = 0; k < cov.cycles.vectors.size(); ++k) {
        SparseVec gv = s.lift(cov.cycles.vectors[k], n);
        if (gv.nnz() == 1) cyc_names.push_back(s.name(gv.leading()));
        else if (gv.nnz() <= 3) cyc_names.push_back("(" + s.format(gv) + ")");
        else cyc_names.push_back("z" + std::to_string(n) + "_" + std::to_string(k + 1));
    }
    for (int m = n + 1; m <= w.hi; ++m) names[m] = s.names(m);
    auto space = std::make_shared<GradedSpace>(Window(n, w.hi, true, w.closed_above), names);

    std::vector<SparseVec> incl(space->total_dim());
    for (std::size_t k = 0; k < cov.cycles.vectors.size(); ++k)
        incl[space->global(n, k)] = s.lift(cov.cycles.vectors[k], n);
    for (int m = n + 1; m <= w.hi; ++m)
        for (std::size_t k = 0; k < s.dim(m); ++k) incl[space->global(m, k)] = SparseVec::unit(s.global(m, k));

    auto alg = std::make_shared<DgLie>(space);
    cov.inclusion = DgLieMorphism{alg, gp, incl};
    cov.algebra = alg;  // restrict() needs the space already

    for (std::size_t i = 0; i < space->total_dim(); ++i) {
        if (space->degree_of(i) > n) alg->set_differential(i, cov.restrict(g.d(incl[i])));
        for (std::size_t j = i; j < space->total_dim(); ++j) {
            if (space->degree_of(i) + space->degree_of(j) > w.hi) break;
            SparseVec b = g.bracket(incl[i], incl[j]);
            if (!b.empty()) alg->set_bracket(i, j, cov.restrict(b));
        }
    }
    return cov;
}

// ------------------------------------------------------ lower central series

LcsResult lcs_class(const DgLie& g, int n, int k_max) {
    const GradedSpace& s = g.space();
    const Window& w = s.window();
    LcsResult res;
    if (s.dim(n) == 0) {
        res.nilpotent = true;
        res.k = 1;
        return res;
    }
    // gamma[m - lo] = basis of Gamma^k in degree m (global vectors)
    std::vector<std::vector<SparseVec>> gamma(static_cast<std::size_t>(w.hi - w.lo + 1));
    for (int m = w.lo; m <= w.hi; ++m)
        for (std::size_t k = 0; k < s.dim(m); ++k) gamma[m - w.lo].push_back(SparseVec::unit(s.global(m, k)));

    for (int k = 1; k <= k_max; ++k) {
        if (gamma[n - w.lo].empty()) {
            res.nilpotent = true;
            res.k = k;
            return res;
        }
        std::vector<std::vector<SparseVec>> next(gamma.size());
        for (int m = w.lo; m <= w.hi; ++m) {
            exactla::Echelon ech(s.dim(m));
            for (std::size_t j = 0; j < g.dim(); ++j) {
                int src = m - g.degree(j);
                if (!w.contains(src)) continue;
                for (const auto& u : gamma[src - w.lo]) {
                    SparseVec b = g.bracket(u, SparseVec::unit(j));
                    if (b.empty()) continue;
                    if (ech.insert(s.restrict_to(b, m))) next[m - w.lo].push_back(b);
                }
            }
        }
        gamma = std::move(next);
    }
    if (gamma[n - w.lo].empty()) {
        res.nilpotent = true;
        res.k = k_max + 1;
    }
    return res;
}

// ----------------------------------------------------------------- homology

bool HomologyReport::is_trusted(int n) const {
    return n >= lo && n <= hi && trusted[static_cast<std::size_t>(n - lo)];
}

std::pair<int, int> HomologyReport::trusted_range() const {
    int a = hi + 1, b = lo - 1;
    for (int n = lo; n <= hi; ++n)
        if (is_trusted(n)) {
            a = std::min(a, n);
            b = std::max(b, n);
        }
    return {a, b};
}

HomologyReport homology(const DgLie& g) {
    const Window& w = g.window();
    HomologyReport h;
    h.lo = w.lo;
    h.hi = w.hi;
    std::size_t count = static_cast<std::size_t>(w.hi - w.lo + 2);
    std::vector<RationalMatrix> blocks(count);  // blocks[k] = d on degree lo + k
    for (int n = w.lo; n <= w.hi + 1; ++n) blocks[n - w.lo] = g.d_block(n);
    std::vector<std::size_t> ranks(count);
    parallel_for(count, [&](std::size_t k) { ranks[k] = exactla::rank(blocks[k]); });
    for (int n = w.lo; n <= w.hi; ++n) {
        std::size_t k = static_cast<std::size_t>(n - w.lo);
        if (!(blocks[k] * blocks[k + 1]).is_zero())
            throw Error(ErrorKind::CompositionNotZero, "d^2 != 0 in degree " + std::to_string(n + 1));
        h.dims.push_back(g.space().dim(n) - ranks[k] - ranks[k + 1]);
        bool below = n > w.lo || w.closed_below;
        bool above = n < w.hi || w.closed_above;
        h.trusted.push_back(below && above);
    }
    return h;
}

// ---------------------------------------------------------------- exactness

ExactnessReport short_exact_check(const DgLieMorphism& i, const DgLieMorphism& p) {
    ExactnessReport rep;
    if (i.target->space() != p.source->space())
        throw Error(ErrorKind::SpaceMismatch, "short_exact_check: target of i differs from source of p");
    auto add = [&](const ValidationReport& r, const std::string& who) {
        for (const auto& d : r.defects) rep.defects.push_back({who + ":" + d.kind, d.where, d.value});
    };
    add(i.check(), "i");
    add(p.check(), "p");

    const GradedSpace& A = i.source->space();
    const GradedSpace& B = i.target->space();
    const GradedSpace& C = p.target->space();
    const Window& w = B.window();
    for (int n = w.lo; n <= w.hi; ++n) {
        std::size_t a = A.dim(n), b = B.dim(n), c = C.dim(n);
        rep.rows.push_back({n, a, b, c});
        RationalMatrix im(b, a), pm(c, b);
        for (std::size_t k = 0; k < a; ++k) im.set_column(k, B.restrict_to(i.images[A.global(n, k)], n));
        for (std::size_t k = 0; k < b; ++k) pm.set_column(k, C.restrict_to(p.images[B.global(n, k)], n));
        std::string deg = "degree " + std::to_string(n);
        if (exactla::rank(im) != a) rep.defects.push_back({"injective", deg, "i is not injective"});
        if (exactla::rank(pm) != c) rep.defects.push_back({"surjective", deg, "p is not surjective"});
        if (!(pm * im).is_zero()) rep.defects.push_back({"composite", deg, "p o i != 0"});
        if (b != a + c) {
            rep.defects.push_back({"dimension", deg,
                                   std::to_string(b) + " != " + std::to_string(a) + " + " + std::to_string(c)});
        }
    }
    // degrees of A or C outside B's window
    for (std::size_t k = 0; k < A.total_dim(); ++k)
        if (!w.contains(A.degree_of(k))) rep.defects.push_back({"window", A.name(k), "outside middle window"});
    for (std::size_t k = 0; k < C.total_dim(); ++k)
        if (!w.contains(C.degree_of(k))) rep.defects.push_back({"window", C.name(k), "outside middle window"});
    return rep;
}

}  // namespace bautlab
