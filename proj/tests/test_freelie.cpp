#include <random>

#include "doctest.h"
#include "support.hpp"

#include "bautlab/error.hpp"
#include "bautlab/freelie.hpp"

using namespace bautlab;
using namespace testsupport;

namespace {

// Dimensions of the free graded Lie algebra from the PBW identity
//   prod_w (1+t^w)^{l_w, w odd} (1-t^w)^{-l_w, w even} = 1/(1 - sum_v t^|v|),
// solved degree by degree with plain integer power series.
std::vector<long long> witt_dims(const std::vector<int>& gen_degrees, int hi) {
    std::vector<long long> tensor(hi + 1, 0);
    tensor[0] = 1;
    for (int n = 1; n <= hi; ++n)
        for (int d : gen_degrees)
            if (d <= n) tensor[n] += tensor[n - d];
    std::vector<long long> prod(hi + 1, 0);
    prod[0] = 1;
    std::vector<long long> l(hi + 1, 0);
    auto mul_factor = [&](int w, bool odd) {
        // multiply prod by (1+t^w) or by 1/(1-t^w)
        if (odd) {
            for (int n = hi; n >= w; --n) prod[n] += prod[n - w];
        } else {
            for (int n = w; n <= hi; ++n) prod[n] += prod[n - w];
        }
    };
    for (int n = 1; n <= hi; ++n) {
        l[n] = tensor[n] - prod[n];
        for (long long k = 0; k < l[n]; ++k) mul_factor(n, n % 2 != 0);
    }
    return l;
}

std::vector<Generator> gens(std::initializer_list<std::pair<const char*, int>> list) {
    std::vector<Generator> out;
    for (const auto& [n, d] : list) out.push_back({n, d});
    return out;
}

// Graded commutator of two rational tensors, computed directly on words.
RTensor commutator(const RTensor& a, int da, const RTensor& b, int db) {
    RTensor out;
    Rational sign(parity_sign(static_cast<long long>(da) * db));
    for (const auto& [wa, ca] : a)
        for (const auto& [wb, cb] : b) {
            out[wa + wb] += ca * cb;
            out[wb + wa] -= sign * ca * cb;
        }
    for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

bool same(const RTensor& a, const RTensor& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [w, c] : a) {
        auto it = b.find(w);
        if (it == b.end() || it->second != c) return false;
    }
    return true;
}

SparseVec random_element(const FreeLie& L, int deg, std::mt19937& rng) {
    std::uniform_int_distribution<int> coef(-3, 3);
    SparseVec v;
    for (std::size_t k = 0; k < L.space().dim(deg); ++k) v.add(L.space().global(deg, k), Rational(coef(rng)));
    return v;
}

QuillenModel model(const std::string& name, std::vector<Generator> g,
                   std::vector<std::vector<std::pair<Rational, std::string>>> d = {}) {
    return QuillenModel{name, std::move(g), std::move(d)};
}

}  // namespace

TEST_CASE("free_lie_basis: small examples") {
    FreeLie odd(gens({{"x", 1}}), 6);
    CHECK(odd.space().dim(1) == 1);
    CHECK(odd.space().dim(2) == 1);
    for (int n = 3; n <= 6; ++n) CHECK(odd.space().dim(n) == 0);

    FreeLie even(gens({{"y", 2}}), 6);
    CHECK(even.space().dim(2) == 1);
    CHECK(even.dim() == 1);

    FreeLie two(gens({{"x", 1}, {"y", 1}}), 3);
    CHECK(two.space().dim(1) == 2);
    CHECK(two.space().dim(2) == 3);
    CHECK(two.space().dim(3) == 2);

    CHECK_THROWS_AS(FreeLie(gens({{"x", 0}}), 3), Error);
    try {
        FreeLie bad(gens({{"x", 0}}), 3);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegreeZeroGenerator);
    }
}

TEST_CASE("free_lie_basis: dimensions agree with the PBW series oracle") {
    std::vector<std::vector<int>> cases{{1}, {2}, {1, 1}, {2, 2}, {1, 2}, {1, 3}, {2, 3, 5}, {1, 1, 1}, {3}, {1, 4}};
    for (const auto& degs : cases) {
        int hi = degs.size() >= 3 && degs[0] == 1 ? 7 : 10;
        std::vector<Generator> g;
        for (std::size_t k = 0; k < degs.size(); ++k) g.push_back({"g" + std::to_string(k), degs[k]});
        FreeLie L(g, hi);
        auto oracle = witt_dims(degs, hi);
        for (int n = 1; n <= hi; ++n) {
            CAPTURE(n);
            CHECK(static_cast<long long>(L.space().dim(n)) == oracle[n]);
        }
    }
}

TEST_CASE("brackets agree with tensor commutators") {
    FreeLie L(gens({{"x", 1}, {"y", 2}}), 8);
    for (std::size_t i = 0; i < L.dim(); ++i)
        for (std::size_t j = 0; j < L.dim(); ++j) {
            if (L.degree(i) + L.degree(j) > L.max_degree()) continue;
            RTensor ti = L.to_tensor(SparseVec::unit(i)), tj = L.to_tensor(SparseVec::unit(j));
            CHECK(same(L.to_tensor(L.bracket(i, j)), commutator(ti, L.degree(i), tj, L.degree(j))));
        }
    // basis tensors are themselves recovered from coordinates
    for (std::size_t i = 0; i < L.dim(); ++i) {
        auto back = L.from_tensor(L.to_tensor(SparseVec::unit(i)));
        REQUIRE(back);
        CHECK(*back == SparseVec::unit(i));
    }
    // a word alone is not a Lie element
    RTensor w;
    w[letter_word(0) + letter_word(1)] = Rational(1);
    CHECK_FALSE(L.from_tensor(w));
}

TEST_CASE("normal_form: antisymmetry, Jacobi and parsing") {
    FreeLie L(gens({{"x", 1}, {"y", 2}, {"z", 3}}), 9);
    CHECK(L.normal_form("[x,[x,x]]").empty());
    CHECK(L.normal_form("[y,y]").empty());
    CHECK_FALSE(L.normal_form("[x,x]").empty());
    // [x,y] + (-1)^{|x||y|}[y,x] = 0
    CHECK((L.normal_form("[x,y]") + L.normal_form("[y,x]")).empty());
    CHECK((L.normal_form("[x,z]") - L.normal_form("[z,x]")).empty());
    CHECK(L.normal_form(" [ [x ,y], z ] ") == L.normal_form("[[x,y],z]"));

    auto kind = [&](const char* s) {
        try {
            L.normal_form(s);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidStructure;
    };
    CHECK(kind("[x,w]") == ErrorKind::UnknownGenerator);
    CHECK(kind("[x,y") == ErrorKind::ParseError);
    CHECK(kind("[x,y]]") == ErrorKind::ParseError);
    CHECK(kind("[[z,z],[z,y]]") == ErrorKind::WindowTooSmall);

    // graded Jacobi on random homogeneous elements
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> deg(1, 4);
    for (int trial = 0; trial < 60; ++trial) {
        int da = deg(rng), db = deg(rng), dc = deg(rng);
        if (da + db + dc > 9) continue;
        SparseVec a = random_element(L, da, rng), b = random_element(L, db, rng), c = random_element(L, dc, rng);
        SparseVec lhs = L.bracket(a, L.bracket(b, c));
        SparseVec rhs = L.bracket(L.bracket(a, b), c);
        rhs.axpy(Rational(parity_sign(static_cast<long long>(da) * db)), L.bracket(b, L.bracket(a, c)));
        CHECK(lhs == rhs);
    }
    CHECK(validate(*L.as_dglie()).ok());
}

TEST_CASE("extend_derivation") {
    FreeLie L(gens({{"x", 1}, {"y", 2}}), 7);
    std::size_t nx = L.generator_index(0), ny = L.generator_index(1);

    GradedMap zero = extend_derivation(L, 1, {SparseVec(), SparseVec()});
    CHECK(zero.is_zero());

    // identity on generators acts on a length-k basis element as k
    GradedMap id = extend_derivation(L, 0, {SparseVec::unit(nx), SparseVec::unit(ny)});
    for (std::size_t i = 0; i < L.dim(); ++i) CHECK(id.image(i) == SparseVec::unit(i, Rational(L.length(i))));

    // one odd x, theta(x) = [x,x]
    FreeLie O(gens({{"x", 1}}), 4);
    Derivation th(O, 1, {O.normal_form("[x,x]")});
    CHECK(th.apply(O.normal_form("[x,x]")).empty());

    // Leibniz on all pairs, and linearity in the values
    std::mt19937 rng(3);
    SparseVec vx = random_element(L, 2, rng), vy = random_element(L, 3, rng);
    SparseVec wx = random_element(L, 2, rng), wy = random_element(L, 3, rng);
    Derivation a(L, 1, {vx, vy}), b(L, 1, {wx, wy}), ab(L, 1, {vx + wx, vy + wy});
    for (std::size_t i = 0; i < L.dim(); ++i) {
        for (std::size_t j = 0; j < L.dim(); ++j) {
            if (L.degree(i) + L.degree(j) + 1 > L.max_degree()) continue;
            SparseVec lhs = a.apply(L.bracket(i, j));
            SparseVec rhs = L.bracket(a.on_basis(i), SparseVec::unit(j));
            rhs.axpy(Rational(parity_sign(L.degree(i))), L.bracket(SparseVec::unit(i), a.on_basis(j)));
            CHECK(lhs == rhs);
        }
        if (L.degree(i) + 1 <= L.max_degree()) CHECK(ab.on_basis(i) == a.on_basis(i) + b.on_basis(i));
    }
    CHECK_THROWS_AS(a.on_basis(L.space().global(7, 0)), Error);
    GradedMap ext = extend_derivation(L, 1, {vx, vy});
    CHECK(ext.window_truncated());
}

TEST_CASE("Quillen models: validation") {
    LieModel good(model("CP2", gens({{"x", 1}, {"y", 3}}), {{}, {{Rational(-1, 2), "[x,x]"}}}), 6);
    CHECK(good.minimal());
    CHECK(validate(*good.as_dglie()).ok());

    auto kind = [](const QuillenModel& q, ModelOptions o = {}) {
        try {
            LieModel m(q, 6, o);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::SchemaError;
    };
    CHECK(kind(model("bad", gens({{"x", 1}, {"y", 3}}), {{}, {{Rational(1), "x"}}})) == ErrorKind::DegreeMismatch);
    CHECK(kind(model("lin", gens({{"x", 2}, {"y", 3}}), {{}, {{Rational(1), "x"}}})) == ErrorKind::NotDecomposable);
    CHECK(kind(model("unk", gens({{"x", 2}, {"y", 3}}), {{}, {{Rational(1), "[x,q]"}}})) ==
          ErrorKind::UnknownGenerator);
    CHECK(kind(model("zero", gens({{"x", 0}}))) == ErrorKind::DegreeZeroGenerator);
    // d(dz) = [[a,b],a] != 0
    CHECK(kind(model("d2", gens({{"a", 1}, {"b", 1}, {"y", 3}, {"z", 5}}),
                     {{}, {}, {{Rational(1), "[a,b]"}}, {{Rational(1), "[y,a]"}}})) == ErrorKind::CompositionNotZero);
    CHECK(kind(model("d2", gens({{"x", 2}, {"y", 3}, {"z", 5}}), {{}, {{Rational(1), "[x,x]"}}, {{Rational(1), "[x,y]"}}})) ==
          ErrorKind::DegreeMismatch);

    LieModel nm(model("lin", gens({{"x", 2}, {"y", 3}}), {{}, {{Rational(1), "x"}}}), 6, ModelOptions{true});
    CHECK_FALSE(nm.minimal());
    CHECK(nm.warnings().size() == 1);
    CHECK(validate(*nm.as_dglie()).ok());
}

TEST_CASE("Der L and Der L |x sL for the 2-sphere") {
    LieModel s2(model("S2", gens({{"x", 1}})), 5);
    DerAlgebra der = der_algebra(s2, 3);
    const GradedSpace& s = der.algebra->space();
    CHECK(s.dim(0) == 1);
    CHECK(s.dim(1) == 1);
    CHECK(s.dim(2) == 0);
    CHECK(s.names(1)[0] == "x->[x,x]");
    CHECK(validate(*der.algebra).ok());
    // [theta, theta] = 0 for theta odd, theta(x) = [x,x]
    std::size_t th = s.global(1, 0);
    CHECK(der.algebra->bracket(th, th).empty());

    DerAlgebra sd = der_semidirect(s2, 3);
    const DgLie& g = *sd.algebra;
    CHECK(validate(g).ok());
    std::size_t sx = *sd.sl_index(s2.lie().generator_index(0));
    // d(0, sx) = (ad_x, 0) with ad_x(x) = [x,x]
    CHECK(g.differential(sx) == SparseVec::unit(th));
    // [(theta,0),(0,sx)] = (0, (-1)^|theta| s theta(x))
    std::size_t sxx = *sd.sl_index(s2.lie().space().global(2, 0));
    CHECK(g.bracket(th, sx) == SparseVec::unit(sxx, Rational(-1)));
    CHECK(g.bracket(sx, sxx).empty());

    auto cover = connected_cover(sd.algebra, 1);
    const GradedSpace& cs = cover.algebra->space();
    CHECK(cs.dim(1) == 1);
    CHECK(cs.dim(2) == 1);
    CHECK(cs.dim(3) == 1);
    HomologyReport h = homology(*cover.algebra);
    CHECK(h.dim(1) == 0);
    CHECK(h.dim(2) == 0);
    CHECK(h.dim(3) == 1);

    CHECK_THROWS_AS(der_algebra(s2, 5), Error);
}

TEST_CASE("Der L validates for wedges and CP2") {
    std::vector<LieModel> models;
    models.emplace_back(model("S2vS2", gens({{"a", 1}, {"b", 1}})), 6);
    models.emplace_back(model("CP2", gens({{"x", 1}, {"y", 3}}), {{}, {{Rational(-1, 2), "[x,x]"}}}), 7);
    models.emplace_back(model("S3vS5", gens({{"u", 2}, {"v", 4}})), 8);
    for (const auto& m : models) {
        int hi = m.lie().max_degree() - m.max_generator_degree();
        DerAlgebra sd = der_semidirect(m, hi);
        ValidationReport r = validate(*sd.algebra);
        CAPTURE(m.input().name);
        CHECK(r.ok());
        CHECK(r.checks > 0);
        DerAlgebra d = der_algebra(m, hi);
        CHECK(validate(*d.algebra).ok());
    }
}
