#include <random>

#include "doctest.h"
#include "support.hpp"

#include "bautlab/ce.hpp"
#include "bautlab/error.hpp"

using namespace bautlab;
using namespace testsupport;

namespace {

using Terms = std::vector<std::vector<std::pair<Rational, std::string>>>;

std::shared_ptr<LieModel> make(const std::string& name, std::vector<Generator> g, Terms d, int max_degree) {
    return std::make_shared<LieModel>(QuillenModel{name, std::move(g), std::move(d)}, max_degree);
}

std::shared_ptr<LieModel> s2(int n) { return make("S2", {{"x", 1}}, {}, n); }
std::shared_ptr<LieModel> s3(int n) { return make("S3", {{"x", 2}}, {}, n); }
std::shared_ptr<LieModel> cp2(int n) { return make("CP2", {{"x", 1}, {"y", 3}}, {{}, {{Rational(-1, 2), "[x,x]"}}}, n); }
std::shared_ptr<LieModel> wedge(int n) { return make("S2vS2", {{"a", 1}, {"b", 1}}, {}, n); }

SparseVec apply_images(const std::vector<SparseVec>& images, const SparseVec& v) {
    SparseVec out;
    for (const auto& [k, c] : v) out.axpy(c, images[k]);
    return out;
}

}  // namespace

TEST_CASE("ce: small differentials") {
    CeComplex c(s2(5), 6, false);
    const GradedSpace& s = c.space();
    CHECK(s.names(0) == std::vector<std::string>{"1"});
    std::size_t sx = *s.find("sx"), sxx = *s.find("s[x,x]"), sx2 = *s.find("sx^sx");
    CHECK(c.d(sx).empty());
    CHECK(c.d(sxx).empty());
    CHECK(c.d(sx2) == SparseVec::unit(sxx, Rational(-1)));
    // s[x,x] is odd, so it never repeats
    CHECK_FALSE(s.find("s[x,x]^s[x,x]"));

    // a single even generator: abelian, zero differential
    CeComplex ab(make("S3", {{"y", 2}}, {}, 8), 9, false);
    for (std::size_t i = 0; i < ab.dim(); ++i) CHECK(ab.d(i).empty());
    CHECK(ab.space().dim(3) == 1);
    CHECK(ab.space().dim(6) == 0);  // sy is odd

    CHECK_THROWS_AS(CeComplex(s2(3), 6, false), Error);
}

TEST_CASE("ce: coproduct examples and axioms") {
    CeComplex c(s2(6), 7, false);
    const GradedSpace& s = c.space();
    std::size_t one = *c.unit(), sx = *s.find("sx");
    REQUIRE(c.coproduct(one).size() == 1);
    CHECK(c.coproduct(one)[0].left == one);
    CHECK(c.coproduct(one)[0].right == one);
    CHECK(c.coproduct(sx).size() == 2);

    CeComplex r(s2(6), 7, true);
    CHECK(r.coproduct(*r.space().find("sx")).empty());
    // sx^sx: 2 sx (x) sx in the reduced coproduct
    auto t = r.coproduct(*r.space().find("sx^sx"));
    REQUIRE(t.size() == 1);
    CHECK(t[0].coeff == Rational(2));

    for (auto m : {s2(9), s3(9), cp2(9), wedge(7)}) {
        CAPTURE(m->input().name);
        int D = m->lie().max_degree() + 1;
        CHECK(validate(CeComplex(m, D, false).coalgebra()).ok());
        CHECK(validate(CeComplex(m, D, true).coalgebra()).ok());
    }
}

TEST_CASE("ce: d^2 = 0 for CP2 up to degree 12") {
    CeComplex c(cp2(11), 12, false);
    auto r = validate(c.coalgebra());
    CHECK(r.ok());
    CHECK(r.checks > 0);
}

TEST_CASE("ce: universal twisting function is Maurer-Cartan") {
    for (auto m : {s2(11), s3(11), cp2(11), wedge(9)}) {
        CAPTURE(m->input().name);
        CeComplex c(m, m->lie().max_degree() + 1, true);
        auto tau = universal_twisting(c);
        CHECK(tau[*c.find({0})] == SparseVec::unit(0));
        for (std::size_t w = 0; w < c.dim(); ++w)
            if (c.length(w) != 1) CHECK(tau[w].empty());
        McDefect def = universal_twisting_defect(c);
        CHECK(def.zero());
        CHECK(def.skipped == 0);

        // doubling tau leaves a nonzero defect when L has brackets
        for (auto& v : tau) v.scale(Rational(2));
        const FreeLie& L = c.lie();
        McDefect twice = mc_defect(
            c.coalgebra(), tau, -1, [&](const SparseVec& a, const SparseVec& b) { return L.bracket(a, b); },
            [&](const SparseVec& a) { return m->d(a); }, L.max_degree());
        if (m->input().name != "S3") CHECK_FALSE(twice.zero());
    }
}

TEST_CASE("ce: homology of reduced chains is the reduced homology of the space") {
    struct Case {
        std::shared_ptr<LieModel> m;
        std::map<int, std::size_t> expected;
    };
    std::vector<Case> cases{{s2(10), {{2, 1}}}, {s3(10), {{3, 1}}}, {cp2(10), {{2, 1}, {4, 1}}},
                            {wedge(10), {{2, 2}}}, {make("S4", {{"x", 3}}, {}, 10), {{4, 1}}}};
    for (const auto& cs : cases) {
        CAPTURE(cs.m->input().name);
        CeComplex c(cs.m, 11, true);
        HomologyReport h = homology(c.coalgebra());
        for (int n = 1; n <= 10; ++n) {
            CAPTURE(n);
            REQUIRE(h.is_trusted(n));
            std::size_t want = cs.expected.count(n) ? cs.expected.at(n) : 0;
            CHECK(h.dim(n) == want);
        }
        CHECK_FALSE(h.is_trusted(11));

        IndecomposableMap g = indec_projection(c);
        CHECK(g.certificate.ok());
        CHECK(g.certificate.checks == c.dim());
    }
}

TEST_CASE("ce: g_L examples and minimality") {
    CeComplex c(s2(5), 6, true);
    IndecomposableMap g = indec_projection(c);
    CHECK(g.images[*c.space().find("sx")] == SparseVec::unit(*g.target.space->find("sx")));
    CHECK(g.images[*c.space().find("s[x,x]")].empty());
    CHECK(g.images[*c.space().find("sx^sx")].empty());

    auto nm = std::make_shared<LieModel>(QuillenModel{"lin", {{"x", 2}, {"y", 3}}, {{}, {{Rational(1), "x"}}}}, 6,
                                         ModelOptions{true});
    CeComplex cn(nm, 7, true);
    try {
        indec_projection(cn);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotMinimal);
    }
}

TEST_CASE("ce: chi examples") {
    auto m = s2(6);
    CeComplex c(m, 7, false);
    DerAlgebra der = der_semidirect(*m, 5);
    const GradedSpace& ds = der.algebra->space();
    std::size_t th = *ds.find("x->[x,x]");
    std::size_t sx_der = *ds.find("sx");
    std::size_t sx = *c.space().find("sx"), sxx = *c.space().find("s[x,x]");

    CoderivationImage a = coder_action_chi(c, der, SparseVec::unit(th));
    CHECK(a.images[sx] == SparseVec::unit(sxx, Rational(-1)));  // (-1)^|theta| s theta(x)
    CoderivationImage b = coder_action_chi(c, der, SparseVec::unit(sx_der));
    CHECK(b.images[*c.unit()] == SparseVec::unit(sx));
    CHECK(b.images[sx] == SparseVec::unit(*c.space().find("sx^sx")));

    CeComplex r(m, 7, true);
    CHECK_THROWS_AS(coder_action_chi(r, der, SparseVec::unit(sx_der)), Error);
}

TEST_CASE("ce: chi is a morphism of dg Lie algebras into coderivations") {
    for (auto m : {s2(7), cp2(7), wedge(5)}) {
        CAPTURE(m->input().name);
        int D = m->lie().max_degree() + 1;
        CeComplex c(m, D, false);
        DerAlgebra der = der_semidirect(*m, m->lie().max_degree() - m->max_generator_degree());
        const DgLie& g = *der.algebra;
        std::vector<CoderivationImage> chi;
        for (std::size_t i = 0; i < g.dim(); ++i) chi.push_back(coder_action_chi(c, der, SparseVec::unit(i)));

        auto in_window = [&](const CoderivationImage& f, std::size_t w) {
            return c.degree(w) + f.degree <= D;
        };
        auto compose_ok = [&](const CoderivationImage& f, const CoderivationImage& h, std::size_t w) {
            return in_window(h, w) && c.degree(w) + h.degree + f.degree <= D;
        };

        std::size_t checked = 0;
        for (std::size_t i = 0; i < g.dim(); ++i) {
            CHECK(check_coderivation(c, chi[i]).ok());
            // chi(d a) = Q chi(a) - (-1)^|a| chi(a) Q
            CoderivationImage da = coder_action_chi(c, der, g.differential(i));
            for (std::size_t w = 0; w < c.dim(); ++w) {
                if (!in_window(chi[i], w)) continue;
                SparseVec lhs = g.differential(i).empty() ? SparseVec() : da.images[w];
                SparseVec rhs = c.d(chi[i].images[w]);
                rhs.axpy(Rational(-parity_sign(chi[i].degree)), apply_images(chi[i].images, c.d(w)));
                CHECK(lhs == rhs);
                ++checked;
            }
            for (std::size_t j = i; j < g.dim(); ++j) {
                SparseVec br = g.bracket(i, j);
                if (!g.bracket_in_window(i, j)) continue;
                CoderivationImage cb = coder_action_chi(c, der, br);
                long long sign = parity_sign(static_cast<long long>(chi[i].degree) * chi[j].degree);
                for (std::size_t w = 0; w < c.dim(); ++w) {
                    if (!compose_ok(chi[i], chi[j], w) || !compose_ok(chi[j], chi[i], w)) continue;
                    SparseVec rhs = apply_images(chi[i].images, chi[j].images[w]);
                    rhs.axpy(Rational(-sign), apply_images(chi[j].images, chi[i].images[w]));
                    SparseVec lhs = br.empty() ? SparseVec() : cb.images[w];
                    CHECK(lhs == rhs);
                    ++checked;
                }
            }
        }
        CHECK(checked > 50);
    }
}

TEST_CASE("ce: tau_L is a map of Der L-modules") {
    auto m = cp2(8);
    CeComplex c(m, 9, true);
    DerAlgebra der = der_algebra(*m, m->lie().max_degree() - m->max_generator_degree());
    auto tau = universal_twisting(c);
    for (std::size_t i = 0; i < der.algebra->dim(); ++i) {
        CoderivationImage x = coder_action_chi(c, der, SparseVec::unit(i));
        Rational sign(parity_sign(x.degree));
        for (std::size_t w = 0; w < c.dim(); ++w) {
            if (c.degree(w) + x.degree > c.max_degree()) continue;
            SparseVec lhs = apply_images(tau, x.images[w]);
            SparseVec rhs = der.apply(SparseVec::unit(i), tau[w]);
            rhs.scale(sign);
            CHECK(lhs == rhs);
        }
    }
}
