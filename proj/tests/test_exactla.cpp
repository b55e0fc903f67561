#include <random>

#include "doctest.h"

#include "bautlab/error.hpp"
#include "bautlab/exactla.hpp"

using namespace bautlab;
using namespace bautlab::exactla;

namespace {

RationalMatrix dense(std::vector<std::vector<Rational>> rows) { return RationalMatrix::from_dense(rows); }

RationalMatrix random_matrix(std::mt19937& rng, std::size_t r, std::size_t c, int density_pct) {
    std::uniform_int_distribution<int> val(-3, 3), pct(0, 99);
    RationalMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            if (pct(rng) < density_pct) m.set(i, j, Rational(val(rng)));
    return m;
}

// unit lower triangular times unit upper triangular: always invertible
RationalMatrix random_invertible(std::mt19937& rng, std::size_t n) {
    std::uniform_int_distribution<int> val(-2, 2);
    RationalMatrix lo = RationalMatrix::identity(n), up = RationalMatrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            lo.set(i, j, Rational(val(rng)));
            up.set(j, i, Rational(val(rng), 3));
        }
    return lo * up;
}

}  // namespace

TEST_CASE("rank examples") {
    CHECK(rank(RationalMatrix(0, 0)) == 0);
    CHECK(rank(dense({{1, 0}, {0, 0}})) == 1);
    CHECK(rank(dense({{1, 2}, {2, 4}})) == 1);
    CHECK(rank(RationalMatrix::identity(5)) == 5);
}

TEST_CASE("kernel examples") {
    CHECK(kernel_basis(RationalMatrix::identity(2)).empty());
    CHECK(kernel_basis(RationalMatrix(2, 3)).size() == 3);
    auto m = dense({{1, 2}, {2, 4}});
    auto k = kernel_basis(m);
    REQUIRE(k.size() == 1);
    CHECK(m.apply(k[0]).empty());
    CHECK(k[0] == SparseVec::from_terms({{0, Rational(-2)}, {1, Rational(1)}}));
}

TEST_CASE("homology_dim examples") {
    CHECK(homology_dim(RationalMatrix(1, 2), RationalMatrix(2, 1)) == 2);
    CHECK(homology_dim(dense({{1, 0}}), RationalMatrix(2, 1)) == 1);
    CHECK(homology_dim(RationalMatrix(1, 2), dense({{1}, {0}})) == 1);
    CHECK_THROWS_AS(homology_dim(dense({{1, 0}}), dense({{1}, {0}})), Error);
    try {
        homology_dim(dense({{1, 0}}), dense({{1}, {0}}));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::CompositionNotZero);
    }
    CHECK_THROWS_AS(homology_dim(RationalMatrix(1, 3), RationalMatrix(2, 1)), Error);
}

TEST_CASE("dense and sparse rank agree and rank + nullity = cols") {
    std::mt19937 rng(11);
    for (int t = 0; t < 200; ++t) {
        std::size_t r = 1 + rng() % 9, c = 1 + rng() % 9;
        auto m = random_matrix(rng, r, c, 20 + static_cast<int>(rng() % 70));
        std::size_t rd = rank_dense(m), rs = rank_sparse(m);
        CHECK(rd == rs);
        auto k = kernel(m);
        CHECK(rd + k.vectors.size() == c);
        for (std::size_t i = 0; i < k.vectors.size(); ++i) {
            CHECK(m.apply(k.vectors[i]).empty());
            // coordinates read off at free columns reproduce the vector
            SparseVec coords = k.coordinates(k.vectors[i]);
            CHECK(coords == SparseVec::unit(i));
        }
        CHECK(rank(m.transpose()) == rd);
    }
}

TEST_CASE("echelon coordinates reproduce vectors in the span") {
    std::mt19937 rng(3);
    for (int t = 0; t < 50; ++t) {
        auto m = random_matrix(rng, 8, 6, 50);
        Echelon e(8);
        std::vector<SparseVec> accepted;
        for (std::size_t j = 0; j < 6; ++j)
            if (e.insert(m.column(j))) accepted.push_back(m.column(j));
        for (std::size_t j = 0; j < 6; ++j) {
            auto c = e.coordinates(m.column(j));
            REQUIRE(c.has_value());
            SparseVec back;
            for (const auto& [k, x] : *c) back.axpy(x, accepted[k]);
            CHECK(back == m.column(j));
        }
        if (e.rank() < 8) {
            // something outside the span exists among the unit vectors
            bool found = false;
            for (std::size_t i = 0; i < 8; ++i) found = found || !e.contains(SparseVec::unit(i));
            CHECK(found);
        }
    }
}

TEST_CASE("homology dimension is invariant under change of basis") {
    std::mt19937 rng(5);
    for (int t = 0; t < 40; ++t) {
        // build C2 -> C1 -> C0 with d1 d2 = 0 by taking d2 inside ker d1
        std::size_t n0 = 1 + rng() % 5, n1 = 2 + rng() % 5, n2 = 1 + rng() % 5;
        auto d1 = random_matrix(rng, n0, n1, 60);
        auto k = kernel_basis(d1);
        RationalMatrix d2(n1, n2);
        std::uniform_int_distribution<int> val(-2, 2);
        for (std::size_t j = 0; j < n2; ++j) {
            SparseVec col;
            for (const auto& v : k) col.axpy(Rational(val(rng)), v);
            d2.set_column(j, col);
        }
        std::size_t h = homology_dim(d1, d2);
        // change bases by P0, P1, P2: d1' = P0 d1 P1, d2' = P1^-1 d2 P2
        auto p0 = random_invertible(rng, n0), p1 = random_invertible(rng, n1), p2 = random_invertible(rng, n2);
        RationalMatrix rhs = d2 * p2;
        RationalMatrix d2p(n1, n2);
        for (std::size_t j = 0; j < n2; ++j) {
            Echelon e(n1);
            for (std::size_t c = 0; c < n1; ++c) e.insert(p1.column(c));
            auto coords = e.coordinates(rhs.column(j));
            REQUIRE(coords.has_value());
            d2p.set_column(j, *coords);
        }
        CHECK(homology_dim(p0 * d1 * p1, d2p) == h);
    }
}
