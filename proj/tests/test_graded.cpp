#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"

#include "bautlab/error.hpp"
#include "bautlab/graded.hpp"

using namespace bautlab;

namespace {

SpacePtr small_space() {
    return std::make_shared<GradedSpace>(Window(0, 3),
                                         std::map<int, std::vector<std::string>>{{0, {"a"}}, {1, {"b", "c"}}, {2, {"e"}}});
}

// brute force: count inversions among odd elements directly on the sequence
int sign_oracle(const std::vector<std::size_t>& perm, const std::vector<int>& deg) {
    std::vector<std::size_t> seq(perm.size());
    std::iota(seq.begin(), seq.end(), 0);
    int sign = 1;
    // bubble sort seq into perm order, swapping adjacent elements
    for (std::size_t target = 0; target < perm.size(); ++target) {
        auto pos = static_cast<std::size_t>(std::find(seq.begin(), seq.end(), perm[target]) - seq.begin());
        while (pos > target) {
            if (deg[seq[pos]] % 2 != 0 && deg[seq[pos - 1]] % 2 != 0) sign = -sign;
            std::swap(seq[pos], seq[pos - 1]);
            --pos;
        }
    }
    return sign;
}

}  // namespace

TEST_CASE("koszul sign examples") {
    CHECK(koszul_sign({0, 1, 2}, {1, 3, 5}) == 1);
    CHECK(koszul_sign({1, 0}, {1, 1}) == -1);
    CHECK(koszul_sign({1, 0}, {1, 2}) == 1);
    CHECK(koszul_sign({}, {}) == 1);
    CHECK_THROWS_AS(koszul_sign({0, 0}, {1, 1}), Error);
    CHECK_THROWS_AS(koszul_sign({0, 1}, {1}), Error);
}

TEST_CASE("koszul sign matches adjacent transpositions and is multiplicative") {
    std::mt19937 rng(17);
    for (int t = 0; t < 300; ++t) {
        std::size_t k = rng() % 7;
        std::vector<int> deg(k);
        for (auto& d : deg) d = static_cast<int>(rng() % 7) - 2;
        std::vector<std::size_t> s(k), u(k);
        std::iota(s.begin(), s.end(), 0);
        std::iota(u.begin(), u.end(), 0);
        std::shuffle(s.begin(), s.end(), rng);
        std::shuffle(u.begin(), u.end(), rng);
        CHECK(koszul_sign(s, deg) == sign_oracle(s, deg));
        // apply s, then u to the result: element at position i is the original s[u[i]]
        std::vector<std::size_t> su(k);
        std::vector<int> deg_s(k);
        for (std::size_t i = 0; i < k; ++i) {
            su[i] = s[u[i]];
            deg_s[i] = deg[s[i]];
        }
        CHECK(koszul_sign(su, deg) == koszul_sign(s, deg) * koszul_sign(u, deg_s));
    }
}

TEST_CASE("graded space indexing") {
    auto v = small_space();
    CHECK(v->total_dim() == 4);
    CHECK(v->dim(1) == 2);
    CHECK(v->dim(3) == 0);
    CHECK(v->dim(9) == 0);
    CHECK(v->degree_of(3) == 2);
    CHECK(v->name(2) == "c");
    CHECK(*v->find("e") == 3);
    CHECK(!v->find("z"));
    CHECK_THROWS_AS(GradedSpace(Window(0, 1), {{2, {"x"}}}), Error);
    CHECK_THROWS_AS(GradedSpace(Window(0, 1), {{1, {"x", "x"}}}), Error);
    CHECK_THROWS_AS(Window(2, 1), Error);
}

TEST_CASE("compose with identity and suspension") {
    auto v = small_space();
    std::vector<SparseVec> img(4);
    img[1] = SparseVec::unit(0, Rational(2));
    img[2] = SparseVec::unit(0, Rational(-1));
    img[3] = SparseVec::unit(1) + SparseVec::unit(2);
    auto d = GradedMap::from_images(v, v, -1, img);
    CHECK(compose(GradedMap::identity(v), d) == d);
    CHECK(compose(d, GradedMap::identity(v)) == d);
    CHECK(!compose(d, d).is_zero());  // d(e) = b + c, d(b + c) = a
    CHECK(compose(d, d).image(3) == SparseVec::unit(0));

    auto sv = suspend(*v);
    CHECK(sv->window().lo == 1);
    CHECK(sv->name(0) == "sa");
    CHECK(sv->dim(2) == 2);
    auto s = suspension(v, sv);
    auto si = desuspension(sv, v);
    CHECK(compose(s, si) == GradedMap::identity(sv));
    CHECK(compose(si, s) == GradedMap::identity(v));
    CHECK_THROWS_AS(compose(s, s), Error);
}

TEST_CASE("d squared on a complex is zero and composition is associative") {
    auto v = std::make_shared<GradedSpace>(Window(0, 2),
                                           std::map<int, std::vector<std::string>>{{0, {"a"}}, {1, {"b", "c"}}, {2, {"e"}}});
    std::vector<SparseVec> img(4);
    img[1] = SparseVec::unit(0);
    img[2] = SparseVec::unit(0);
    img[3] = SparseVec::unit(1) - SparseVec::unit(2);
    auto d = GradedMap::from_images(v, v, -1, img);
    CHECK(compose(d, d).is_zero());
    auto id = GradedMap::identity(v);
    CHECK(compose(compose(d, id), d) == compose(d, compose(id, d)));
}

TEST_CASE("composition through degrees outside the window is flagged") {
    auto v = std::make_shared<GradedSpace>(Window(0, 1), std::map<int, std::vector<std::string>>{{0, {"a"}}, {1, {"b"}}});
    std::vector<SparseVec> img{SparseVec{}, SparseVec::unit(0)};
    auto d = GradedMap::from_images(v, v, -1, img);
    auto dd = compose(d, d);
    CHECK(dd.is_zero());
    CHECK(dd.window_truncated());
}
