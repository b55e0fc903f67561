// Small builders shared by the unit tests.
#ifndef BAUTLAB_TESTS_SUPPORT_HPP
#define BAUTLAB_TESTS_SUPPORT_HPP

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bautlab/dgla.hpp"

namespace testsupport {

using bautlab::DgLie;
using bautlab::GradedSpace;
using bautlab::Rational;
using bautlab::SparseVec;
using bautlab::Window;

inline bautlab::SpacePtr space(Window w, const std::vector<std::pair<std::string, int>>& basis) {
    std::map<int, std::vector<std::string>> names;
    for (const auto& [n, d] : basis) names[d].push_back(n);
    return std::make_shared<GradedSpace>(w, names);
}

inline SparseVec e(const GradedSpace& s, const std::string& name, const Rational& c = Rational(1)) {
    return SparseVec::unit(*s.find(name), c);
}

/// Direct sum of two dg Lie algebras with the same window.
inline std::shared_ptr<DgLie> direct_sum(const DgLie& a, const DgLie& b) {
    std::map<int, std::vector<std::string>> names;
    const Window& w = a.window();
    for (int n = w.lo; n <= w.hi; ++n) {
        for (const auto& x : a.space().names(n)) names[n].push_back(x);
        for (const auto& x : b.space().names(n)) names[n].push_back(x);
    }
    auto s = std::make_shared<GradedSpace>(w, names);
    auto ia = [&](std::size_t i) { return *s->find(a.degree(i), a.space().name(i)); };
    auto ib = [&](std::size_t i) { return *s->find(b.degree(i), b.space().name(i)); };
    auto map_vec = [](const SparseVec& v, auto f) {
        SparseVec out;
        for (const auto& [k, c] : v) out.add(f(k), c);
        return out;
    };
    auto g = std::make_shared<DgLie>(s);
    for (std::size_t i = 0; i < a.dim(); ++i) {
        g->set_differential(ia(i), map_vec(a.differential(i), ia));
        for (const auto& [j, v] : a.bracket_row(i)) g->set_bracket(ia(i), ia(j), map_vec(v, ia));
    }
    for (std::size_t i = 0; i < b.dim(); ++i) {
        g->set_differential(ib(i), map_vec(b.differential(i), ib));
        for (const auto& [j, v] : b.bracket_row(i)) g->set_bracket(ib(i), ib(j), map_vec(v, ib));
    }
    return g;
}

}  // namespace testsupport

#endif
