/**
 * Chevalley-Eilenberg chains C(L) on a free dg Lie algebra: words
 * sx_1 ^ ... ^ sx_k in the free-Lie basis, the coderivation differential,
 * the unshuffle coproduct, the universal twisting function and the
 * coderivation action of Der L |x sL.
 *
 * Conventions. Words are stored with factors sorted by free-Lie basis index.
 * The differential is the coderivation extending
 *   q1(sx) = -s dx,    q2(sx ^ sy) = (-1)^|x| s[x,y],
 * and a coderivation with projection u acts by
 *   D(w) = sum over subsets S of positions, eps(S) u(w_S) ^ w_rest
 * where eps(S) is the Koszul sign of moving w_S to the front.
 */
#ifndef BAUTLAB_CE_HPP
#define BAUTLAB_CE_HPP

#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "bautlab/dgla.hpp"
#include "bautlab/freelie.hpp"

namespace bautlab {

struct CoproductTerm {
    std::size_t left;
    std::size_t right;
    Rational coeff;
};

/// A graded coalgebra given on a basis: differential images and coproduct
/// terms. `unit` is the basis element dual to the counit, if present.
struct Coalgebra {
    SpacePtr space;
    std::vector<SparseVec> d;
    std::vector<std::vector<CoproductTerm>> coproduct;
    std::optional<std::size_t> unit;

    std::size_t dim() const { return space->total_dim(); }
    int degree(std::size_t i) const { return space->degree_of(i); }
};

/// Checks d^2 = 0, coassociativity, the counit laws and that d is a
/// coderivation, on every basis element whose data lies in the window.
ValidationReport validate(const Coalgebra& c);

/// Homology of a coalgebra's underlying chain complex, with the same trust
/// rule as for dg Lie algebras.
HomologyReport homology(const Coalgebra& c);

class CeComplex {
public:
    /// Words up to degree max_degree. Requires the model's free Lie algebra to
    /// reach degree max_degree - 1.
    CeComplex(std::shared_ptr<const LieModel> model, int max_degree, bool reduced);

    const LieModel& model() const { return *model_; }
    const FreeLie& lie() const { return model_->lie(); }
    bool reduced() const { return reduced_; }
    int max_degree() const { return max_degree_; }

    const Coalgebra& coalgebra() const { return co_; }
    const GradedSpace& space() const { return *co_.space; }
    SpacePtr space_ptr() const { return co_.space; }
    std::size_t dim() const { return co_.dim(); }
    int degree(std::size_t i) const { return co_.degree(i); }

    const std::vector<std::size_t>& word(std::size_t i) const { return words_[i]; }
    std::size_t length(std::size_t i) const { return words_[i].size(); }
    std::optional<std::size_t> find(const std::vector<std::size_t>& sorted_factors) const;
    std::optional<std::size_t> unit() const { return co_.unit; }

    /// The wedge of the given factors (in the given order) as a signed basis
    /// word; nullopt when it vanishes or lies outside the window.
    std::optional<std::pair<std::size_t, int>> normalize(const std::vector<std::size_t>& factors) const;
    /// Degree of s x for a free-Lie basis element x.
    int suspended_degree(std::size_t lie_index) const { return lie().degree(lie_index) + 1; }

    const SparseVec& d(std::size_t i) const { return co_.d[i]; }
    SparseVec d(const SparseVec& v) const;
    const std::vector<CoproductTerm>& coproduct(std::size_t i) const { return co_.coproduct[i]; }

    /// Coderivation with projection components u0 (value on the empty word,
    /// an element of L to be suspended) and u1 (a map L -> L applied to single
    /// factors, then suspended), evaluated on a basis word. Terms of degree
    /// above the window are dropped.
    SparseVec coderivation(std::size_t w, int degree, const SparseVec* u0,
                           const std::function<SparseVec(std::size_t)>* u1) const;

private:
    void enumerate();
    SparseVec wedge_front(const SparseVec& lie_elem, const std::vector<std::size_t>& rest,
                          const Rational& coeff) const;

    std::shared_ptr<const LieModel> model_;
    int max_degree_;
    bool reduced_;
    std::vector<std::vector<std::size_t>> words_;
    struct VecHash {
        std::size_t operator()(const std::vector<std::size_t>& v) const;
    };
    std::unordered_map<std::vector<std::size_t>, std::size_t, VecHash> index_;
    Coalgebra co_;
};

/// tau_L on each basis word: sx -> x on words of length one, zero otherwise.
std::vector<SparseVec> universal_twisting(const CeComplex& c);

/// Maurer-Cartan defect  d f - (-1)^|f| f d + 1/2 [f, f]  of a map f on the
/// coalgebra, evaluated on every basis word. Nonzero values only.
/// Words whose defect would need target data outside the window are counted
/// in `skipped`.
struct McDefect {
    std::vector<std::pair<std::size_t, SparseVec>> values;
    std::size_t skipped = 0;
    bool zero() const { return values.empty(); }
};
McDefect mc_defect(const Coalgebra& c, const std::vector<SparseVec>& f, int f_degree,
                   const std::function<SparseVec(const SparseVec&, const SparseVec&)>& bracket,
                   const std::function<SparseVec(const SparseVec&)>& d,
                   int target_max_degree);

/// MC defect of tau_L in Hom(C, L).
McDefect universal_twisting_defect(const CeComplex& c);

/// g_L : reduced C(L) -> sV, word-length-one projection followed by
/// abelianization, with a chain-map certificate.
struct IndecomposableMap {
    /// sV = sL/[L,L] with zero differential and primitive coproduct.
    Coalgebra target;
    std::vector<SparseVec> images;  // per CE word
    ValidationReport certificate;
};
/// sV = sL/[L,L] with zero differential and primitive coproduct, basis s<generator>.
Coalgebra suspended_indecomposables(const FreeLie& L);
/// Throws NotMinimal if the differential of the model is not decomposable.
IndecomposableMap indec_projection(const CeComplex& c);

/// chi(theta, sz) for an element of Der L (|x sL) as images of all CE words
/// whose image stays in the window (others are left empty and listed).
struct CoderivationImage {
    int degree = 0;
    std::vector<SparseVec> images;
    std::vector<std::size_t> truncated;
};
CoderivationImage coder_action_chi(const CeComplex& c, const DerAlgebra& der, const SparseVec& element);

/// Delta o D = (D (x) 1 + 1 (x) D) o Delta on all words where both sides are in the window.
ValidationReport check_coderivation(const CeComplex& c, const CoderivationImage& D);

}  // namespace bautlab

#endif
