/**
 * Free graded Lie algebras on finitely many generators, realized inside the
 * tensor algebra, together with minimal Quillen models, derivations, Der L and
 * the classifier Der L |x sL.
 *
 * The basis in each degree is a maximal independent set of left-normed
 * brackets [b, g] (b a basis element of lower degree, g a generator), chosen
 * separately for each multidegree. Brackets are resolved into this basis by
 * reading tensor coefficients at one pivot word per basis element.
 */
#ifndef BAUTLAB_FREELIE_HPP
#define BAUTLAB_FREELIE_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bautlab/dgla.hpp"

namespace bautlab {

struct Generator {
    std::string name;
    int degree = 1;
};

/// A fully parenthesized bracket expression in generator names.
struct Monomial {
    int generator = -1;  // >= 0 for a leaf
    std::shared_ptr<const Monomial> left, right;

    bool is_leaf() const { return generator >= 0; }
};

/// Parses "x" or "[a,b]" recursively. Throws ParseError / UnknownGenerator.
Monomial parse_monomial(std::string_view text, const std::vector<Generator>& gens);

/// Word in the tensor algebra: generator indices packed four bits each.
struct Word {
    unsigned __int128 bits = 0;
    std::uint32_t len = 0;

    unsigned letter(std::uint32_t p) const { return static_cast<unsigned>((bits >> (4 * p)) & 0xF); }
    Word prefix(std::uint32_t n) const;
    Word suffix_from(std::uint32_t n) const;
    friend Word operator+(const Word& a, const Word& b);
    friend bool operator==(const Word& a, const Word& b) { return a.len == b.len && a.bits == b.bits; }
};

struct WordHash {
    std::size_t operator()(const Word& w) const;
};

using Tensor = std::unordered_map<Word, long long, WordHash>;
using RTensor = std::unordered_map<Word, Rational, WordHash>;

/// Single-letter word.
Word letter_word(unsigned generator);

class FreeLie {
public:
    /// Builds the basis in degrees 1..max_degree. Throws DegreeZeroGenerator.
    FreeLie(std::vector<Generator> generators, int max_degree);

    const std::vector<Generator>& generators() const { return gens_; }
    std::size_t generator_index(std::size_t k) const { return gen_basis_[k]; }
    std::optional<std::size_t> find_generator(const std::string& name) const;
    int max_degree() const { return max_degree_; }

    SpacePtr space_ptr() const { return space_; }
    const GradedSpace& space() const { return *space_; }
    std::size_t dim() const { return space_->total_dim(); }
    int degree(std::size_t i) const { return space_->degree_of(i); }
    /// Bracket length (1 for generators).
    int length(std::size_t i) const { return static_cast<int>(info_[i].word_len); }
    bool is_generator(std::size_t i) const { return info_[i].gen >= 0 && info_[i].sub < 0; }
    /// For a non-generator basis element [b, g]: (g, b) as (generator index, basis index).
    std::pair<int, long> split(std::size_t i) const { return {info_[i].gen, info_[i].sub}; }
    const Tensor& tensor(std::size_t i) const { return tensors_[i]; }

    /// [e_i, e_j] in the basis; zero when the degree exceeds the window.
    SparseVec bracket(std::size_t i, std::size_t j) const;
    SparseVec bracket(const SparseVec& a, const SparseVec& b) const;
    /// Throws WindowTooSmall if the expression's degree exceeds the window.
    SparseVec normal_form(const Monomial& m) const;
    SparseVec normal_form(std::string_view expr) const;
    int degree_of(const Monomial& m) const;
    /// Coordinates of a tensor that lies in L (nullopt otherwise).
    std::optional<SparseVec> from_tensor(const RTensor& t) const;
    RTensor to_tensor(const SparseVec& v) const;

    /// The graded Lie algebra as a DgLie with the given differential images
    /// (one per basis element; empty for zero).
    std::shared_ptr<DgLie> as_dglie(const std::vector<SparseVec>& d = {}) const;

private:
    struct Info {
        int gen = -1;   // last generator of [b, g] or the generator itself
        long sub = -1;  // b, or -1 for generators
        std::uint32_t word_len = 1;
        std::string content;
    };
    struct Block {
        std::vector<std::size_t> basis;     // global indices
        std::vector<Word> pivots;           // one per basis element
        std::vector<SparseVec> inv_cols;    // coords = sum_r (coefficient at pivot r) * inv_cols[r]
    };

    void build();
    SparseVec resolve(const Block& blk, const std::vector<Rational>& at_pivots) const;
    SparseVec compute_bracket(std::size_t i, std::size_t j) const;

    std::vector<Generator> gens_;
    int max_degree_;
    std::vector<std::size_t> gen_basis_;
    SpacePtr space_;
    std::vector<Info> info_;
    std::vector<Tensor> tensors_;
    std::map<std::string, Block> blocks_;

    mutable std::mutex memo_mutex_;
    mutable std::unordered_map<unsigned long long, SparseVec> memo_;
};

/// Degree-r derivation of a free Lie algebra, determined by its values on the
/// generators and extended by the Leibniz rule. Extensions are memoized.
class Derivation {
public:
    Derivation(const FreeLie& lie, int degree, std::vector<SparseVec> values);

    int degree() const { return degree_; }
    const std::vector<SparseVec>& values() const { return values_; }
    /// Throws WindowTooSmall if the image degree exceeds the window.
    SparseVec on_basis(std::size_t i) const;
    SparseVec apply(const SparseVec& v) const;

private:
    const FreeLie* lie_;
    int degree_;
    std::vector<SparseVec> values_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::size_t, SparseVec> cache_;
};

/// The extension of a derivation as a graded map on L; blocks whose target
/// degree exceeds the window are dropped and the map is flagged truncated.
GradedMap extend_derivation(const FreeLie& lie, int degree, const std::vector<SparseVec>& values);

/// Minimal Quillen model (L(V), delta) as read from input.
struct QuillenModel {
    std::string name;
    std::vector<Generator> generators;
    /// delta(v) for each generator as (coefficient, bracket expression) terms.
    std::vector<std::vector<std::pair<Rational, std::string>>> differential;
};

struct ModelOptions {
    bool allow_nonminimal = false;
};

/// A Quillen model with its free Lie algebra built up to max_degree.
class LieModel {
public:
    LieModel(const QuillenModel& q, int max_degree, const ModelOptions& opts = {});

    const QuillenModel& input() const { return input_; }
    const FreeLie& lie() const { return *lie_; }
    std::shared_ptr<const FreeLie> lie_ptr() const { return lie_; }
    const Derivation& delta() const { return *delta_; }
    SparseVec d(const SparseVec& v) const { return delta_->apply(v); }
    bool minimal() const { return minimal_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    int max_generator_degree() const;
    /// L with differential, as a DgLie on degrees 1..max_degree.
    std::shared_ptr<DgLie> as_dglie() const;

private:
    QuillenModel input_;
    std::shared_ptr<FreeLie> lie_;
    std::unique_ptr<Derivation> delta_;
    bool minimal_ = true;
    std::vector<std::string> warnings_;
};

/// Der L (and optionally Der L |x sL) up to degree hi.
struct DerAlgebra {
    struct Elem {
        bool sl = false;
        std::size_t gen = 0;    // derivations: the generator sent to a basis element
        std::size_t value = 0;  // L basis index (the value, or the suspended element)
    };

    std::shared_ptr<DgLie> algebra;
    std::shared_ptr<const FreeLie> lie;
    bool with_sl = false;
    std::size_t num_generators = 0;
    std::vector<Elem> elems;
    /// Extension caches for the derivation basis elements (null for sL elements).
    std::vector<std::shared_ptr<const Derivation>> derivations;

    std::optional<std::size_t> der_index(std::size_t gen, std::size_t value) const;
    std::optional<std::size_t> sl_index(std::size_t value) const;
    /// Coordinates of the derivation with the given values on generators.
    /// Throws WindowTooSmall if some value has no basis element in the window.
    SparseVec from_values(const std::vector<SparseVec>& values) const;
    SparseVec suspended(const SparseVec& lie_element) const;
    /// Values on generators of the derivation part of an element.
    std::vector<SparseVec> values(const SparseVec& element) const;
    /// theta(x) for the derivation part theta of an element.
    SparseVec apply(const SparseVec& element, const SparseVec& x) const;
    /// The sL part of an element, desuspended to L.
    SparseVec sl_part(const SparseVec& element) const;

    std::vector<std::unordered_map<std::size_t, std::size_t>> der_lookup;
    std::unordered_map<std::size_t, std::size_t> sl_lookup;
};

/// Der L with the commutator bracket and d(theta) = delta theta - (-1)^|theta| theta delta.
/// Requires the free Lie algebra to reach degree max generator degree + hi.
DerAlgebra der_algebra(const LieModel& model, int hi);
/// Der L |x_ad sL with [theta, sx] = (-1)^|theta| s theta(x) and
/// d(theta, sx) = (d theta + ad_x, -s dx).
DerAlgebra der_semidirect(const LieModel& model, int hi);

}  // namespace bautlab

#endif
