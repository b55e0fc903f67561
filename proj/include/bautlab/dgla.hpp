/**
 * Differential graded Lie algebras given by an explicit basis, bracket
 * structure constants and differential images.
 *
 * Brackets are stored for basis pairs i <= j only; [e_j, e_i] is recovered by
 * graded antisymmetry. Brackets whose degree leaves the window are not stored
 * and read as zero, and every check that would need them is skipped and
 * reported as truncated instead.
 */
#ifndef BAUTLAB_DGLA_HPP
#define BAUTLAB_DGLA_HPP

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "bautlab/graded.hpp"

namespace bautlab {

struct Defect {
    std::string kind;   // d2, antisymmetry, jacobi, leibniz, chain, bracket, ...
    std::string where;  // basis elements involved
    std::string value;  // the nonzero discrepancy
};

struct ValidationReport {
    std::vector<Defect> defects;
    /// Degrees in which some check needed data outside the window.
    std::set<int> truncated_degrees;
    std::size_t checks = 0;

    bool ok() const { return defects.empty(); }
    void merge(const ValidationReport& other);
    std::string summary() const;
};

class DgLie {
public:
    DgLie() = default;
    explicit DgLie(SpacePtr space);

    const GradedSpace& space() const { return *space_; }
    SpacePtr space_ptr() const { return space_; }
    const Window& window() const { return space_->window(); }
    std::size_t dim() const { return space_->total_dim(); }
    int degree(std::size_t i) const { return space_->degree_of(i); }

    /// Sets [e_i, e_j]. If i > j the value is stored for (j, i) with the
    /// antisymmetry sign. Throws DegreeMismatch if the value has the wrong degree.
    void set_bracket(std::size_t i, std::size_t j, SparseVec value);
    SparseVec bracket(std::size_t i, std::size_t j) const;
    SparseVec bracket(const SparseVec& a, const SparseVec& b) const;
    /// Raw stored value for i <= j (nullptr when absent).
    const SparseVec* stored_bracket(std::size_t i, std::size_t j) const;
    /// Stored (j, value) pairs for row i, j >= i.
    const std::vector<std::pair<std::size_t, SparseVec>>& bracket_row(std::size_t i) const {
        return brackets_[i];
    }
    bool bracket_in_window(std::size_t i, std::size_t j) const {
        return window().contains(degree(i) + degree(j));
    }

    void set_differential(std::size_t i, SparseVec value);
    const SparseVec& differential(std::size_t i) const { return d_[i]; }
    SparseVec d(const SparseVec& v) const;
    GradedMap differential_map() const;
    /// Matrix of d restricted to degree n -> n-1.
    RationalMatrix d_block(int n) const;

    bool is_abelian() const;
    bool has_zero_differential() const;

    std::string format(const SparseVec& v) const { return space_->format(v); }

    friend bool operator==(const DgLie& a, const DgLie& b);

private:
    SpacePtr space_;
    std::vector<std::vector<std::pair<std::size_t, SparseVec>>> brackets_;
    std::vector<SparseVec> d_;
};

using DgLiePtr = std::shared_ptr<const DgLie>;

/// Checks d^2 = 0, graded antisymmetry on the diagonal, graded Jacobi and the
/// Leibniz rule on all basis pairs/triples whose data lies in the window.
ValidationReport validate(const DgLie& g);

/// Linear map between dg Lie algebras given by images of source basis vectors.
struct DgLieMorphism {
    DgLiePtr source;
    DgLiePtr target;
    std::vector<SparseVec> images;

    SparseVec apply(const SparseVec& v) const;
    /// Degree preservation, chain map and bracket compatibility within the window.
    ValidationReport check() const;
};

struct Cover {
    DgLiePtr algebra;
    /// Inclusion of the cover into the original algebra.
    DgLieMorphism inclusion;
    int n = 0;
    /// Kernel of d on degree n, used to re-express cycles in cover coordinates.
    exactla::Kernel cycles;

    /// Coordinates in the cover of a parent vector lying in the cover.
    /// Throws InvalidStructure if v has a component below n or a non-cycle part in degree n.
    SparseVec restrict(const SparseVec& parent_vec) const;
};

/// g<n>: degrees above n unchanged, the cycles in degree n, zero below.
Cover connected_cover(const DgLiePtr& g, int n);

struct LcsResult {
    bool nilpotent = false;
    int k = 0;  // smallest k with (Gamma^k g)_n = 0 when nilpotent
};

/// Lower central series Gamma^1 = g, Gamma^{k+1} = [Gamma^k, g], in degree n.
LcsResult lcs_class(const DgLie& g, int n, int k_max);

struct HomologyReport {
    int lo = 0;
    int hi = 0;
    std::vector<std::size_t> dims;  // index n - lo
    std::vector<bool> trusted;

    std::size_t dim(int n) const { return (n < lo || n > hi) ? 0 : dims[static_cast<std::size_t>(n - lo)]; }
    bool is_trusted(int n) const;
    /// Trusted degrees form an interval; returns it (lo > hi if empty).
    std::pair<int, int> trusted_range() const;
};

/// Homology per degree. Degree n is trusted when the chains in n-1 and n+1 are
/// inside the window, or the algebra is known to vanish beyond it.
HomologyReport homology(const DgLie& g);

struct ExactnessReport {
    std::vector<Defect> defects;
    struct Row {
        int degree;
        std::size_t sub, middle, quotient;
    };
    std::vector<Row> rows;
    bool ok() const { return defects.empty(); }
};

/// Checks 0 -> A -i-> B -p-> C -> 0 is exact in every degree, and that i and p
/// are morphisms of dg Lie algebras.
ExactnessReport short_exact_check(const DgLieMorphism& i, const DgLieMorphism& p);

}  // namespace bautlab

#endif
