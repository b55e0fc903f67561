/**
 * Exact sparse linear algebra over the rationals.
 *
 * Matrices are stored column-wise: column j is the image of the j-th source
 * basis vector, which is how every differential and chain map in the library
 * is assembled. Elimination is deterministic: the pivot of a column is its
 * smallest nonzero row index and columns are processed left to right.
 */
#ifndef BAUTLAB_EXACTLA_HPP
#define BAUTLAB_EXACTLA_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bautlab/rational.hpp"

namespace bautlab::exactla {

/// Sparse vector with entries sorted by index and no stored zeros.
class SparseVec {
public:
    using Entry = std::pair<std::size_t, Rational>;

    SparseVec() = default;
    static SparseVec unit(std::size_t i, const Rational& c = Rational(1));
    /// Sorts, merges duplicates and drops zeros.
    static SparseVec from_terms(std::vector<Entry> terms);

    bool empty() const { return entries_.empty(); }
    std::size_t nnz() const { return entries_.size(); }
    Rational get(std::size_t i) const;
    std::size_t leading() const { return entries_.front().first; }
    const Rational& leading_coeff() const { return entries_.front().second; }

    void add(std::size_t i, const Rational& c);
    /// this += c * x
    void axpy(const Rational& c, const SparseVec& x);
    void scale(const Rational& c);
    /// Largest index + 1, or 0 for the empty vector.
    std::size_t extent() const { return entries_.empty() ? 0 : entries_.back().first + 1; }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }
    const std::vector<Entry>& entries() const { return entries_; }

    SparseVec operator-() const;
    SparseVec& operator+=(const SparseVec& o) { axpy(Rational(1), o); return *this; }
    SparseVec& operator-=(const SparseVec& o) { axpy(Rational(-1), o); return *this; }
    friend SparseVec operator+(SparseVec a, const SparseVec& b) { return a += b; }
    friend SparseVec operator-(SparseVec a, const SparseVec& b) { return a -= b; }
    friend SparseVec operator*(const Rational& c, SparseVec v) { v.scale(c); return v; }
    friend bool operator==(const SparseVec& a, const SparseVec& b) { return a.entries_ == b.entries_; }
    friend bool operator!=(const SparseVec& a, const SparseVec& b) { return !(a == b); }

    std::string str() const;

private:
    std::vector<Entry> entries_;
};

class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
        columns_.resize(cols);
    }
    static RationalMatrix identity(std::size_t n);
    static RationalMatrix from_dense(const std::vector<std::vector<Rational>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational at(std::size_t r, std::size_t c) const { return columns_.at(c).get(r); }
    void set(std::size_t r, std::size_t c, const Rational& v);
    void add(std::size_t r, std::size_t c, const Rational& v);
    const SparseVec& column(std::size_t c) const { return columns_.at(c); }
    void set_column(std::size_t c, SparseVec v);

    std::size_t nnz() const;
    bool is_zero() const;

    SparseVec apply(const SparseVec& v) const;
    RationalMatrix transpose() const;
    std::vector<std::vector<Rational>> to_dense() const;

    friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
    friend RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b);
    friend bool operator==(const RationalMatrix& a, const RationalMatrix& b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<SparseVec> columns_;
};

/// Incremental column echelon form with the combinations that produced each pivot.
class Echelon {
public:
    explicit Echelon(std::size_t ambient_dim) : pivot_of_row_(ambient_dim, kNone) {}

    /// Reduces v against the current pivots. If it is independent it becomes a
    /// new basis vector (numbered in insertion order among accepted vectors) and
    /// true is returned.
    bool insert(const SparseVec& v);

    /// Coordinates of v in the accepted vectors, or nullopt if v is not in their span.
    std::optional<SparseVec> coordinates(const SparseVec& v) const;
    bool contains(const SparseVec& v) const;

    std::size_t rank() const { return pivots_.size(); }
    std::size_t ambient_dim() const { return pivot_of_row_.size(); }

private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    /// Returns the remainder and records the multiples subtracted (by pivot).
    SparseVec reduce(SparseVec v, std::vector<std::pair<std::size_t, Rational>>* used) const;

    struct Pivot {
        SparseVec vec;          // leading entry at `row`
        SparseVec combination;  // vec = sum combination[k] * accepted[k]
    };
    std::vector<Pivot> pivots_;
    std::vector<std::size_t> pivot_of_row_;
};

struct Options {
    /// Matrices with rows*cols at or below this use dense elimination for rank.
    std::size_t dense_threshold = 256;
};

std::size_t rank(const RationalMatrix& m, const Options& opts = {});
std::size_t rank_dense(const RationalMatrix& m);
std::size_t rank_sparse(const RationalMatrix& m);

struct Kernel {
    std::vector<SparseVec> vectors;
    /// vectors[i] has a 1 at free_columns[i] and 0 at every other free column,
    /// so the coordinates of a kernel element are its entries at these columns.
    std::vector<std::size_t> free_columns;

    SparseVec coordinates(const SparseVec& v) const;
};

Kernel kernel(const RationalMatrix& m);
std::vector<SparseVec> kernel_basis(const RationalMatrix& m);
/// Indices of a maximal independent set of columns (leftmost choice).
std::vector<std::size_t> independent_columns(const RationalMatrix& m);

/// dim ker(d_out) - rank(d_in). Throws CompositionNotZero if d_out * d_in != 0.
std::size_t homology_dim(const RationalMatrix& d_out, const RationalMatrix& d_in,
                         const Options& opts = {});

}  // namespace bautlab::exactla

#endif
