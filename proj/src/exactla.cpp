#include "bautlab/exactla.hpp"

#include <algorithm>
#include <sstream>

#include "bautlab/error.hpp"

namespace bautlab::exactla {

// ---------------------------------------------------------------- SparseVec

SparseVec SparseVec::unit(std::size_t i, const Rational& c) {
    SparseVec v;
    if (!c.is_zero()) v.entries_.emplace_back(i, c);
    return v;
}

SparseVec SparseVec::from_terms(std::vector<Entry> terms) {
    std::stable_sort(terms.begin(), terms.end(),
                     [](const Entry& a, const Entry& b) { return a.first < b.first; });
    SparseVec v;
    for (auto& t : terms) {
        if (!v.entries_.empty() && v.entries_.back().first == t.first) {
            v.entries_.back().second += t.second;
            if (v.entries_.back().second.is_zero()) v.entries_.pop_back();
        } else if (!t.second.is_zero()) {
            v.entries_.push_back(std::move(t));
        }
    }
    return v;
}

Rational SparseVec::get(std::size_t i) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                               [](const Entry& e, std::size_t k) { return e.first < k; });
    if (it != entries_.end() && it->first == i) return it->second;
    return Rational(0);
}

void SparseVec::add(std::size_t i, const Rational& c) {
    if (c.is_zero()) return;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                               [](const Entry& e, std::size_t k) { return e.first < k; });
    if (it != entries_.end() && it->first == i) {
        it->second += c;
        if (it->second.is_zero()) entries_.erase(it);
    } else {
        entries_.insert(it, Entry(i, c));
    }
}

void SparseVec::axpy(const Rational& c, const SparseVec& x) {
    if (c.is_zero() || x.empty()) return;
    if (entries_.empty()) {
        entries_ = x.entries_;
        if (!c.is_one())
            for (auto& e : entries_) e.second *= c;
        return;
    }
    std::vector<Entry> out;
    out.reserve(entries_.size() + x.entries_.size());
    auto a = entries_.begin();
    auto b = x.entries_.begin();
    while (a != entries_.end() || b != x.entries_.end()) {
        if (b == x.entries_.end() || (a != entries_.end() && a->first < b->first)) {
            out.push_back(std::move(*a));
            ++a;
        } else if (a == entries_.end() || b->first < a->first) {
            out.emplace_back(b->first, c * b->second);
            ++b;
        } else {
            Rational s = a->second + c * b->second;
            if (!s.is_zero()) out.emplace_back(a->first, std::move(s));
            ++a;
            ++b;
        }
    }
    entries_ = std::move(out);
}

void SparseVec::scale(const Rational& c) {
    if (c.is_zero()) {
        entries_.clear();
        return;
    }
    for (auto& e : entries_) e.second *= c;
}

SparseVec SparseVec::operator-() const {
    SparseVec v = *this;
    for (auto& e : v.entries_) e.second = -e.second;
    return v;
}

std::string SparseVec::str() const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const auto& [i, c] : entries_) {
        if (!first) os << ", ";
        first = false;
        os << i << ": " << c;
    }
    os << "}";
    return os.str();
}

// ----------------------------------------------------------- RationalMatrix

RationalMatrix RationalMatrix::identity(std::size_t n) {
    RationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.columns_[i] = SparseVec::unit(i);
    return m;
}

RationalMatrix RationalMatrix::from_dense(const std::vector<std::vector<Rational>>& rows) {
    std::size_t r = rows.size();
    std::size_t c = r ? rows[0].size() : 0;
    RationalMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) throw Error(ErrorKind::LengthMismatch, "ragged dense matrix");
        for (std::size_t j = 0; j < c; ++j)
            if (!rows[i][j].is_zero()) m.columns_[j].add(i, rows[i][j]);
    }
    return m;
}

void RationalMatrix::set(std::size_t r, std::size_t c, const Rational& v) {
    if (r >= rows_ || c >= cols_) throw Error(ErrorKind::LengthMismatch, "matrix index out of bounds");
    SparseVec& col = columns_[c];
    col.add(r, v - col.get(r));
}

void RationalMatrix::add(std::size_t r, std::size_t c, const Rational& v) {
    if (r >= rows_ || c >= cols_) throw Error(ErrorKind::LengthMismatch, "matrix index out of bounds");
    columns_[c].add(r, v);
}

void RationalMatrix::set_column(std::size_t c, SparseVec v) {
    if (c >= cols_ || v.extent() > rows_)
        throw Error(ErrorKind::LengthMismatch, "column does not fit the matrix");
    columns_[c] = std::move(v);
}

std::size_t RationalMatrix::nnz() const {
    std::size_t n = 0;
    for (const auto& c : columns_) n += c.nnz();
    return n;
}

bool RationalMatrix::is_zero() const {
    return std::all_of(columns_.begin(), columns_.end(), [](const SparseVec& c) { return c.empty(); });
}

SparseVec RationalMatrix::apply(const SparseVec& v) const {
    SparseVec out;
    for (const auto& [j, c] : v) {
        if (j >= cols_) throw Error(ErrorKind::LengthMismatch, "vector does not fit the matrix");
        out.axpy(c, columns_[j]);
    }
    return out;
}

RationalMatrix RationalMatrix::transpose() const {
    RationalMatrix t(cols_, rows_);
    std::vector<std::vector<SparseVec::Entry>> acc(rows_);
    for (std::size_t j = 0; j < cols_; ++j)
        for (const auto& [i, c] : columns_[j]) acc[i].emplace_back(j, c);
    for (std::size_t i = 0; i < rows_; ++i) t.columns_[i] = SparseVec::from_terms(std::move(acc[i]));
    return t;
}

std::vector<std::vector<Rational>> RationalMatrix::to_dense() const {
    std::vector<std::vector<Rational>> d(rows_, std::vector<Rational>(cols_));
    for (std::size_t j = 0; j < cols_; ++j)
        for (const auto& [i, c] : columns_[j]) d[i][j] = c;
    return d;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.cols_ != b.rows_) throw Error(ErrorKind::LengthMismatch, "matrix product shape mismatch");
    RationalMatrix p(a.rows_, b.cols_);
    for (std::size_t j = 0; j < b.cols_; ++j) p.columns_[j] = a.apply(b.columns_[j]);
    return p;
}

RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
        throw Error(ErrorKind::LengthMismatch, "matrix sum shape mismatch");
    RationalMatrix s = a;
    for (std::size_t j = 0; j < a.cols_; ++j) s.columns_[j] += b.columns_[j];
    return s;
}

bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.columns_ == b.columns_;
}

// ------------------------------------------------------------------ Echelon

SparseVec Echelon::reduce(SparseVec v, std::vector<std::pair<std::size_t, Rational>>* used) const {
    // Only entries at or after the current leading index can change, so the
    // scan position moves forward monotonically.
    std::size_t pos = 0;
    while (pos < v.nnz()) {
        const auto& [row, coeff] = v.entries()[pos];
        std::size_t k = row < pivot_of_row_.size() ? pivot_of_row_[row] : kNone;
        if (k == kNone) {
            ++pos;
            continue;
        }
        const Pivot& p = pivots_[k];
        Rational m = coeff / p.vec.leading_coeff();
        if (used) used->emplace_back(k, m);
        v.axpy(-m, p.vec);
    }
    return v;
}

bool Echelon::insert(const SparseVec& v) {
    std::vector<std::pair<std::size_t, Rational>> used;
    SparseVec r = reduce(v, &used);
    if (r.empty()) return false;
    if (r.leading() >= pivot_of_row_.size())
        throw Error(ErrorKind::LengthMismatch, "vector exceeds echelon ambient dimension");
    std::size_t accepted = pivots_.size();
    SparseVec comb = SparseVec::unit(accepted);
    for (const auto& [k, m] : used) comb.axpy(-m, pivots_[k].combination);
    pivot_of_row_[r.leading()] = pivots_.size();
    pivots_.push_back(Pivot{std::move(r), std::move(comb)});
    return true;
}

std::optional<SparseVec> Echelon::coordinates(const SparseVec& v) const {
    std::vector<std::pair<std::size_t, Rational>> used;
    SparseVec r = reduce(v, &used);
    if (!r.empty()) return std::nullopt;
    SparseVec out;
    for (const auto& [k, m] : used) out.axpy(m, pivots_[k].combination);
    return out;
}

bool Echelon::contains(const SparseVec& v) const { return reduce(v, nullptr).empty(); }

// --------------------------------------------------------------- rank etc.

std::size_t rank_dense(const RationalMatrix& m) {
    auto a = m.to_dense();
    std::size_t rows = m.rows(), cols = m.cols(), r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = rows;
        for (std::size_t i = r; i < rows; ++i)
            if (!a[i][c].is_zero()) {
                piv = i;
                break;
            }
        if (piv == rows) continue;
        std::swap(a[piv], a[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (a[i][c].is_zero()) continue;
            Rational f = a[i][c] / a[r][c];
            for (std::size_t k = c; k < cols; ++k) a[i][k] -= f * a[r][k];
        }
        ++r;
    }
    return r;
}

std::size_t rank_sparse(const RationalMatrix& m) {
    Echelon e(m.rows());
    for (std::size_t j = 0; j < m.cols(); ++j) e.insert(m.column(j));
    return e.rank();
}

std::size_t rank(const RationalMatrix& m, const Options& opts) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    if (m.rows() * m.cols() <= opts.dense_threshold) return rank_dense(m);
    return rank_sparse(m);
}

SparseVec Kernel::coordinates(const SparseVec& v) const {
    SparseVec c;
    for (std::size_t i = 0; i < free_columns.size(); ++i) c.add(i, v.get(free_columns[i]));
    return c;
}

Kernel kernel(const RationalMatrix& m) {
    Kernel k;
    Echelon e(m.rows());
    std::vector<std::size_t> accepted_col;  // accepted index -> column
    for (std::size_t j = 0; j < m.cols(); ++j) {
        const SparseVec& col = m.column(j);
        if (e.insert(col)) {
            accepted_col.push_back(j);
            continue;
        }
        auto coords = e.coordinates(col);
        SparseVec kv = SparseVec::unit(j);
        for (const auto& [a, c] : *coords) kv.add(accepted_col[a], -c);
        k.vectors.push_back(std::move(kv));
        k.free_columns.push_back(j);
    }
    return k;
}

std::vector<SparseVec> kernel_basis(const RationalMatrix& m) { return kernel(m).vectors; }

std::vector<std::size_t> independent_columns(const RationalMatrix& m) {
    std::vector<std::size_t> out;
    Echelon e(m.rows());
    for (std::size_t j = 0; j < m.cols(); ++j)
        if (e.insert(m.column(j))) out.push_back(j);
    return out;
}

std::size_t homology_dim(const RationalMatrix& d_out, const RationalMatrix& d_in, const Options& opts) {
    if (d_out.cols() != d_in.rows())
        throw Error(ErrorKind::LengthMismatch, "homology_dim: d_out and d_in are not composable");
    if (!(d_out * d_in).is_zero())
        throw Error(ErrorKind::CompositionNotZero, "d_out * d_in is not the zero matrix");
    return d_out.cols() - rank(d_out, opts) - rank(d_in, opts);
}

}  // namespace bautlab::exactla
