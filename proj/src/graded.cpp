#include "bautlab/graded.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "bautlab/error.hpp"

namespace bautlab {

Window::Window(int lo_, int hi_, bool below, bool above)
    : lo(lo_), hi(hi_), closed_below(below), closed_above(above) {
    if (lo > hi) throw Error(ErrorKind::WindowTooSmall, "window lo > hi");
}

GradedSpace::GradedSpace(Window w, const std::map<int, std::vector<std::string>>& names) : window_(w) {
    names_.resize(static_cast<std::size_t>(w.hi - w.lo + 1));
    for (const auto& [n, list] : names) {
        if (list.empty()) continue;
        if (!w.contains(n))
            throw Error(ErrorKind::WindowTooSmall,
                        "basis element in degree " + std::to_string(n) + " outside window");
        std::set<std::string> seen;
        for (const auto& s : list)
            if (!seen.insert(s).second)
                throw Error(ErrorKind::SchemaError, "duplicate basis name '" + s + "' in degree " +
                                                        std::to_string(n));
        names_[static_cast<std::size_t>(n - w.lo)] = list;
    }
    offsets_.resize(names_.size() + 1, 0);
    for (std::size_t i = 0; i < names_.size(); ++i) {
        offsets_[i + 1] = offsets_[i] + names_[i].size();
        for (std::size_t k = 0; k < names_[i].size(); ++k) {
            degree_of_.push_back(w.lo + static_cast<int>(i));
            // names are unique within a degree; across degrees the first wins for lookup
            by_name_.emplace(names_[i][k], offsets_[i] + k);
        }
    }
}

std::size_t GradedSpace::dim(int n) const {
    if (!window_.contains(n) || names_.empty()) return 0;
    return names_[static_cast<std::size_t>(n - window_.lo)].size();
}

const std::vector<std::string>& GradedSpace::names(int n) const {
    static const std::vector<std::string> kEmpty;
    if (!window_.contains(n) || names_.empty()) return kEmpty;
    return names_[static_cast<std::size_t>(n - window_.lo)];
}

std::size_t GradedSpace::offset(int n) const {
    if (offsets_.empty()) return 0;
    if (n < window_.lo) return 0;
    if (n > window_.hi) return offsets_.back();
    return offsets_[static_cast<std::size_t>(n - window_.lo)];
}

std::optional<std::size_t> GradedSpace::find(int n, const std::string& name) const {
    const auto& list = names(n);
    auto it = std::find(list.begin(), list.end(), name);
    if (it == list.end()) return std::nullopt;
    return offset(n) + static_cast<std::size_t>(it - list.begin());
}

std::optional<std::size_t> GradedSpace::find(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

bool operator==(const GradedSpace& a, const GradedSpace& b) {
    if (!(a.window_ == b.window_)) return false;
    return a.names_ == b.names_;
}

SparseVec GradedSpace::restrict_to(const SparseVec& v, int n) const {
    std::size_t lo = offset(n), hi = lo + dim(n);
    std::vector<SparseVec::Entry> out;
    for (const auto& [i, c] : v)
        if (i >= lo && i < hi) out.emplace_back(i - lo, c);
    return SparseVec::from_terms(std::move(out));
}

SparseVec GradedSpace::lift(const SparseVec& local, int n) const {
    std::size_t lo = offset(n);
    std::vector<SparseVec::Entry> out;
    for (const auto& [i, c] : local) out.emplace_back(i + lo, c);
    return SparseVec::from_terms(std::move(out));
}

std::string GradedSpace::format(const SparseVec& v) const {
    if (v.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [i, c] : v) {
        std::string coeff = c.str();
        if (!first) os << (c.sign() < 0 ? " - " : " + ");
        else if (c.sign() < 0) os << "-";
        first = false;
        std::string mag = (c.sign() < 0) ? (-c).str() : coeff;
        if (mag != "1") os << mag << "*";
        os << (i < total_dim() ? name(i) : "#" + std::to_string(i));
    }
    return os.str();
}

// ---------------------------------------------------------------- GradedMap

GradedMap::GradedMap(SpacePtr source, SpacePtr target, int degree)
    : source_(std::move(source)), target_(std::move(target)), degree_(degree) {}

GradedMap GradedMap::from_images(SpacePtr source, SpacePtr target, int degree,
                                 const std::vector<SparseVec>& images) {
    GradedMap f(source, target, degree);
    const Window& w = source->window();
    for (int n = w.lo; n <= w.hi; ++n) {
        std::size_t sd = source->dim(n);
        if (sd == 0) continue;
        int m = n + degree;
        std::size_t td = target->dim(m);
        RationalMatrix block(td, sd);
        for (std::size_t k = 0; k < sd; ++k) {
            const SparseVec& img = images.at(source->global(n, k));
            if (img.empty()) continue;
            for (const auto& [g, c] : img)
                if (target->degree_of(g) != m)
                    throw Error(ErrorKind::DegreeMismatch,
                                "image of " + source->name(source->global(n, k)) + " has wrong degree");
            block.set_column(k, target->restrict_to(img, m));
        }
        if (!target->window().contains(m)) f.truncated_ = true;
        if (td > 0) f.blocks_[n] = std::move(block);
    }
    return f;
}

GradedMap GradedMap::identity(SpacePtr space) {
    GradedMap f(space, space, 0);
    const Window& w = space->window();
    for (int n = w.lo; n <= w.hi; ++n)
        if (space->dim(n) > 0) f.blocks_[n] = RationalMatrix::identity(space->dim(n));
    return f;
}

GradedMap GradedMap::zero(SpacePtr source, SpacePtr target, int degree) {
    return GradedMap(std::move(source), std::move(target), degree);
}

RationalMatrix GradedMap::block(int n) const {
    auto it = blocks_.find(n);
    if (it != blocks_.end()) return it->second;
    return RationalMatrix(target_->dim(n + degree_), source_->dim(n));
}

void GradedMap::set_block(int n, RationalMatrix m) {
    if (m.cols() != source_->dim(n) || m.rows() != target_->dim(n + degree_))
        throw Error(ErrorKind::LengthMismatch, "block shape does not match basis dimensions");
    blocks_[n] = std::move(m);
}

SparseVec GradedMap::apply(const SparseVec& v) const {
    SparseVec out;
    for (const auto& [g, c] : v) out.axpy(c, image(g));
    return out;
}

SparseVec GradedMap::image(std::size_t g) const {
    int n = source_->degree_of(g);
    auto it = blocks_.find(n);
    if (it == blocks_.end()) return {};
    return target_->lift(it->second.column(source_->local_of(g)), n + degree_);
}

bool GradedMap::is_zero() const {
    return std::all_of(blocks_.begin(), blocks_.end(), [](const auto& kv) { return kv.second.is_zero(); });
}

bool operator==(const GradedMap& a, const GradedMap& b) {
    if (a.degree_ != b.degree_ || *a.source_ != *b.source_ || *a.target_ != *b.target_) return false;
    const Window& w = a.source_->window();
    for (int n = w.lo; n <= w.hi; ++n)
        if (!(a.block(n) == b.block(n))) return false;
    return true;
}

GradedMap compose(const GradedMap& f, const GradedMap& g) {
    if (f.source() != g.target())
        throw Error(ErrorKind::SpaceMismatch, "compose: source of f differs from target of g");
    GradedMap h(g.source_ptr(), f.target_ptr(), f.degree() + g.degree());
    const Window& w = g.source().window();
    const Window& mid = g.target().window();
    const Window& out = f.target().window();
    bool truncated = f.window_truncated() || g.window_truncated();
    for (int n = w.lo; n <= w.hi; ++n) {
        if (g.source().dim(n) == 0) continue;
        int m = n + g.degree();
        int t = m + f.degree();
        if (!mid.contains(m) || !out.contains(t)) {
            truncated = true;
            continue;
        }
        RationalMatrix p = f.block(m) * g.block(n);
        if (p.rows() > 0) h.set_block(n, std::move(p));
    }
    if (truncated) h.mark_truncated();
    return h;
}

int koszul_sign(const std::vector<std::size_t>& permutation, const std::vector<int>& degrees) {
    std::size_t k = permutation.size();
    if (degrees.size() != k)
        throw Error(ErrorKind::LengthMismatch, "koszul_sign: permutation and degrees differ in length");
    std::vector<bool> seen(k, false);
    for (auto p : permutation) {
        if (p >= k || seen[p]) throw Error(ErrorKind::LengthMismatch, "koszul_sign: not a permutation");
        seen[p] = true;
    }
    int sign = 1;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            if (permutation[i] > permutation[j] &&
                (degrees[permutation[i]] % 2 != 0) && (degrees[permutation[j]] % 2 != 0))
                sign = -sign;
    return sign;
}

SpacePtr suspend(const GradedSpace& v) {
    const Window& w = v.window();
    std::map<int, std::vector<std::string>> names;
    for (int n = w.lo; n <= w.hi; ++n) {
        auto& list = names[n + 1];
        for (const auto& s : v.names(n)) list.push_back("s" + s);
    }
    return std::make_shared<GradedSpace>(Window(w.lo + 1, w.hi + 1, w.closed_below, w.closed_above), names);
}

GradedMap suspension(SpacePtr v, SpacePtr sv) {
    if (sv->total_dim() != v->total_dim() || sv->window().lo != v->window().lo + 1)
        throw Error(ErrorKind::SpaceMismatch, "suspension: spaces do not match");
    std::vector<SparseVec> images;
    for (std::size_t g = 0; g < v->total_dim(); ++g) images.push_back(SparseVec::unit(g));
    return GradedMap::from_images(v, sv, 1, images);
}

GradedMap desuspension(SpacePtr sv, SpacePtr v) {
    if (sv->total_dim() != v->total_dim() || sv->window().lo != v->window().lo + 1)
        throw Error(ErrorKind::SpaceMismatch, "desuspension: spaces do not match");
    std::vector<SparseVec> images;
    for (std::size_t g = 0; g < sv->total_dim(); ++g) images.push_back(SparseVec::unit(g));
    return GradedMap::from_images(sv, v, -1, images);
}

}  // namespace bautlab
