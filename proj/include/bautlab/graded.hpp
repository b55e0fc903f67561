/**
 * Graded vector spaces with named bases over a finite degree window, graded
 * linear maps stored as per-degree blocks, and Koszul signs.
 *
 * Grading is homological throughout (differentials have degree -1).
 */
#ifndef BAUTLAB_GRADED_HPP
#define BAUTLAB_GRADED_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bautlab/exactla.hpp"

namespace bautlab {

using exactla::RationalMatrix;
using exactla::SparseVec;

struct Window {
    int lo = 0;
    int hi = 0;
    /// The represented object is known to vanish below lo / above hi, so
    /// nothing was cut off in that direction.
    bool closed_below = false;
    bool closed_above = false;

    Window() = default;
    Window(int lo_, int hi_, bool below = false, bool above = false);

    bool contains(int n) const { return n >= lo && n <= hi; }
    friend bool operator==(const Window& a, const Window& b) {
        return a.lo == b.lo && a.hi == b.hi && a.closed_below == b.closed_below &&
               a.closed_above == b.closed_above;
    }
};

/// Finite graded vector space. Elements carry a global index: basis elements
/// are ordered by degree, then by position within their degree.
class GradedSpace {
public:
    GradedSpace() = default;
    GradedSpace(Window w, const std::map<int, std::vector<std::string>>& names);

    const Window& window() const { return window_; }
    std::size_t dim(int n) const;
    std::size_t total_dim() const { return degree_of_.size(); }
    const std::vector<std::string>& names(int n) const;

    std::size_t offset(int n) const;
    std::size_t global(int n, std::size_t local) const { return offset(n) + local; }
    int degree_of(std::size_t g) const { return degree_of_.at(g); }
    std::size_t local_of(std::size_t g) const { return g - offset(degree_of(g)); }
    const std::string& name(std::size_t g) const { return names(degree_of(g)).at(local_of(g)); }
    std::optional<std::size_t> find(int n, const std::string& name) const;
    std::optional<std::size_t> find(const std::string& name) const;

    /// Same window and identical basis names in every degree.
    friend bool operator==(const GradedSpace& a, const GradedSpace& b);
    friend bool operator!=(const GradedSpace& a, const GradedSpace& b) { return !(a == b); }

    /// Global indices of a vector restricted to degree n, re-indexed locally.
    SparseVec restrict_to(const SparseVec& v, int n) const;
    /// Local vector in degree n lifted to global indices.
    SparseVec lift(const SparseVec& local, int n) const;

    std::string format(const SparseVec& v) const;

private:
    Window window_;
    std::vector<std::vector<std::string>> names_;  // indexed by n - lo
    std::vector<std::size_t> offsets_;
    std::vector<int> degree_of_;
    std::unordered_map<std::string, std::size_t> by_name_;
};

using SpacePtr = std::shared_ptr<const GradedSpace>;

/// Linear map of fixed degree r between windowed graded spaces, stored as a
/// block source_n -> target_{n+r} for every source degree n.
class GradedMap {
public:
    GradedMap(SpacePtr source, SpacePtr target, int degree);
    /// Builds the map from the images of global source basis vectors.
    static GradedMap from_images(SpacePtr source, SpacePtr target, int degree,
                                 const std::vector<SparseVec>& images);
    static GradedMap identity(SpacePtr space);
    static GradedMap zero(SpacePtr source, SpacePtr target, int degree);

    const GradedSpace& source() const { return *source_; }
    const GradedSpace& target() const { return *target_; }
    SpacePtr source_ptr() const { return source_; }
    SpacePtr target_ptr() const { return target_; }
    int degree() const { return degree_; }
    bool window_truncated() const { return truncated_; }
    void mark_truncated() { truncated_ = true; }

    /// Block for source degree n (zero matrix of the right shape if absent).
    RationalMatrix block(int n) const;
    void set_block(int n, RationalMatrix m);

    SparseVec apply(const SparseVec& global) const;
    SparseVec image(std::size_t global) const;
    bool is_zero() const;

    friend bool operator==(const GradedMap& a, const GradedMap& b);

private:
    SpacePtr source_;
    SpacePtr target_;
    int degree_ = 0;
    bool truncated_ = false;
    std::map<int, RationalMatrix> blocks_;
};

/// f o g. Throws SpaceMismatch unless source(f) == target(g).
GradedMap compose(const GradedMap& f, const GradedMap& g);

/// Koszul sign of rearranging graded elements: position i of the result holds
/// the element originally at position permutation[i].
int koszul_sign(const std::vector<std::size_t>& permutation, const std::vector<int>& degrees);

/// sV with (sV)_n = V_{n-1}; basis names get an "s" prefix.
SpacePtr suspend(const GradedSpace& v);
/// The suspension map V -> sV (degree +1).
GradedMap suspension(SpacePtr v, SpacePtr sv);
/// The desuspension sV -> V (degree -1).
GradedMap desuspension(SpacePtr sv, SpacePtr v);

}  // namespace bautlab

#endif
