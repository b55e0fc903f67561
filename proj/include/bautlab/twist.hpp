/**
 * Convolution dg Lie algebras Hom(C, Pi), Maurer-Cartan elements and twisted
 * differentials, outer actions and twisted semi-direct products.
 *
 * Hom(C, Pi) has basis e_{c,p} (c -> p, zero on other basis words) of degree
 * |p| - |c|, with
 *   d f = d_Pi f - (-1)^|f| f d_C,    [f, g](w) = sum eps (-1)^{|g||w1|} [f w1, g w2]
 * over the coproduct terms eps w1 (x) w2 of w.
 *
 * An outer action stores the right action a.x on basis pairs; the left form is
 * x.a = -(-1)^{|a||x|} a.x.
 */
#ifndef BAUTLAB_TWIST_HPP
#define BAUTLAB_TWIST_HPP

#include <map>
#include <optional>
#include <string>
#include <memory>
#include <unordered_map>
#include <vector>

#include "bautlab/ce.hpp"
#include "bautlab/dgla.hpp"

namespace bautlab {

/// A bounded, connected dg Lie algebra used as the target of twisting functions.
struct StructureAlgebra {
    DgLiePtr algebra;
    int top = 0;  // highest degree with a basis element (0 when Pi = 0)
    /// Per degree n in [1, top]: Gamma^k Pi vanishes in degree n for the reported k.
    std::map<int, LcsResult> nilpotency;
};

/// Throws UnboundedStructureAlgebra unless the window is closed above and
/// starts in degree >= 1.
StructureAlgebra structure_algebra(DgLiePtr pi);

struct ConvolutionLie {
    std::shared_ptr<const Coalgebra> coalgebra;
    StructureAlgebra pi;
    std::shared_ptr<DgLie> algebra;
    /// Hom basis index -> (coalgebra basis index, Pi basis index).
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    std::optional<std::size_t> find(std::size_t c, std::size_t p) const;
    /// Hom element -> its value on each coalgebra basis element.
    std::vector<SparseVec> to_function(const SparseVec& f) const;
    /// Values per coalgebra basis element -> Hom element. Throws WindowTooSmall
    /// if a needed basis element lies outside the window.
    SparseVec from_function(const std::vector<SparseVec>& values) const;

    std::size_t pi_dim = 0;
    std::vector<std::size_t> table;  // c * pi_dim + p -> Hom index
};

/// Hom(C, Pi) in degrees lo .. top(Pi). Requires C to contain every basis
/// element of degree <= top - lo. Throws UnboundedStructureAlgebra.
ConvolutionLie convolution_dgla(std::shared_ptr<const Coalgebra> c, const StructureAlgebra& pi, int lo);

/// d tau + 1/2 [tau, tau] for a degree -1 element, evaluated on every basis
/// word (so no Hom basis of degree -2 is needed).
McDefect is_mc(const ConvolutionLie& h, const SparseVec& tau);

/// Hom^tau: same bracket, differential d + [tau, -]. Throws NotMaurerCartan.
std::shared_ptr<DgLie> twist_by(const ConvolutionLie& h, const SparseVec& tau);

struct OuterAction {
    DgLiePtr g;       // acting algebra
    DgLiePtr target;  // L'
    /// action[a][x] = a.x for basis a of L' and x of g (absent = 0).
    std::vector<std::unordered_map<std::size_t, SparseVec>> action;
    /// xi(x), degree |x| - 1 in L'.
    std::vector<SparseVec> xi;

    OuterAction() = default;
    OuterAction(DgLiePtr g_, DgLiePtr target_);

    SparseVec right(std::size_t a, std::size_t x) const;  // a.x
    SparseVec left(std::size_t x, std::size_t a) const;   // x.a
    SparseVec right(const SparseVec& a, const SparseVec& x) const;
    SparseVec left(const SparseVec& x, const SparseVec& a) const;
    SparseVec xi_of(const SparseVec& x) const;
};

/// The five axioms of an outer action on basis elements whose data lies in the windows.
ValidationReport validate_outer_action(const OuterAction& a);

struct TwistedProduct {
    std::shared_ptr<DgLie> algebra;
    DgLieMorphism inclusion;   // L' -> L' x| g
    DgLieMorphism projection;  // L' x| g -> g
    std::size_t split = 0;     // basis of L' first (indices < split), then g
    /// Product index of a basis element of L' / g.
    std::vector<std::size_t> from_target, from_g;
};

/// [(a,x),(b,y)] = ([a,b] + x.b + a.y, [x,y]),  d(a,x) = (da + xi(x), dx).
/// Throws InvalidOuterAction if validation fails (unless `check` is false).
TwistedProduct twisted_semidirect(const OuterAction& a, bool check = true);

/// The tautological outer action of a Der L |x sL algebra on L: x.a = theta_x(a),
/// xi(theta, sz) = -z.
OuterAction tautological_action(const DerAlgebra& der, DgLiePtr lie);

/// Prop. outer actions: phi(x) = (theta_x, -s xi(x)).
OuterAction outer_action_from_morphism(const DgLieMorphism& phi, const DerAlgebra& der, DgLiePtr lie);
DgLieMorphism morphism_from_outer_action(const OuterAction& a, const DerAlgebra& der, DgLiePtr der_algebra);

/// Action of a sub dg Lie algebra g of Der L (|x sL), given by its inclusion,
/// on Hom^tau(C(L), Pi) by precomposition with chi; xi(x) = tau o chi(x).
struct HomAction {
    OuterAction action;
    /// chi(x) for each basis element of g
    std::vector<CoderivationImage> chi;
};
/// `g_inclusion` maps g into der.algebra. With hom_tau = h.algebra and an
/// empty tau this is the untwisted action.
HomAction hom_outer_action(const ConvolutionLie& h, DgLiePtr hom_tau, const CeComplex& c, const DerAlgebra& der,
                           const DgLieMorphism& g_inclusion, const SparseVec& tau);

/// The same with precomputed coderivations chi(x) of C for each basis element x of g.
HomAction hom_outer_action(const ConvolutionLie& h, DgLiePtr hom_tau, DgLiePtr g, std::vector<CoderivationImage> chi,
                           const SparseVec& tau);

/// Restricts an outer action on L' to the cover L'<n> (which must be preserved).
OuterAction restrict_action(const OuterAction& a, const Cover& cover);

struct TwistIdentityReport {
    bool ok = false;
    std::vector<std::string> mismatches;
    ValidationReport left, right;
};
/// (Hom x| g)^(tau,0) versus Hom^tau x|_{tau_*} g, compared on the nose.
/// `untwisted` acts on Hom(C, Pi) with xi = 0, `twisted` on Hom^tau with the
/// same action and xi = tau o chi.
TwistIdentityReport twist_identity_check(const ConvolutionLie& h, const OuterAction& untwisted,
                                         const OuterAction& twisted, const SparseVec& tau);

/// g with differential d + [m, -] for a Maurer-Cartan element m of g.
std::shared_ptr<DgLie> twist_dglie(const DgLie& g, const SparseVec& m);

}  // namespace bautlab

#endif
