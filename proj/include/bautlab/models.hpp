/**
 * The assembled models
 *
 *   full:        Hom^tau(C L, Pi)<0> x|_{tau_*} (Der L |x_ad sL)<1>     (unreduced chains)
 *                Hom^tau(C-bar L, Pi)<0> x|_{tau_*} Der L<1>            (reduced chains)
 *   simplified:  Hom(sV, Pi)<0> x|_{rho_*} Der L<1>,  sV = sL/[L,L] = reduced homology
 *
 * with the comparison morphism g* x| 1 from the simplified to the reduced full
 * model, and homotopy reports read off as pi_{n+1} = H_n.
 */
#ifndef BAUTLAB_MODELS_HPP
#define BAUTLAB_MODELS_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bautlab/ce.hpp"
#include "bautlab/twist.hpp"

namespace bautlab {

struct CharacteristicClass {
    std::string name;
    int degree = 0;
    /// Homology basis element (s<generator>, or the generator name) -> value.
    std::vector<std::pair<std::string, Rational>> pairing;
    std::string pi_generator;
};

/// One term coeff * (w -> p) of an explicit twisting function; `word` lists
/// free-Lie basis names in any order.
struct ExplicitTerm {
    std::vector<std::string> word;
    std::string pi_element;
    Rational coeff;
};

enum class Variant { Full, Simplified };

struct ModelSpec {
    QuillenModel space;
    ModelOptions options;
    DgLiePtr pi;  // bounded structure algebra; an empty algebra means Pi = 0
    bool has_classes = false;
    std::vector<CharacteristicClass> classes;
    std::vector<ExplicitTerm> explicit_twist;
    Variant variant = Variant::Full;
    bool reduced = false;
    int max_degree = 8;
    int trust_margin = 2;

    int window() const { return max_degree + trust_margin; }
};

/// rho : sV -> Pi of degree -1 per basis element of sV.
struct Rho {
    std::shared_ptr<const Coalgebra> hv;
    std::vector<SparseVec> values;
    bool zero() const;
};
/// Throws DegreeMismatch / UnknownGenerator for inconsistent classes.
Rho char_class_rho(const std::vector<CharacteristicClass>& classes, const LieModel& model, const DgLie& pi);

struct AssembledModel {
    ModelSpec spec;
    std::shared_ptr<const LieModel> lie;
    std::shared_ptr<const CeComplex> ce;  // the chains (null for the simplified model)
    std::shared_ptr<const Coalgebra> chains;
    ConvolutionLie hom;
    SparseVec tau;
    DgLiePtr hom_tau;
    Cover fiber;  // Hom^tau<0>
    DerAlgebra der;
    Cover base;  // Der L (|x sL) <1>
    OuterAction action;
    TwistedProduct total;
    /// Explicit-twist words reordered into canonical form: (word, applied sign).
    std::vector<std::pair<std::string, int>> normalized_words;

    ValidationReport mc;  // Maurer-Cartan defect of tau as defects
    ValidationReport outer;
    ValidationReport algebra;
    ExactnessReport exactness;
    TwistIdentityReport identity;

    bool ok() const;
};

/// Builds the twisting function from the spec: explicit terms, or rho o g_L.
/// Throws NotMaurerCartan if it is not a twisting function.
AssembledModel full_model(const ModelSpec& spec);
/// Throws NonAbelianStructure, SpecMismatch (unreduced or explicit twisting).
AssembledModel simplified_model(const ModelSpec& spec);
AssembledModel build_model(const ModelSpec& spec);

struct HomologyComparison {
    int n;
    std::size_t simplified, full;
    bool trusted;
    bool iso;  // the induced map is an isomorphism in this degree
};
struct ComparisonReport {
    DgLieMorphism morphism;
    ValidationReport morphism_check;
    std::vector<HomologyComparison> rows;
    bool quasi_iso = false;  // in every trusted degree <= max_degree
};
/// g* x| 1 : simplified -> full (reduced). Throws SpecMismatch for models from
/// different specs, different windows or an unreduced full model.
ComparisonReport comparison_morphism(const AssembledModel& simplified, const AssembledModel& full);

struct HomotopyRow {
    int n;
    std::size_t total, fiber, base;
    bool trusted;
};
struct HomotopyReport {
    std::string name;
    int max_degree = 0;
    std::vector<HomotopyRow> rows;  // n = 1 .. max_degree (total trusted flag per row)
    std::pair<int, int> trusted;    // trusted range of the total homology
    int next_window = 0;            // --max-degree that would trust one more degree
    /// sum (-1)^n [H(total) - H(fiber) - H(base)] over the rows, when the
    /// boundary degrees vanish; absent otherwise.
    std::optional<long long> euler_defect;
};
HomotopyReport rational_homotopy_report(const AssembledModel& m);

}  // namespace bautlab

#endif
