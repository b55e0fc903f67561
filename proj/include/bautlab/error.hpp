#ifndef BAUTLAB_ERROR_HPP
#define BAUTLAB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace bautlab {

enum class ErrorKind {
    CompositionNotZero,
    LengthMismatch,
    SpaceMismatch,
    WindowTooSmall,
    DegreeZeroGenerator,
    UnknownGenerator,
    NotMinimal,
    NotDecomposable,
    UnboundedStructureAlgebra,
    NotMaurerCartan,
    InvalidOuterAction,
    DegreeMismatch,
    NonAbelianStructure,
    SpecMismatch,
    InvalidStructure,
    ParseError,
    SchemaError,
};

const char* to_string(ErrorKind kind);

/// Process exit code used by the command line tool for an error of this kind:
/// 1 parse/schema, 2 algebra validation failure, 3 window too small.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace bautlab

#endif
