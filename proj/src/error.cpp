#include "bautlab/error.hpp"

namespace bautlab {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::CompositionNotZero: return "CompositionNotZero";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::SpaceMismatch: return "SpaceMismatch";
        case ErrorKind::WindowTooSmall: return "WindowTooSmall";
        case ErrorKind::DegreeZeroGenerator: return "DegreeZeroGenerator";
        case ErrorKind::UnknownGenerator: return "UnknownGenerator";
        case ErrorKind::NotMinimal: return "NotMinimal";
        case ErrorKind::NotDecomposable: return "NotDecomposable";
        case ErrorKind::UnboundedStructureAlgebra: return "UnboundedStructureAlgebra";
        case ErrorKind::NotMaurerCartan: return "NotMaurerCartan";
        case ErrorKind::InvalidOuterAction: return "InvalidOuterAction";
        case ErrorKind::DegreeMismatch: return "DegreeMismatch";
        case ErrorKind::NonAbelianStructure: return "NonAbelianStructure";
        case ErrorKind::SpecMismatch: return "SpecMismatch";
        case ErrorKind::InvalidStructure: return "InvalidStructure";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::SchemaError: return "SchemaError";
    }
    return "Error";
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ParseError:
        case ErrorKind::SchemaError:
        case ErrorKind::UnknownGenerator:
        case ErrorKind::DegreeZeroGenerator:
        case ErrorKind::LengthMismatch:
            return 1;
        case ErrorKind::WindowTooSmall:
        case ErrorKind::SpecMismatch:
            return 3;
        default:
            return 2;
    }
}

}  // namespace bautlab
