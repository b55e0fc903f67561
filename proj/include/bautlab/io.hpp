// Input documents (JSON, or TOML converted to JSON) and report serialization.
#ifndef BAUTLAB_IO_HPP
#define BAUTLAB_IO_HPP

#include <string>

#include "json.hpp"

#include "bautlab/models.hpp"

namespace bautlab {

using Json = nlohmann::ordered_json;

/// Parses an input document. `toml` selects the TOML reader.
/// Throws ParseError for malformed text and SchemaError for a bad shape.
ModelSpec parse_document(const std::string& text, bool toml = false);
/// Reads a file; ".toml" files go through the TOML reader.
ModelSpec load_document(const std::string& path);

/// The structure algebra Pi described by a "structure" object (null when empty).
DgLiePtr parse_structure(const Json& j);

std::string variant_name(Variant v);

struct ValidationSummary {
    std::vector<std::pair<std::string, ValidationReport>> checks;
    std::vector<std::string> warnings;
    bool ok() const;
};
/// Runs every validator over the input and the assembled model.
ValidationSummary validate_spec(const ModelSpec& spec);

Json to_json(const ValidationSummary& v);
Json to_json(const AssembledModel& m, const HomotopyReport& r);
Json to_json(const AssembledModel& s, const AssembledModel& f, const ComparisonReport& c);

std::string to_text(const ValidationSummary& v);
std::string to_text(const AssembledModel& m, const HomotopyReport& r);
std::string to_text(const AssembledModel& s, const AssembledModel& f, const ComparisonReport& c);

}  // namespace bautlab

#endif
