#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "qseqlab/sequence.hpp"

namespace qseqlab {

// Builds a sequence from its JSON description. The root object needs "base"
// and "kind"; nested sequences inherit the base when they omit it. Phases are
// {"num": int, "den": int} objects throughout. Malformed input raises
// SpecParseError with the JSON path of the offending field.
DigitalSequence parse_sequence_spec(const std::string& json_text);
DigitalSequence parse_sequence_spec(const nlohmann::json& j);
DigitalSequence parse_sequence_spec_file(const std::string& path);

// Inverse of parse_sequence_spec for sequences built from the public
// builders. Throws std::invalid_argument on a phase with no exact rational
// form or a node kind outside the spec vocabulary.
nlohmann::ordered_json to_spec_json(const DigitalSequence& f);

}  // namespace qseqlab
