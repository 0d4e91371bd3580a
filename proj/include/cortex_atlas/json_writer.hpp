#pragma once

#include <string>

#include <json.hpp>

namespace cortex {

using Json = nlohmann::json;

/// Canonical text form used for every exported artifact: sorted keys, two
/// space indentation, integers verbatim, reals with 9 significant digits.
/// Throws DomainError on non-finite numbers.
std::string to_canonical_json(const Json& value);

/// Rounds a real to the value its canonical text form denotes.
double canonical_real(double x);

}  // namespace cortex
