#pragma once

#include <string>

#include "json.hpp"
#include "plrd/inference.hpp"

namespace plrd {

using Json = nlohmann::ordered_json;

/// Serializes with numbers printed to 17 significant digits (non-finite
/// numbers become null). Parsing the output and serializing again gives the
/// same bytes.
std::string dump_json(const Json& value, int indent = 2);

Json to_json(const PlrdResult& result);

}  // namespace plrd
