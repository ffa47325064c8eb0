#pragma once

#include <string>
#include <string_view>

#include "ogf/network.hpp"

namespace ogf {

/// Parses a network document. Pressures are read in the document's units and
/// stored squared, in Pa^2. Errors are InputError with the JSON path of the
/// offending field.
Network parse_network(std::string_view text);

Network load_network(const std::string& path);

/// Canonical form: Pa units, every field explicit, 2-space indentation.
std::string serialize_network(const Network& n);

}  // namespace ogf
