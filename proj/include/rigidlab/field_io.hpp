#pragma once

#include <string>

#include "rigidlab/fields.hpp"

namespace rigidlab {

/// Writes `<stem>.json` (header) and `<stem>.bin` (little-endian f64 payload, components
/// in row-major (i,j) order, each component row-major over its own extents).
void dump_field(const TensorField& f, const std::string& stem);

/// Reads a dump back onto `domain`. Throws ParseError on a malformed header and
/// ShapeError when header, domain and payload length disagree.
TensorField load_field(const std::string& stem, DomainPtr domain);

}  // namespace rigidlab
