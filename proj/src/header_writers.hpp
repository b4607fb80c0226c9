#pragma once

// Emitters for the plantable formats. Written from the format documents
// rather than from the parsers, so fixtures exercise the parsers honestly.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fwtriage/synth.hpp"

namespace fwtriage::detail {

/// Writes the header for `spec` over the start of `region` (which already
/// holds the body). Some writers also patch trailing bytes or checksums over
/// the body. Throws std::invalid_argument if the region is too small.
void write_header(const HeaderSpec& spec, std::span<std::uint8_t> region);

/// Smallest region the writer accepts for this spec.
std::uint64_t minimum_region(const HeaderSpec& spec);

/// Signatures a planted region should produce, as (offset within region, format).
std::vector<std::pair<std::uint64_t, Format>> planted_formats(const HeaderSpec& spec);

std::uint32_t adler32(std::span<const std::uint8_t> data);

}  // namespace fwtriage::detail
