#pragma once

#include "dsscn/escn.hpp"
#include "dsscn/stacked_network.hpp"

#include <iosfwd>
#include <string>

namespace dsscn {

/// Versioned binary format. Doubles are stored as raw IEEE-754 bits so
/// a save/load round trip is exact.
inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_layer(std::ostream& out, const EscnLayer& layer);
EscnLayer read_layer(std::istream& in);

/// Layer bytes; equal strings mean equal layer state.
std::string serialize_layer(const EscnLayer& layer);
EscnLayer deserialize_layer(const std::string& bytes);

/// Whole stack: configuration, layers, projections, weighter, detector,
/// warning buffer and random engine state. Throws std::runtime_error on a
/// malformed or wrong-version stream.
void write_stack(std::ostream& out, const StackedNetwork& net);
StackedNetwork read_stack(std::istream& in);

void save_stack(const StackedNetwork& net, const std::string& path);
StackedNetwork load_stack(const std::string& path);

}  // namespace dsscn
