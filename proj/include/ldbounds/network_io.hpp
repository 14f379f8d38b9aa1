#pragma once

#include <filesystem>
#include <iosfwd>

#include "ldbounds/network.hpp"

namespace ldb {

// Network files are JSON objects:
//
//   {
//     "transfer": "sigmoid" | "noisy_or",
//     "n_inputs": N, "n_outputs": M,
//     "tau": [[...N numbers...], ... M rows ...],
//     "bias": [...N numbers in [0,1]...],
//     "offset": [...M numbers...],          optional, default zeros
//     "weight_scale": S                     optional, default N
//   }
//
// Evidence files are JSON arrays of {"output": i, "value": 0 | 1}.
//
// Numbers are written with the shortest representation that round-trips.
// Loading throws ParseError on malformed documents and InvalidArgument when
// the content violates a network invariant.

void save_network(const TwoLayerNetwork& net, std::ostream& out);
TwoLayerNetwork load_network(std::istream& in);
void save_network(const TwoLayerNetwork& net, const std::filesystem::path& path);
TwoLayerNetwork load_network(const std::filesystem::path& path);

void save_evidence(const Evidence& evidence, std::ostream& out);
Evidence load_evidence(std::istream& in);
void save_evidence(const Evidence& evidence, const std::filesystem::path& path);
Evidence load_evidence(const std::filesystem::path& path);

}  // namespace ldb
