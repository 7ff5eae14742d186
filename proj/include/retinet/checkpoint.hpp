#pragma once

#include <string>

#include "retinet/model.hpp"

namespace retinet {

// RNET checkpoint, little-endian throughout:
//   magic "RNET", u32 format version (1),
//   spec record: u32 model kind, u32 in_channels, u32 input_size,
//                u32 kernel_size, f32 dropout_p,
//   then one blob per parameter tensor in model order:
//     u32 tag length, tag bytes, u32 rank, u32 dims[rank], f32 data.
void save_checkpoint(Model& model, const std::string& path);

// Rebuilds the architecture from the spec record and restores every
// parameter bit-exactly. Malformed files raise DataError.
Model load_checkpoint(const std::string& path);

} // namespace retinet
