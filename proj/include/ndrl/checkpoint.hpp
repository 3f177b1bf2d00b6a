#pragma once

#include <string>
#include <vector>

#include "ndrl/tensor.hpp"

namespace ndrl {

struct NamedTensor {
    std::string name;
    Tensor tensor;
};

// Flat binary container: magic "NDRL", version u32, then per tensor:
// name length u16, name bytes, rank u8, dims u32 each, little-endian f64 payload.
void save_checkpoint(const std::string& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> load_checkpoint(const std::string& path);

// Lookup helper; throws CheckpointError when absent.
const Tensor& find_tensor(const std::vector<NamedTensor>& tensors, const std::string& name);
bool has_tensor(const std::vector<NamedTensor>& tensors, const std::string& name);

}  // namespace ndrl
