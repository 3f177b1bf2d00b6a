#include "ndrl/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include "ndrl/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

namespace ndrl {

namespace {

constexpr char kMagic[4] = {'N', 'D', 'R', 'L'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw CheckpointError("checkpoint truncated");
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<NamedTensor>& tensors) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open checkpoint for writing: " + path);
    out.write(kMagic, 4);
    write_pod<std::uint32_t>(out, kVersion);
    for (const auto& nt : tensors) {
        if (nt.name.size() > std::numeric_limits<std::uint16_t>::max()) {
            throw CheckpointError("tensor name too long: " + nt.name);
        }
        write_pod<std::uint16_t>(out, static_cast<std::uint16_t>(nt.name.size()));
        out.write(nt.name.data(), static_cast<std::streamsize>(nt.name.size()));
        write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(nt.tensor.rank()));
        for (std::size_t d : nt.tensor.shape) write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(d));
        out.write(reinterpret_cast<const char*>(nt.tensor.data.data()),
                  static_cast<std::streamsize>(nt.tensor.data.size() * sizeof(double)));
    }
    if (!out) throw CheckpointError("write failed: " + path);
}

std::vector<NamedTensor> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw CheckpointError("bad checkpoint magic in " + path);
    }
    auto version = read_pod<std::uint32_t>(in);
    if (version != kVersion) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }
    std::vector<NamedTensor> tensors;
    while (true) {
        std::uint16_t name_len;
        in.read(reinterpret_cast<char*>(&name_len), sizeof(name_len));
        if (in.eof()) break;
        if (!in) throw CheckpointError("checkpoint truncated");
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        auto rank = read_pod<std::uint8_t>(in);
        std::vector<std::size_t> shape(rank);
        std::size_t numel = 1;
        for (auto& d : shape) {
            d = read_pod<std::uint32_t>(in);
            numel *= d;
        }
        std::vector<double> data(numel);
        in.read(reinterpret_cast<char*>(data.data()),
                static_cast<std::streamsize>(numel * sizeof(double)));
        if (!in) throw CheckpointError("checkpoint truncated in tensor '" + name + "'");
        tensors.push_back({std::move(name), Tensor(std::move(shape), std::move(data))});
    }
    return tensors;
}

const Tensor& find_tensor(const std::vector<NamedTensor>& tensors, const std::string& name) {
    for (const auto& nt : tensors) {
        if (nt.name == name) return nt.tensor;
    }
    throw CheckpointError("tensor '" + name + "' not found in checkpoint");
}

bool has_tensor(const std::vector<NamedTensor>& tensors, const std::string& name) {
    for (const auto& nt : tensors) {
        if (nt.name == name) return true;
    }
    return false;
}

}  // namespace ndrl
