#include "retinet/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace retinet {

namespace {

constexpr char kMagic[4] = {'R', 'N', 'E', 'T'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ostream& os, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f32(std::ostream& os, float f) {
    uint32_t v;
    std::memcpy(&v, &f, 4);
    put_u32(os, v);
}

uint32_t get_u32(std::istream& is, const std::string& path) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw DataError(path + ": truncated checkpoint");
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

float get_f32(std::istream& is, const std::string& path) {
    const uint32_t v = get_u32(is, path);
    float f;
    std::memcpy(&f, &v, 4);
    return f;
}

void put_f32_array(std::ostream& os, const float* data, size_t n) {
    // Byte-order-stable even off x86; on little-endian this is a plain copy.
    for (size_t i = 0; i < n; ++i) put_f32(os, data[i]);
}

} // namespace

void save_checkpoint(Model& model, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError(path + ": cannot open for writing");

    os.write(kMagic, 4);
    put_u32(os, kVersion);
    const ModelSpec& spec = model.spec();
    put_u32(os, spec.name == ModelKind::LeNet5 ? 0u : 1u);
    put_u32(os, static_cast<uint32_t>(spec.in_channels));
    put_u32(os, static_cast<uint32_t>(spec.input_size));
    put_u32(os, static_cast<uint32_t>(spec.kernel_size));
    put_f32(os, spec.dropout_p);

    for (Param* p : model.params()) {
        put_u32(os, static_cast<uint32_t>(p->tag.size()));
        os.write(p->tag.data(), static_cast<std::streamsize>(p->tag.size()));
        put_u32(os, static_cast<uint32_t>(p->value.rank()));
        for (size_t d = 0; d < p->value.rank(); ++d)
            put_u32(os, static_cast<uint32_t>(p->value.dim(d)));
        put_f32_array(os, p->value.data(), p->value.numel());
    }
    if (!os) throw DataError(path + ": write failed");
}

Model load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError(path + ": cannot open");

    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw DataError(path + ": not an RNET checkpoint (bad magic)");
    const uint32_t version = get_u32(is, path);
    if (version != kVersion)
        throw DataError(path + ": unsupported checkpoint version");

    ModelSpec spec;
    const uint32_t kind = get_u32(is, path);
    if (kind > 1) throw DataError(path + ": unknown model kind");
    spec.name = kind == 0 ? ModelKind::LeNet5 : ModelKind::RetiLeNet;
    spec.in_channels = static_cast<int>(get_u32(is, path));
    spec.input_size = static_cast<int>(get_u32(is, path));
    spec.kernel_size = static_cast<int>(get_u32(is, path));
    spec.dropout_p = get_f32(is, path);
    spec.validate();

    Rng init_rng(0);  // every parameter is overwritten below
    Model model = build_model(spec, init_rng);

    for (Param* p : model.params()) {
        const uint32_t tag_len = get_u32(is, path);
        std::string tag(tag_len, '\0');
        if (!is.read(tag.data(), tag_len))
            throw DataError(path + ": truncated checkpoint");
        if (tag != p->tag)
            throw DataError(path + ": parameter tag '" + tag + "' does not match model ('" + p->tag + "')");
        const uint32_t rank = get_u32(is, path);
        if (rank != p->value.rank())
            throw DataError(path + ": rank mismatch for " + tag);
        size_t numel = 1;
        for (uint32_t d = 0; d < rank; ++d) {
            const uint32_t dim = get_u32(is, path);
            if (static_cast<int>(dim) != p->value.dim(d))
                throw DataError(path + ": shape mismatch for " + tag);
            numel *= dim;
        }
        for (size_t i = 0; i < numel; ++i) p->value[i] = get_f32(is, path);
    }
    // Trailing bytes mean the file does not belong to this architecture.
    if (is.peek() != std::char_traits<char>::eof())
        throw DataError(path + ": trailing data after last parameter");
    return model;
}

} // namespace retinet
