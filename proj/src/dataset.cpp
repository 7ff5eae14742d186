#include "retinet/dataset.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace retinet {

namespace {

constexpr uint32_t kIdxImagesMagic = 0x00000803;
constexpr uint32_t kIdxLabelsMagic = 0x00000801;

uint32_t get_u32_be(std::istream& is, const std::string& path) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw DataError(path + ": truncated header");
    return (static_cast<uint32_t>(b[0]) << 24) | (static_cast<uint32_t>(b[1]) << 16) |
           (static_cast<uint32_t>(b[2]) << 8) | static_cast<uint32_t>(b[3]);
}

void put_u32_be(std::ostream& os, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>(v & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32_le(std::istream& is, const std::string& path) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw DataError(path + ": truncated header");
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void put_u32_le(std::ostream& os, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::vector<uint8_t> read_exact(std::istream& is, size_t n, const std::string& path) {
    std::vector<uint8_t> buf(n);
    if (!is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n)))
        throw DataError(path + ": file shorter than its header promises");
    return buf;
}

Tensor pixels_to_tensor(const std::vector<uint8_t>& pixels, int n, int c, int h, int w) {
    Tensor t({n, c, h, w});
    // plain division: keeps u8 -> float -> u8 round trips exact
    for (size_t i = 0; i < pixels.size(); ++i)
        t[i] = static_cast<float>(pixels[i]) / 255.0f;
    return t;
}

} // namespace

void Dataset::validate() const {
    if (images.rank() != 4 || size() < 1)
        throw DataError(name + ": images must be a non-empty [N,C,H,W] tensor");
    const bool gray = channels() == 1 && height() == 28 && width() == 28;
    const bool rgb = channels() == 3 && height() == 32 && width() == 32;
    if (!gray && !rgb)
        throw DataError(name + ": unsupported geometry " + images.shape_str() +
                        " (expected 1x28x28 or 3x32x32)");
    if (static_cast<int>(labels.size()) != size())
        throw DataError(name + ": label count does not match image count");
    for (int y : labels)
        if (y < 0 || y >= 10) throw DataError(name + ": label out of range [0,10)");
    for (size_t i = 0; i < images.numel(); ++i)
        if (images[i] < 0.0f || images[i] > 1.0f)
            throw DataError(name + ": pixel outside [0,1]");
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream imgs(images_path, std::ios::binary);
    if (!imgs) throw DataError(images_path + ": cannot open");
    std::ifstream labs(labels_path, std::ios::binary);
    if (!labs) throw DataError(labels_path + ": cannot open");

    if (get_u32_be(imgs, images_path) != kIdxImagesMagic)
        throw DataError(images_path + ": bad IDX image magic");
    const uint32_t n = get_u32_be(imgs, images_path);
    const uint32_t h = get_u32_be(imgs, images_path);
    const uint32_t w = get_u32_be(imgs, images_path);

    if (get_u32_be(labs, labels_path) != kIdxLabelsMagic)
        throw DataError(labels_path + ": bad IDX label magic");
    const uint32_t n_labels = get_u32_be(labs, labels_path);
    if (n_labels != n)
        throw DataError(labels_path + ": label count " + std::to_string(n_labels) +
                        " does not match image count " + std::to_string(n));

    const auto pixels = read_exact(imgs, static_cast<size_t>(n) * h * w, images_path);
    const auto labels = read_exact(labs, n, labels_path);

    Dataset ds;
    ds.images = pixels_to_tensor(pixels, static_cast<int>(n), 1,
                                 static_cast<int>(h), static_cast<int>(w));
    ds.labels.assign(labels.begin(), labels.end());
    return ds;
}

Dataset load_rawds(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError(path + ": cannot open");

    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "RWDS", 4) != 0)
        throw DataError(path + ": bad RAWDS magic");
    const uint32_t version = get_u32_le(is, path);
    if (version != 1) throw DataError(path + ": unsupported RAWDS version");
    const uint32_t n = get_u32_le(is, path);
    const uint32_t c = get_u32_le(is, path);
    const uint32_t h = get_u32_le(is, path);
    const uint32_t w = get_u32_le(is, path);
    if (n == 0) throw DataError(path + ": empty dataset");

    const auto labels = read_exact(is, n, path);
    const auto pixels = read_exact(is, static_cast<size_t>(n) * c * h * w, path);

    Dataset ds;
    ds.images = pixels_to_tensor(pixels, static_cast<int>(n), static_cast<int>(c),
                                 static_cast<int>(h), static_cast<int>(w));
    ds.labels.assign(labels.begin(), labels.end());
    return ds;
}

void save_rawds(const Dataset& ds, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError(path + ": cannot open for writing");
    os.write("RWDS", 4);
    put_u32_le(os, 1);
    put_u32_le(os, static_cast<uint32_t>(ds.size()));
    put_u32_le(os, static_cast<uint32_t>(ds.channels()));
    put_u32_le(os, static_cast<uint32_t>(ds.height()));
    put_u32_le(os, static_cast<uint32_t>(ds.width()));
    for (int y : ds.labels) {
        const unsigned char b = static_cast<unsigned char>(y);
        os.write(reinterpret_cast<const char*>(&b), 1);
    }
    for (size_t i = 0; i < ds.images.numel(); ++i) {
        // exact inverse of the /255 load mapping
        const unsigned char b =
            static_cast<unsigned char>(std::lround(ds.images[i] * 255.0f));
        os.write(reinterpret_cast<const char*>(&b), 1);
    }
    if (!os) throw DataError(path + ": write failed");
}

void write_idx_images(const std::string& path, const std::vector<uint8_t>& pixels,
                      int n, int h, int w) {
    if (pixels.size() != static_cast<size_t>(n) * h * w)
        throw ConfigError(path + ": pixel buffer does not match n*h*w");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError(path + ": cannot open for writing");
    put_u32_be(os, kIdxImagesMagic);
    put_u32_be(os, static_cast<uint32_t>(n));
    put_u32_be(os, static_cast<uint32_t>(h));
    put_u32_be(os, static_cast<uint32_t>(w));
    os.write(reinterpret_cast<const char*>(pixels.data()),
             static_cast<std::streamsize>(pixels.size()));
}

void write_idx_labels(const std::string& path, const std::vector<uint8_t>& labels) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError(path + ": cannot open for writing");
    put_u32_be(os, kIdxLabelsMagic);
    put_u32_be(os, static_cast<uint32_t>(labels.size()));
    os.write(reinterpret_cast<const char*>(labels.data()),
             static_cast<std::streamsize>(labels.size()));
}

namespace {

struct DatasetPaths {
    std::string images, labels;  // labels empty for RAWDS containers
    bool rawds = false;
};

DatasetPaths named_dataset_paths(const std::string& name,
                                 const std::string& data_dir, Split split) {
    const std::string base = data_dir + "/" + name + "/";
    if (name == "mnist" || name == "fashionmnist") {
        if (split == Split::Train)
            return {base + "train-images-idx3-ubyte", base + "train-labels-idx1-ubyte", false};
        return {base + "t10k-images-idx3-ubyte", base + "t10k-labels-idx1-ubyte", false};
    }
    if (name == "svhn") {
        const char* file = split == Split::Train ? "svhn-train.rawds" : "svhn-test.rawds";
        return {base + file, "", true};
    }
    throw ConfigError("unknown dataset '" + name +
                      "' (expected mnist, fashionmnist or svhn)");
}

bool file_exists(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    return is.good();
}

} // namespace

Dataset load_named_dataset(const std::string& name, const std::string& data_dir,
                           Split split) {
    const DatasetPaths paths = named_dataset_paths(name, data_dir, split);
    Dataset ds = paths.rawds ? load_rawds(paths.images)
                             : load_idx(paths.images, paths.labels);
    ds.name = name;
    ds.split = split;
    ds.validate();
    return ds;
}

bool named_dataset_exists(const std::string& name, const std::string& data_dir,
                          Split split) {
    const DatasetPaths paths = named_dataset_paths(name, data_dir, split);
    return file_exists(paths.images) &&
           (paths.rawds || file_exists(paths.labels));
}

BatchStream::BatchStream(const Dataset& ds, int batch_size, bool shuffle,
                         uint64_t seed)
    : ds_(ds), batch_size_(batch_size) {
    if (batch_size < 1) throw ConfigError("batch_iter: batch_size must be >= 1");
    order_.resize(ds.size());
    for (int i = 0; i < ds.size(); ++i) order_[i] = i;
    if (shuffle) {
        Rng rng(seed);
        for (int i = ds.size() - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.uniform_int(static_cast<uint64_t>(i) + 1));
            std::swap(order_[i], order_[j]);
        }
    }
}

bool BatchStream::next(Batch& out) {
    if (cursor_ >= order_.size()) return false;
    const int take = static_cast<int>(
        std::min<size_t>(batch_size_, order_.size() - cursor_));
    const int c = ds_.channels(), h = ds_.height(), w = ds_.width();
    const size_t image_sz = static_cast<size_t>(c) * h * w;

    out.images = Tensor({take, c, h, w});
    out.labels.resize(take);
    for (int i = 0; i < take; ++i) {
        const int src = order_[cursor_ + i];
        std::memcpy(out.images.data() + static_cast<size_t>(i) * image_sz,
                    ds_.images.data() + static_cast<size_t>(src) * image_sz,
                    image_sz * sizeof(float));
        out.labels[i] = ds_.labels[src];
    }
    cursor_ += take;
    return true;
}

void BatchStream::reset() { cursor_ = 0; }

int BatchStream::num_batches() const {
    return static_cast<int>((order_.size() + batch_size_ - 1) / batch_size_);
}

} // namespace retinet
