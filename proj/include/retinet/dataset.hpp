#pragma once

#include <optional>
#include <string>
#include <vector>

#include "retinet/rng.hpp"
#include "retinet/tensor.hpp"

namespace retinet {

enum class Split { Train, Test };

// Images live in [0,1] (u8 pixels / 255), labels are class indices in [0,10).
struct Dataset {
    Tensor images;            // [N, C, H, W]
    std::vector<int> labels;  // N entries
    std::string name;
    Split split = Split::Train;

    int size() const { return images.dim(0); }
    int channels() const { return images.dim(1); }
    int height() const { return images.dim(2); }
    int width() const { return images.dim(3); }

    void validate() const;
};

// IDX pair (the MNIST/FashionMNIST distribution format): big-endian headers,
// magic 0x00000803 for images and 0x00000801 for labels.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// RAWDS container: magic "RWDS", then little-endian u32 version, N, C, H, W,
// N label bytes, then N*C*H*W pixel bytes. Carries SVHN after conversion.
Dataset load_rawds(const std::string& path);
void save_rawds(const Dataset& ds, const std::string& path);

// Synthetic writers used by tests and demos.
void write_idx_images(const std::string& path, const std::vector<uint8_t>& pixels,
                      int n, int h, int w);
void write_idx_labels(const std::string& path, const std::vector<uint8_t>& labels);

// Resolves mnist/fashionmnist (IDX pairs) and svhn (RAWDS) under
// <data_dir>/<name>/ using the standard distribution file names.
Dataset load_named_dataset(const std::string& name, const std::string& data_dir,
                           Split split);
bool named_dataset_exists(const std::string& name, const std::string& data_dir,
                          Split split);

struct Batch {
    Tensor images;
    std::vector<int> labels;
};

// Deterministic batch sequence. Shuffling is a Fisher-Yates pass driven by
// the project Rng, so the order is a pure function of the seed. The final
// short batch is included.
class BatchStream {
public:
    BatchStream(const Dataset& ds, int batch_size, bool shuffle, uint64_t seed);

    bool next(Batch& out);
    void reset();
    const std::vector<int>& order() const { return order_; }
    int num_batches() const;

private:
    const Dataset& ds_;
    int batch_size_;
    std::vector<int> order_;
    size_t cursor_ = 0;
};

} // namespace retinet
