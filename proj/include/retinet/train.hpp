#pragma once

#include <functional>
#include <string>
#include <vector>

#include "retinet/adam.hpp"
#include "retinet/dataset.hpp"
#include "retinet/model.hpp"

namespace retinet {

struct EpochLog {
    int epoch = 0;          // 1-based
    float train_loss = 0;   // mean over batches
    float test_accuracy = -1.0f;  // -1 when no test set was given
};

struct TrainResult {
    std::vector<EpochLog> log;
};

// ADAM training loop. Bitwise reproducible for a fixed (model init, config,
// data): dropout draws come from a stream derived from config.seed and each
// epoch's shuffle from Rng::mix(config.seed, epoch). Throws NumericError when
// the loss stops being finite.
TrainResult train_model(Model& model, const Dataset& train_set,
                        const Dataset* test_set, const TrainConfig& config,
                        const std::function<void(const EpochLog&)>& on_epoch = {});

// Training-log CSV: header epoch,train_loss,test_accuracy.
void export_train_log(const TrainResult& result, const std::string& path);

} // namespace retinet
