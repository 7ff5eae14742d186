#include "retinet/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "retinet/perturb.hpp"

namespace retinet {

TrainResult train_model(Model& model, const Dataset& train_set,
                        const Dataset* test_set, const TrainConfig& config,
                        const std::function<void(const EpochLog&)>& on_epoch) {
    config.validate();
    if (train_set.channels() != model.spec().in_channels ||
        train_set.height() != model.spec().input_size)
        throw ConfigError("train: dataset geometry does not match model spec");

    Rng dropout_rng(Rng::mix(config.seed, 0x9e3779b9));
    AdamState adam;
    const auto param_values = model.param_values();
    const auto param_grads = model.param_grads();

    TrainResult result;
    int64_t step = 0;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        BatchStream stream(train_set, config.batch_size, /*shuffle=*/true,
                           Rng::mix(config.seed, static_cast<uint64_t>(epoch)));
        Batch batch;
        double loss_acc = 0.0;
        int batches = 0;
        while (stream.next(batch)) {
            const Tensor logits =
                model.forward(batch.images, /*training=*/true, &dropout_rng);
            XentResult xent = softmax_cross_entropy(logits, batch.labels);
            if (!std::isfinite(xent.loss))
                throw NumericError("train: non-finite loss at epoch " +
                                   std::to_string(epoch) + ", batch " +
                                   std::to_string(batches + 1));
            model.zero_grad();
            model.backward(xent.grad_logits);
            adam_step(param_values, param_grads, adam, config, ++step);
            loss_acc += xent.loss;
            ++batches;
        }

        EpochLog log;
        log.epoch = epoch;
        log.train_loss = static_cast<float>(loss_acc / batches);
        if (test_set != nullptr)
            log.test_accuracy = evaluate(model, *test_set, PerturbationSpec{});
        result.log.push_back(log);
        if (on_epoch) on_epoch(log);
    }
    return result;
}

void export_train_log(const TrainResult& result, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError(path + ": cannot open for writing");
    os << "epoch,train_loss,test_accuracy\n";
    char buf[96];
    for (const EpochLog& log : result.log) {
        std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g", log.epoch, log.train_loss,
                      log.test_accuracy);
        os << buf << "\n";
    }
    if (!os) throw DataError(path + ": write failed");
}

} // namespace retinet
