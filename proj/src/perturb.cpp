#include "retinet/perturb.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace retinet {

Tensor apply_offset(const Tensor& images, float mu) {
    if (mu == 0.0f) return images;
    Tensor out = images;
    for (auto& v : out.vec()) v -= mu;
    return out;
}

Tensor apply_contrast(const Tensor& images, float sigma) {
    if (sigma <= 0.0f) throw ConfigError("apply_contrast: sigma must be > 0");
    if (sigma == 1.0f) return images;
    if (images.rank() != 4) throw ConfigError("apply_contrast: images must be [N,C,H,W]");
    Tensor out = images;
    const int n = images.dim(0);
    const size_t per_image = images.numel() / static_cast<size_t>(n);
    const float inv_sigma = 1.0f / sigma;
    for (int i = 0; i < n; ++i) {
        float* px = out.data() + static_cast<size_t>(i) * per_image;
        double sum = 0.0;
        for (size_t j = 0; j < per_image; ++j) sum += px[j];
        const float mean = static_cast<float>(sum / static_cast<double>(per_image));
        for (size_t j = 0; j < per_image; ++j)
            px[j] = (px[j] - mean) * inv_sigma + mean;
    }
    return out;
}

Tensor apply_perturbation(const Tensor& images, const PerturbationSpec& spec) {
    spec.validate();
    if (spec.is_identity()) return images;
    return apply_contrast(apply_offset(images, spec.mu), spec.sigma);
}

float evaluate(Model& model, const Dataset& ds, const PerturbationSpec& spec,
               int eval_batch) {
    spec.validate();
    if (ds.channels() != model.spec().in_channels ||
        ds.height() != model.spec().input_size)
        throw ConfigError("evaluate: dataset geometry " + ds.images.shape_str() +
                          " does not match model spec");

    BatchStream stream(ds, eval_batch, /*shuffle=*/false, /*seed=*/0);
    Batch batch;
    int64_t correct = 0;
    while (stream.next(batch)) {
        const Tensor inputs = apply_perturbation(batch.images, spec);
        const Tensor logits = model.forward(inputs, /*training=*/false);
        const int c = logits.dim(1);
        for (int i = 0; i < logits.dim(0); ++i) {
            const float* row = logits.data() + static_cast<size_t>(i) * c;
            int best = 0;
            for (int j = 1; j < c; ++j)
                if (row[j] > row[best]) best = j;
            correct += best == batch.labels[i];
        }
    }
    return static_cast<float>(static_cast<double>(correct) / ds.size());
}

const char* sweep_axis_name(SweepAxis axis) {
    return axis == SweepAxis::Mu ? "mu" : "sigma";
}

std::vector<float> sweep_grid(float start, float stop, float step) {
    if (step <= 0.0f) throw ConfigError("sweep: grid step must be > 0");
    if (stop < start) throw ConfigError("sweep: grid stop must be >= start");
    std::vector<float> grid;
    // double accumulation keeps 0.2-steps from drifting past the endpoint
    for (double v = start; v <= static_cast<double>(stop) + step * 0.5; v += step)
        grid.push_back(static_cast<float>(v));
    return grid;
}

std::vector<float> default_grid(SweepAxis axis) {
    return axis == SweepAxis::Mu ? sweep_grid(-2.0f, 2.0f, 0.2f)
                                 : sweep_grid(0.1f, 3.9f, 0.2f);
}

SweepResult run_sweep(Model& model, const Dataset& ds, SweepAxis axis,
                      const std::vector<float>& grid,
                      const PerturbationSpec& base) {
    if (grid.empty()) throw ConfigError("sweep: grid is empty");
    for (size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1])
            throw ConfigError("sweep: grid must be strictly increasing");

    SweepResult result;
    result.model_name = model_kind_name(model.spec().name);
    result.dataset_name = ds.name;
    result.axis = axis;
    result.base = base;
    for (float v : grid) {
        PerturbationSpec spec = base;
        if (axis == SweepAxis::Mu) spec.mu = v;
        else spec.sigma = v;
        result.points.push_back({v, evaluate(model, ds, spec), ds.size()});
    }
    return result;
}

namespace {

std::string axis_label(const SweepResult& r) {
    std::string label = sweep_axis_name(r.axis);
    // Off-identity fixed parameter marks the sweep as a combined extension.
    if (r.axis == SweepAxis::Mu && r.base.sigma != 1.0f)
        label += "|sigma=" + std::to_string(r.base.sigma);
    if (r.axis == SweepAxis::Sigma && r.base.mu != 0.0f)
        label += "|mu=" + std::to_string(r.base.mu);
    return label;
}

void write_stats_fields(std::ofstream& os, const LayerStats& s) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%lld",
                  s.q1, s.median, s.q3, s.whisker_low, s.whisker_high, s.mean,
                  s.stddev, static_cast<long long>(s.sample_count));
    os << buf;
}

} // namespace

void export_csv(const SweepResult& result, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError(path + ": cannot open for writing");
    os << "model,dataset,axis,param,accuracy,n\n";
    const std::string label = axis_label(result);
    char buf[96];
    for (const SweepPoint& p : result.points) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%d", p.param, p.accuracy,
                      p.sample_count);
        os << result.model_name << "," << result.dataset_name << "," << label
           << "," << buf << "\n";
    }
    if (!os) throw DataError(path + ": write failed");
}

void export_stats_csv(const SweepResult& result,
                      const std::vector<SweepStatsRow>& rows,
                      const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError(path + ": cannot open for writing");
    os << "model,dataset,axis,param,stage,layer_tag,q1,median,q3,"
          "whisker_low,whisker_high,mean,std,n\n";
    const std::string label = axis_label(result);
    char buf[40];
    for (const SweepStatsRow& row : rows) {
        std::snprintf(buf, sizeof buf, "%.9g", row.param);
        os << result.model_name << "," << result.dataset_name << "," << label
           << "," << buf << ",before," << row.before.layer_tag << ",";
        write_stats_fields(os, row.before);
        os << "\n";
        os << result.model_name << "," << result.dataset_name << "," << label
           << "," << buf << ",after," << row.after.layer_tag << ",";
        write_stats_fields(os, row.after);
        os << "\n";
    }
    if (!os) throw DataError(path + ": write failed");
}

} // namespace retinet
