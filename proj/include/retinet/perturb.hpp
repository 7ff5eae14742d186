#pragma once

#include <string>
#include <vector>

#include "retinet/dataset.hpp"
#include "retinet/model.hpp"

namespace retinet {

// Test-time perturbation: luminosity offset mu (x <- x - mu) and contrast
// divisor sigma (x <- (x - mean)/sigma + mean, per-image mean over all
// channels and pixels). (0, 1) is the identity. No clamping anywhere.
struct PerturbationSpec {
    float mu = 0.0f;
    float sigma = 1.0f;

    bool is_identity() const { return mu == 0.0f && sigma == 1.0f; }
    void validate() const {
        if (sigma <= 0.0f) throw ConfigError("perturbation: sigma must be > 0");
    }
};

Tensor apply_offset(const Tensor& images, float mu);
Tensor apply_contrast(const Tensor& images, float sigma);

// Offset first, then contrast; identity specs short-circuit bitwise.
Tensor apply_perturbation(const Tensor& images, const PerturbationSpec& spec);

// Fraction of argmax-correct predictions over the full dataset, eval mode.
float evaluate(Model& model, const Dataset& ds, const PerturbationSpec& spec,
               int eval_batch = 256);

enum class SweepAxis { Mu, Sigma };

const char* sweep_axis_name(SweepAxis axis);

struct SweepPoint {
    float param;
    float accuracy;
    int sample_count;
};

struct SweepResult {
    std::string model_name;
    std::string dataset_name;
    SweepAxis axis = SweepAxis::Mu;
    // Extension: when the non-swept parameter is held off-identity, it is
    // recorded here and flagged in the CSV axis column.
    PerturbationSpec base;
    std::vector<SweepPoint> points;
};

// start:stop:step expansion, inclusive stop (within half a step).
std::vector<float> sweep_grid(float start, float stop, float step);
std::vector<float> default_grid(SweepAxis axis);  // mu -2..2, sigma 0.1..3.9

// One evaluate per grid point; grid must be strictly increasing.
SweepResult run_sweep(Model& model, const Dataset& ds, SweepAxis axis,
                      const std::vector<float>& grid,
                      const PerturbationSpec& base = {});

// Header model,dataset,axis,param,accuracy,n; %.9g numbers.
void export_csv(const SweepResult& result, const std::string& path);

// Per grid point, before/after stats at the first precortical conv.
struct SweepStatsRow {
    float param;
    LayerStats before;
    LayerStats after;
};
void export_stats_csv(const SweepResult& result,
                      const std::vector<SweepStatsRow>& rows,
                      const std::string& path);

} // namespace retinet
