#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "retinet/common.hpp"
#include "retinet/rng.hpp"

namespace retinet {

// A function sampled on a rectangular grid. Node (x, y) sits at physical
// position (x*spacing, y*spacing); y grows with the row index (image
// convention). bounds, when declared, promise min <= value <= max everywhere.
struct ScalarField {
    int width = 0;
    int height = 0;
    float spacing = 1.0f;
    std::vector<float> values;  // row-major, height rows of width
    std::optional<std::pair<float, float>> bounds;  // (min, max)

    ScalarField() = default;
    ScalarField(int w, int h, float spacing_, float fill = 0.0f)
        : width(w), height(h), spacing(spacing_),
          values(static_cast<size_t>(w) * h, fill) {
        if (w < 1 || h < 1) throw ConfigError("field: dimensions must be positive");
        if (spacing_ <= 0.0f) throw ConfigError("field: spacing must be positive");
    }

    float& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
    float at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }

    void declare_bounds(float lo, float hi) {
        if (lo > hi) throw ConfigError("field: bounds min > max");
        bounds = {lo, hi};
    }

    float min_value() const;
    float max_value() const;

    // Samples f over x,y in [x0, x0 + (w-1)*spacing] etc.
    template <typename F>
    static ScalarField sample(int w, int h, float spacing, float x0, float y0, F&& f) {
        ScalarField field(w, h, spacing);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                field.at(x, y) = static_cast<float>(
                    f(x0 + x * spacing, y0 + y * spacing));
        return field;
    }

    // Independent uniform values in {0,1}; deliberately discontinuous.
    static ScalarField random_binary(int w, int h, float spacing, Rng& rng);
};

// PGM (P5 binary, 8- or 16-bit) export; values mapped linearly from [lo, hi].
// lo/hi default to the observed min/max.
void export_pgm(const ScalarField& field, const std::string& path, int bits = 8);
void export_pgm(const ScalarField& field, const std::string& path, int bits,
                float lo, float hi);

// PGM import; pixel values scaled to [0,1]. Grid spacing is supplied by the
// caller (PGM carries none).
ScalarField import_pgm(const std::string& path, float spacing = 1.0f);

// CSV grid: one row per y, '%.9g' cells.
void export_field_csv(const ScalarField& field, const std::string& path);
ScalarField import_field_csv(const std::string& path, float spacing = 1.0f);

} // namespace retinet
