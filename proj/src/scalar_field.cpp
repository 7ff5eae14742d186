#include "retinet/scalar_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace retinet {

float ScalarField::min_value() const {
    return *std::min_element(values.begin(), values.end());
}

float ScalarField::max_value() const {
    return *std::max_element(values.begin(), values.end());
}

ScalarField ScalarField::random_binary(int w, int h, float spacing, Rng& rng) {
    ScalarField f(w, h, spacing);
    for (auto& v : f.values) v = rng.bernoulli(0.5f) ? 1.0f : 0.0f;
    f.declare_bounds(0.0f, 1.0f);
    return f;
}

void export_pgm(const ScalarField& field, const std::string& path, int bits) {
    export_pgm(field, path, bits, field.min_value(), field.max_value());
}

void export_pgm(const ScalarField& field, const std::string& path, int bits,
                float lo, float hi) {
    if (bits != 8 && bits != 16) throw ConfigError("pgm: bits must be 8 or 16");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError(path + ": cannot open for writing");

    const int maxval = bits == 8 ? 255 : 65535;
    os << "P5\n" << field.width << " " << field.height << "\n" << maxval << "\n";
    const float span = hi > lo ? hi - lo : 1.0f;
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x) {
            const float t = std::clamp((field.at(x, y) - lo) / span, 0.0f, 1.0f);
            const int v = static_cast<int>(std::lround(t * maxval));
            if (bits == 8) {
                const unsigned char b = static_cast<unsigned char>(v);
                os.write(reinterpret_cast<const char*>(&b), 1);
            } else {
                // 16-bit PGM samples are big-endian
                const unsigned char b[2] = {static_cast<unsigned char>(v >> 8),
                                            static_cast<unsigned char>(v & 0xff)};
                os.write(reinterpret_cast<const char*>(b), 2);
            }
        }
    if (!os) throw DataError(path + ": write failed");
}

namespace {

int pgm_token(std::istream& is, const std::string& path) {
    // Skips whitespace and '#' comment lines, then reads one integer.
    int c = is.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = is.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = is.get();
    }
    if (c == EOF) throw DataError(path + ": truncated PGM header");
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = is.get();
    }
    return value;
}

} // namespace

ScalarField import_pgm(const std::string& path, float spacing) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError(path + ": cannot open");
    char m0 = 0, m1 = 0;
    is.get(m0);
    is.get(m1);
    if (m0 != 'P' || m1 != '5')
        throw DataError(path + ": not a binary PGM (expected P5)");
    const int w = pgm_token(is, path);
    const int h = pgm_token(is, path);
    const int maxval = pgm_token(is, path);
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
        throw DataError(path + ": bad PGM header");

    ScalarField field(w, h, spacing);
    const bool wide = maxval > 255;
    const float inv = 1.0f / static_cast<float>(maxval);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int v;
            if (wide) {
                unsigned char b[2];
                if (!is.read(reinterpret_cast<char*>(b), 2))
                    throw DataError(path + ": truncated PGM data");
                v = (static_cast<int>(b[0]) << 8) | b[1];
            } else {
                unsigned char b;
                if (!is.read(reinterpret_cast<char*>(&b), 1))
                    throw DataError(path + ": truncated PGM data");
                v = b;
            }
            field.at(x, y) = static_cast<float>(v) * inv;
        }
    field.declare_bounds(0.0f, 1.0f);
    return field;
}

void export_field_csv(const ScalarField& field, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError(path + ": cannot open for writing");
    char buf[40];
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            std::snprintf(buf, sizeof buf, "%.9g", field.at(x, y));
            os << (x ? "," : "") << buf;
        }
        os << "\n";
    }
    if (!os) throw DataError(path + ": write failed");
}

ScalarField import_field_csv(const std::string& path, float spacing) {
    std::ifstream is(path);
    if (!is) throw DataError(path + ": cannot open");
    std::vector<std::vector<float>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<float> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stof(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw DataError(path + ": ragged CSV grid");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(path + ": empty CSV grid");
    ScalarField field(static_cast<int>(rows.front().size()),
                      static_cast<int>(rows.size()), spacing);
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x) field.at(x, y) = rows[y][x];
    return field;
}

} // namespace retinet
