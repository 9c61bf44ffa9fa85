#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "intsense/design.hpp"
#include "intsense/ggd.hpp"
#include "intsense/pipeline.hpp"

namespace intsense {

// All binary files share the layout: 16-byte header (8 ASCII magic bytes,
// u32 LE version, 4 zero bytes), then u32 LE dimensions, then row-major
// IEEE f64 LE payloads. Magics: ISNSMGGD, ISNSDSGN, ISNSSOPR, ISNSMEAS.

void write_model(const std::string& path, const MggdModel& model);
MggdModel read_model(const std::string& path);

void write_design(const std::string& path, const SensingDesign& design, bool converged);
SensingDesign read_design(const std::string& path, bool* converged = nullptr);

void write_operator_pair(const std::string& path, const SensingOperatorPair& pair);
SensingOperatorPair read_operator_pair(const std::string& path);

void write_measurements(const std::string& path, const Measurements& meas);
Measurements read_measurements(const std::string& path);

// 8-bit binary PGM (P5)
struct PgmImage {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> pixels;  // row-major
};

PgmImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const PgmImage& img);

Eigen::VectorXd pgm_to_real(const PgmImage& img);  // x / 255 exactly

// min-max normalization to 8 bits; the range is reported so the file can be
// reinterpreted exactly
PgmImage real_to_pgm_minmax(const Eigen::VectorXd& values, int rows, int cols,
                            double* out_min, double* out_max);

// shortest round-trip decimal formatting ("%.17g")
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

} // namespace intsense
