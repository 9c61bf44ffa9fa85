#include "intsense/io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace intsense {
namespace {

constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw std::runtime_error("binary read: truncated file");
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
           std::uint32_t(b[3]) << 24;
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw std::runtime_error("binary read: truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

void put_header(std::ostream& out, const char magic[8]) {
    out.write(magic, 8);
    put_u32(out, kVersion);
    put_u32(out, 0);
}

void check_header(std::istream& in, const char magic[8], const std::string& path) {
    char got[8];
    in.read(got, 8);
    if (!in || std::memcmp(got, magic, 8) != 0)
        throw std::runtime_error(path + ": wrong file type (bad magic)");
    std::uint32_t version = get_u32(in);
    if (version != kVersion)
        throw std::runtime_error(path + ": unsupported version " + std::to_string(version));
    get_u32(in);  // reserved
}

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(out, m(r, c));
}

Eigen::MatrixXd get_matrix(std::istream& in) {
    std::uint32_t rows = get_u32(in);
    std::uint32_t cols = get_u32(in);
    Eigen::MatrixXd m(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r)
        for (std::uint32_t c = 0; c < cols; ++c) m(r, c) = get_f64(in);
    return m;
}

void put_vector(std::ostream& out, const Eigen::VectorXd& v) {
    put_u32(out, static_cast<std::uint32_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) put_f64(out, v[i]);
}

Eigen::VectorXd get_vector(std::istream& in) {
    std::uint32_t len = get_u32(in);
    Eigen::VectorXd v(len);
    for (std::uint32_t i = 0; i < len; ++i) v[i] = get_f64(in);
    return v;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open for reading");
    return in;
}

} // namespace

void write_model(const std::string& path, const MggdModel& model) {
    auto out = open_out(path);
    put_header(out, "ISNSMGGD");
    put_u32(out, static_cast<std::uint32_t>(model.dim));
    put_f64(out, model.beta.beta);
    put_matrix(out, model.scatter);
    if (!out) throw std::runtime_error(path + ": write failed");
}

MggdModel read_model(const std::string& path) {
    auto in = open_in(path);
    check_header(in, "ISNSMGGD", path);
    std::uint32_t dim = get_u32(in);
    double beta = get_f64(in);
    Eigen::MatrixXd scatter = get_matrix(in);
    if (scatter.rows() != static_cast<Eigen::Index>(dim))
        throw std::runtime_error(path + ": inconsistent dimensions");
    return MggdModel(GgdShape(beta), std::move(scatter));
}

void write_design(const std::string& path, const SensingDesign& design, bool converged) {
    auto out = open_out(path);
    put_header(out, "ISNSDSGN");
    put_u32(out, static_cast<std::uint32_t>(design.q.rows()));
    put_u32(out, static_cast<std::uint32_t>(design.block_side));
    put_u32(out, static_cast<std::uint32_t>(design.rank_q));
    put_u32(out, static_cast<std::uint32_t>(design.rank_p));
    put_u32(out, converged ? 1 : 0);
    put_f64(out, design.ones_row_residual);
    put_matrix(out, design.q);
    put_vector(out, design.singular_values);
    put_matrix(out, design.left_vectors);
    put_matrix(out, design.right_vectors);
    put_vector(out, design.feasibility_report);
    if (!out) throw std::runtime_error(path + ": write failed");
}

SensingDesign read_design(const std::string& path, bool* converged) {
    auto in = open_in(path);
    check_header(in, "ISNSDSGN", path);
    SensingDesign d;
    std::uint32_t n = get_u32(in);
    d.block_side = static_cast<int>(get_u32(in));
    d.rank_q = static_cast<int>(get_u32(in));
    d.rank_p = static_cast<int>(get_u32(in));
    bool conv = get_u32(in) != 0;
    if (converged) *converged = conv;
    d.ones_row_residual = get_f64(in);
    d.q = get_matrix(in);
    d.singular_values = get_vector(in);
    d.left_vectors = get_matrix(in);
    d.right_vectors = get_matrix(in);
    d.feasibility_report = get_vector(in);
    if (d.q.rows() != static_cast<Eigen::Index>(n))
        throw std::runtime_error(path + ": inconsistent dimensions");
    return d;
}

void write_operator_pair(const std::string& path, const SensingOperatorPair& pair) {
    auto out = open_out(path);
    put_header(out, "ISNSSOPR");
    put_u32(out, static_cast<std::uint32_t>(pair.rank));
    put_u32(out, static_cast<std::uint32_t>(pair.phi.cols()));
    put_u32(out, static_cast<std::uint32_t>(pair.block_side));
    put_matrix(out, pair.phi);
    put_matrix(out, pair.phi_dual);
    put_vector(out, pair.singular_values);
    if (!out) throw std::runtime_error(path + ": write failed");
}

SensingOperatorPair read_operator_pair(const std::string& path) {
    auto in = open_in(path);
    check_header(in, "ISNSSOPR", path);
    SensingOperatorPair pair;
    pair.rank = static_cast<int>(get_u32(in));
    std::uint32_t n = get_u32(in);
    pair.block_side = static_cast<int>(get_u32(in));
    pair.phi = get_matrix(in);
    pair.phi_dual = get_matrix(in);
    pair.singular_values = get_vector(in);
    if (pair.phi.cols() != static_cast<Eigen::Index>(n) || pair.phi.rows() != pair.rank)
        throw std::runtime_error(path + ": inconsistent dimensions");
    return pair;
}

void write_measurements(const std::string& path, const Measurements& meas) {
    auto out = open_out(path);
    put_header(out, "ISNSMEAS");
    put_u32(out, static_cast<std::uint32_t>(meas.layout.image_rows));
    put_u32(out, static_cast<std::uint32_t>(meas.layout.image_cols));
    put_u32(out, static_cast<std::uint32_t>(meas.layout.block_side));
    std::uint32_t m = meas.per_block.empty() ? 0
                      : static_cast<std::uint32_t>(meas.per_block.front().size());
    put_u32(out, m);
    put_u32(out, static_cast<std::uint32_t>(meas.per_block.size()));
    put_u64(out, meas.operator_id);
    for (const auto& y : meas.per_block)
        for (Eigen::Index i = 0; i < y.size(); ++i) put_f64(out, y[i]);
    if (!out) throw std::runtime_error(path + ": write failed");
}

Measurements read_measurements(const std::string& path) {
    auto in = open_in(path);
    check_header(in, "ISNSMEAS", path);
    std::uint32_t rows = get_u32(in);
    std::uint32_t cols = get_u32(in);
    std::uint32_t f = get_u32(in);
    std::uint32_t m = get_u32(in);
    std::uint32_t count = get_u32(in);
    BlockLayout layout(static_cast<int>(rows), static_cast<int>(cols), static_cast<int>(f));
    Measurements meas{{}, layout, get_u64(in)};
    if (count != static_cast<std::uint32_t>(layout.block_count()))
        throw std::runtime_error(path + ": block count does not match layout");
    meas.per_block.reserve(count);
    for (std::uint32_t b = 0; b < count; ++b) {
        Eigen::VectorXd y(m);
        for (std::uint32_t i = 0; i < m; ++i) y[i] = get_f64(in);
        meas.per_block.push_back(std::move(y));
    }
    return meas;
}

PgmImage read_pgm(const std::string& path) {
    auto in = open_in(path);
    auto next_token = [&in, &path]() {
        std::string tok;
        for (;;) {
            int ch = in.get();
            if (ch == EOF) throw std::runtime_error(path + ": truncated PGM header");
            if (ch == '#') {  // comment to end of line
                while (ch != EOF && ch != '\n') ch = in.get();
                continue;
            }
            if (std::isspace(ch)) {
                if (!tok.empty()) return tok;
                continue;
            }
            tok.push_back(static_cast<char>(ch));
        }
    };
    if (next_token() != "P5") throw std::runtime_error(path + ": not a binary PGM (P5)");
    PgmImage img;
    img.cols = std::stoi(next_token());
    img.rows = std::stoi(next_token());
    int maxval = std::stoi(next_token());
    if (img.cols < 1 || img.rows < 1 || maxval != 255)
        throw std::runtime_error(path + ": unsupported PGM geometry (need 8-bit, maxval 255)");
    img.pixels.resize(static_cast<std::size_t>(img.rows) * img.cols);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (!in) throw std::runtime_error(path + ": truncated PGM payload");
    return img;
}

void write_pgm(const std::string& path, const PgmImage& img) {
    auto out = open_out(path);
    out << "P5\n" << img.cols << " " << img.rows << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw std::runtime_error(path + ": write failed");
}

Eigen::VectorXd pgm_to_real(const PgmImage& img) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(img.pixels.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = img.pixels[i] / 255.0;
    return v;
}

PgmImage real_to_pgm_minmax(const Eigen::VectorXd& values, int rows, int cols,
                            double* out_min, double* out_max) {
    if (values.size() != static_cast<Eigen::Index>(rows) * cols)
        throw std::invalid_argument("real_to_pgm_minmax: size mismatch");
    double lo = values.minCoeff();
    double hi = values.maxCoeff();
    if (out_min) *out_min = lo;
    if (out_max) *out_max = hi;
    double span = hi - lo;
    PgmImage img{rows, cols, {}};
    img.pixels.resize(static_cast<std::size_t>(values.size()));
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        double t = span > 0.0 ? (values[i] - lo) / span : 0.0;
        long q = std::lround(t * 255.0);
        img.pixels[i] = static_cast<std::uint8_t>(q < 0 ? 0 : q > 255 ? 255 : q);
    }
    return img;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    auto out = open_out(path);
    out << content;
    if (!out) throw std::runtime_error(path + ": write failed");
}

} // namespace intsense
