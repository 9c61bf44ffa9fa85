#pragma once

#include <Eigen/Dense>
#include <vector>

namespace intsense {

// Bookkeeping for splitting an image into non-overlapping f x f blocks.
// Images whose dimensions are not multiples of f are center-cropped to the
// largest multiple; the crop origin is recorded here.
struct BlockLayout {
    int image_rows, image_cols;      // source dimensions
    int block_side;                  // f
    int cropped_rows, cropped_cols;  // largest multiples of f
    int row_offset, col_offset;      // centered crop origin
    int grid_rows, grid_cols;        // block grid

    BlockLayout(int rows, int cols, int f);
    int block_count() const { return grid_rows * grid_cols; }

    bool operator==(const BlockLayout& o) const = default;
};

// Blocks in raster order of the block grid, pixels within a block in raster
// order. The input is the full source image; the crop is applied here.
std::vector<Eigen::VectorXd> partition_blocks(const Eigen::VectorXd& image,
                                              const BlockLayout& layout);

// Inverse of partition_blocks up to the crop: returns the cropped_rows x
// cropped_cols raster.
Eigen::VectorXd reassemble_blocks(const std::vector<Eigen::VectorXd>& blocks,
                                  const BlockLayout& layout);

} // namespace intsense
