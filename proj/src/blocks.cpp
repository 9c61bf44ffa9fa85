#include "intsense/blocks.hpp"

#include <stdexcept>

namespace intsense {

BlockLayout::BlockLayout(int rows, int cols, int f)
    : image_rows(rows), image_cols(cols), block_side(f) {
    if (f < 1) throw std::invalid_argument("BlockLayout: block_side must be positive");
    if (rows < f || cols < f)
        throw std::invalid_argument("BlockLayout: image smaller than one block");
    cropped_rows = (rows / f) * f;
    cropped_cols = (cols / f) * f;
    row_offset = (rows - cropped_rows) / 2;
    col_offset = (cols - cropped_cols) / 2;
    grid_rows = cropped_rows / f;
    grid_cols = cropped_cols / f;
}

std::vector<Eigen::VectorXd> partition_blocks(const Eigen::VectorXd& image,
                                              const BlockLayout& layout) {
    if (image.size() != static_cast<Eigen::Index>(layout.image_rows) * layout.image_cols)
        throw std::invalid_argument("partition_blocks: image size does not match layout");
    const int f = layout.block_side;
    std::vector<Eigen::VectorXd> blocks;
    blocks.reserve(layout.block_count());
    for (int br = 0; br < layout.grid_rows; ++br) {
        for (int bc = 0; bc < layout.grid_cols; ++bc) {
            Eigen::VectorXd blk(f * f);
            for (int r = 0; r < f; ++r) {
                int src_r = layout.row_offset + br * f + r;
                int src_c = layout.col_offset + bc * f;
                for (int c = 0; c < f; ++c)
                    blk[r * f + c] = image[src_r * layout.image_cols + src_c + c];
            }
            blocks.push_back(std::move(blk));
        }
    }
    return blocks;
}

Eigen::VectorXd reassemble_blocks(const std::vector<Eigen::VectorXd>& blocks,
                                  const BlockLayout& layout) {
    if (static_cast<int>(blocks.size()) != layout.block_count())
        throw std::invalid_argument("reassemble_blocks: block count does not match layout");
    const int f = layout.block_side;
    Eigen::VectorXd image(static_cast<Eigen::Index>(layout.cropped_rows) * layout.cropped_cols);
    for (int br = 0; br < layout.grid_rows; ++br) {
        for (int bc = 0; bc < layout.grid_cols; ++bc) {
            const Eigen::VectorXd& blk = blocks[br * layout.grid_cols + bc];
            if (blk.size() != static_cast<Eigen::Index>(f) * f)
                throw std::invalid_argument("reassemble_blocks: block size mismatch");
            for (int r = 0; r < f; ++r)
                for (int c = 0; c < f; ++c)
                    image[(br * f + r) * layout.cropped_cols + bc * f + c] = blk[r * f + c];
        }
    }
    return image;
}

} // namespace intsense
