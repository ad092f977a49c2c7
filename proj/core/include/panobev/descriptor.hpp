#pragma once

#include <Eigen/Core>

#include "panobev/image.hpp"

namespace panobev {

/// Length of the grid descriptor: grid*grid cells, each contributing the
/// per-channel mean plus an 8-bin gradient orientation histogram.
int descriptor_length(int grid, int channels);

/// Handcrafted image descriptor over a grid x grid spatial layout.
/// Per cell: mean intensity of every channel, then 8 orientation bins of
/// gradient magnitude (central differences on the channel-mean luminance,
/// interior pixels only), each divided by the cell pixel count.
/// Deterministic; a constant image produces an all-zero histogram.
Eigen::VectorXd extract_descriptor(const ImageBuffer& img, int grid);

}  // namespace panobev
