#pragma once

#include "panobev/image.hpp"

namespace panobev {

enum class PadFill {
  replicate_black,  // replicate the top edge for sky, black below ground
  black,
};

struct PaddedPanorama {
  ImageBuffer image;
  int top_row = 0;  // row of the padded image where the source content starts
};

/// Pads a panorama strip to the full 2:1 equirectangular aspect (height =
/// width/2), keeping the width. The source is placed so that its horizon
/// row (default: its vertical center) lands on the target's horizon row
/// h/2; top_row records where the original rows start. Source pixels are
/// preserved bit-exactly. Throws if the source is taller than the target
/// or the width is odd. An already 2:1 input is returned unchanged with
/// top_row = 0.
PaddedPanorama pad_panorama(const ImageBuffer& src, PadFill fill = PadFill::replicate_black,
                            double horizon_row_in_src = -1.0);

/// Cyclic horizontal shift by delta_u columns: out(r, c) = src(r, (c +
/// delta_u) mod w). Lossless; shifting by -delta_u inverts it and shifts
/// compose additively modulo the width.
ImageBuffer yaw_shift(const ImageBuffer& src, int delta_u);

/// Aerial-to-polar baseline resampling of a square overhead image: output
/// rows sweep radius from the half-width (row 0) down to the center (row
/// out_h), columns sweep azimuth over 2*pi. Bilinear with clamped edges.
ImageBuffer polar_transform(const ImageBuffer& sat, int out_h, int out_w);

}  // namespace panobev
