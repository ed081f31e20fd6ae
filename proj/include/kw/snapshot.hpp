#pragma once

#include <string>

#include "kw/spectral.hpp"

namespace kw {

// KWF1 layout: "KWF1", u32 dim, u32 components, u32 n, f64 L, then the physical
// samples as f64, component-major and row-major within a component. All little-endian.
void write_snapshot(const std::string& path, const SpectralField& f);
SpectralField read_snapshot(const std::string& path);

std::string encode_snapshot(const SpectralField& f);
SpectralField decode_snapshot(const std::string& bytes);

}  // namespace kw
