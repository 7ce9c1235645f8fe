// Field files: a raw little-endian payload next to a JSON sidecar named
// "<payload>.json" holding {"shape", "dtype", "axes"}. Scalar fields are
// stored as f32, masks as u8. All writers go through a temp file + rename.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "tensorscale/grid.hpp"
#include "tensorscale/scalespace.hpp"

namespace tensorscale {

namespace fs = std::filesystem;

fs::path sidecar_path(const fs::path& payload);

void write_field(const fs::path& path, const ScalarField& field);
void write_mask(const fs::path& path, const MaskField& mask);

/// Reads a raw field (f32 or u8 payload) or, for .pgm/.pnm files, a P2/P5
/// image scaled to [0, 1].
ScalarField read_field(const fs::path& path);
/// Any readable field; nonzero samples are selected.
MaskField read_mask(const fs::path& path);

ScalarField read_pgm(const fs::path& path);

void write_histogram_csv(const fs::path& path, const ScaleHistogram& hist);

/// 8-bit RGB preview of a 2D orientation: hue = angle / pi, value = anisotropy.
void write_orientation_preview(const fs::path& path, const ScalarField& angle, const ScalarField& anisotropy);

void write_text_atomic(const fs::path& path, std::string_view contents);

}  // namespace tensorscale
