#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "gasca/model.hpp"
#include "gasca/rng.hpp"
#include "gasca/tensor.hpp"

namespace gasca {

/// Aligned input images x_phi and target images x_mu, same NCHW shape.
struct PairedDataset {
    enum class Split : std::uint8_t { train, validation };

    Tensor inputs;   // x_phi
    Tensor targets;  // x_mu
    Split split = Split::train;

    int count() const { return inputs.empty() ? 0 : inputs.dim(0); }
    Shape3 sample_shape() const;

    /// Shape/finite checks always; [0,1] pixel range only for pixel-space
    /// datasets (encoded code-space datasets are unbounded).
    void check_invariants(bool require_pixel_range) const;
};

// --- IDX ingestion (big-endian, magic 0x00 0x00 0x08 0x03) ----------------

/// Self-paired load: x_mu = x_phi. Pixels scaled to [0,1].
PairedDataset load_idx(const std::string& images_path);
/// Target-mapped load: targets come from a second IDX file, paired by index.
PairedDataset load_idx(const std::string& images_path, const std::string& targets_path);
/// Writes (N,1,H,W) images as IDX u8, quantizing round(clamp(v,0,1)*255).
void save_idx(const std::string& path, const Tensor& images);

// --- synthetic pose data ---------------------------------------------------

/// Random asymmetric blobs: x_phi rendered at a rotation uniform in
/// [-max_angle_deg, max_angle_deg], x_mu the same blob at exactly 0 degrees.
/// Bilinear resampling; pixels in [0,1]. Per sample the blob parameters are
/// drawn before the rotation fraction, so two generators with equal seeds
/// produce the same blobs regardless of max_angle_deg.
PairedDataset synth_pose_dataset(int n, int image_size, double max_angle_deg, SeededRng& rng);

// --- splitting --------------------------------------------------------------

/// Seeded-shuffle split into disjoint, exhaustive train/validation parts.
/// Validation gets round(N * val_fraction) samples; both parts must end up
/// nonempty.
std::pair<PairedDataset, PairedDataset> split_dataset(const PairedDataset& ds, double val_fraction,
                                                      SeededRng& rng);

// --- manifest ---------------------------------------------------------------

/// Flat key=value description sufficient to reload or regenerate the exact
/// dataset. Relative paths resolve against the manifest file's directory.
struct DatasetManifest {
    enum class Kind : std::uint8_t { idx, synthetic, raw_binary };

    Kind kind = Kind::synthetic;
    // idx / raw_binary
    std::string images_path;
    std::string targets_path;  // empty => self-paired
    // raw_binary dims
    int n = 0, c = 0, h = 0, w = 0;
    // synthetic
    int image_size = 0;
    double max_angle_deg = 60.0;
    std::uint64_t seed = 0;

    static DatasetManifest from_file(const std::string& path);
    void to_file(const std::string& path) const;
    PairedDataset realize() const;
};

}  // namespace gasca
