#include "gasca/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "gasca/errors.hpp"
#include "kv.hpp"

namespace gasca {

namespace detail {

long long parse_int(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("key '" + key + "': expected integer, got '" + value + "'");
    }
}

unsigned long long parse_uint(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size() || value.front() == '-') throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("key '" + key + "': expected unsigned integer, got '" + value + "'");
    }
}

double parse_double(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("key '" + key + "': expected number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "1" || value == "true") return true;
    if (value == "0" || value == "false") return false;
    throw ConfigError("key '" + key + "': expected boolean (0/1/true/false), got '" + value + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

}  // namespace detail

Shape3 PairedDataset::sample_shape() const {
    if (inputs.rank() != 4) throw std::logic_error("PairedDataset: inputs are not NCHW");
    return Shape3{inputs.dim(1), inputs.dim(2), inputs.dim(3)};
}

void PairedDataset::check_invariants(bool require_pixel_range) const {
    if (inputs.rank() != 4)
        throw std::invalid_argument("PairedDataset: inputs must be NCHW, got " + inputs.shape_str());
    if (!inputs.same_shape(targets))
        throw std::invalid_argument("PairedDataset: inputs " + inputs.shape_str() + " and targets " +
                                    targets.shape_str() + " must have equal shapes");
    if (inputs.dim(0) < 1) throw std::invalid_argument("PairedDataset: empty dataset");
    if (!inputs.all_finite() || !targets.all_finite())
        throw std::invalid_argument("PairedDataset: non-finite pixel values");
    if (require_pixel_range) {
        for (const Tensor* t : {&inputs, &targets})
            for (std::int64_t i = 0; i < t->size(); ++i)
                if (t->values()[static_cast<std::size_t>(i)] < 0.0 ||
                    t->values()[static_cast<std::size_t>(i)] > 1.0)
                    throw std::invalid_argument("PairedDataset: pixel value outside [0,1]");
    }
}

// --- IDX --------------------------------------------------------------------

namespace {

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset) {
    return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
           (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) | static_cast<std::uint32_t>(bytes[offset + 3]);
}

Tensor load_idx_images(const std::string& path) {
    const std::vector<std::uint8_t> bytes = read_binary_file(path);
    if (bytes.size() < 4)
        throw ConfigError(path + ": truncated IDX header at byte offset " + std::to_string(bytes.size()));
    if (bytes[0] != 0x00 || bytes[1] != 0x00 || bytes[2] != 0x08 || bytes[3] != 0x03)
        throw ConfigError(path + ": bad IDX magic at byte offset 0 (expected 00 00 08 03)");
    if (bytes.size() < 16)
        throw ConfigError(path + ": truncated IDX dimensions at byte offset " + std::to_string(bytes.size()));
    const std::uint32_t n = read_be32(bytes, 4);
    const std::uint32_t h = read_be32(bytes, 8);
    const std::uint32_t w = read_be32(bytes, 12);
    if (n == 0 || h == 0 || w == 0) throw ConfigError(path + ": zero-sized IDX dimension");
    const std::size_t expected = 16 + static_cast<std::size_t>(n) * h * w;
    if (bytes.size() != expected)
        throw ConfigError(path + ": IDX payload ends at byte offset " + std::to_string(bytes.size()) +
                          ", expected " + std::to_string(expected));
    Tensor out({static_cast<int>(n), 1, static_cast<int>(h), static_cast<int>(w)});
    for (std::int64_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<double>(bytes[16 + static_cast<std::size_t>(i)]) / 255.0;
    return out;
}

}  // namespace

PairedDataset load_idx(const std::string& images_path) {
    PairedDataset ds;
    ds.inputs = load_idx_images(images_path);
    ds.targets = ds.inputs;
    ds.check_invariants(true);
    return ds;
}

PairedDataset load_idx(const std::string& images_path, const std::string& targets_path) {
    PairedDataset ds;
    ds.inputs = load_idx_images(images_path);
    ds.targets = load_idx_images(targets_path);
    ds.check_invariants(true);
    return ds;
}

void save_idx(const std::string& path, const Tensor& images) {
    if (images.rank() != 4 || images.dim(1) != 1)
        throw std::invalid_argument("save_idx: expected (N,1,H,W) grayscale images, got " + images.shape_str());
    std::vector<std::uint8_t> bytes;
    bytes.reserve(16 + static_cast<std::size_t>(images.size()));
    const std::uint32_t dims[3] = {static_cast<std::uint32_t>(images.dim(0)),
                                   static_cast<std::uint32_t>(images.dim(2)),
                                   static_cast<std::uint32_t>(images.dim(3))};
    bytes.insert(bytes.end(), {0x00, 0x00, 0x08, 0x03});
    for (std::uint32_t d : dims)
        bytes.insert(bytes.end(), {static_cast<std::uint8_t>(d >> 24), static_cast<std::uint8_t>(d >> 16),
                                   static_cast<std::uint8_t>(d >> 8), static_cast<std::uint8_t>(d)});
    for (std::int64_t i = 0; i < images.size(); ++i) {
        const double v = std::clamp(images[i], 0.0, 1.0);
        bytes.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot open file for writing: " + tmp);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw ConfigError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

// --- synthetic pose data ------------------------------------------------------

namespace {

struct Blob {
    double cx, cy;
    std::vector<double> vx, vy;  // polygon vertices
    double r_max;
};

Blob draw_blob(int image_size, SeededRng& rng) {
    const double s = static_cast<double>(image_size);
    Blob b;
    const int verts = 5 + static_cast<int>(rng.uniform_int(4));  // 5..8
    b.cx = s / 2.0 + rng.uniform(-0.08, 0.08) * s;
    b.cy = s / 2.0 + rng.uniform(-0.08, 0.08) * s;
    b.vx.resize(static_cast<std::size_t>(verts));
    b.vy.resize(static_cast<std::size_t>(verts));
    b.r_max = 0.0;
    for (int i = 0; i < verts; ++i) {
        const double jitter = rng.uniform(-0.3, 0.3);
        const double radius = rng.uniform(0.18, 0.34) * s;
        const double angle = 2.0 * M_PI * (static_cast<double>(i) + jitter) / static_cast<double>(verts);
        b.vx[static_cast<std::size_t>(i)] = b.cx + radius * std::cos(angle);
        b.vy[static_cast<std::size_t>(i)] = b.cy + radius * std::sin(angle);
        b.r_max = std::max(b.r_max, radius);
    }
    return b;
}

bool point_in_polygon(const Blob& b, double x, double y) {
    bool inside = false;
    const std::size_t n = b.vx.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double xi = b.vx[i], yi = b.vy[i], xj = b.vx[j], yj = b.vy[j];
        if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) inside = !inside;
    }
    return inside;
}

// 2x2 supersampled fill with a radial shading ramp inside the polygon.
void render_canonical(const Blob& b, int image_size, double* out) {
    for (int py = 0; py < image_size; ++py) {
        for (int px = 0; px < image_size; ++px) {
            double acc = 0.0;
            for (int sy = 0; sy < 2; ++sy) {
                for (int sx = 0; sx < 2; ++sx) {
                    const double x = px + 0.25 + 0.5 * sx;
                    const double y = py + 0.25 + 0.5 * sy;
                    if (point_in_polygon(b, x, y)) {
                        const double d = std::hypot(x - b.cx, y - b.cy);
                        acc += 1.0 - 0.5 * std::min(d / b.r_max, 1.0);
                    }
                }
            }
            out[py * image_size + px] = acc / 4.0;
        }
    }
}

double bilinear_sample(const double* img, int size, double x, double y) {
    // pixel (i,j) value sits at coordinate (j+0.5, i+0.5)
    const double u = x - 0.5, v = y - 0.5;
    const int x0 = static_cast<int>(std::floor(u));
    const int y0 = static_cast<int>(std::floor(v));
    const double fx = u - x0, fy = v - y0;
    double acc = 0.0;
    for (int dy = 0; dy < 2; ++dy) {
        const int yy = y0 + dy;
        if (yy < 0 || yy >= size) continue;
        const double wy = dy ? fy : 1.0 - fy;
        for (int dx = 0; dx < 2; ++dx) {
            const int xx = x0 + dx;
            if (xx < 0 || xx >= size) continue;
            const double wx = dx ? fx : 1.0 - fx;
            acc += wx * wy * img[yy * size + xx];
        }
    }
    return acc;
}

void render_rotated(const double* canonical, int size, double angle_deg, double* out) {
    const double a = angle_deg * M_PI / 180.0;
    const double c = std::cos(a), s = std::sin(a);
    const double ctr = static_cast<double>(size) / 2.0;
    for (int py = 0; py < size; ++py) {
        for (int px = 0; px < size; ++px) {
            const double x = px + 0.5 - ctr;
            const double y = py + 0.5 - ctr;
            // inverse rotation of the output grid into canonical coordinates
            const double qx = c * x + s * y + ctr;
            const double qy = -s * x + c * y + ctr;
            out[py * size + px] = bilinear_sample(canonical, size, qx, qy);
        }
    }
}

}  // namespace

PairedDataset synth_pose_dataset(int n, int image_size, double max_angle_deg, SeededRng& rng) {
    if (n < 1) throw std::invalid_argument("synth_pose_dataset: n must be >= 1");
    if (image_size < 8) throw std::invalid_argument("synth_pose_dataset: image_size must be >= 8");
    if (max_angle_deg < 0.0 || !std::isfinite(max_angle_deg))
        throw std::invalid_argument("synth_pose_dataset: max_angle_deg must be finite and >= 0");

    PairedDataset ds;
    ds.inputs = Tensor({n, 1, image_size, image_size});
    ds.targets = Tensor({n, 1, image_size, image_size});
    const std::int64_t px_per_sample = static_cast<std::int64_t>(image_size) * image_size;
    for (int i = 0; i < n; ++i) {
        const Blob b = draw_blob(image_size, rng);
        const double rot_fraction = rng.uniform(-1.0, 1.0);  // drawn after the blob, scaled below
        double* target = ds.targets.data() + static_cast<std::int64_t>(i) * px_per_sample;
        double* input = ds.inputs.data() + static_cast<std::int64_t>(i) * px_per_sample;
        render_canonical(b, image_size, target);
        if (max_angle_deg == 0.0) {
            std::memcpy(input, target, sizeof(double) * static_cast<std::size_t>(px_per_sample));
        } else {
            render_rotated(target, image_size, rot_fraction * max_angle_deg, input);
        }
    }
    ds.check_invariants(true);
    return ds;
}

// --- splitting ----------------------------------------------------------------

std::pair<PairedDataset, PairedDataset> split_dataset(const PairedDataset& ds, double val_fraction,
                                                      SeededRng& rng) {
    ds.check_invariants(false);
    if (!(val_fraction > 0.0 && val_fraction < 1.0))
        throw std::invalid_argument("split_dataset: val_fraction must lie in (0, 1)");
    const int n = ds.count();
    const int n_val = static_cast<int>(std::llround(static_cast<double>(n) * val_fraction));
    if (n_val < 1 || n_val >= n)
        throw std::invalid_argument("split_dataset: fraction " + std::to_string(val_fraction) +
                                    " leaves an empty split for " + std::to_string(n) + " samples");
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    const std::vector<int> val_idx(idx.begin(), idx.begin() + n_val);
    const std::vector<int> train_idx(idx.begin() + n_val, idx.end());

    PairedDataset train{gather_batch(ds.inputs, train_idx), gather_batch(ds.targets, train_idx),
                        PairedDataset::Split::train};
    PairedDataset val{gather_batch(ds.inputs, val_idx), gather_batch(ds.targets, val_idx),
                      PairedDataset::Split::validation};
    return {std::move(train), std::move(val)};
}

// --- manifest --------------------------------------------------------------------

namespace {

std::string resolve_relative(const std::string& base_file, const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base_file).parent_path() / p).string();
}

Tensor load_raw_doubles(const std::string& path, int n, int c, int h, int w) {
    const std::vector<std::uint8_t> bytes = read_binary_file(path);
    const std::size_t expected = sizeof(double) * static_cast<std::size_t>(n) * c * h * w;
    if (bytes.size() != expected)
        throw ConfigError(path + ": raw payload is " + std::to_string(bytes.size()) + " bytes, expected " +
                          std::to_string(expected));
    Tensor out({n, c, h, w});
    std::memcpy(out.data(), bytes.data(), expected);
    return out;
}

}  // namespace

DatasetManifest DatasetManifest::from_file(const std::string& path) {
    const auto pairs = detail::parse_kv_text(detail::read_text_file(path), path);
    DatasetManifest m;
    bool have_kind = false;
    for (const auto& [key, value] : pairs) {
        if (key == "kind") {
            if (value == "idx") m.kind = Kind::idx;
            else if (value == "synthetic") m.kind = Kind::synthetic;
            else if (value == "raw") m.kind = Kind::raw_binary;
            else throw ConfigError(path + ": unknown dataset kind '" + value + "'");
            have_kind = true;
        } else if (key == "images" || key == "inputs") {
            m.images_path = resolve_relative(path, value);
        } else if (key == "targets") {
            m.targets_path = value == "self" ? "" : resolve_relative(path, value);
        } else if (key == "normalization") {
            if (value != "u8/255" && value != "none")
                throw ConfigError(path + ": unsupported normalization '" + value + "'");
        } else if (key == "n") {
            m.n = static_cast<int>(detail::parse_int(value, key));
        } else if (key == "c") {
            m.c = static_cast<int>(detail::parse_int(value, key));
        } else if (key == "h") {
            m.h = static_cast<int>(detail::parse_int(value, key));
        } else if (key == "w") {
            m.w = static_cast<int>(detail::parse_int(value, key));
        } else if (key == "image_size") {
            m.image_size = static_cast<int>(detail::parse_int(value, key));
        } else if (key == "max_angle_deg") {
            m.max_angle_deg = detail::parse_double(value, key);
        } else if (key == "seed") {
            m.seed = detail::parse_uint(value, key);
        } else {
            throw ConfigError(path + ": unknown manifest key '" + key + "'");
        }
    }
    if (!have_kind) throw ConfigError(path + ": missing required key 'kind'");
    switch (m.kind) {
        case Kind::idx:
            if (m.images_path.empty()) throw ConfigError(path + ": idx manifest requires 'images'");
            break;
        case Kind::synthetic:
            if (m.n < 1 || m.image_size < 8)
                throw ConfigError(path + ": synthetic manifest requires n >= 1 and image_size >= 8");
            break;
        case Kind::raw_binary:
            if (m.images_path.empty() || m.targets_path.empty() || m.n < 1 || m.c < 1 || m.h < 1 || m.w < 1)
                throw ConfigError(path + ": raw manifest requires inputs, targets and positive n/c/h/w");
            break;
    }
    return m;
}

void DatasetManifest::to_file(const std::string& path) const {
    std::string text;
    switch (kind) {
        case Kind::idx:
            text += "kind=idx\n";
            text += "images=" + images_path + "\n";
            text += "targets=" + (targets_path.empty() ? std::string("self") : targets_path) + "\n";
            text += "normalization=u8/255\n";
            break;
        case Kind::synthetic:
            text += "kind=synthetic\n";
            text += "n=" + std::to_string(n) + "\n";
            text += "image_size=" + std::to_string(image_size) + "\n";
            {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%.17g", max_angle_deg);
                text += "max_angle_deg=" + std::string(buf) + "\n";
            }
            text += "seed=" + std::to_string(seed) + "\n";
            break;
        case Kind::raw_binary:
            text += "kind=raw\n";
            text += "inputs=" + images_path + "\n";
            text += "targets=" + targets_path + "\n";
            text += "n=" + std::to_string(n) + "\n";
            text += "c=" + std::to_string(c) + "\n";
            text += "h=" + std::to_string(h) + "\n";
            text += "w=" + std::to_string(w) + "\n";
            text += "normalization=none\n";
            break;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot open file for writing: " + tmp);
        out << text;
        if (!out) throw ConfigError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

PairedDataset DatasetManifest::realize() const {
    switch (kind) {
        case Kind::idx:
            return targets_path.empty() ? load_idx(images_path) : load_idx(images_path, targets_path);
        case Kind::synthetic: {
            SeededRng rng(seed);
            const int size = image_size ? image_size : n;  // image_size is required; n checked at parse
            return synth_pose_dataset(n, size, max_angle_deg, rng);
        }
        case Kind::raw_binary: {
            PairedDataset ds;
            ds.inputs = load_raw_doubles(images_path, n, c, h, w);
            ds.targets = load_raw_doubles(targets_path, n, c, h, w);
            ds.check_invariants(true);
            return ds;
        }
    }
    throw std::logic_error("DatasetManifest::realize: unknown kind");
}

}  // namespace gasca
