#include "wofe3d/interpolate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "wofe3d/parallel.hpp"

namespace wofe3d {

std::int16_t CategoricalModel::dictionary_index(const std::string& code) const {
    for (std::size_t i = 0; i < dictionary.size(); ++i) {
        if (dictionary[i] == code) return static_cast<std::int16_t>(i);
    }
    return -1;
}

std::int16_t CategoricalModel::intern(const std::string& code) {
    const std::int16_t existing = dictionary_index(code);
    if (existing >= 0) return existing;
    dictionary.push_back(code);
    return static_cast<std::int16_t>(dictionary.size() - 1);
}

namespace {

void sort_samples(std::vector<PointSample>& samples) {
    std::stable_sort(samples.begin(), samples.end(), [](const PointSample& a, const PointSample& b) {
        if (a.x != b.x) return a.x < b.x;
        if (a.y != b.y) return a.y < b.y;
        return a.z < b.z;
    });
}

// Lowest-index sample located inside each voxel (for honouring control points).
std::vector<std::int32_t> samples_by_voxel(const std::vector<PointSample>& samples,
                                           const GridSpec& grid) {
    std::vector<std::int32_t> owner(grid.voxel_count(), -1);
    for (std::size_t s = 0; s < samples.size(); ++s) {
        int i, j, k;
        if (!grid.locate({samples[s].x, samples[s].y, samples[s].z}, i, j, k)) continue;
        auto& slot = owner[grid.linear_index(i, j, k)];
        if (slot < 0) slot = static_cast<std::int32_t>(s);
    }
    return owner;
}

// Static kd-tree over sample positions with deterministic (distance, index)
// tie-breaking.
class KdTree {
public:
    explicit KdTree(const std::vector<PointSample>& samples) : samples_(samples) {
        index_.resize(samples.size());
        for (std::size_t i = 0; i < index_.size(); ++i) index_[i] = static_cast<std::int32_t>(i);
        nodes_.reserve(samples.size());
        root_ = build(0, static_cast<std::int32_t>(index_.size()), 0);
    }

    std::int32_t nearest(const Vec3& query) const {
        Best best;
        search(root_, query, best);
        return best.index;
    }

private:
    struct Node {
        std::int32_t sample = -1;
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::uint8_t axis = 0;
    };
    struct Best {
        double d2 = std::numeric_limits<double>::infinity();
        std::int32_t index = -1;
    };

    static double coord(const PointSample& s, int axis) {
        return axis == 0 ? s.x : (axis == 1 ? s.y : s.z);
    }

    std::int32_t build(std::int32_t first, std::int32_t last, int depth) {
        if (first >= last) return -1;
        const int axis = depth % 3;
        const std::int32_t mid = first + (last - first) / 2;
        std::nth_element(index_.begin() + first, index_.begin() + mid, index_.begin() + last,
                         [&](std::int32_t a, std::int32_t b) {
                             const double ca = coord(samples_[a], axis);
                             const double cb = coord(samples_[b], axis);
                             if (ca != cb) return ca < cb;
                             return a < b;
                         });
        Node node;
        node.sample = index_[mid];
        node.axis = static_cast<std::uint8_t>(axis);
        const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(node);
        nodes_[self].left = build(first, mid, depth + 1);
        nodes_[self].right = build(mid + 1, last, depth + 1);
        return self;
    }

    void search(std::int32_t node_id, const Vec3& query, Best& best) const {
        if (node_id < 0) return;
        const Node& node = nodes_[node_id];
        const PointSample& s = samples_[node.sample];
        const double dx = query.x - s.x;
        const double dy = query.y - s.y;
        const double dz = query.z - s.z;
        const double d2 = dx * dx + dy * dy + dz * dz;
        if (d2 < best.d2 || (d2 == best.d2 && node.sample < best.index)) {
            best.d2 = d2;
            best.index = node.sample;
        }
        const double delta = (node.axis == 0 ? dx : (node.axis == 1 ? dy : dz));
        const std::int32_t near_side = delta < 0.0 ? node.left : node.right;
        const std::int32_t far_side = delta < 0.0 ? node.right : node.left;
        search(near_side, query, best);
        if (delta * delta <= best.d2) search(far_side, query, best);
    }

    const std::vector<PointSample>& samples_;
    std::vector<std::int32_t> index_;
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

}  // namespace

CategoricalModel nearest_value(std::vector<PointSample> samples, const VolumeMask& mask,
                               unsigned threads) {
    if (samples.empty()) throw std::invalid_argument("nearest_value: empty sample list");
    for (const auto& s : samples) {
        if (!s.categorical()) throw std::invalid_argument("nearest_value: sample without a code");
    }
    sort_samples(samples);

    CategoricalModel model;
    model.grid = mask.grid();
    model.mask = mask;
    model.codes.assign(mask.size(), -1);
    std::map<std::string, std::int16_t> dict;
    std::vector<std::int16_t> sample_code(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) {
        auto [it, inserted] = dict.emplace(samples[s].code, static_cast<std::int16_t>(model.dictionary.size()));
        if (inserted) model.dictionary.push_back(samples[s].code);
        sample_code[s] = it->second;
    }

    const auto owner = samples_by_voxel(samples, model.grid);
    const KdTree tree(samples);
    const GridSpec& grid = model.grid;
    parallel_for(mask.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            if (!mask.test(idx)) continue;
            if (owner[idx] >= 0) {
                model.codes[idx] = sample_code[owner[idx]];
                continue;
            }
            const std::int32_t s = tree.nearest(grid.centroid(idx));
            model.codes[idx] = sample_code[s];
        }
    });
    return model;
}

CategoricalModel constrain_surface(CategoricalModel model, const MapRaster& map_units) {
    if (map_units.nx != model.grid.nx || map_units.ny != model.grid.ny) {
        throw std::invalid_argument("constrain_surface: raster dimensions do not match the grid");
    }
    for (int j = 0; j < model.grid.ny; ++j) {
        for (int i = 0; i < model.grid.nx; ++i) {
            int top = -1;
            for (int k = model.grid.nz - 1; k >= 0; --k) {
                if (model.mask.test(i, j, k)) {
                    top = k;
                    break;
                }
            }
            if (top < 0) continue;
            const std::string& unit = map_units.at(i, j);
            if (unit.empty()) {
                throw std::runtime_error("constrain_surface: raster gap over active column (" +
                                         std::to_string(i) + "," + std::to_string(j) + ")");
            }
            model.codes[model.grid.linear_index(i, j, top)] = model.intern(unit);
        }
    }
    return model;
}

ContinuousModel idw_anisotropic(std::vector<PointSample> samples, const VolumeMask& mask,
                                const IdwParams& params) {
    if (samples.empty()) throw std::invalid_argument("idw_anisotropic: empty sample list");
    if (!(params.power > 0.0)) throw std::invalid_argument("idw_anisotropic: power must be positive");
    if (params.sectors < 1) throw std::invalid_argument("idw_anisotropic: sectors must be >= 1");
    if (!(params.z_anisotropy > 0.0)) {
        throw std::invalid_argument("idw_anisotropic: z_anisotropy must be positive");
    }
    for (const auto& s : samples) {
        if (s.categorical()) throw std::invalid_argument("idw_anisotropic: sample with a categorical code");
    }
    sort_samples(samples);

    ContinuousModel model;
    model.grid = mask.grid();
    model.mask = mask;
    model.values.assign(mask.size(), std::numeric_limits<double>::quiet_NaN());

    const GridSpec& grid = model.grid;
    const int sectors = params.sectors;
    const double sector_width = 2.0 * std::numbers::pi / sectors;
    const double inv_za = 1.0 / params.z_anisotropy;
    std::atomic<bool> empty_sectors{false};

    parallel_for(mask.size(), params.threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> best_d2(sectors);
        std::vector<std::int32_t> best_idx(sectors);
        for (std::size_t idx = begin; idx < end; ++idx) {
            if (!mask.test(idx)) continue;
            const Vec3 c = grid.centroid(idx);
            std::fill(best_d2.begin(), best_d2.end(), std::numeric_limits<double>::infinity());
            std::fill(best_idx.begin(), best_idx.end(), -1);
            std::int32_t coincident = -1;
            for (std::size_t s = 0; s < samples.size(); ++s) {
                const double dx = samples[s].x - c.x;
                const double dy = samples[s].y - c.y;
                const double dz = (samples[s].z - c.z) * inv_za;
                const double d2 = dx * dx + dy * dy + dz * dz;
                if (d2 == 0.0) {
                    coincident = static_cast<std::int32_t>(s);
                    break;
                }
                int sec;
                if (sectors == 4) {
                    if (dx > 0.0 && dy >= 0.0) sec = 0;
                    else if (dx <= 0.0 && dy > 0.0) sec = 1;
                    else if (dx < 0.0 && dy <= 0.0) sec = 2;
                    else if (dy < 0.0) sec = 3;
                    else sec = 0;  // dx == 0 && dy == 0, directly above/below
                } else {
                    double theta = std::atan2(dy, dx);
                    if (theta < 0.0) theta += 2.0 * std::numbers::pi;
                    sec = static_cast<int>(theta / sector_width);
                    if (sec >= sectors) sec = sectors - 1;
                }
                if (d2 < best_d2[sec]) {
                    best_d2[sec] = d2;
                    best_idx[sec] = static_cast<std::int32_t>(s);
                }
            }
            if (coincident >= 0) {
                model.values[idx] = samples[coincident].value;
                continue;
            }
            double wsum = 0.0, vsum = 0.0;
            for (int sec = 0; sec < sectors; ++sec) {
                if (best_idx[sec] < 0) continue;
                const double w = std::pow(std::sqrt(best_d2[sec]), -params.power);
                wsum += w;
                vsum += w * samples[best_idx[sec]].value;
            }
            if (wsum == 0.0) {
                empty_sectors.store(true, std::memory_order_relaxed);
                continue;
            }
            model.values[idx] = vsum / wsum;
        }
    });
    if (empty_sectors.load()) {
        throw std::runtime_error("idw_anisotropic: no neighbour found in any sector");
    }
    return model;
}

}  // namespace wofe3d
