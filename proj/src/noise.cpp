#include "shelab/noise.hpp"

#include <cmath>

namespace shelab {

void GridSpec::validate(double r_max) const {
    if (L <= 0 || t_end <= 0 || n_x <= 0 || n_t <= 0)
        throw std::domain_error("GridSpec: nonpositive dimension");
    if (n_x % 2 != 0) throw std::domain_error("GridSpec: n_x must be even");
    if (dt() > dx() * dx() / 2.0 * (1.0 + 1e-12))
        throw std::domain_error("GridSpec: dt exceeds dx^2/2 stability bound");
    if (L < r_max + 6.0 * std::sqrt(t_end))
        throw std::domain_error("GridSpec: L below R_max + 6*sqrt(t_end)");
}

GridSpec GridSpec::make(double r_max, double t_end, double dx_target) {
    if (r_max <= 0 || t_end <= 0 || dx_target <= 0)
        throw std::domain_error("GridSpec::make: nonpositive argument");
    const double l_raw = r_max + 6.0 * std::sqrt(t_end);
    GridSpec g;
    g.n_x = 2 * static_cast<int>(std::ceil(l_raw / dx_target));
    g.L = g.n_x * dx_target / 2.0;
    g.t_end = t_end;
    const double steps = 2.0 * t_end / (dx_target * dx_target);
    g.n_t = 64 * static_cast<int>(std::ceil(steps / 64.0));
    g.validate(r_max);
    return g;
}

void NoiseStream::fill(std::uint64_t start, double* out, std::size_t count) const {
    if (count == 0) return;
    const auto lane = static_cast<std::uint32_t>(key_.lane);
    std::uint64_t i = start;
    std::size_t k = 0;
    double pair[2];
    if (i & 1) {
        normal_pair(i >> 1, lane, key_.replica, key_.master_seed, pair);
        out[k++] = pair[1];
        ++i;
    }
    while (k + 2 <= count) {
        normal_pair(i >> 1, lane, key_.replica, key_.master_seed, pair);
        out[k] = pair[0];
        out[k + 1] = pair[1];
        i += 2;
        k += 2;
    }
    if (k < count) {
        normal_pair(i >> 1, lane, key_.replica, key_.master_seed, pair);
        out[k] = pair[0];
    }
}

NoiseTape::NoiseTape(GridSpec grid, StreamKey key, Mode mode)
    : grid_(grid), key_(key), mode_(mode), stream_(key) {
    if (mode_ == Mode::in_memory) {
        data_.resize(grid_.n_t, grid_.n_x);
        for (int n = 0; n < grid_.n_t; ++n)
            stream_.fill(static_cast<std::uint64_t>(n) * grid_.n_x, data_.row(n).data(),
                         grid_.n_x);
    }
}

const double* NoiseTape::row(int n, Eigen::ArrayXd& scratch) const {
    if (mode_ == Mode::in_memory) return data_.row(n).data();
    if (scratch.size() != grid_.n_x) scratch.resize(grid_.n_x);
    stream_.fill(static_cast<std::uint64_t>(n) * grid_.n_x, scratch.data(), grid_.n_x);
    return scratch.data();
}

NoiseTape sample_tape(const GridSpec& grid, StreamKey key, std::size_t memory_budget_bytes) {
    const std::size_t bytes =
        static_cast<std::size_t>(grid.n_t) * static_cast<std::size_t>(grid.n_x) * sizeof(double);
    const auto mode =
        bytes <= memory_budget_bytes ? NoiseTape::Mode::in_memory : NoiseTape::Mode::regenerable;
    return NoiseTape(grid, key, mode);
}

}  // namespace shelab
