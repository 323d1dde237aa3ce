#pragma once

// Discretized space-time white noise: reproducible, splittable streams and a
// replayable per-replica noise tape.  The tape holds (or regenerates) the raw
// standard normal draws xi^n_j; the Walsh increment over one cell is
// xi^n_j * sqrt(dt*dx).

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "shelab/philox.hpp"

namespace shelab {

/// Space-time grid of the truncated domain [-L,L] x [0,t_end].
/// Invariants: dt <= dx^2/2 (explicit-scheme stability), n_x even so x=0 is a
/// node, and L >= R_max + 6*sqrt(t_end) for the largest R simulated.
struct GridSpec {
    double L = 0.0;
    int n_x = 0;
    double t_end = 0.0;
    int n_t = 0;

    double dx() const { return 2.0 * L / n_x; }
    double dt() const { return t_end / n_t; }
    double x(int j) const { return -L + j * dx(); }
    double time(int n) const { return n * dt(); }
    int center() const { return n_x / 2; }

    void validate(double r_max) const;

    /// Derive a grid whose spacing is exactly dx_target and whose step count
    /// is the smallest multiple of 64 satisfying dt <= dx^2/2.
    static GridSpec make(double r_max, double t_end, double dx_target);
};

enum class Lane : std::uint32_t { solution = 1, derivative = 2, quadrature = 3 };

/// Identifies one logical random stream.  Distinct (replica, lane) pairs give
/// statistically independent streams; the same key always reproduces the same
/// sequence.
struct StreamKey {
    std::uint64_t master_seed = 0;
    std::uint32_t replica = 0;
    Lane lane = Lane::solution;
};

/// Counter-based stream view: normal(i) is a pure function of (key, i).
class NoiseStream {
  public:
    explicit NoiseStream(StreamKey key) : key_(key) {}

    double normal(std::uint64_t index) const {
        double pair[2];
        normal_pair(index >> 1, static_cast<std::uint32_t>(key_.lane), key_.replica,
                    key_.master_seed, pair);
        return pair[index & 1];
    }

    /// Fill out[0..count) with normals at indices start..start+count.
    void fill(std::uint64_t start, double* out, std::size_t count) const;

    StreamKey key() const { return key_; }

  private:
    StreamKey key_;
};

inline NoiseStream derive_stream(StreamKey key) { return NoiseStream(key); }

/// Realized white-noise draws of one replica on a grid.  In-memory mode keeps
/// the n_t x n_x array, regenerable mode recomputes rows on demand from the
/// key; both replay bit-identically.
class NoiseTape {
  public:
    enum class Mode { in_memory, regenerable };

    NoiseTape(GridSpec grid, StreamKey key, Mode mode);

    const GridSpec& grid() const { return grid_; }
    StreamKey key() const { return key_; }
    Mode mode() const { return mode_; }

    /// Raw standard normal draw for cell (n, j).
    double value(int n, int j) const {
        if (mode_ == Mode::in_memory) return data_(n, j);
        return stream_.normal(static_cast<std::uint64_t>(n) * grid_.n_x + j);
    }

    /// Row of draws for step n.  In regenerable mode fills `scratch` and
    /// returns its pointer; in-memory mode returns the stored row.
    const double* row(int n, Eigen::ArrayXd& scratch) const;

  private:
    using RowMajorArray = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    GridSpec grid_;
    StreamKey key_;
    Mode mode_;
    NoiseStream stream_;
    RowMajorArray data_;  // n_t rows x n_x cols, in-memory mode only
};

/// Default tape factory: keeps the draws in memory when the grid fits the
/// budget, otherwise returns a regenerable tape.
NoiseTape sample_tape(const GridSpec& grid, StreamKey key,
                      std::size_t memory_budget_bytes = std::size_t(1) << 28);

}  // namespace shelab
