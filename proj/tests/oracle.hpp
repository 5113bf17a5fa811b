#ifndef P3T_TESTS_ORACLE_HPP
#define P3T_TESTS_ORACLE_HPP

// Test-only oracles, kept independent of the library's fast paths.
//
// The sparse-grid oracle enumerates the three defining point classes
// directly: per-point divisibility for the full rows/columns, and explicit
// diagonal runs generated from anchors whose coordinates are multiples of
// 2^q inside the lattice section.

#include <cstdint>
#include <vector>

#include "p3t/sparsegrid.hpp"

namespace p3t_tests {

class SparseGridOracle {
  public:
    explicit SparseGridOracle(const p3t::GridParams& g) : side_(g.side) {
        const std::int64_t sp = g.spacing();
        bits_.assign(static_cast<std::size_t>((side_ + 1) * (side_ + 1)), false);
        for (std::int64_t x = 0; x <= side_; ++x)
            for (std::int64_t y = 0; y <= side_; ++y)
                if (((x * y) % sp) == 0) set(x, y);
        for (std::int64_t i = 0; i <= side_; i += sp)
            for (std::int64_t j = 0; j <= side_; j += sp)
                for (std::int64_t k = 1; k <= sp; ++k) {
                    set(i + k, j + k); // forward diagonal
                    set(i + k, j - k); // backward diagonal
                }
    }

    bool contains(std::int64_t x, std::int64_t y) const {
        if (x < 0 || x > side_ || y < 0 || y > side_) return false;
        return bits_[static_cast<std::size_t>(y * (side_ + 1) + x)];
    }

    std::int64_t count() const {
        std::int64_t c = 0;
        for (bool b : bits_) c += b;
        return c;
    }

  private:
    void set(std::int64_t x, std::int64_t y) {
        if (x >= 0 && x <= side_ && y >= 0 && y <= side_)
            bits_[static_cast<std::size_t>(y * (side_ + 1) + x)] = true;
    }

    std::int64_t side_;
    std::vector<bool> bits_;
};

}  // namespace p3t_tests

#endif
