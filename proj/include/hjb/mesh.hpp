// Spatial meshes and the time grid shared by all solvers.
#pragma once

#include <span>
#include <utility>
#include <vector>

namespace hjb {

// Uniform 1-D mesh. Immutable after construction; the solvers read it
// concurrently. Node 0 is lo, the last node is hi, spacing is constant.
class Mesh1D {
public:
    Mesh1D() = default;  // empty placeholder; assign from uniform() before use
    static Mesh1D uniform(double lo, double hi, int count);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int size() const { return static_cast<int>(nodes_.size()); }
    double spacing() const { return spacing_; }
    double operator[](int i) const { return nodes_[static_cast<size_t>(i)]; }
    std::span<const double> nodes() const { return nodes_; }

    friend bool operator==(const Mesh1D& a, const Mesh1D& b) {
        return a.nodes_ == b.nodes_;
    }

private:
    std::vector<double> nodes_;
    double lo_ = 0.0;
    double hi_ = 0.0;
    double spacing_ = 0.0;
};

Mesh1D build_uniform_mesh(double lo, double hi, int count);

// Adjacent node indices (i, j) with nodes[i] <= x <= nodes[j]; at a node the
// index is returned twice. x outside [lo, hi] is an error; callers clamp.
std::pair<int, int> locate_bracket(const Mesh1D& mesh, double x);

struct TimeGrid {
    double horizon = 0.0;   // T, in years
    long steps = 0;         // N

    double dt() const { return horizon / static_cast<double>(steps); }
};

} // namespace hjb
