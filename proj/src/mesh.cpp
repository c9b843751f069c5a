#include "hjb/mesh.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hjb {

Mesh1D Mesh1D::uniform(double lo, double hi, int count) {
    if (!(hi > lo))
        throw std::invalid_argument("Mesh1D: hi must exceed lo");
    if (count < 3)
        throw std::invalid_argument("Mesh1D: need at least 3 nodes, got " +
                                    std::to_string(count));
    Mesh1D m;
    m.lo_ = lo;
    m.hi_ = hi;
    m.spacing_ = (hi - lo) / static_cast<double>(count - 1);
    m.nodes_.resize(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i)
        m.nodes_[static_cast<size_t>(i)] = lo + static_cast<double>(i) * m.spacing_;
    m.nodes_.back() = hi;  // pin the endpoint against round-off
    return m;
}

Mesh1D build_uniform_mesh(double lo, double hi, int count) {
    return Mesh1D::uniform(lo, hi, count);
}

std::pair<int, int> locate_bracket(const Mesh1D& mesh, double x) {
    if (x < mesh.lo() || x > mesh.hi())
        throw std::domain_error("locate_bracket: x outside mesh domain");
    const int last = mesh.size() - 1;
    // Direct index arithmetic; all meshes are uniform.
    int i = static_cast<int>((x - mesh.lo()) / mesh.spacing());
    if (i < 0) i = 0;
    if (i > last - 1) i = last - 1;
    // Round-off guard: keep nodes[i] <= x <= nodes[i+1].
    while (i > 0 && mesh[i] > x) --i;
    while (i < last - 1 && mesh[i + 1] < x) ++i;
    if (x == mesh[i]) return {i, i};
    if (x == mesh[i + 1]) return {i + 1, i + 1};
    return {i, i + 1};
}

} // namespace hjb
