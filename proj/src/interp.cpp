#include "hjb/interp.hpp"

#include <algorithm>
#include <stdexcept>

namespace hjb {

namespace {

void check_lengths(const Mesh1D& src, std::span<const double> values) {
    if (static_cast<int>(values.size()) != src.size())
        throw std::invalid_argument("interp: one value per source node required");
}

double secant(std::span<const double> v, int i, double h) {
    return (v[static_cast<size_t>(i) + 1] - v[static_cast<size_t>(i)]) / h;
}

double node_derivative(std::span<const double> v, int k, int last, double h) {
    if (k == 0) return secant(v, 0, h);
    if (k == last) return secant(v, last - 1, h);
    const double s0 = secant(v, k - 1, h);
    const double s1 = secant(v, k, h);
    if (s0 * s1 <= 0.0) return 0.0;
    return 2.0 * s0 * s1 / (s0 + s1);  // harmonic mean, |d| <= 2 min(|s0|,|s1|)
}

} // namespace

double interp_linear(const Mesh1D& src, std::span<const double> values, double x) {
    check_lengths(src, values);
    const auto [i, j] = locate_bracket(src, x);
    if (i == j) return values[static_cast<size_t>(i)];
    const double t = (x - src[i]) / src.spacing();
    return (1.0 - t) * values[static_cast<size_t>(i)] + t * values[static_cast<size_t>(j)];
}

double interp_limited_cubic(const Mesh1D& src, std::span<const double> values, double x) {
    check_lengths(src, values);
    const auto [i, j] = locate_bracket(src, x);
    const double v0 = values[static_cast<size_t>(i)];
    if (i == j) return v0;
    const double v1 = values[static_cast<size_t>(j)];
    const double h = src.spacing();
    const int last = src.size() - 1;
    const double d0 = node_derivative(values, i, last, h);
    const double d1 = node_derivative(values, j, last, h);
    const double t = (x - src[i]) / h;
    const double omt = 1.0 - t;
    const double h00 = (1.0 + 2.0 * t) * omt * omt;
    const double h10 = t * omt * omt;
    const double h01 = t * t * (3.0 - 2.0 * t);
    const double h11 = t * t * (t - 1.0);
    const double value = v0 * h00 + h * d0 * h10 + v1 * h01 + h * d1 * h11;
    // Limiting step: stay within the bracketing nodal values.
    return std::clamp(value, std::min(v0, v1), std::max(v0, v1));
}

double interp_value(const Mesh1D& src, std::span<const double> values, double x,
                    InterpVariant variant) {
    return variant == InterpVariant::linear ? interp_linear(src, values, x)
                                            : interp_limited_cubic(src, values, x);
}

namespace {

void transfer_direct(const Mesh1D& src, std::span<const double> values,
                     const Mesh1D& dst, InterpVariant variant,
                     std::vector<double>& out) {
    out.resize(static_cast<size_t>(dst.size()));
    for (int i = 0; i < dst.size(); ++i) {
        const double x = std::clamp(dst[i], src.lo(), src.hi());
        out[static_cast<size_t>(i)] = interp_value(src, values, x, variant);
    }
}

} // namespace

void transfer_into(const Mesh1D& src, std::span<const double> values,
                   const Mesh1D& dst, const InterpKind& kind,
                   std::vector<double>& out) {
    check_lengths(src, values);
    if (kind.routing == InterpRouting::via_reference) {
        if (!kind.reference)
            throw std::invalid_argument("transfer: via_reference routing needs a reference mesh");
        std::vector<double> staged;
        transfer_direct(src, values, *kind.reference, kind.variant, staged);
        transfer_direct(*kind.reference, staged, dst, kind.variant, out);
        return;
    }
    transfer_direct(src, values, dst, kind.variant, out);
}

std::vector<double> transfer(const Mesh1D& src, std::span<const double> values,
                             const Mesh1D& dst, const InterpKind& kind) {
    std::vector<double> out;
    transfer_into(src, values, dst, kind, out);
    return out;
}

} // namespace hjb
