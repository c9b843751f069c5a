// Mesh-to-mesh transfer operators. Both variants keep every output between
// the two bracketing nodal values, so the transfer never increases the
// max norm and admits a positive-weight representation.
#pragma once

#include "hjb/mesh.hpp"

#include <optional>
#include <span>
#include <vector>

namespace hjb {

enum class InterpVariant { linear, limited_cubic_hermite };
enum class InterpRouting { direct, via_reference };

struct InterpKind {
    InterpVariant variant = InterpVariant::linear;
    InterpRouting routing = InterpRouting::direct;
    // Intermediate grid for via_reference routing. Source values outside any
    // mesh are taken from its nearest endpoint, so the reference mesh need
    // not cover the union of the per-policy domains.
    std::optional<Mesh1D> reference;
};

// Convex combination of the two bracketing nodal values; exact at nodes.
double interp_linear(const Mesh1D& src, std::span<const double> values, double x);

// Fritsch-Carlson monotone piecewise cubic Hermite, clamped to the bracketing
// nodal values. Node derivatives: zero where the adjacent secant slopes
// differ in sign or vanish, otherwise their harmonic mean; one-sided secants
// at the endpoints.
double interp_limited_cubic(const Mesh1D& src, std::span<const double> values, double x);

double interp_value(const Mesh1D& src, std::span<const double> values, double x,
                    InterpVariant variant);

// One value per destination node. Destination nodes outside the source domain
// take the nearest source endpoint value. via_reference routing composes
// src -> reference -> dst with the same variant.
void transfer_into(const Mesh1D& src, std::span<const double> values,
                   const Mesh1D& dst, const InterpKind& kind,
                   std::vector<double>& out);

std::vector<double> transfer(const Mesh1D& src, std::span<const double> values,
                             const Mesh1D& dst, const InterpKind& kind);

} // namespace hjb
