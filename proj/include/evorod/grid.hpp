#pragma once

#include <cstddef>
#include <span>

#include "evorod/errors.hpp"

namespace evorod {

// Uniform grid over [0, length] with composite-trapezoid quadrature weights.
class RodGrid {
public:
    RodGrid(double length, std::size_t node_count) : length_(length), nodes_(node_count) {
        if (!(length > 0.0)) throw InvalidParameterError("RodGrid: length must be positive");
        if (node_count < 2) throw InsufficientGridError("RodGrid: need at least 2 nodes");
    }

    double length() const { return length_; }
    std::size_t node_count() const { return nodes_; }
    double spacing() const { return length_ / static_cast<double>(nodes_ - 1); }
    double position(std::size_t i) const { return spacing() * static_cast<double>(i); }

    double weight(std::size_t i) const {
        const double h = spacing();
        return (i == 0 || i == nodes_ - 1) ? 0.5 * h : h;
    }

    // Composite trapezoid of nodal samples.
    double integrate(std::span<const double> samples) const {
        if (samples.size() != nodes_) throw InvalidParameterError("RodGrid::integrate: size mismatch");
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes_; ++i) acc += weight(i) * samples[i];
        return acc;
    }

private:
    double length_;
    std::size_t nodes_;
};

}  // namespace evorod
