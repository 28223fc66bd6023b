#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace opinion {

//---------------------------------------------------------------------------//
/*!
 * Piecewise-constant density on equal-width bins over [-1, 1].
 */
struct DensityTable
{
    std::vector<double> density;

    std::size_t bins() const noexcept { return density.size(); }
    double bin_width() const noexcept { return 2.0 / static_cast<double>(density.size()); }
    double bin_center(std::size_t i) const noexcept
    {
        return -1.0 + (static_cast<double>(i) + 0.5) * bin_width();
    }
    double mass() const noexcept;
};

// Histogram of values in [-1, 1] normalized to integrate to `mass`.
// Values equal to 1 go into the last bin. Throws for bins < 2.
DensityTable histogram(std::span<double const> values, std::size_t bins, double mass);

}  // namespace opinion
