#include "opinion/histogram.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace opinion {

double DensityTable::mass() const noexcept
{
    return std::accumulate(density.begin(), density.end(), 0.0) * bin_width();
}

DensityTable histogram(std::span<double const> values, std::size_t bins, double mass)
{
    if (bins < 2)
        throw std::invalid_argument("histogram: need at least 2 bins");

    std::vector<std::size_t> counts(bins, 0);
    double const scale = static_cast<double>(bins) / 2.0;
    for (double w : values)
    {
        auto idx = static_cast<std::ptrdiff_t>((w + 1.0) * scale);
        idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(bins) - 1);
        ++counts[static_cast<std::size_t>(idx)];
    }

    DensityTable out;
    out.density.resize(bins, 0.0);
    if (values.empty())
        return out;
    double const norm = mass / (static_cast<double>(values.size()) * out.bin_width());
    for (std::size_t i = 0; i < bins; ++i)
        out.density[i] = static_cast<double>(counts[i]) * norm;
    return out;
}

}  // namespace opinion
