#ifndef PRONYKIT_FOURIER_QUADRATURE_HPP
#define PRONYKIT_FOURIER_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "pronykit/fourier.hpp"

namespace testsupport
{

/// (1/2pi) int_{-pi}^{pi} g(x) e^{-ikx} dx by composite 8-point
/// Gauss-Legendre, with panel edges at the given breakpoints so that
/// jumps never fall inside a panel.
template <class G>
std::complex<double> fourier_quadrature(G&& g, int k, std::vector<double> breaks, int panels = 1024)
{
    static const double nodes[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                    0.9602898564975363};
    static const double weights[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                      0.1012285362903763};
    breaks.push_back(-M_PI);
    breaks.push_back(M_PI);
    std::sort(breaks.begin(), breaks.end());
    std::complex<double> total = 0.0;
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b)
    {
        const double lo = breaks[b], hi = breaks[b + 1];
        if (hi - lo <= 0.0)
            continue;
        const int np = std::max(1, static_cast<int>(panels * (hi - lo) / (2.0 * M_PI)) + 1);
        const double w = (hi - lo) / np;
        for (int p = 0; p < np; ++p)
        {
            const double c = lo + (p + 0.5) * w;
            for (int i = 0; i < 4; ++i)
                for (double s : {-1.0, 1.0})
                {
                    const double x = c + s * nodes[i] * w / 2.0;
                    total += weights[i] * w / 2.0 * g(x) * std::polar(1.0, -k * x);
                }
        }
    }
    return total / (2.0 * M_PI);
}

inline std::vector<double> jump_breaks(const pronykit::PiecewiseModel& m)
{
    return m.jumps;
}

} // namespace testsupport

#endif
