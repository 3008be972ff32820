#ifndef INEQLAB_SAMPLER_HPP
#define INEQLAB_SAMPLER_HPP

// Random strictly positive test fields u = exp(sum_k a_k phi_k) built from
// the first K cosine modes compatible with the zero-flux boundary: each mode
// is even across every boundary, so the mirrored-ghost operators see it as
// exactly Neumann-admissible, and the exponential keeps u positive.

#include <cmath>
#include <vector>

#include "grid.hpp"
#include "rng.hpp"

namespace ineqlab {

inline constexpr int sampler_default_modes = 8;
inline constexpr double sampler_default_amplitude = 0.7;

// Log-field of the sample (the optimizer works on this directly).
inline Field sample_log_field(const Grid& g, SplitMix64& rng,
                              int modes = sampler_default_modes,
                              double amplitude = sampler_default_amplitude) {
    Field v = make_field(g);
    const double pi = 3.14159265358979323846;
    if (g.dim == 1) {
        for (int k = 1; k <= modes; ++k) {
            const double a = rng.uniform(-amplitude, amplitude);
            const double freq = k * pi / g.extent[0];
            for (int i = 0; i < g.points[0]; ++i)
                v.values[i] += a * std::cos(freq * g.coord(i, 0));
        }
        return v;
    }
    // First `modes` tensor modes ordered by |k|^2, ties lexicographic.
    static const int mode_table[][2] = {{1, 0}, {0, 1}, {1, 1}, {2, 0},
                                        {0, 2}, {2, 1}, {1, 2}, {2, 2},
                                        {3, 0}, {0, 3}, {3, 1}, {1, 3}};
    const int available = static_cast<int>(sizeof(mode_table) / sizeof(mode_table[0]));
    const int m = modes < available ? modes : available;
    for (int k = 0; k < m; ++k) {
        const double a = rng.uniform(-amplitude, amplitude);
        const double fx = mode_table[k][0] * pi / g.extent[0];
        const double fy = mode_table[k][1] * pi / g.extent[1];
        for (int iy = 0; iy < g.points[1]; ++iy) {
            const double cy = std::cos(fy * g.coord(iy, 1));
            for (int ix = 0; ix < g.points[0]; ++ix)
                v.values[g.index(ix, iy)] += a * std::cos(fx * g.coord(ix, 0)) * cy;
        }
    }
    return v;
}

inline Field sample_positive_field(const Grid& g, SplitMix64& rng,
                                   int modes = sampler_default_modes,
                                   double amplitude = sampler_default_amplitude) {
    Field v = sample_log_field(g, rng, modes, amplitude);
    for (double& x : v.values) x = std::exp(x);
    return v;
}

} // namespace ineqlab

#endif
