#pragma once

#include <random>

#include "capnorm/grid.hpp"

namespace testing_support {

inline capnorm::CellSet random_set(const capnorm::DyadicGrid& g, std::mt19937_64& rng,
                                   double density = 0.5)
{
    std::bernoulli_distribution coin(density);
    capnorm::CellSet s(g);
    for (std::size_t i = 0; i < g.cell_count(); ++i)
        if (coin(rng)) s.insert(i);
    return s;
}

/// Step function with `levels` distinct heights drawn from (0, 4].
inline capnorm::GridFunction random_step(const capnorm::DyadicGrid& g, std::mt19937_64& rng,
                                         int levels = 4)
{
    std::uniform_real_distribution<double> height(0.05, 4.0);
    std::vector<double> hs(levels);
    for (auto& h : hs) h = height(rng);
    std::uniform_int_distribution<int> pick(-1, levels - 1);
    std::vector<double> v(g.cell_count(), 0.0);
    for (auto& x : v) {
        const int k = pick(rng);
        x = k < 0 ? 0.0 : hs[k];
    }
    return capnorm::GridFunction(g, std::move(v));
}

} // namespace testing_support
