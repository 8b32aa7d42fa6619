#pragma once

#include <map>
#include <mutex>

#include "wgkit/mode_solver.hpp"

// Coarser grids keep the unit suites quick; the acceptance binary runs the
// production resolution.
inline wgkit::ModeSetup coarse_setup(double res = 20e-9) {
    wgkit::ModeSetup s;
    s.resolution = {res, res};
    return s;
}

// Default guide solved once per wavelength per process.
inline const std::vector<wgkit::GuidedMode>& default_modes(double lambda, int count = 2) {
    static std::map<std::pair<double, int>, std::vector<wgkit::GuidedMode>> cache;
    static std::mutex mu;
    std::lock_guard lock(mu);
    auto key = std::pair{lambda, count};
    auto it = cache.find(key);
    if (it == cache.end()) {
        const auto s = coarse_setup();
        it = cache.emplace(key, wgkit::solve_modes(s.grid(wgkit::WaveguideGeometry{}, lambda), count)).first;
    }
    return it->second;
}
