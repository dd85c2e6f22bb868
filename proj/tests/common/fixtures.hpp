#pragma once

// Hand-built topologies and observations for the unit suites.

#include "camnet/model.hpp"

#include <string>
#include <utility>
#include <vector>

namespace camnet::testing {

// Every slice uniform over `bins`.
inline AppearanceHistogram flat_histogram(int bins = 4) {
    return AppearanceHistogram(bins, std::vector<double>(static_cast<std::size_t>(bins) * kSlices,
                                                         1.0 / bins));
}

// Every slice holds all of its mass in `bin`.
inline AppearanceHistogram spike_histogram(int bins, int bin) {
    std::vector<double> mass(static_cast<std::size_t>(bins) * kSlices, 0.0);
    for (int s = 0; s < kSlices; ++s) {
        mass[static_cast<std::size_t>(s * bins + bin)] = 1.0;
    }
    return AppearanceHistogram(bins, std::move(mass));
}

// The same slice repeated six times.
inline AppearanceHistogram repeated_slice(const std::vector<double>& slice) {
    std::vector<double> mass;
    for (int s = 0; s < kSlices; ++s) {
        mass.insert(mass.end(), slice.begin(), slice.end());
    }
    return AppearanceHistogram(static_cast<int>(slice.size()), std::move(mass));
}

inline Observation make_observation(ObservationId id, CameraId camera, double t_enter,
                                    double t_leave, AppearanceHistogram h = flat_histogram(),
                                    std::string enter = "N", std::string leave = "N") {
    Observation o;
    o.id = id;
    o.camera = camera;
    o.t_enter = t_enter;
    o.t_leave = t_leave;
    o.appearance = std::move(h);
    o.dir_enter = std::move(enter);
    o.dir_leave = std::move(leave);
    return o;
}

// Cameras 0..n-1 on a line with the same window in both directions.
inline CameraTopology line_topology(int cameras, TravelWindow window) {
    CameraTopology t;
    for (int c = 0; c < cameras; ++c) {
        t.add_camera(c);
    }
    for (int c = 0; c + 1 < cameras; ++c) {
        t.add_edge(c, c + 1);
        t.set_window(c, c + 1, window);
        t.set_window(c + 1, c, window);
    }
    return t;
}

}  // namespace camnet::testing
