// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "speccurve/dng.hpp"
#include "speccurve/prior.hpp"

namespace speccurve
{

/// Knobs of the Gaussian-bump camera family used for desk-scale testing.
struct SyntheticOptions
{
    std::size_t  cameras    = 20;
    std::size_t  duplicates = 0; ///< cameras that get a second, perturbed entry
    std::uint64_t seed      = 1;
    SpectralGrid grid;
};

/// One camera response: per channel a main Gaussian lobe plus a shoulder.
/// Peaks sit near 460 / 535 / 600 nm with seeded jitter in position, width
/// and gain. Returned max-normalized.
Matrix synthetic_sensitivity( const SpectralGrid &grid, Rng &rng );

/// A database whose camera ids are "<brand> cam<NN>", brands cycling through
/// alpha, beta, gamma, delta.
SensitivityDatabase synthetic_database( const SyntheticOptions &opts );

/// Exact A and D65 colour matrices for every distinct camera in the database
/// (taken from the first entry of each group).
std::vector<CameraRecord> synthetic_records( const SensitivityDatabase &db,
                                             const ObserverMatrix      &observer,
                                             const CalibrationLights   &lights );

} // namespace speccurve
