// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#pragma once

#include <array>

#include "speccurve/numerics.hpp"

namespace speccurve
{

struct ErrorReport
{
    double                re_mean = 0.0;
    std::array<double, 3> re_per_channel{};
    std::array<double, 3> rmse_per_channel{};
};

/// Per channel RMSE divided by the reference channel maximum, and their mean.
ErrorReport relative_full_scale_error( const Matrix &estimate, const Matrix &reference );

using Rgb = std::array<double, 3>;

/// Angle between two RGB triplets, in radians.
double angular_rgb_error( const Rgb &actual, const Rgb &predicted );

struct RbChromaticity
{
    double r;
    double b;
};

/// r = R/(R+G+B), b = B/(R+G+B).
RbChromaticity chromaticity( const Rgb &rgb );

} // namespace speccurve
