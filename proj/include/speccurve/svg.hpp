// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "speccurve/apps.hpp"
#include "speccurve/colorsystem.hpp"

namespace speccurve
{

struct LabeledCurve
{
    std::string       label;
    SensitivityMatrix curve;
};

/// Sensitivity plot, wavelength 400–700 nm against 0–1. Every second curve is
/// dashed. Same input, same bytes.
std::string plot_svg( const std::vector<LabeledCurve> &curves );
void        plot_svg( const std::vector<LabeledCurve> &curves, const std::filesystem::path &path );

/// Daylight locus in rb chromaticity with an optional point overlay.
std::string locus_svg( const std::vector<LocusPoint> &locus,
                       const std::vector<RbChromaticity> &points = {} );

} // namespace speccurve
