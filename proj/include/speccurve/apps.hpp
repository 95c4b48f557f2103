// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#pragma once

#include <optional>
#include <vector>

#include "speccurve/colorsystem.hpp"
#include "speccurve/metrics.hpp"

namespace speccurve
{

/// ‖[∠(I_k, P_k)]_k‖₂ over the rows of observed and predicted responses.
double patch_angle_norm( const Matrix &observed, const Matrix &predicted );

struct CctResult
{
    double kelvin;
    double objective;
};

/// Daylight CCT that best explains observed chart responses: a 100 K grid
/// over [4000, 25000] followed by golden-section refinement to 1 K.
CctResult estimate_cct( const Matrix &sensitivity, const Matrix &reflectances,
                        const Matrix &observed, const DaylightComponents &daylight );

double cct_objective( double kelvin, const Matrix &sensitivity, const Matrix &reflectances,
                      const Matrix &observed, const DaylightComponents &daylight );

/// Linear interpolation from `coarse` equally spaced nodes spanning the grid
/// onto the grid; n × coarse.
Matrix interpolation_matrix( const SpectralGrid &grid, std::size_t coarse );

struct AttenuationProblem
{
    Matrix           sensitivity;  ///< n×3
    Matrix           reflectances; ///< m×n
    Matrix           observed;     ///< m×3
    IlluminantMatrix surface;      ///< light at the surface (D65 by default)
    double           depth_m = 1.0;
    std::size_t      n_hat   = 10;
};

struct AttenuationOptions
{
    double                             lower     = 0.0;
    double                             upper     = 1.0;
    std::size_t                        max_iters = 20000;
    double                             tolerance = 1e-10; ///< projected-gradient norm
    std::optional<std::vector<double>> initial;           ///< default: all zeros
};

struct AttenuationResult
{
    std::vector<double> k;
    double              objective  = 0.0;
    std::size_t         iterations = 0;
    bool                converged  = false;
};

/// Patch-angle objective as a function of the coarse attenuation vector; fills
/// `grad` (n_hat) when given.
double attenuation_objective( const AttenuationProblem &p, std::span<const double> k,
                              std::vector<double> *grad );

/// Light reaching depth y: surface·exp(−K̂(λ)·y).
IlluminantMatrix attenuated_light( const AttenuationProblem &p, std::span<const double> k );

/// Projected Levenberg-Marquardt on the per-patch angles over
/// [lower, upper]^n_hat. When it runs out of iterations the best iterate is
/// returned with converged unset.
AttenuationResult estimate_attenuation( const AttenuationProblem &p,
                                        const AttenuationOptions &opts = {} );

struct LocusPoint
{
    double kelvin;
    double r;
    double b;
};

/// rb chromaticity of the camera white point for daylight between t_min and
/// t_max, ordered by temperature.
std::vector<LocusPoint> daylight_locus( const Matrix &sensitivity,
                                        const DaylightComponents &daylight,
                                        double t_min = 4000.0, double t_max = 25000.0,
                                        std::size_t steps = 64 );

struct LocusClass
{
    bool   on_locus;
    double distance;
};

LocusClass classify_near_locus( const RbChromaticity &point,
                                const std::vector<LocusPoint> &locus, double threshold );

/// 3×3 M minimizing ‖I_src·M − I_tgt‖ over chart responses stacked across
/// lights. With white balance each light's block is divided channelwise by
/// that camera's response to `white_patch` first.
Matrix raw_to_raw_map( const Matrix &source, const Matrix &target, const Matrix &reflectances,
                       const std::vector<IlluminantMatrix> &lights, bool white_balance,
                       std::size_t white_patch = 18 );

} // namespace speccurve
