// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#include "speccurve/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace speccurve
{

ErrorReport relative_full_scale_error( const Matrix &estimate, const Matrix &reference )
{
    if ( estimate.rows() != reference.rows() || estimate.cols() != 3 ||
         reference.cols() != 3 )
        throw Error( Errc::ShapeMismatch, "relative error expects two n x 3 matrices" );

    const std::size_t n = reference.rows();
    ErrorReport       report;
    for ( std::size_t k = 0; k < 3; ++k )
    {
        double sq = 0.0;
        double mx = 0.0;
        for ( std::size_t i = 0; i < n; ++i )
        {
            const double d = estimate( i, k ) - reference( i, k );
            sq += d * d;
            mx = std::max( mx, reference( i, k ) );
        }
        if ( mx <= 0.0 )
            throw Error( Errc::ZeroChannel, "reference channel maximum is not positive" );
        report.rmse_per_channel[k] = std::sqrt( sq / double( n ) );
        report.re_per_channel[k]   = report.rmse_per_channel[k] / mx;
    }
    report.re_mean =
        ( report.re_per_channel[0] + report.re_per_channel[1] + report.re_per_channel[2] ) /
        3.0;
    return report;
}

double angular_rgb_error( const Rgb &actual, const Rgb &predicted )
{
    double dot = 0.0, na = 0.0, np = 0.0;
    for ( std::size_t c = 0; c < 3; ++c )
    {
        dot += actual[c] * predicted[c];
        na += actual[c] * actual[c];
        np += predicted[c] * predicted[c];
    }
    if ( na == 0.0 || np == 0.0 )
        throw Error( Errc::ZeroVector, "angular error of a zero RGB vector" );
    const double c =
        std::clamp( dot / std::sqrt( na * np ), -1.0 + kCosineClamp, 1.0 - kCosineClamp );
    return std::acos( c );
}

RbChromaticity chromaticity( const Rgb &rgb )
{
    const double sum = rgb[0] + rgb[1] + rgb[2];
    if ( !( sum > 0.0 ) )
        throw Error( Errc::ZeroSum, "chromaticity needs R+G+B > 0" );
    return { rgb[0] / sum, rgb[2] / sum };
}

} // namespace speccurve
