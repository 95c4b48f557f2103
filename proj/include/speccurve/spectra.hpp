// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "speccurve/numerics.hpp"

namespace speccurve
{

/// Uniform wavelength sampling; the default is 31 samples at 10 nm from
/// 400 to 700 nm.
struct SpectralGrid
{
    std::size_t n          = 31;
    double      lambda_min = 400.0;
    double      lambda_max = 700.0;

    double delta() const { return ( lambda_max - lambda_min ) / double( n - 1 ); }
    double wavelength( std::size_t i ) const
    {
        return lambda_min + double( i ) * delta();
    }
    std::vector<double> wavelengths() const;

    bool operator==( const SpectralGrid & ) const = default;
};

struct SpectralCurve
{
    SpectralGrid        grid;
    std::vector<double> values;
};

/// CIE 1931 2° colour matching functions sampled on a grid, n×3 (x̄, ȳ, z̄).
struct ObserverMatrix
{
    SpectralGrid grid;
    Matrix       data;
};

/// Diagonal illuminant matrix, stored as its diagonal L(λᵢ)·Δλ.
struct IlluminantMatrix
{
    SpectralGrid        grid;
    std::vector<double> diag;

    Matrix dense() const;
    /// diag(L)·m, i.e. scales row i of m by diag[i].
    Matrix apply( const Matrix &m ) const;
};

/// A CSV table resampled onto a grid: one column per non-wavelength field.
struct SpectralTable
{
    std::vector<std::string> columns;
    Matrix                   values; // n × columns.size()
};

/// Reads `wavelength_nm,<col>...` and resamples every column onto the grid by
/// linear interpolation. When `expected` is non-empty the header must match
/// it exactly.
SpectralTable load_spectral_table(
    const std::filesystem::path    &path,
    const SpectralGrid             &grid,
    const std::vector<std::string> &expected = {} );

/// Parses the same format from an in-memory string (`origin` names it in
/// error messages).
SpectralTable parse_spectral_table(
    const std::string              &text,
    const SpectralGrid             &grid,
    const std::vector<std::string> &expected = {},
    const std::string              &origin   = "<memory>" );

SpectralCurve load_spd_csv(
    const std::filesystem::path &path, const SpectralGrid &grid = {} );

/// Writes `wavelength_nm,<cols...>` with 17 significant digits.
void write_spectral_table(
    const std::filesystem::path    &path,
    const SpectralGrid             &grid,
    const std::vector<std::string> &columns,
    const Matrix                   &values );

IlluminantMatrix illuminant_matrix( const SpectralCurve &spd );

struct Chromaticity
{
    double x;
    double y;
};

/// CIE daylight locus chromaticity for a correlated colour temperature.
/// Valid for 4000 K ≤ T ≤ 25000 K; uses y = −3.000x² + 2.870x − 0.275.
Chromaticity daylight_chromaticity( double kelvin );

/// x_D from one branch of the cubic regardless of T (for continuity checks).
double daylight_x_low_branch( double kelvin );
double daylight_x_high_branch( double kelvin );

/// S0, S1, S2 daylight basis functions on a grid, n×3.
struct DaylightComponents
{
    SpectralGrid grid;
    Matrix       basis;
};

struct DaylightWeights
{
    double m1;
    double m2;
};

DaylightWeights daylight_weights( const Chromaticity &xy );

/// S0 + M1·S1 + M2·S2 at the given chromaticity, negatives clamped to 0.
SpectralCurve daylight_spd_at(
    const Chromaticity &xy, const DaylightComponents &components );

SpectralCurve daylight_spd( double kelvin, const DaylightComponents &components );
SpectralCurve daylight_spd( double kelvin );

/// xy chromaticity of a light source seen by the observer.
Chromaticity xy_of( const SpectralCurve &spd, const ObserverMatrix &observer );

/// Root of the bundled CSV assets: $SPECCURVE_DATA_DIR if set, else the
/// directory the library was configured with.
std::filesystem::path data_dir();

struct BundledData
{
    SpectralGrid       grid;
    ObserverMatrix     observer;
    SpectralCurve      illuminant_a;
    SpectralCurve      illuminant_d65;
    DaylightComponents daylight;
    Matrix             colorchecker; // 24 × n reflectances, one row per patch

    static BundledData load( const std::filesystem::path &dir,
                             const SpectralGrid          &grid = {} );
};

/// Bundled data on the default grid, loaded once from data_dir().
const BundledData &bundled();

} // namespace speccurve
