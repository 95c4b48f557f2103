// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "speccurve/spectra.hpp"

namespace speccurve
{

/// n×3 non-negative camera response, columns r, g, b.
struct SensitivityMatrix
{
    SpectralGrid grid;
    Matrix       data;

    /// Validates shape (grid.n × 3), non-negativity and that some entry is
    /// positive.
    static SensitivityMatrix checked( Matrix data, const SpectralGrid &grid = {} );
};

/// Calibration illuminant as recorded by the DNG LightSource codes.
struct Illuminant
{
    enum class Kind
    {
        A,
        D65,
        Other
    };

    Kind          kind = Kind::Other;
    std::uint16_t code = 0;

    static constexpr std::uint16_t kCodeA   = 17;
    static constexpr std::uint16_t kCodeD65 = 21;

    static Illuminant from_code( std::uint16_t code );
    static Illuminant a() { return { Kind::A, kCodeA }; }
    static Illuminant d65() { return { Kind::D65, kCodeD65 }; }

    bool        usable() const { return kind != Kind::Other; }
    std::string name() const;

    bool operator==( const Illuminant & ) const = default;
};

enum class MatrixSource
{
    Dng,
    Json,
    Synthetic
};

/// A 3×3 colour matrix in the orientation S_xyz·C ≈ S (XYZ responses on the
/// left, camera responses on the right).
struct ColorMatrixRecord
{
    Matrix       matrix;
    Illuminant   illuminant;
    MatrixSource source = MatrixSource::Json;

    bool operator==( const ColorMatrixRecord & ) const = default;
};

/// The two calibration lights the estimator knows about.
struct CalibrationLights
{
    IlluminantMatrix a;
    IlluminantMatrix d65;

    const IlluminantMatrix &get( Illuminant::Kind kind ) const;
};

CalibrationLights bundled_calibration_lights();

/// Blocks Aᵢ = (Lᵢ·S_xyz)⁺·Lᵢ (3×n) and Bᵢ = Cᵢ (3×3), one per usable record.
struct SpecificSystem
{
    std::vector<Matrix>      blocks_a;
    std::vector<Matrix>      blocks_b;
    std::vector<Illuminant>  illuminants;
    std::vector<std::string> warnings;

    std::size_t size() const { return blocks_a.size(); }
};

/// (R·L)·S for m reflectances (rows of R) under L.
Matrix render( const Matrix &reflectances, const IlluminantMatrix &light,
               const Matrix &sensitivity );

/// Least-squares C with (L·S_xyz)·C ≈ L·S.
Matrix forward_color_matrix( const Matrix &sensitivity, const IlluminantMatrix &light,
                             const ObserverMatrix &observer );

/// (L·S_xyz)⁺·L
Matrix color_system_block( const IlluminantMatrix &light, const ObserverMatrix &observer );

/// Records whose illuminant is neither A nor D65 are dropped with a warning.
/// Throws NoUsableRecords when nothing remains.
SpecificSystem build_specific_system( const std::vector<ColorMatrixRecord> &records,
                                      const ObserverMatrix                 &observer,
                                      const CalibrationLights              &lights );

} // namespace speccurve
