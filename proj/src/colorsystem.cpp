// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#include "speccurve/colorsystem.hpp"

namespace speccurve
{

SensitivityMatrix SensitivityMatrix::checked( Matrix data, const SpectralGrid &grid )
{
    if ( data.rows() != grid.n || data.cols() != 3 )
        throw Error( Errc::ShapeMismatch, "sensitivity must be n x 3" );
    if ( min_entry( data ) < 0.0 )
        throw Error( Errc::InvalidArgument, "sensitivity has negative entries" );
    if ( max_entry( data ) <= 0.0 )
        throw Error( Errc::ZeroMatrix, "sensitivity is identically zero" );
    return { grid, std::move( data ) };
}

Illuminant Illuminant::from_code( std::uint16_t code )
{
    if ( code == kCodeA )
        return { Kind::A, code };
    if ( code == kCodeD65 )
        return { Kind::D65, code };
    return { Kind::Other, code };
}

std::string Illuminant::name() const
{
    switch ( kind )
    {
        case Kind::A: return "A";
        case Kind::D65: return "D65";
        case Kind::Other: break;
    }
    return std::to_string( code );
}

const IlluminantMatrix &CalibrationLights::get( Illuminant::Kind kind ) const
{
    switch ( kind )
    {
        case Illuminant::Kind::A: return a;
        case Illuminant::Kind::D65: return d65;
        case Illuminant::Kind::Other: break;
    }
    throw Error( Errc::InvalidArgument, "no calibration light for this illuminant" );
}

CalibrationLights bundled_calibration_lights()
{
    const auto &data = bundled();
    return { illuminant_matrix( data.illuminant_a ),
             illuminant_matrix( data.illuminant_d65 ) };
}

Matrix render( const Matrix &reflectances, const IlluminantMatrix &light,
               const Matrix &sensitivity )
{
    if ( reflectances.cols() != light.diag.size() ||
         sensitivity.rows() != light.diag.size() )
    {
        throw Error( Errc::ShapeMismatch, "render: R, L and S do not conform" );
    }
    Matrix rl = reflectances;
    for ( std::size_t r = 0; r < rl.rows(); ++r )
    {
        auto row = rl.row_span( r );
        for ( std::size_t i = 0; i < row.size(); ++i )
            row[i] *= light.diag[i];
    }
    return matmul( rl, sensitivity );
}

Matrix color_system_block( const IlluminantMatrix &light, const ObserverMatrix &observer )
{
    const Matrix lo = light.apply( observer.data );
    Matrix       p  = pseudoinverse( lo ); // 3 × n
    for ( std::size_t r = 0; r < p.rows(); ++r )
    {
        auto row = p.row_span( r );
        for ( std::size_t i = 0; i < row.size(); ++i )
            row[i] *= light.diag[i];
    }
    return p;
}

Matrix forward_color_matrix( const Matrix &sensitivity, const IlluminantMatrix &light,
                             const ObserverMatrix &observer )
{
    return matmul( color_system_block( light, observer ), sensitivity );
}

SpecificSystem build_specific_system( const std::vector<ColorMatrixRecord> &records,
                                      const ObserverMatrix                 &observer,
                                      const CalibrationLights              &lights )
{
    SpecificSystem sys;
    for ( const auto &rec : records )
    {
        if ( !rec.illuminant.usable() )
        {
            sys.warnings.push_back( "dropped colour matrix with unsupported illuminant " +
                                    rec.illuminant.name() );
            continue;
        }
        if ( rec.matrix.rows() != 3 || rec.matrix.cols() != 3 )
            throw Error( Errc::ShapeMismatch, "colour matrix must be 3x3" );
        sys.blocks_a.push_back(
            color_system_block( lights.get( rec.illuminant.kind ), observer ) );
        sys.blocks_b.push_back( rec.matrix );
        sys.illuminants.push_back( rec.illuminant );
    }
    if ( sys.blocks_a.empty() )
        throw Error( Errc::NoUsableRecords, "no colour matrix for illuminant A or D65" );
    return sys;
}

} // namespace speccurve
