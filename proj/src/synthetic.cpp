// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#include "speccurve/synthetic.hpp"

#include <cmath>
#include <cstdio>

namespace speccurve
{

namespace
{

struct Lobe
{
    double center;
    double width;
    double gain;
};

double gaussian( double x, const Lobe &l )
{
    const double z = ( x - l.center ) / l.width;
    return l.gain * std::exp( -0.5 * z * z );
}

} // namespace

Matrix synthetic_sensitivity( const SpectralGrid &grid, Rng &rng )
{
    // Nominal centre, width and gain per channel (r, g, b).
    const double centers[3] = { 600.0, 535.0, 460.0 };
    const double widths[3]  = { 22.0, 32.0, 24.0 };
    const double gains[3]   = { 0.75, 1.0, 0.8 };
    // Shoulders sit on the short side for red and the long side for blue.
    const double shoulder_side[3] = { -1.0, 1.0, 1.0 };

    Matrix s( grid.n, 3 );
    for ( std::size_t k = 0; k < 3; ++k )
    {
        const Lobe main{ centers[k] + rng.uniform( -12.0, 12.0 ),
                         widths[k] * rng.uniform( 0.8, 1.25 ),
                         gains[k] * rng.uniform( 0.75, 1.0 ) };
        const Lobe shoulder{ main.center + shoulder_side[k] * rng.uniform( 20.0, 40.0 ),
                             main.width * rng.uniform( 0.8, 1.3 ),
                             main.gain * rng.uniform( 0.1, 0.35 ) };
        for ( std::size_t i = 0; i < grid.n; ++i )
        {
            const double w = grid.wavelength( i );
            s( i, k )      = gaussian( w, main ) + gaussian( w, shoulder );
        }
    }
    s *= 1.0 / max_entry( s );
    return s;
}

SensitivityDatabase synthetic_database( const SyntheticOptions &opts )
{
    static const char *brands[] = { "alpha", "beta", "gamma", "delta" };
    Rng                rng( opts.seed );
    SensitivityDatabase db{ opts.grid, {} };
    for ( std::size_t c = 0; c < opts.cameras; ++c )
    {
        char id[64];
        std::snprintf( id, sizeof id, "%s cam%02zu", brands[c % 4], c + 1 );
        const Matrix s = synthetic_sensitivity( opts.grid, rng );
        db.add( id, "synthetic-a", s );
        if ( c < opts.duplicates )
        {
            // A second measurement of the same camera: small multiplicative noise.
            Matrix dup = s;
            for ( double &v : dup.data() )
                v *= rng.uniform( 0.97, 1.03 );
            db.add( id, "synthetic-b", dup );
        }
    }
    return db;
}

std::vector<CameraRecord> synthetic_records( const SensitivityDatabase &db,
                                             const ObserverMatrix      &observer,
                                             const CalibrationLights   &lights )
{
    std::vector<CameraRecord> out;
    for ( const auto &key : db.groups() )
    {
        const auto &first = *db.members( key ).front();
        const auto  space = key.find( ' ' );
        CameraRecord rec;
        rec.make  = key.substr( 0, space );
        rec.model = key.substr( space == std::string::npos ? key.size() : space + 1 );
        for ( auto kind : { Illuminant::Kind::A, Illuminant::Kind::D65 } )
        {
            rec.matrices.push_back(
                { forward_color_matrix( first.sensitivity.data, lights.get( kind ), observer ),
                  kind == Illuminant::Kind::A ? Illuminant::a() : Illuminant::d65(),
                  MatrixSource::Synthetic } );
        }
        out.push_back( std::move( rec ) );
    }
    return out;
}

} // namespace speccurve
