// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#include <cmath>

#include "helpers.hpp"
#include "speccurve/colorsystem.hpp"
#include "speccurve/synthetic.hpp"

using namespace speccurve;
using testutil::error_code_of;

namespace
{

// Normal equations (AᵀA)x = Aᵀb for a 3-column A, solved by Gauss-Jordan on a
// 3×4 tableau.
std::array<double, 3> normal_solve( const Matrix &a, const std::vector<double> &b )
{
    double t[3][4] = {};
    for ( std::size_t i = 0; i < a.rows(); ++i )
        for ( int p = 0; p < 3; ++p )
        {
            t[p][3] += a( i, p ) * b[i];
            for ( int q = 0; q < 3; ++q )
                t[p][q] += a( i, p ) * a( i, q );
        }
    for ( int c = 0; c < 3; ++c )
    {
        int piv = c;
        for ( int r = c + 1; r < 3; ++r )
            if ( std::abs( t[r][c] ) > std::abs( t[piv][c] ) )
                piv = r;
        for ( int k = 0; k < 4; ++k )
            std::swap( t[c][k], t[piv][k] );
        for ( int r = 0; r < 3; ++r )
        {
            if ( r == c )
                continue;
            const double f = t[r][c] / t[c][c];
            for ( int k = 0; k < 4; ++k )
                t[r][k] -= f * t[c][k];
        }
    }
    return { t[0][3] / t[0][0], t[1][3] / t[1][1], t[2][3] / t[2][2] };
}

Matrix synthetic_camera( std::uint64_t seed )
{
    Rng rng( seed );
    return synthetic_sensitivity( SpectralGrid{}, rng );
}

std::vector<ColorMatrixRecord> exact_records( const Matrix &s )
{
    const auto &d      = bundled();
    const auto  lights = bundled_calibration_lights();
    return { { forward_color_matrix( s, lights.a, d.observer ), Illuminant::a(),
               MatrixSource::Synthetic },
             { forward_color_matrix( s, lights.d65, d.observer ), Illuminant::d65(),
               MatrixSource::Synthetic } };
}

} // namespace

TEST_SUITE( "colorsystem" )
{
    TEST_CASE( "render of a zero reflectance row" )
    {
        const auto   lights = bundled_calibration_lights();
        const Matrix out    = render( Matrix( 1, 31 ), lights.d65, synthetic_camera( 1 ) );
        CHECK( out == Matrix( 1, 3 ) );
    }

    TEST_CASE( "render picks up the grid step" )
    {
        const SpectralCurve flat{ SpectralGrid{}, std::vector<double>( 31, 1.0 ) };
        Matrix              s( 31, 3 );
        double              c = 0.0;
        for ( std::size_t i = 0; i < 31; ++i )
        {
            s( i, 0 ) = 0.01 * double( i );
            c += s( i, 0 );
        }
        const Matrix out = render( Matrix( 1, 31, 1.0 ), illuminant_matrix( flat ), s );
        CHECK( out( 0, 0 ) == doctest::Approx( 10.0 * c ).epsilon( 1e-14 ) );
        CHECK( out( 0, 1 ) == 0.0 );
        CHECK( out( 0, 2 ) == 0.0 );
    }

    TEST_CASE( "render matches a direct summation over the ColorChecker" )
    {
        const auto  &d     = bundled();
        const auto   light = illuminant_matrix( d.illuminant_d65 );
        const Matrix s     = synthetic_camera( 4 );
        const Matrix out   = render( d.colorchecker, light, s );
        for ( std::size_t k = 0; k < 24; ++k )
            for ( std::size_t c = 0; c < 3; ++c )
            {
                double sum = 0.0;
                for ( std::size_t i = 0; i < 31; ++i )
                    sum += d.colorchecker( k, i ) * d.illuminant_d65.values[i] * 10.0 * s( i, c );
                CHECK( std::abs( out( k, c ) - sum ) <= 1e-12 * std::abs( sum ) );
            }
        CHECK( error_code_of( [&] { render( Matrix( 2, 30 ), light, s ); } ) ==
               Errc::ShapeMismatch );
    }

    TEST_CASE( "observer as camera gives the identity matrix" )
    {
        const auto &d = bundled();
        for ( const auto &l : { bundled_calibration_lights().a, bundled_calibration_lights().d65 } )
            CHECK( max_abs_diff( forward_color_matrix( d.observer.data, l, d.observer ),
                                 Matrix::identity( 3 ) ) < 1e-9 );
    }

    TEST_CASE( "camera linear in the observer recovers the mixing matrix" )
    {
        const auto  &d = bundled();
        const Matrix m{ { 0.9, 0.1, 0.0 }, { 0.2, 0.7, 0.1 }, { 0.0, 0.3, 1.1 } };
        const Matrix s = matmul( d.observer.data, m );
        CHECK( max_abs_diff( forward_color_matrix( s, bundled_calibration_lights().a, d.observer ),
                             m ) < 1e-9 );
    }

    TEST_CASE( "colour matrix is the least-squares fit per column" )
    {
        const auto  &d     = bundled();
        const auto   light = bundled_calibration_lights().a;
        const Matrix s     = synthetic_camera( 8 );
        const Matrix c     = forward_color_matrix( s, light, d.observer );
        const Matrix lo    = light.apply( d.observer.data );
        const Matrix ls    = light.apply( s );
        for ( std::size_t col = 0; col < 3; ++col )
        {
            const auto x = normal_solve( lo, ls.col_values( col ) );
            for ( std::size_t r = 0; r < 3; ++r )
                CHECK( std::abs( c( r, col ) - x[r] ) < 1e-9 * std::max( 1.0, std::abs( x[r] ) ) );
        }
    }

    TEST_CASE( "colour matrix scales with the camera" )
    {
        const auto  &d = bundled();
        const auto   l = bundled_calibration_lights().d65;
        const Matrix s = synthetic_camera( 12 );
        CHECK( max_abs_diff( forward_color_matrix( 3.5 * s, l, d.observer ),
                             3.5 * forward_color_matrix( s, l, d.observer ) ) < 1e-12 );
    }

    TEST_CASE( "two-illuminant system shapes" )
    {
        const auto sys = build_specific_system( exact_records( synthetic_camera( 2 ) ),
                                                bundled().observer, bundled_calibration_lights() );
        REQUIRE( sys.size() == 2 );
        for ( std::size_t i = 0; i < 2; ++i )
        {
            CHECK( sys.blocks_a[i].rows() == 3 );
            CHECK( sys.blocks_a[i].cols() == 31 );
            CHECK( sys.blocks_b[i].rows() == 3 );
            CHECK( sys.blocks_b[i].cols() == 3 );
        }
        CHECK( sys.illuminants[0] == Illuminant::a() );
        CHECK( sys.illuminants[1] == Illuminant::d65() );
    }

    TEST_CASE( "single-record system" )
    {
        auto recs = exact_records( synthetic_camera( 2 ) );
        recs.pop_back();
        const auto sys =
            build_specific_system( recs, bundled().observer, bundled_calibration_lights() );
        CHECK( sys.size() == 1 );
    }

    TEST_CASE( "true sensitivity solves its own system" )
    {
        for ( std::uint64_t seed = 0; seed < 20; ++seed )
        {
            const Matrix s   = synthetic_camera( 100 + seed );
            const auto   sys = build_specific_system( exact_records( s ), bundled().observer,
                                                      bundled_calibration_lights() );
            for ( std::size_t i = 0; i < sys.size(); ++i )
                CHECK( max_abs_diff( matmul( sys.blocks_a[i], s ), sys.blocks_b[i] ) < 1e-9 );
        }
    }

    TEST_CASE( "unsupported illuminants are dropped with a warning" )
    {
        auto recs = exact_records( synthetic_camera( 3 ) );
        recs[0].illuminant = Illuminant::from_code( 14 );
        const auto sys =
            build_specific_system( recs, bundled().observer, bundled_calibration_lights() );
        CHECK( sys.size() == 1 );
        CHECK( sys.warnings.size() == 1 );
        recs[1].illuminant = Illuminant::from_code( 23 );
        CHECK( error_code_of( [&] {
                   build_specific_system( recs, bundled().observer,
                                          bundled_calibration_lights() );
               } ) == Errc::NoUsableRecords );
    }

    TEST_CASE( "illuminant codes" )
    {
        for ( int code = 0; code <= 255; ++code )
        {
            const auto il = Illuminant::from_code( std::uint16_t( code ) );
            CHECK( il.code == code );
            if ( code == 17 )
                CHECK( il.kind == Illuminant::Kind::A );
            else if ( code == 21 )
                CHECK( il.kind == Illuminant::Kind::D65 );
            else
                CHECK( il.kind == Illuminant::Kind::Other );
        }
    }

    TEST_CASE( "sensitivity validation" )
    {
        CHECK( error_code_of( [] { SensitivityMatrix::checked( Matrix( 30, 3, 1.0 ) ); } ) ==
               Errc::ShapeMismatch );
        Matrix neg( 31, 3, 1.0 );
        neg( 4, 1 ) = -0.1;
        CHECK( error_code_of( [&] { SensitivityMatrix::checked( neg ); } ) ==
               Errc::InvalidArgument );
        CHECK( error_code_of( [] { SensitivityMatrix::checked( Matrix( 31, 3 ) ); } ) ==
               Errc::ZeroMatrix );
    }
}
