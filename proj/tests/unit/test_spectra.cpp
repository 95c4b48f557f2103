// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "helpers.hpp"
#include "speccurve/spectra.hpp"

using namespace speccurve;
using testutil::error_code_of;

namespace
{

std::string table_text( double step, double lo, double hi, auto value )
{
    std::string s = "wavelength_nm,value\n";
    for ( double w = lo; w <= hi + 1e-9; w += step )
        s += std::to_string( w ) + "," + std::to_string( value( w ) ) + "\n";
    return s;
}

} // namespace

TEST_SUITE( "spectra" )
{
    TEST_CASE( "default grid" )
    {
        const SpectralGrid g;
        CHECK( g.n == 31 );
        CHECK( g.delta() == 10.0 );
        CHECK( g.wavelength( 0 ) == 400.0 );
        CHECK( g.wavelength( 15 ) == 550.0 );
        CHECK( g.wavelength( 30 ) == 700.0 );
        CHECK( g.wavelengths().size() == 31 );
    }

    TEST_CASE( "on-grid table is copied verbatim" )
    {
        const auto t = parse_spectral_table(
            table_text( 10, 400, 700, []( double w ) { return w / 1000.0; } ), SpectralGrid{} );
        REQUIRE( t.values.rows() == 31 );
        for ( std::size_t i = 0; i < 31; ++i )
            CHECK( t.values( i, 0 ) == std::stod( std::to_string( ( 400.0 + 10 * i ) / 1000.0 ) ) );
    }

    TEST_CASE( "5 nm source keeps the exact grid samples" )
    {
        auto       f = []( double w ) { return std::sin( w / 37.0 ) + 2.0; };
        const auto t = parse_spectral_table( table_text( 5, 380, 780, f ), SpectralGrid{} );
        for ( std::size_t i = 0; i < 31; ++i )
            CHECK( t.values( i, 0 ) == std::stod( std::to_string( f( 400.0 + 10 * i ) ) ) );
    }

    TEST_CASE( "20 nm source interpolates linearly" )
    {
        const auto t = parse_spectral_table(
            "wavelength_nm,value\n400,0\n420,1\n440,1\n460,1\n480,1\n500,1\n520,1\n540,1\n"
            "560,1\n580,1\n600,1\n620,1\n640,1\n660,1\n680,1\n700,1\n",
            SpectralGrid{} );
        CHECK( t.values( 1, 0 ) == 0.5 );
        CHECK( t.values( 0, 0 ) == 0.0 );
        CHECK( t.values( 2, 0 ) == 1.0 );
    }

    TEST_CASE( "table errors" )
    {
        CHECK( error_code_of( [] {
                   parse_spectral_table( "nm,value\n400,1\n700,1\n", SpectralGrid{} );
               } ) == Errc::FormatError );
        CHECK( error_code_of( [] {
                   parse_spectral_table( "wavelength_nm,value\n400,abc\n700,1\n",
                                         SpectralGrid{} );
               } ) == Errc::FormatError );
        CHECK( error_code_of( [] {
                   parse_spectral_table( "wavelength_nm,value\n400,1\n690,1\n", SpectralGrid{} );
               } ) == Errc::CoverageError );
        CHECK( error_code_of( [] {
                   parse_spectral_table( "wavelength_nm,value\n700,1\n400,1\n", SpectralGrid{} );
               } ) == Errc::FormatError );
        CHECK( error_code_of( [] {
                   parse_spectral_table( "wavelength_nm,r,g\n400,1,2\n700,1,2\n", SpectralGrid{},
                                         { "r", "g", "b" } );
               } ) == Errc::FormatError );
        CHECK( error_code_of( [] { load_spd_csv( "/nonexistent/spd.csv" ); } ) == Errc::IoError );
    }

    TEST_CASE( "spectral tables round-trip through the writer" )
    {
        const auto dir = testutil::scratch_dir( "spectra_rt" );
        Rng        rng( 9 );
        const auto m   = testutil::random_matrix( 31, 3, rng, 0.0, 1.0 );
        write_spectral_table( dir / "cam.csv", SpectralGrid{}, { "r", "g", "b" }, m );
        const auto back = load_spectral_table( dir / "cam.csv", SpectralGrid{}, { "r", "g", "b" } );
        CHECK( back.values == m );
    }

    TEST_CASE( "D65 white point from the daylight cubic" )
    {
        const auto xy = daylight_chromaticity( 6504 );
        CHECK( std::abs( xy.x - 0.3127 ) < 1e-3 );
        CHECK( std::abs( xy.y - 0.3291 ) < 1e-3 );
    }

    TEST_CASE( "daylight branches meet at 7000 K" )
    {
        CHECK( std::abs( daylight_x_low_branch( 7000 ) - daylight_x_high_branch( 7000 ) ) < 2e-4 );
        CHECK( std::abs( daylight_chromaticity( 7000 ).x -
                         daylight_chromaticity( 7000.001 ).x ) < 2e-4 );
    }

    TEST_CASE( "4000 K uses the low branch" )
    {
        const auto xy = daylight_chromaticity( 4000 );
        CHECK( xy.x == daylight_x_low_branch( 4000 ) );
        CHECK( xy.x > 0.38 );
        CHECK( xy.x < 0.39 );
    }

    TEST_CASE( "daylight chromaticity lies on the parabola and decreases with T" )
    {
        double prev = 1.0;
        for ( double t = 4000; t <= 25000; t += 250 )
        {
            const auto xy = daylight_chromaticity( t );
            CHECK( xy.y == -3.000 * xy.x * xy.x + 2.870 * xy.x - 0.275 );
            CHECK( xy.x < prev );
            prev = xy.x;
        }
        CHECK( error_code_of( [] { daylight_chromaticity( 3999 ); } ) == Errc::OutOfRange );
        CHECK( error_code_of( [] { daylight_chromaticity( 25001 ); } ) == Errc::OutOfRange );
    }

    TEST_CASE( "daylight SPD at 6504 K has the D65 chromaticity" )
    {
        const auto &d  = bundled();
        const auto  xy = xy_of( daylight_spd( 6504, d.daylight ), d.observer );
        CHECK( std::abs( xy.x - 0.3127 ) < 2e-3 );
        CHECK( std::abs( xy.y - 0.3291 ) < 2e-3 );
    }

    TEST_CASE( "daylight SPD reduces to the mean component when both weights vanish" )
    {
        // Solve −1.3515 − 1.7703x + 5.9114y = 0 and 0.0300 − 31.4424x + 30.0717y = 0.
        const double a11 = -1.7703, a12 = 5.9114, b1 = 1.3515;
        const double a21 = -31.4424, a22 = 30.0717, b2 = -0.0300;
        const double det = a11 * a22 - a12 * a21;
        const Chromaticity xy{ ( b1 * a22 - a12 * b2 ) / det, ( a11 * b2 - b1 * a21 ) / det };
        const auto w = daylight_weights( xy );
        CHECK( std::abs( w.m1 ) < 1e-12 );
        CHECK( std::abs( w.m2 ) < 1e-12 );
        const auto &d   = bundled();
        const auto  spd = daylight_spd_at( xy, d.daylight );
        for ( std::size_t i = 0; i < 31; ++i )
            CHECK( spd.values[i] == doctest::Approx( std::max( 0.0, d.daylight.basis( i, 0 ) ) ) );
    }

    TEST_CASE( "daylight SPD is non-negative over the whole range" )
    {
        for ( double t = 4000; t <= 25000; t += 500 )
            for ( double v : daylight_spd( t ).values )
                CHECK( v >= 0.0 );
    }

    TEST_CASE( "illuminant matrix scales by the grid step" )
    {
        const SpectralCurve flat{ SpectralGrid{}, std::vector<double>( 31, 1.0 ) };
        for ( double v : illuminant_matrix( flat ).diag )
            CHECK( v == 10.0 );
        const SpectralCurve zero{ SpectralGrid{}, std::vector<double>( 31, 0.0 ) };
        for ( double v : illuminant_matrix( zero ).diag )
            CHECK( v == 0.0 );
        const auto &d65 = bundled().illuminant_d65;
        const auto  l   = illuminant_matrix( d65 );
        for ( std::size_t i = 0; i < 31; ++i )
            CHECK( l.diag[i] / d65.values[i] == doctest::Approx( 10.0 ).epsilon( 1e-15 ) );
        CHECK( max_abs_diff( l.dense(), l.apply( Matrix::identity( 31 ) ) ) == 0.0 );
    }

    TEST_CASE( "bundled data shapes" )
    {
        const auto &d = bundled();
        CHECK( d.observer.data.rows() == 31 );
        CHECK( d.observer.data.cols() == 3 );
        CHECK( d.colorchecker.rows() == 24 );
        CHECK( d.colorchecker.cols() == 31 );
        CHECK( d.daylight.basis.cols() == 3 );
        CHECK( min_entry( d.observer.data ) >= 0.0 );
    }

    TEST_CASE( "data directory honours the environment" )
    {
        const char *old = std::getenv( "SPECCURVE_DATA_DIR" );
        const std::string saved = old ? old : "";
        setenv( "SPECCURVE_DATA_DIR", "/somewhere/else", 1 );
        CHECK( data_dir() == std::filesystem::path( "/somewhere/else" ) );
        if ( old )
            setenv( "SPECCURVE_DATA_DIR", saved.c_str(), 1 );
        else
            unsetenv( "SPECCURVE_DATA_DIR" );
        CHECK( std::filesystem::exists( data_dir() / "cie1931_2deg.csv" ) );
    }
}
