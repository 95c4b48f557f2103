// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#include "speccurve/spectra.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace speccurve
{

std::vector<double> SpectralGrid::wavelengths() const
{
    std::vector<double> out( n );
    for ( std::size_t i = 0; i < n; ++i )
        out[i] = wavelength( i );
    return out;
}

Matrix IlluminantMatrix::dense() const
{
    Matrix m( diag.size(), diag.size() );
    for ( std::size_t i = 0; i < diag.size(); ++i )
        m( i, i ) = diag[i];
    return m;
}

Matrix IlluminantMatrix::apply( const Matrix &m ) const
{
    if ( m.rows() != diag.size() )
        throw Error( Errc::ShapeMismatch, "illuminant/matrix row count" );
    Matrix out = m;
    for ( std::size_t r = 0; r < out.rows(); ++r )
        for ( double &v : out.row_span( r ) )
            v *= diag[r];
    return out;
}

namespace
{

std::string trim( std::string_view s )
{
    const auto first = s.find_first_not_of( " \t\r\n" );
    if ( first == std::string_view::npos )
        return {};
    const auto last = s.find_last_not_of( " \t\r\n" );
    return std::string( s.substr( first, last - first + 1 ) );
}

std::vector<std::string> split_csv_line( const std::string &line )
{
    std::vector<std::string> fields;
    std::size_t              start = 0;
    while ( true )
    {
        const auto comma = line.find( ',', start );
        fields.push_back( trim(
            std::string_view( line ).substr( start, comma - start ) ) );
        if ( comma == std::string::npos )
            break;
        start = comma + 1;
    }
    return fields;
}

double parse_number( const std::string &field, const std::string &where )
{
    double      value = 0.0;
    const char *first = field.data();
    const char *last  = field.data() + field.size();
    if ( !field.empty() && *first == '+' )
        ++first;
    auto [ptr, ec] = std::from_chars( first, last, value );
    if ( ec != std::errc() || ptr != last || !std::isfinite( value ) )
        throw Error( Errc::FormatError, where + ": bad number '" + field + "'" );
    return value;
}

/// Linear interpolation of (xs, ys) at x; xs strictly ascending and
/// covering x.
double interpolate(
    const std::vector<double> &xs, const std::vector<double> &ys, double x )
{
    auto it = std::lower_bound( xs.begin(), xs.end(), x );
    if ( it != xs.end() && *it == x )
        return ys[std::size_t( it - xs.begin() )];
    const std::size_t hi = std::size_t( it - xs.begin() );
    const std::size_t lo = hi - 1;
    const double      t  = ( x - xs[lo] ) / ( xs[hi] - xs[lo] );
    return ys[lo] + t * ( ys[hi] - ys[lo] );
}

} // namespace

SpectralTable parse_spectral_table(
    const std::string              &text,
    const SpectralGrid             &grid,
    const std::vector<std::string> &expected,
    const std::string              &origin )
{
    std::istringstream in( text );
    std::string        line;
    // Skip a UTF-8 BOM and leading blank lines.
    while ( std::getline( in, line ) )
    {
        if ( line.rfind( "\xEF\xBB\xBF", 0 ) == 0 )
            line.erase( 0, 3 );
        if ( !trim( line ).empty() )
            break;
    }
    auto header = split_csv_line( line );
    if ( header.size() < 2 || header[0] != "wavelength_nm" )
        throw Error( Errc::FormatError, origin + ": header must start with wavelength_nm" );
    std::vector<std::string> columns( header.begin() + 1, header.end() );
    if ( !expected.empty() && columns != expected )
        throw Error( Errc::FormatError, origin + ": unexpected header columns" );

    std::vector<double>              wl;
    std::vector<std::vector<double>> cols( columns.size() );
    std::size_t                      line_no = 1;
    while ( std::getline( in, line ) )
    {
        ++line_no;
        if ( trim( line ).empty() )
            continue;
        const auto  fields = split_csv_line( line );
        std::string where  = origin + ":" + std::to_string( line_no );
        if ( fields.size() != header.size() )
            throw Error( Errc::FormatError, where + ": wrong field count" );
        const double w = parse_number( fields[0], where );
        if ( !wl.empty() && w <= wl.back() )
            throw Error( Errc::FormatError, where + ": wavelengths must ascend" );
        wl.push_back( w );
        for ( std::size_t c = 0; c < columns.size(); ++c )
            cols[c].push_back( parse_number( fields[c + 1], where ) );
    }

    constexpr double kSlack = 1e-9;
    if ( wl.empty() || wl.front() > grid.lambda_min + kSlack ||
         wl.back() < grid.lambda_max - kSlack )
    {
        throw Error( Errc::CoverageError,
                     origin + ": wavelength range does not span the grid" );
    }

    Matrix values( grid.n, columns.size() );
    for ( std::size_t i = 0; i < grid.n; ++i )
    {
        const double x = std::clamp( grid.wavelength( i ), wl.front(), wl.back() );
        for ( std::size_t c = 0; c < columns.size(); ++c )
            values( i, c ) = interpolate( wl, cols[c], x );
    }
    return { std::move( columns ), std::move( values ) };
}

SpectralTable load_spectral_table(
    const std::filesystem::path    &path,
    const SpectralGrid             &grid,
    const std::vector<std::string> &expected )
{
    std::ifstream in( path, std::ios::binary );
    if ( !in )
        throw Error( Errc::IoError, "cannot open " + path.string() );
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spectral_table( buf.str(), grid, expected, path.string() );
}

SpectralCurve load_spd_csv( const std::filesystem::path &path, const SpectralGrid &grid )
{
    auto table = load_spectral_table( path, grid, { "value" } );
    SpectralCurve curve{ grid, table.values.col_values( 0 ) };
    for ( double v : curve.values )
    {
        if ( v < 0.0 )
            throw Error( Errc::FormatError, path.string() + ": negative SPD sample" );
    }
    return curve;
}

void write_spectral_table(
    const std::filesystem::path    &path,
    const SpectralGrid             &grid,
    const std::vector<std::string> &columns,
    const Matrix                   &values )
{
    if ( values.rows() != grid.n || values.cols() != columns.size() )
        throw Error( Errc::ShapeMismatch, "write_spectral_table" );
    std::ofstream out( path, std::ios::binary );
    if ( !out )
        throw Error( Errc::IoError, "cannot write " + path.string() );
    out << "wavelength_nm";
    for ( const auto &c : columns )
        out << ',' << c;
    out << '\n';
    char buf[64];
    for ( std::size_t i = 0; i < grid.n; ++i )
    {
        std::snprintf( buf, sizeof buf, "%.17g", grid.wavelength( i ) );
        out << buf;
        for ( std::size_t c = 0; c < values.cols(); ++c )
        {
            std::snprintf( buf, sizeof buf, "%.17g", values( i, c ) );
            out << ',' << buf;
        }
        out << '\n';
    }
    if ( !out )
        throw Error( Errc::IoError, "write failed: " + path.string() );
}

IlluminantMatrix illuminant_matrix( const SpectralCurve &spd )
{
    IlluminantMatrix l{ spd.grid, spd.values };
    const double     d = spd.grid.delta();
    for ( double &v : l.diag )
        v *= d;
    return l;
}

double daylight_x_low_branch( double kelvin )
{
    const double t = kelvin;
    return 0.244063 + 0.09911 * 1e3 / t + 2.9678 * 1e6 / ( t * t ) -
           4.6070 * 1e9 / ( t * t * t );
}

double daylight_x_high_branch( double kelvin )
{
    const double t = kelvin;
    return 0.237040 + 0.24748 * 1e3 / t + 1.9018 * 1e6 / ( t * t ) -
           2.0064 * 1e9 / ( t * t * t );
}

Chromaticity daylight_chromaticity( double kelvin )
{
    if ( !( kelvin >= 4000.0 && kelvin <= 25000.0 ) )
        throw Error( Errc::OutOfRange, "CCT must lie in [4000, 25000] K" );
    const double x = kelvin <= 7000.0 ? daylight_x_low_branch( kelvin )
                                      : daylight_x_high_branch( kelvin );
    const double y = -3.000 * x * x + 2.870 * x - 0.275;
    return { x, y };
}

DaylightWeights daylight_weights( const Chromaticity &xy )
{
    const double m  = 0.0241 + 0.2562 * xy.x - 0.7341 * xy.y;
    const double m1 = ( -1.3515 - 1.7703 * xy.x + 5.9114 * xy.y ) / m;
    const double m2 = ( 0.0300 - 31.4424 * xy.x + 30.0717 * xy.y ) / m;
    return { m1, m2 };
}

SpectralCurve daylight_spd_at(
    const Chromaticity &xy, const DaylightComponents &components )
{
    const auto    w = daylight_weights( xy );
    SpectralCurve out{ components.grid, std::vector<double>( components.grid.n ) };
    for ( std::size_t i = 0; i < components.grid.n; ++i )
    {
        const auto &b = components.basis;
        out.values[i] =
            std::max( 0.0, b( i, 0 ) + w.m1 * b( i, 1 ) + w.m2 * b( i, 2 ) );
    }
    return out;
}

SpectralCurve daylight_spd( double kelvin, const DaylightComponents &components )
{
    return daylight_spd_at( daylight_chromaticity( kelvin ), components );
}

SpectralCurve daylight_spd( double kelvin )
{
    return daylight_spd( kelvin, bundled().daylight );
}

Chromaticity xy_of( const SpectralCurve &spd, const ObserverMatrix &observer )
{
    double xyz[3] = { 0.0, 0.0, 0.0 };
    for ( std::size_t i = 0; i < spd.values.size(); ++i )
        for ( std::size_t c = 0; c < 3; ++c )
            xyz[c] += spd.values[i] * observer.data( i, c );
    const double s = xyz[0] + xyz[1] + xyz[2];
    if ( s <= 0.0 )
        throw Error( Errc::ZeroSum, "SPD has no visible energy" );
    return { xyz[0] / s, xyz[1] / s };
}

std::filesystem::path data_dir()
{
    if ( const char *env = std::getenv( "SPECCURVE_DATA_DIR" ); env && *env )
        return env;
#ifdef SPECCURVE_DEFAULT_DATA_DIR
    return SPECCURVE_DEFAULT_DATA_DIR;
#else
    return "data";
#endif
}

BundledData BundledData::load( const std::filesystem::path &dir, const SpectralGrid &grid )
{
    BundledData d;
    d.grid = grid;
    d.observer = {
        grid,
        load_spectral_table( dir / "cie1931_2deg.csv", grid, { "x", "y", "z" } ).values };
    d.illuminant_a   = load_spd_csv( dir / "illuminant_a.csv", grid );
    d.illuminant_d65 = load_spd_csv( dir / "illuminant_d65.csv", grid );
    d.daylight       = {
        grid,
        load_spectral_table( dir / "daylight_components.csv", grid, { "s0", "s1", "s2" } )
            .values };
    d.colorchecker =
        load_spectral_table( dir / "colorchecker_babelcolor.csv", grid ).values.transposed();
    return d;
}

const BundledData &bundled()
{
    static const BundledData data = BundledData::load( data_dir() );
    return data;
}

} // namespace speccurve
