// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#include "speccurve/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Core>

namespace speccurve
{

std::string_view errc_name( Errc code )
{
    switch ( code )
    {
        case Errc::SingularSystem: return "SingularSystem";
        case Errc::ZeroMatrix: return "ZeroMatrix";
        case Errc::ShapeMismatch: return "ShapeMismatch";
        case Errc::NonFinite: return "NonFinite";
        case Errc::FormatError: return "FormatError";
        case Errc::CoverageError: return "CoverageError";
        case Errc::OutOfRange: return "OutOfRange";
        case Errc::IoError: return "IoError";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::NoUsableRecords: return "NoUsableRecords";
        case Errc::NotTiff: return "NotTiff";
        case Errc::Truncated: return "Truncated";
        case Errc::MissingColorMatrix: return "MissingColorMatrix";
        case Errc::ZeroDenominator: return "ZeroDenominator";
        case Errc::BadMagic: return "BadMagic";
        case Errc::VersionMismatch: return "VersionMismatch";
        case Errc::StaleCache: return "StaleCache";
        case Errc::ZeroChannel: return "ZeroChannel";
        case Errc::EmptyDatabase: return "EmptyDatabase";
        case Errc::DivergedToZero: return "DivergedToZero";
        case Errc::ZeroVector: return "ZeroVector";
        case Errc::ZeroSum: return "ZeroSum";
        case Errc::RankDeficient: return "RankDeficient";
        case Errc::EmptyResults: return "EmptyResults";
    }
    return "Unknown";
}

namespace
{

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap   = Eigen::Map<RowMajor>;

void require_finite( std::span<const double> values )
{
    for ( double v : values )
    {
        if ( !std::isfinite( v ) )
            throw Error( Errc::NonFinite, "matrix entry is not finite" );
    }
}

void require_same_shape( const Matrix &a, const Matrix &b, const char *what )
{
    if ( a.rows() != b.rows() || a.cols() != b.cols() )
    {
        throw Error(
            Errc::ShapeMismatch,
            std::string( what ) + ": " + std::to_string( a.rows() ) + "x" +
                std::to_string( a.cols() ) + " vs " +
                std::to_string( b.rows() ) + "x" + std::to_string( b.cols() ) );
    }
}

} // namespace

Matrix::Matrix( std::size_t rows, std::size_t cols, double fill )
    : m_rows( rows ), m_cols( cols ), m_data( rows * cols, fill )
{
    if ( !std::isfinite( fill ) )
        throw Error( Errc::NonFinite, "matrix fill value is not finite" );
}

Matrix::Matrix( std::size_t rows, std::size_t cols, std::vector<double> data )
    : m_rows( rows ), m_cols( cols ), m_data( data.begin(), data.end() )
{
    if ( m_data.size() != rows * cols )
        throw Error( Errc::ShapeMismatch, "data length != rows * cols" );
    require_finite( m_data );
}

Matrix::Matrix( std::initializer_list<std::initializer_list<double>> rows )
{
    m_rows = rows.size();
    m_cols = m_rows ? rows.begin()->size() : 0;
    m_data.reserve( m_rows * m_cols );
    for ( const auto &r : rows )
    {
        if ( r.size() != m_cols )
            throw Error( Errc::ShapeMismatch, "ragged initializer list" );
        m_data.insert( m_data.end(), r.begin(), r.end() );
    }
    require_finite( m_data );
}

Matrix Matrix::identity( std::size_t n )
{
    Matrix m( n, n );
    for ( std::size_t i = 0; i < n; ++i )
        m( i, i ) = 1.0;
    return m;
}

Matrix Matrix::column( std::span<const double> values )
{
    return Matrix( values.size(), 1, { values.begin(), values.end() } );
}

Matrix Matrix::row( std::span<const double> values )
{
    return Matrix( 1, values.size(), { values.begin(), values.end() } );
}

std::vector<double> Matrix::col_values( std::size_t c ) const
{
    std::vector<double> out( m_rows );
    for ( std::size_t r = 0; r < m_rows; ++r )
        out[r] = ( *this )( r, c );
    return out;
}

Matrix Matrix::transposed() const
{
    Matrix t( m_cols, m_rows );
    for ( std::size_t r = 0; r < m_rows; ++r )
        for ( std::size_t c = 0; c < m_cols; ++c )
            t( c, r ) = ( *this )( r, c );
    return t;
}

Matrix &Matrix::operator+=( const Matrix &other )
{
    require_same_shape( *this, other, "operator+=" );
    for ( std::size_t i = 0; i < m_data.size(); ++i )
        m_data[i] += other.m_data[i];
    return *this;
}

Matrix &Matrix::operator-=( const Matrix &other )
{
    require_same_shape( *this, other, "operator-=" );
    for ( std::size_t i = 0; i < m_data.size(); ++i )
        m_data[i] -= other.m_data[i];
    return *this;
}

Matrix &Matrix::operator*=( double s ) noexcept
{
    for ( double &v : m_data )
        v *= s;
    return *this;
}

Matrix operator+( Matrix a, const Matrix &b ) { return a += b; }
Matrix operator-( Matrix a, const Matrix &b ) { return a -= b; }
Matrix operator*( Matrix a, double s ) { return a *= s; }
Matrix operator*( double s, Matrix a ) { return a *= s; }

Matrix matmul( const Matrix &a, const Matrix &b )
{
    if ( a.cols() != b.rows() )
    {
        throw Error(
            Errc::ShapeMismatch,
            "matmul: " + std::to_string( a.rows() ) + "x" +
                std::to_string( a.cols() ) + " * " +
                std::to_string( b.rows() ) + "x" + std::to_string( b.cols() ) );
    }
    Matrix out( a.rows(), b.cols() );
    if ( out.empty() )
        return out;
    ConstMap ma( a.data().data(), a.rows(), a.cols() );
    ConstMap mb( b.data().data(), b.rows(), b.cols() );
    MutMap   mo( out.data().data(), out.rows(), out.cols() );
    mo.noalias() = ma * mb;
    return out;
}

Matrix matmul_tn( const Matrix &a, const Matrix &b )
{
    if ( a.rows() != b.rows() )
        throw Error( Errc::ShapeMismatch, "matmul_tn: row counts differ" );
    Matrix out( a.cols(), b.cols() );
    if ( out.empty() )
        return out;
    ConstMap ma( a.data().data(), a.rows(), a.cols() );
    ConstMap mb( b.data().data(), b.rows(), b.cols() );
    MutMap   mo( out.data().data(), out.rows(), out.cols() );
    mo.noalias() = ma.transpose() * mb;
    return out;
}

double frobenius_dot( const Matrix &a, const Matrix &b )
{
    require_same_shape( a, b, "frobenius_dot" );
    double s = 0.0;
    for ( std::size_t i = 0; i < a.size(); ++i )
        s += a.data()[i] * b.data()[i];
    return s;
}

double frobenius_norm( const Matrix &a )
{
    double s = 0.0;
    for ( double v : a.data() )
        s += v * v;
    return std::sqrt( s );
}

double max_abs_diff( const Matrix &a, const Matrix &b )
{
    require_same_shape( a, b, "max_abs_diff" );
    double m = 0.0;
    for ( std::size_t i = 0; i < a.size(); ++i )
        m = std::max( m, std::abs( a.data()[i] - b.data()[i] ) );
    return m;
}

double max_entry( const Matrix &a )
{
    double m = -std::numeric_limits<double>::infinity();
    for ( double v : a.data() )
        m = std::max( m, v );
    return m;
}

double min_entry( const Matrix &a )
{
    double m = std::numeric_limits<double>::infinity();
    for ( double v : a.data() )
        m = std::min( m, v );
    return m;
}

Matrix solve( const Matrix &a, const Matrix &b )
{
    const std::size_t n = a.rows();
    if ( a.cols() != n || b.rows() != n )
        throw Error( Errc::ShapeMismatch, "solve: system is not square" );

    Matrix lhs = a;
    Matrix rhs = b;
    for ( std::size_t col = 0; col < n; ++col )
    {
        std::size_t pivot = col;
        for ( std::size_t r = col + 1; r < n; ++r )
        {
            if ( std::abs( lhs( r, col ) ) > std::abs( lhs( pivot, col ) ) )
                pivot = r;
        }
        if ( std::abs( lhs( pivot, col ) ) < 1e-14 )
            throw Error( Errc::SingularSystem, "pivot below 1e-14" );
        if ( pivot != col )
        {
            for ( std::size_t c = 0; c < n; ++c )
                std::swap( lhs( col, c ), lhs( pivot, c ) );
            for ( std::size_t c = 0; c < rhs.cols(); ++c )
                std::swap( rhs( col, c ), rhs( pivot, c ) );
        }
        for ( std::size_t r = col + 1; r < n; ++r )
        {
            const double f = lhs( r, col ) / lhs( col, col );
            if ( f == 0.0 )
                continue;
            for ( std::size_t c = col; c < n; ++c )
                lhs( r, c ) -= f * lhs( col, c );
            for ( std::size_t c = 0; c < rhs.cols(); ++c )
                rhs( r, c ) -= f * rhs( col, c );
        }
    }

    Matrix x( n, rhs.cols() );
    for ( std::size_t c = 0; c < rhs.cols(); ++c )
    {
        for ( std::size_t ri = n; ri-- > 0; )
        {
            double s = rhs( ri, c );
            for ( std::size_t k = ri + 1; k < n; ++k )
                s -= lhs( ri, k ) * x( k, c );
            x( ri, c ) = s / lhs( ri, ri );
        }
    }
    return x;
}

Matrix pseudoinverse( const Matrix &a )
{
    if ( a.rows() < a.cols() )
        throw Error( Errc::ShapeMismatch, "pseudoinverse needs rows >= cols" );
    const Matrix normal = matmul_tn( a, a );
    return solve( normal, a.transposed() );
}

namespace
{

struct Cosine
{
    double nu;
    double nv;
    double raw;
    double clamped;
};

Cosine cosine_of( const Matrix &u, const Matrix &v )
{
    require_same_shape( u, v, "angular_distance" );
    const double nu = frobenius_norm( u );
    const double nv = frobenius_norm( v );
    if ( nu == 0.0 || nv == 0.0 )
        throw Error( Errc::ZeroMatrix, "angular distance of a zero matrix" );
    const double raw = frobenius_dot( u, v ) / ( nu * nv );
    const double c =
        std::clamp( raw, -1.0 + kCosineClamp, 1.0 - kCosineClamp );
    return { nu, nv, raw, c };
}

} // namespace

double angular_distance( const Matrix &u, const Matrix &v )
{
    return std::acos( cosine_of( u, v ).clamped );
}

AngularGradient angular_distance_grad( const Matrix &u, const Matrix &v )
{
    const Cosine cs    = cosine_of( u, v );
    const double dacos = -1.0 / std::sqrt( 1.0 - cs.clamped * cs.clamped );

    // d cos / dU = V/(|U||V|) - cos U/|U|^2, and symmetrically for V.
    Matrix du( u.rows(), u.cols() );
    Matrix dv( u.rows(), u.cols() );
    const double inv_uv = 1.0 / ( cs.nu * cs.nv );
    const double cu     = cs.raw / ( cs.nu * cs.nu );
    const double cv     = cs.raw / ( cs.nv * cs.nv );
    for ( std::size_t i = 0; i < u.size(); ++i )
    {
        const double ui = u.data()[i];
        const double vi = v.data()[i];
        du.data()[i]    = dacos * ( vi * inv_uv - cu * ui );
        dv.data()[i]    = dacos * ( ui * inv_uv - cv * vi );
    }
    return { std::acos( cs.clamped ), std::move( du ), std::move( dv ) };
}

double grad_check( const ScalarFunction &f, const Matrix &x, double eps )
{
    Matrix analytic( x.rows(), x.cols() );
    f( x, &analytic );

    Matrix probe = x;
    double worst = 0.0;
    for ( std::size_t i = 0; i < x.size(); ++i )
    {
        const double orig = probe.data()[i];
        probe.data()[i]   = orig + eps;
        const double fp   = f( probe, nullptr );
        probe.data()[i]   = orig - eps;
        const double fm   = f( probe, nullptr );
        probe.data()[i]   = orig;

        const double numeric = ( fp - fm ) / ( 2.0 * eps );
        const double err     = std::abs( analytic.data()[i] - numeric ) /
                           std::max( 1.0, std::abs( numeric ) );
        worst = std::max( worst, err );
    }
    return worst;
}

} // namespace speccurve
