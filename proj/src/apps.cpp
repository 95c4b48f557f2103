// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#include "speccurve/apps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace speccurve
{

namespace
{

Rgb row_rgb( const Matrix &m, std::size_t r ) { return { m( r, 0 ), m( r, 1 ), m( r, 2 ) }; }

} // namespace

double patch_angle_norm( const Matrix &observed, const Matrix &predicted )
{
    if ( observed.rows() != predicted.rows() || observed.cols() != 3 || predicted.cols() != 3 )
        throw Error( Errc::ShapeMismatch, "observed/predicted responses" );
    double s = 0.0;
    for ( std::size_t k = 0; k < observed.rows(); ++k )
    {
        const double a = angular_rgb_error( row_rgb( observed, k ), row_rgb( predicted, k ) );
        s += a * a;
    }
    return std::sqrt( s );
}

double cct_objective( double kelvin, const Matrix &sensitivity, const Matrix &reflectances,
                      const Matrix &observed, const DaylightComponents &daylight )
{
    const auto light = illuminant_matrix( daylight_spd( kelvin, daylight ) );
    return patch_angle_norm( observed, render( reflectances, light, sensitivity ) );
}

CctResult estimate_cct( const Matrix &sensitivity, const Matrix &reflectances,
                        const Matrix &observed, const DaylightComponents &daylight )
{
    constexpr double kMin = 4000.0, kMax = 25000.0, kStep = 100.0;
    auto f = [&]( double t ) {
        return cct_objective( t, sensitivity, reflectances, observed, daylight );
    };

    CctResult best{ kMin, std::numeric_limits<double>::infinity() };
    for ( double t = kMin; t <= kMax + 0.5; t += kStep )
    {
        const double v = f( t );
        if ( v < best.objective )
            best = { t, v };
    }

    double a = std::max( kMin, best.kelvin - kStep );
    double b = std::min( kMax, best.kelvin + kStep );
    const double inv_phi = ( std::sqrt( 5.0 ) - 1.0 ) / 2.0;
    double c  = b - inv_phi * ( b - a );
    double d  = a + inv_phi * ( b - a );
    double fc = f( c ), fd = f( d );
    while ( b - a > 1.0 )
    {
        if ( fc < fd )
        {
            b  = d;
            d  = c;
            fd = fc;
            c  = b - inv_phi * ( b - a );
            fc = f( c );
        }
        else
        {
            a  = c;
            c  = d;
            fc = fd;
            d  = a + inv_phi * ( b - a );
            fd = f( d );
        }
    }
    for ( const auto cand : { CctResult{ c, fc }, CctResult{ d, fd } } )
        if ( cand.objective < best.objective )
            best = cand;
    return best;
}

Matrix interpolation_matrix( const SpectralGrid &grid, std::size_t coarse )
{
    if ( coarse < 2 )
        throw Error( Errc::InvalidArgument, "need at least two interpolation nodes" );
    Matrix       j( grid.n, coarse );
    const double span = grid.lambda_max - grid.lambda_min;
    for ( std::size_t i = 0; i < grid.n; ++i )
    {
        const double pos = ( grid.wavelength( i ) - grid.lambda_min ) / span * double( coarse - 1 );
        const auto   lo  = std::min( coarse - 2, std::size_t( std::floor( pos ) ) );
        const double t   = pos - double( lo );
        j( i, lo ) += 1.0 - t;
        j( i, lo + 1 ) += t;
    }
    return j;
}

IlluminantMatrix attenuated_light( const AttenuationProblem &p, std::span<const double> k )
{
    const Matrix interp = interpolation_matrix( p.surface.grid, p.n_hat );
    const Matrix fine   = matmul( interp, Matrix::column( k ) );
    IlluminantMatrix out = p.surface;
    for ( std::size_t i = 0; i < out.diag.size(); ++i )
        out.diag[i] *= std::exp( -fine( i, 0 ) * p.depth_m );
    return out;
}

namespace
{

/// Per-patch angles and their Jacobian (m × n_hat) with respect to K.
struct PatchResiduals
{
    std::vector<double> angles;
    Matrix              jacobian;
};

PatchResiduals attenuation_residuals( const AttenuationProblem &p, std::span<const double> k,
                                      bool with_jacobian )
{
    if ( k.size() != p.n_hat )
        throw Error( Errc::ShapeMismatch, "attenuation vector length" );
    const IlluminantMatrix light = attenuated_light( p, k );
    const Matrix predicted       = render( p.reflectances, light, p.sensitivity );

    const std::size_t m = p.observed.rows();
    const std::size_t n = light.diag.size();
    PatchResiduals    out;
    out.angles.reserve( m );
    Matrix interp;
    if ( with_jacobian )
    {
        out.jacobian = Matrix( m, p.n_hat );
        interp       = interpolation_matrix( p.surface.grid, p.n_hat );
    }
    Matrix d_fine( n, 1 );
    for ( std::size_t r = 0; r < m; ++r )
    {
        const Matrix obs  = Matrix::row( p.observed.row_span( r ) );
        const Matrix pred = Matrix::row( predicted.row_span( r ) );
        if ( frobenius_norm( obs ) == 0.0 || frobenius_norm( pred ) == 0.0 )
            throw Error( Errc::ZeroVector, "patch response is zero" );
        const auto ag = angular_distance_grad( obs, pred );
        out.angles.push_back( ag.value );
        if ( !with_jacobian )
            continue;
        // P_rc = Σ_i R_ri · l_i · S_ic, l_i = surface_i · exp(−K̂_i · y).
        for ( std::size_t i = 0; i < n; ++i )
        {
            double s = 0.0;
            for ( std::size_t c = 0; c < 3; ++c )
                s += ag.d_v( 0, c ) * p.sensitivity( i, c );
            d_fine( i, 0 ) = -p.depth_m * light.diag[i] * p.reflectances( r, i ) * s;
        }
        const Matrix d_coarse = matmul_tn( interp, d_fine );
        for ( std::size_t j = 0; j < p.n_hat; ++j )
            out.jacobian( r, j ) = d_coarse( j, 0 );
    }
    return out;
}

double norm_of( const std::vector<double> &v )
{
    double s = 0.0;
    for ( double x : v )
        s += x * x;
    return std::sqrt( s );
}

/// ∇‖a‖ = Jᵀa / ‖a‖.
std::vector<double> norm_gradient( const PatchResiduals &res, double value )
{
    std::vector<double> g( res.jacobian.cols(), 0.0 );
    if ( value == 0.0 )
        return g;
    for ( std::size_t r = 0; r < res.jacobian.rows(); ++r )
        for ( std::size_t j = 0; j < g.size(); ++j )
            g[j] += res.angles[r] / value * res.jacobian( r, j );
    return g;
}

/// Solves a small symmetric positive definite system in place (Cholesky).
bool solve_spd( Matrix a, std::vector<double> &b )
{
    const std::size_t n = b.size();
    for ( std::size_t j = 0; j < n; ++j )
    {
        double d = a( j, j );
        for ( std::size_t k = 0; k < j; ++k )
            d -= a( j, k ) * a( j, k );
        if ( !( d > 0.0 ) )
            return false;
        a( j, j ) = std::sqrt( d );
        for ( std::size_t i = j + 1; i < n; ++i )
        {
            double s = a( i, j );
            for ( std::size_t k = 0; k < j; ++k )
                s -= a( i, k ) * a( j, k );
            a( i, j ) = s / a( j, j );
        }
    }
    for ( std::size_t i = 0; i < n; ++i )
    {
        double s = b[i];
        for ( std::size_t k = 0; k < i; ++k )
            s -= a( i, k ) * b[k];
        b[i] = s / a( i, i );
    }
    for ( std::size_t i = n; i-- > 0; )
    {
        double s = b[i];
        for ( std::size_t k = i + 1; k < n; ++k )
            s -= a( k, i ) * b[k];
        b[i] = s / a( i, i );
    }
    return true;
}

} // namespace

double attenuation_objective( const AttenuationProblem &p, std::span<const double> k,
                              std::vector<double> *grad )
{
    const auto   res   = attenuation_residuals( p, k, grad != nullptr );
    const double value = norm_of( res.angles );
    if ( grad )
        *grad = norm_gradient( res, value );
    return value;
}

AttenuationResult estimate_attenuation( const AttenuationProblem &p,
                                        const AttenuationOptions &opts )
{
    if ( !( p.depth_m > 0.0 ) )
        throw Error( Errc::InvalidArgument, "depth must be positive" );
    if ( p.observed.rows() != p.reflectances.rows() )
        throw Error( Errc::ShapeMismatch, "one observed response per reflectance" );

    auto project = [&]( std::vector<double> &k ) {
        for ( double &v : k )
            v = std::clamp( v, opts.lower, opts.upper );
    };

    std::vector<double> k = opts.initial.value_or( std::vector<double>( p.n_hat, 0.0 ) );
    if ( k.size() != p.n_hat )
        throw Error( Errc::ShapeMismatch, "initial attenuation length" );
    project( k );

    // Projected Levenberg-Marquardt on the per-patch angles.
    AttenuationResult res;
    const std::size_t q   = p.n_hat;
    PatchResiduals    cur = attenuation_residuals( p, k, true );
    double            f   = norm_of( cur.angles );
    double            mu  = 1e-3;

    for ( res.iterations = 0; res.iterations < opts.max_iters; ++res.iterations )
    {
        const auto grad = norm_gradient( cur, f );
        double     pg   = 0.0;
        for ( std::size_t j = 0; j < q; ++j )
        {
            const double moved = std::clamp( k[j] - grad[j], opts.lower, opts.upper ) - k[j];
            pg += moved * moved;
        }
        if ( std::sqrt( pg ) < opts.tolerance || f == 0.0 )
        {
            res.converged = true;
            break;
        }

        Matrix              jtj( q, q );
        std::vector<double> jta( q, 0.0 );
        for ( std::size_t r = 0; r < cur.jacobian.rows(); ++r )
            for ( std::size_t i = 0; i < q; ++i )
            {
                jta[i] += cur.jacobian( r, i ) * cur.angles[r];
                for ( std::size_t j = 0; j < q; ++j )
                    jtj( i, j ) += cur.jacobian( r, i ) * cur.jacobian( r, j );
            }
        double scale = 0.0;
        for ( std::size_t i = 0; i < q; ++i )
            scale = std::max( scale, jtj( i, i ) );
        if ( scale == 0.0 )
        {
            res.converged = true;
            break;
        }

        bool accepted = false;
        while ( mu < 1e16 )
        {
            Matrix a = jtj;
            for ( std::size_t i = 0; i < q; ++i )
                a( i, i ) += mu * std::max( jtj( i, i ), 1e-12 * scale );
            std::vector<double> step( q );
            for ( std::size_t i = 0; i < q; ++i )
                step[i] = -jta[i];
            if ( solve_spd( a, step ) )
            {
                std::vector<double> trial( q );
                for ( std::size_t i = 0; i < q; ++i )
                    trial[i] = std::clamp( k[i] + step[i], opts.lower, opts.upper );
                auto         next = attenuation_residuals( p, trial, true );
                const double ft   = norm_of( next.angles );
                if ( ft < f )
                {
                    k        = std::move( trial );
                    cur      = std::move( next );
                    f        = ft;
                    mu       = std::max( mu / 3.0, 1e-12 );
                    accepted = true;
                    break;
                }
            }
            mu *= 4.0;
        }
        if ( !accepted )
        {
            res.converged = true; // no descent possible at machine precision
            break;
        }
    }

    res.k         = std::move( k );
    res.objective = f;
    return res;
}

std::vector<LocusPoint> daylight_locus( const Matrix &sensitivity,
                                        const DaylightComponents &daylight, double t_min,
                                        double t_max, std::size_t steps )
{
    if ( steps < 2 )
        throw Error( Errc::InvalidArgument, "locus needs at least two samples" );
    const Matrix            ones( 1, sensitivity.rows(), 1.0 );
    std::vector<LocusPoint> out;
    for ( std::size_t s = 0; s < steps; ++s )
    {
        const double t     = t_min + ( t_max - t_min ) * double( s ) / double( steps - 1 );
        const auto   light = illuminant_matrix( daylight_spd( t, daylight ) );
        const Matrix white = render( ones, light, sensitivity );
        const auto   rb    = chromaticity( row_rgb( white, 0 ) );
        out.push_back( { t, rb.r, rb.b } );
    }
    return out;
}

LocusClass classify_near_locus( const RbChromaticity &point,
                                const std::vector<LocusPoint> &locus, double threshold )
{
    if ( locus.size() < 2 )
        throw Error( Errc::InvalidArgument, "locus must have at least two points" );
    double best = std::numeric_limits<double>::infinity();
    for ( std::size_t i = 0; i + 1 < locus.size(); ++i )
    {
        const double ax = locus[i].r, ay = locus[i].b;
        const double dx = locus[i + 1].r - ax, dy = locus[i + 1].b - ay;
        const double len2 = dx * dx + dy * dy;
        double       t    = 0.0;
        if ( len2 > 0.0 )
            t = std::clamp( ( ( point.r - ax ) * dx + ( point.b - ay ) * dy ) / len2, 0.0, 1.0 );
        best = std::min( best, std::hypot( point.r - ( ax + t * dx ), point.b - ( ay + t * dy ) ) );
    }
    return { best <= threshold, best };
}

Matrix raw_to_raw_map( const Matrix &source, const Matrix &target, const Matrix &reflectances,
                       const std::vector<IlluminantMatrix> &lights, bool white_balance,
                       std::size_t white_patch )
{
    if ( lights.empty() )
        throw Error( Errc::InvalidArgument, "no illuminants given" );
    if ( white_balance && white_patch >= reflectances.rows() )
        throw Error( Errc::InvalidArgument, "white patch index outside the chart" );
    const std::size_t m = reflectances.rows();
    Matrix            src( m * lights.size(), 3 );
    Matrix            tgt( m * lights.size(), 3 );
    for ( std::size_t j = 0; j < lights.size(); ++j )
    {
        Matrix is = render( reflectances, lights[j], source );
        Matrix it = render( reflectances, lights[j], target );
        if ( white_balance )
        {
            for ( Matrix *block : { &is, &it } )
            {
                const Rgb white = row_rgb( *block, white_patch );
                for ( std::size_t c = 0; c < 3; ++c )
                {
                    if ( white[c] <= 0.0 )
                        throw Error( Errc::ZeroVector, "white patch response is zero" );
                    for ( std::size_t r = 0; r < m; ++r )
                        ( *block )( r, c ) /= white[c];
                }
            }
        }
        for ( std::size_t r = 0; r < m; ++r )
            for ( std::size_t c = 0; c < 3; ++c )
            {
                src( j * m + r, c ) = is( r, c );
                tgt( j * m + r, c ) = it( r, c );
            }
    }
    if ( src.rows() < 3 )
        throw Error( Errc::RankDeficient, "fewer than three stacked responses" );
    try
    {
        return matmul( pseudoinverse( src ), tgt );
    }
    catch ( const Error &e )
    {
        if ( e.code() == Errc::SingularSystem )
            throw Error( Errc::RankDeficient, "stacked source responses have rank < 3" );
        throw;
    }
}

} // namespace speccurve
