// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#include "speccurve/prior.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <json.hpp>

#include "speccurve/dng.hpp"
#include "speccurve/records.hpp"

namespace speccurve
{

std::string brand_of( const std::string &camera_id )
{
    return camera_id.substr( 0, camera_id.find( ' ' ) );
}

void SensitivityDatabase::add( std::string camera_id, std::string source, Matrix sensitivity )
{
    auto         s   = SensitivityMatrix::checked( std::move( sensitivity ), grid );
    const double top = max_entry( s.data );
    s.data *= 1.0 / top;
    entries.push_back( { normalize_camera_id( camera_id ), std::move( source ), std::move( s ) } );
}

std::string SensitivityDatabase::group_key( const DatabaseEntry &e, GroupBy by ) const
{
    return by == GroupBy::Brand ? brand_of( e.camera_id ) : e.camera_id;
}

std::vector<std::string> SensitivityDatabase::groups( GroupBy by ) const
{
    std::vector<std::string> out;
    for ( const auto &e : entries )
    {
        auto key = group_key( e, by );
        if ( std::find( out.begin(), out.end(), key ) == out.end() )
            out.push_back( std::move( key ) );
    }
    return out;
}

std::vector<const DatabaseEntry *> SensitivityDatabase::members( const std::string &key,
                                                                 GroupBy            by ) const
{
    std::vector<const DatabaseEntry *> out;
    for ( const auto &e : entries )
        if ( group_key( e, by ) == key )
            out.push_back( &e );
    return out;
}

SensitivityDatabase SensitivityDatabase::without( const std::set<std::string> &keys,
                                                  GroupBy                      by ) const
{
    SensitivityDatabase out{ grid, {} };
    for ( const auto &e : entries )
        if ( !keys.contains( group_key( e, by ) ) )
            out.entries.push_back( e );
    return out;
}

Matrix SensitivityDatabase::mean() const
{
    if ( entries.empty() )
        throw Error( Errc::EmptyDatabase, "mean of an empty database" );
    Matrix m( grid.n, 3 );
    for ( const auto &e : entries )
        m += e.sensitivity.data;
    m *= 1.0 / double( entries.size() );
    return m;
}

SensitivityDatabase SensitivityDatabase::load( const std::filesystem::path &manifest,
                                               const SpectralGrid          &grid )
{
    using nlohmann::json;
    json doc;
    try
    {
        doc = json::parse( read_text_file( manifest ) );
    }
    catch ( const json::exception &e )
    {
        throw Error( Errc::FormatError, manifest.string() + ": " + e.what() );
    }

    SensitivityDatabase db{ grid, {} };
    const auto          base = manifest.parent_path();
    try
    {
        for ( const auto &j : doc.at( "entries" ) )
        {
            const auto table = load_spectral_table( base / j.at( "file" ).get<std::string>(),
                                                    grid, { "r", "g", "b" } );
            db.add( j.at( "camera_id" ).get<std::string>(), j.value( "source", "" ),
                    table.values );
        }
    }
    catch ( const json::exception &e )
    {
        throw Error( Errc::FormatError, manifest.string() + ": " + e.what() );
    }
    return db;
}

namespace
{

std::string file_stem_for( const std::string &id, std::size_t index )
{
    std::string stem;
    for ( char c : id )
        stem.push_back( std::isalnum( static_cast<unsigned char>( c ) ) ? c : '_' );
    return std::to_string( index ) + "_" + stem;
}

} // namespace

void SensitivityDatabase::save( const std::filesystem::path &dir,
                                const std::string           &manifest_name ) const
{
    using nlohmann::json;
    std::filesystem::create_directories( dir );
    json arr = json::array();
    for ( std::size_t i = 0; i < entries.size(); ++i )
    {
        const auto &e    = entries[i];
        const auto  file = file_stem_for( e.camera_id, i ) + ".csv";
        write_spectral_table( dir / file, grid, { "r", "g", "b" }, e.sensitivity.data );
        arr.push_back( { { "camera_id", e.camera_id }, { "source", e.source }, { "file", file } } );
    }
    write_text_file( dir / manifest_name, json{ { "entries", arr } }.dump( 2 ) + "\n" );
}

std::vector<double> flatten_channels( const Matrix &s )
{
    const std::size_t   n = s.rows();
    std::vector<double> x( 3 * n );
    for ( std::size_t k = 0; k < 3; ++k )
        for ( std::size_t i = 0; i < n; ++i )
            x[k * n + i] = s( i, k );
    return x;
}

Matrix unflatten_channels( std::span<const double> x, std::size_t n )
{
    if ( x.size() != 3 * n )
        throw Error( Errc::ShapeMismatch, "flattened sensitivity length" );
    Matrix s( n, 3 );
    for ( std::size_t k = 0; k < 3; ++k )
        for ( std::size_t i = 0; i < n; ++i )
            s( i, k ) = x[k * n + i];
    return s;
}

namespace
{

/// Row that column i of the roll matrix maps to.
std::vector<std::size_t> draw_targets( std::size_t n, int g, RollMode mode, Rng &rng )
{
    if ( g < 0 || std::size_t( g ) >= n )
        throw Error( Errc::InvalidArgument, "roll radius g must satisfy 0 <= g < n" );
    std::vector<std::size_t> target( n );
    const std::int64_t       shared = mode == RollMode::Global ? rng.uniform_int( -g, g ) : 0;
    for ( std::size_t i = 0; i < n; ++i )
    {
        const std::int64_t u = mode == RollMode::Global ? shared : rng.uniform_int( -g, g );
        const std::int64_t r = ( std::int64_t( i ) + u ) % std::int64_t( n );
        target[i]            = std::size_t( r < 0 ? r + std::int64_t( n ) : r );
    }
    return target;
}

} // namespace

Matrix draw_roll_matrix( std::size_t n, int g, RollMode mode, Rng &rng )
{
    Matrix     gm( n, n );
    const auto target = draw_targets( n, g, mode, rng );
    for ( std::size_t i = 0; i < n; ++i )
        gm( target[i], i ) = 1.0;
    return gm;
}

Matrix augment( const Matrix &s, const AugmentParams &p, Rng &rng )
{
    if ( !( p.h > 0.0 && p.h <= 1.0 ) )
        throw Error( Errc::InvalidArgument, "scale floor h must lie in (0, 1]" );
    double scale[3];
    for ( double &c : scale )
        c = rng.uniform( p.h, 1.0 );
    const auto target = draw_targets( s.rows(), p.g, p.roll_mode, rng );

    Matrix out( s.rows(), 3 );
    for ( std::size_t i = 0; i < s.rows(); ++i )
        for ( std::size_t k = 0; k < 3; ++k )
            out( target[i], k ) += s( i, k );
    for ( std::size_t i = 0; i < s.rows(); ++i )
        for ( std::size_t k = 0; k < 3; ++k )
            out( i, k ) *= scale[k];
    return out;
}

namespace
{

std::array<double, 3> channel_norms( const Matrix &u )
{
    std::array<double, 3> norms{};
    for ( std::size_t k = 0; k < 3; ++k )
    {
        double s = 0.0;
        for ( std::size_t i = 0; i < u.rows(); ++i )
            s += u( i, k ) * u( i, k );
        norms[k] = std::sqrt( s );
        if ( norms[k] == 0.0 )
            throw Error( Errc::ZeroChannel, "reference channel has zero norm" );
    }
    return norms;
}

} // namespace

double delta_metric( const Matrix &u, const Matrix &v )
{
    return delta_metric_grad( u, v ).value;
}

DeltaGradient delta_metric_grad( const Matrix &u, const Matrix &v )
{
    if ( u.rows() != v.rows() || u.cols() != 3 || v.cols() != 3 )
        throw Error( Errc::ShapeMismatch, "delta metric expects two n x 3 matrices" );
    const auto norms = channel_norms( u );
    double     total = 0.0;
    for ( std::size_t i = 0; i < u.rows(); ++i )
        for ( std::size_t k = 0; k < 3; ++k )
        {
            const double d = ( u( i, k ) - v( i, k ) ) / norms[k];
            total += d * d;
        }
    const double value = std::sqrt( total );

    Matrix grad( u.rows(), 3 );
    if ( value > 0.0 )
    {
        for ( std::size_t i = 0; i < u.rows(); ++i )
            for ( std::size_t k = 0; k < 3; ++k )
                grad( i, k ) = ( v( i, k ) - u( i, k ) ) / ( norms[k] * norms[k] * value );
    }
    return { value, std::move( grad ) };
}

double reconstruction_loss( const nn::AutoencoderWeights      &w,
                            const std::vector<const Matrix *> &curves )
{
    if ( curves.empty() )
        throw Error( Errc::EmptyDatabase, "no curves to evaluate" );
    const std::size_t n = curves.front()->rows();
    Matrix            x( curves.size(), 3 * n );
    for ( std::size_t b = 0; b < curves.size(); ++b )
    {
        const auto flat = flatten_channels( *curves[b] );
        std::copy( flat.begin(), flat.end(), x.row_span( b ).begin() );
    }
    const Matrix y    = nn::forward( w, x, nn::Mode::eval() );
    double       loss = 0.0;
    for ( std::size_t b = 0; b < curves.size(); ++b )
        loss += delta_metric( *curves[b], unflatten_channels( y.row_span( b ), n ) );
    return loss / double( curves.size() );
}

TrainResult train_autoencoder( const SensitivityDatabase   &db,
                               const std::set<std::string> &exclude,
                               const TrainParams           &params,
                               std::uint64_t                seed,
                               GroupBy                      by )
{
    const SensitivityDatabase train = db.without( exclude, by );
    if ( train.entries.empty() )
        throw Error( Errc::EmptyDatabase, "no training curves left after exclusion" );

    const std::size_t n     = db.grid.n;
    const std::size_t batch = train.entries.size();

    Rng init_rng( Rng::derive( seed, 0 ) );
    Rng augment_rng( Rng::derive( seed, 1 ) );
    Rng dropout_rng( Rng::derive( seed, 2 ) );

    TrainResult result;
    for ( const auto &e : train.entries )
        result.trained_ids.push_back( e.camera_id );

    auto state = nn::TrainState::start( nn::make_autoencoder( n, init_rng ), params.lr );
    nn::BatchTrainer trainer( state, batch, { params.momentum, params.weight_decay },
                              params.dropout );

    Matrix              x( batch, 3 * n );
    Matrix              upstream( batch, 3 * n );
    std::vector<Matrix> inputs( batch );

    while ( true )
    {
        for ( std::size_t b = 0; b < batch; ++b )
        {
            inputs[b]       = augment( train.entries[b].sensitivity.data, params.augment,
                                       augment_rng );
            const auto flat = flatten_channels( inputs[b] );
            std::copy( flat.begin(), flat.end(), x.row_span( b ).begin() );
        }

        const Matrix &y    = trainer.forward( x, dropout_rng );
        double       loss = 0.0;
        for ( std::size_t b = 0; b < batch; ++b )
        {
            const auto d = delta_metric_grad( inputs[b], unflatten_channels( y.row_span( b ), n ) );
            loss += d.value;
            const auto flat = flatten_channels( d.d_v );
            auto       row  = upstream.row_span( b );
            for ( std::size_t i = 0; i < flat.size(); ++i )
                row[i] = flat[i] / double( batch );
        }
        loss /= double( batch );
        if ( !std::isfinite( loss ) )
            throw Error( Errc::NonFinite, "training loss diverged" );

        trainer.backward_and_step( upstream );
        nn::scheduler_update( state, loss, params.scheduler_decay, params.patience,
                              params.threshold );

        if ( result.steps == 0 )
            result.initial_loss = loss;
        result.final_loss = loss;
        ++result.steps;

        if ( state.lr < params.stop_lr )
            break;
        if ( params.max_steps && result.steps >= params.max_steps )
        {
            result.hit_step_cap = true;
            break;
        }
    }

    trainer.sync();

    std::vector<const Matrix *> curves;
    for ( const auto &e : train.entries )
        curves.push_back( &e.sensitivity.data );
    result.eval_loss = reconstruction_loss( state.weights, curves );
    result.weights   = std::move( state.weights );
    return result;
}

} // namespace speccurve
