// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

// speccurve: camera spectral sensitivity from colour matrices.
//
// Exit status: 0 success, 2 usage or input error, 3 empty data, 4 numeric
// failure.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "speccurve/apps.hpp"
#include "speccurve/dng.hpp"
#include "speccurve/estimator.hpp"
#include "speccurve/prior.hpp"
#include "speccurve/records.hpp"
#include "speccurve/svg.hpp"
#include "speccurve/synthetic.hpp"
#include "speccurve/validation.hpp"

namespace fs = std::filesystem;
using json   = nlohmann::json;
using namespace speccurve;

namespace
{

constexpr int kExitOk      = 0;
constexpr int kExitInput   = 2;
constexpr int kExitEmpty   = 3;
constexpr int kExitNumeric = 4;

int exit_code_for( Errc code )
{
    switch ( code )
    {
        case Errc::EmptyDatabase:
        case Errc::EmptyResults: return kExitEmpty;
        case Errc::SingularSystem:
        case Errc::ZeroMatrix:
        case Errc::NonFinite:
        case Errc::StaleCache:
        case Errc::ZeroChannel:
        case Errc::DivergedToZero:
        case Errc::ZeroVector:
        case Errc::ZeroSum:
        case Errc::RankDeficient: return kExitNumeric;
        default: return kExitInput;
    }
}

/// Raised inside a subcommand to leave with a given status and message.
struct Exit
{
    int         code;
    std::string message;
};

void print_json( const json &j ) { std::cout << j.dump( 2 ) << "\n"; }

Matrix load_camera( const fs::path &path, const SpectralGrid &grid )
{
    const auto table = load_spectral_table( path, grid, { "r", "g", "b" } );
    return SensitivityMatrix::checked( table.values, grid ).data;
}

void write_camera( const fs::path &path, const SpectralGrid &grid, const Matrix &s )
{
    write_spectral_table( path, grid, { "r", "g", "b" }, s );
}

/// Reflectances as a spectral table (one column per patch), returned m×n.
Matrix load_reflectances( const std::string &path, const BundledData &data )
{
    if ( path.empty() )
        return data.colorchecker;
    return load_spectral_table( path, data.grid ).values.transposed();
}

/// `r,g,b` CSV, one row per patch.
Matrix load_rgb_csv( const fs::path &path )
{
    std::istringstream in( read_text_file( path ) );
    std::string        line;
    if ( !std::getline( in, line ) )
        throw Error( Errc::FormatError, path.string() + ": empty file" );
    if ( !line.empty() && line.back() == '\r' )
        line.pop_back();
    if ( line != "r,g,b" )
        throw Error( Errc::FormatError, path.string() + ": header must be r,g,b" );
    std::vector<double> values;
    std::size_t         rows = 0;
    while ( std::getline( in, line ) )
    {
        if ( !line.empty() && line.back() == '\r' )
            line.pop_back();
        if ( line.empty() )
            continue;
        std::istringstream fields( line );
        std::string        cell;
        std::size_t        cols = 0;
        while ( std::getline( fields, cell, ',' ) )
        {
            try
            {
                std::size_t used = 0;
                values.push_back( std::stod( cell, &used ) );
                if ( used != cell.size() )
                    throw std::invalid_argument( cell );
            }
            catch ( const std::exception & )
            {
                throw Error( Errc::FormatError, path.string() + ": bad number '" + cell + "'" );
            }
            ++cols;
        }
        if ( cols != 3 )
            throw Error( Errc::FormatError, path.string() + ": expected 3 fields per row" );
        ++rows;
    }
    return Matrix( rows, 3, std::move( values ) );
}

void write_rgb_csv( const fs::path &path, const Matrix &rgb )
{
    std::string out = "r,g,b\n";
    char        buf[96];
    for ( std::size_t r = 0; r < rgb.rows(); ++r )
    {
        std::snprintf( buf, sizeof buf, "%.17g,%.17g,%.17g\n", rgb( r, 0 ), rgb( r, 1 ),
                       rgb( r, 2 ) );
        out += buf;
    }
    write_text_file( path, out );
}

std::vector<double> parse_list( const std::string &text )
{
    std::vector<double> out;
    std::stringstream   ss( text );
    std::string         item;
    while ( std::getline( ss, item, ',' ) )
    {
        try
        {
            out.push_back( std::stod( item ) );
        }
        catch ( const std::exception & )
        {
            throw Error( Errc::InvalidArgument, "bad number in list: '" + item + "'" );
        }
    }
    return out;
}

std::string file_stem_for( const std::string &camera_id )
{
    std::string out;
    for ( char c : camera_id )
    {
        const auto u = static_cast<unsigned char>( c );
        out += ( std::isalnum( u ) || c == '-' || c == '.' ) ? c : '_';
    }
    return out.empty() ? "camera" : out;
}

GroupBy parse_group_by( const std::string &s )
{
    if ( s == "camera" )
        return GroupBy::Camera;
    if ( s == "brand" )
        return GroupBy::Brand;
    throw Error( Errc::InvalidArgument, "--group-by must be camera or brand" );
}

json locus_json( const std::vector<LocusPoint> &locus )
{
    json out = json::array();
    for ( const auto &p : locus )
        out.push_back( { { "kelvin", p.kelvin }, { "r", p.r }, { "b", p.b } } );
    return out;
}

struct TrainFlags
{
    TrainParams params;
    void        add( CLI::App *cmd )
    {
        cmd->add_option( "--lr", params.lr, "initial learning rate" )->capture_default_str();
        cmd->add_option( "--momentum", params.momentum )->capture_default_str();
        cmd->add_option( "--weight-decay", params.weight_decay )->capture_default_str();
        cmd->add_option( "--decay", params.scheduler_decay, "plateau decay factor" )
            ->capture_default_str();
        cmd->add_option( "--patience", params.patience )->capture_default_str();
        cmd->add_option( "--stop-lr", params.stop_lr )->capture_default_str();
        cmd->add_option( "--max-steps", params.max_steps, "hard cap, 0 for none" )
            ->capture_default_str();
        cmd->add_option( "--aug-h", params.augment.h, "lower bound of channel scaling" )
            ->capture_default_str();
        cmd->add_option( "--aug-g", params.augment.g, "maximum roll in samples" )
            ->capture_default_str();
        const std::map<std::string, nn::DropoutSemantics> dropout{
            { "retention", nn::DropoutSemantics::Retention },
            { "drop", nn::DropoutSemantics::Drop } };
        cmd->add_option( "--dropout", params.dropout, "retention or drop: how p is read" )
            ->transform( CLI::CheckedTransformer( dropout ) )
            ->default_str( "retention" );
        const std::map<std::string, RollMode> roll{ { "per-column", RollMode::PerColumn },
                                                    { "global", RollMode::Global } };
        cmd->add_option( "--roll-mode", params.augment.roll_mode, "per-column or global" )
            ->transform( CLI::CheckedTransformer( roll ) )
            ->default_str( "per-column" );
    }
};

struct EstimateFlags
{
    EstimatorParams params;
    void            add( CLI::App *cmd )
    {
        cmd->add_option( "--alpha", params.alpha )->capture_default_str();
        cmd->add_option( "--beta", params.beta )->capture_default_str();
        cmd->add_option( "--est-lr", params.lr )->capture_default_str();
        cmd->add_option( "--est-patience", params.patience )->capture_default_str();
        cmd->add_option( "--est-stop-lr", params.stop_lr )->capture_default_str();
        cmd->add_option( "--est-max-steps", params.max_steps )->capture_default_str();
    }
};

// extract --------------------------------------------------------------------

int run_extract( const std::vector<std::string> &inputs, const std::string &out )
{
    std::vector<fs::path> files;
    for ( const auto &in : inputs )
    {
        const fs::path p( in );
        if ( fs::is_directory( p ) )
        {
            std::vector<fs::path> found;
            for ( const auto &e : fs::directory_iterator( p ) )
            {
                if ( !e.is_regular_file() )
                    continue;
                std::string ext = e.path().extension().string();
                std::transform( ext.begin(), ext.end(), ext.begin(),
                                []( unsigned char c ) { return char( std::tolower( c ) ); } );
                if ( ext == ".dng" )
                    found.push_back( e.path() );
            }
            std::sort( found.begin(), found.end() );
            files.insert( files.end(), found.begin(), found.end() );
        }
        else
        {
            files.push_back( p );
        }
    }

    std::vector<CameraRecord> records;
    for ( const auto &f : files )
    {
        try
        {
            auto rec = parse_dng_file( f );
            for ( const auto &w : rec.warnings )
                std::cerr << "warning: " << f.string() << ": " << w << "\n";
            records.push_back( std::move( rec ) );
        }
        catch ( const Error &e )
        {
            std::cerr << "warning: " << f.string() << ": " << e.what() << "\n";
        }
    }
    if ( records.empty() )
        throw Exit{ kExitInput, "no usable records" };

    write_records( out, records );
    std::cerr << "extracted " << records.size() << " record(s) from " << files.size()
              << " file(s)\n";
    return kExitOk;
}

// train ----------------------------------------------------------------------

int run_train( const std::string &db_path, const std::vector<std::string> &exclude,
               const std::string &group_by, std::uint64_t seed, const std::string &out,
               const TrainParams &params )
{
    const auto db = SensitivityDatabase::load( db_path );
    std::set<std::string> keys;
    const auto            by = parse_group_by( group_by );
    for ( const auto &id : exclude )
        keys.insert( by == GroupBy::Brand ? brand_of( normalize_camera_id( id ) )
                                          : normalize_camera_id( id ) );
    const auto result = train_autoencoder( db, keys, params, seed, by );
    nn::save_checkpoint( result.weights, out );
    print_json( { { "steps", result.steps },
                  { "initial_loss", result.initial_loss },
                  { "final_loss", result.final_loss },
                  { "eval_loss", result.eval_loss },
                  { "hit_step_cap", result.hit_step_cap },
                  { "trained_on", result.trained_ids } } );
    return kExitOk;
}

// predict --------------------------------------------------------------------

int run_predict( const std::string &model, const std::string &records_path,
                 const std::string &db_path, const std::string &out_dir, bool svg,
                 const EstimatorParams &params )
{
    const auto &data    = bundled();
    const auto  weights = nn::load_checkpoint( model );
    const auto  db      = SensitivityDatabase::load( db_path, data.grid );
    if ( db.entries.empty() )
        throw Error( Errc::EmptyDatabase, "database has no entries for the initial mean" );
    const auto records = read_records( records_path );
    if ( records.empty() )
        throw Error( Errc::EmptyResults, "no records to predict" );

    const Matrix init   = db.mean();
    const auto   lights = bundled_calibration_lights();
    fs::create_directories( out_dir );

    json predicted = json::array(), skipped = json::array();
    for ( const auto &rec : records )
    {
        const std::string id = rec.camera_id();
        try
        {
            const auto est  = estimate( rec, weights, init, params, data.observer, lights );
            const auto stem = file_stem_for( id );
            write_camera( fs::path( out_dir ) / ( stem + ".csv" ), data.grid,
                          est.sensitivity.data );
            if ( svg )
                plot_svg( { { id, est.sensitivity } }, fs::path( out_dir ) / ( stem + ".svg" ) );
            predicted.push_back( { { "camera_id", id },
                                   { "file", stem + ".csv" },
                                   { "steps", est.steps },
                                   { "objective", est.final_objective } } );
        }
        catch ( const Error &e )
        {
            std::cerr << "warning: " << id << ": " << e.what() << "\n";
            skipped.push_back( { { "camera_id", id }, { "reason", e.what() } } );
        }
    }
    const json summary = { { "predicted", predicted }, { "skipped", skipped } };
    write_text_file( fs::path( out_dir ) / "summary.json", summary.dump( 2 ) + "\n" );
    print_json( summary );
    if ( predicted.empty() )
        throw Exit{ kExitInput, "no camera could be predicted" };
    return kExitOk;
}

// validate -------------------------------------------------------------------

int run_validate( const std::string &db_path, const std::string &records_path,
                  const ValidationOptions &opts, const std::string &out_dir )
{
    const auto &data    = bundled();
    const auto  db      = SensitivityDatabase::load( db_path, data.grid );
    const auto  records = index_records( read_records( records_path ) );
    const auto  run =
        loov_run( db, records, opts, data.observer, bundled_calibration_lights() );
    for ( const auto &n : run.notices )
        std::cerr << "notice: " << n << "\n";
    const auto summary = summarize( run.rows );

    fs::create_directories( out_dir );
    write_text_file( fs::path( out_dir ) / "results.csv", rows_to_csv( run.rows ) );
    const std::string sj = summary_to_json( summary, run.notices );
    write_text_file( fs::path( out_dir ) / "summary.json", sj );
    std::cout << sj;
    return kExitOk;
}

// synth ----------------------------------------------------------------------

int run_synth( const SyntheticOptions &opts, const std::string &out_dir )
{
    const auto &data = bundled();
    const auto  db   = synthetic_database( opts );
    db.save( out_dir );
    write_records( fs::path( out_dir ) / "records.json",
                   synthetic_records( db, data.observer, bundled_calibration_lights() ) );
    print_json( { { "manifest", ( fs::path( out_dir ) / "manifest.json" ).string() },
                  { "records", ( fs::path( out_dir ) / "records.json" ).string() },
                  { "entries", db.entries.size() } } );
    return kExitOk;
}

// render ---------------------------------------------------------------------

IlluminantMatrix pick_light( const std::string &illuminant, double kelvin,
                             const BundledData &data )
{
    if ( kelvin > 0.0 )
        return illuminant_matrix( daylight_spd( kelvin, data.daylight ) );
    if ( illuminant == "A" || illuminant == "a" )
        return illuminant_matrix( data.illuminant_a );
    if ( illuminant == "D65" || illuminant == "d65" )
        return illuminant_matrix( data.illuminant_d65 );
    throw Error( Errc::InvalidArgument, "illuminant must be A or D65 (or give --kelvin)" );
}

int run_render( const std::string &camera, const std::string &reflectances,
                const std::string &illuminant, double kelvin, double depth,
                const std::string &attenuation, const std::string &out )
{
    const auto &data  = bundled();
    const Matrix s    = load_camera( camera, data.grid );
    const Matrix r    = load_reflectances( reflectances, data );
    IlluminantMatrix light = pick_light( illuminant, kelvin, data );
    if ( !attenuation.empty() )
    {
        const auto k = parse_list( attenuation );
        AttenuationProblem p{ s, r, Matrix( r.rows(), 3 ), light, depth, k.size() };
        light = attenuated_light( p, k );
    }
    write_rgb_csv( out, render( r, light, s ) );
    return kExitOk;
}

// cct / kd / locus / raw2raw ---------------------------------------------------

int run_cct( const std::string &camera, const std::string &observed,
             const std::string &reflectances )
{
    const auto &data = bundled();
    const auto  res  = estimate_cct( load_camera( camera, data.grid ),
                                     load_reflectances( reflectances, data ),
                                     load_rgb_csv( observed ), data.daylight );
    print_json( { { "kelvin", res.kelvin }, { "objective", res.objective } } );
    return kExitOk;
}

int run_kd( const std::string &camera, const std::string &observed,
            const std::string &reflectances, double depth, std::size_t nodes,
            const AttenuationOptions &opts )
{
    const auto        &data = bundled();
    AttenuationProblem p{ load_camera( camera, data.grid ),
                          load_reflectances( reflectances, data ),
                          load_rgb_csv( observed ),
                          illuminant_matrix( data.illuminant_d65 ),
                          depth,
                          nodes };
    const auto res = estimate_attenuation( p, opts );
    print_json( { { "k", res.k },
                  { "objective", res.objective },
                  { "iterations", res.iterations },
                  { "converged", res.converged } } );
    return res.converged ? kExitOk : kExitNumeric;
}

int run_locus( const std::string &camera, double t_min, double t_max, std::size_t steps,
               const std::string &points_path, double threshold, const std::string &svg )
{
    const auto &data  = bundled();
    const auto  locus = daylight_locus( load_camera( camera, data.grid ), data.daylight,
                                        t_min, t_max, steps );
    json out = { { "locus", locus_json( locus ) } };
    std::vector<RbChromaticity> points;
    if ( !points_path.empty() )
    {
        const Matrix rgb     = load_rgb_csv( points_path );
        json         classes = json::array();
        for ( std::size_t i = 0; i < rgb.rows(); ++i )
        {
            const auto rb = chromaticity( { rgb( i, 0 ), rgb( i, 1 ), rgb( i, 2 ) } );
            points.push_back( rb );
            const auto c = classify_near_locus( rb, locus, threshold );
            classes.push_back( { { "r", rb.r },
                                 { "b", rb.b },
                                 { "distance", c.distance },
                                 { "on_locus", c.on_locus } } );
        }
        out["points"] = classes;
    }
    if ( !svg.empty() )
        write_text_file( svg, locus_svg( locus, points ) );
    print_json( out );
    return kExitOk;
}

int run_raw2raw( const std::string &source, const std::string &target,
                 const std::string &reflectances, const std::string &kelvins,
                 bool white_balance, std::size_t white_patch )
{
    const auto                   &data = bundled();
    std::vector<IlluminantMatrix> lights{ illuminant_matrix( data.illuminant_a ),
                                          illuminant_matrix( data.illuminant_d65 ) };
    for ( double t : parse_list( kelvins ) )
        lights.push_back( illuminant_matrix( daylight_spd( t, data.daylight ) ) );
    const Matrix m = raw_to_raw_map( load_camera( source, data.grid ),
                                     load_camera( target, data.grid ),
                                     load_reflectances( reflectances, data ), lights,
                                     white_balance, white_patch );
    json rows = json::array();
    for ( std::size_t r = 0; r < 3; ++r )
        rows.push_back( { m( r, 0 ), m( r, 1 ), m( r, 2 ) } );
    print_json( { { "matrix", rows }, { "illuminants", lights.size() } } );
    return kExitOk;
}

} // namespace

int main( int argc, char **argv )
{
    CLI::App app{ "Camera spectral sensitivity estimation from colour matrices" };
    app.require_subcommand( 1 );

    // extract
    std::vector<std::string> extract_inputs;
    std::string              extract_out;
    auto *extract = app.add_subcommand( "extract", "read colour matrices from DNG files" );
    extract->add_option( "inputs", extract_inputs, "DNG files or directories" )->required();
    extract->add_option( "--out", extract_out, "records JSON" )->required();

    // train
    std::string              train_db, train_out, train_group = "camera";
    std::vector<std::string> train_exclude;
    std::uint64_t            train_seed = 0;
    TrainFlags               train_flags;
    auto *train = app.add_subcommand( "train", "train the autoencoder prior" );
    train->add_option( "--db", train_db, "database manifest" )->required();
    train->add_option( "--exclude", train_exclude, "camera ids (or brands) to leave out" );
    train->add_option( "--group-by", train_group, "camera or brand" )->capture_default_str();
    train->add_option( "--seed", train_seed )->capture_default_str();
    train->add_option( "--out", train_out, "checkpoint path" )->required();
    train_flags.add( train );

    // predict
    std::string   pred_model, pred_records, pred_db, pred_out;
    bool          pred_svg  = false;
    std::uint64_t pred_seed = 0;
    EstimateFlags pred_flags;
    auto *predict = app.add_subcommand( "predict", "estimate sensitivities for records" );
    predict->add_option( "--model", pred_model, "checkpoint" )->required();
    predict->add_option( "--records", pred_records, "records JSON" )->required();
    predict->add_option( "--db", pred_db, "database manifest (initial mean)" )->required();
    predict->add_option( "--out", pred_out, "output directory" )->required();
    predict->add_flag( "--svg", pred_svg, "also write one plot per camera" );
    predict->add_option( "--seed", pred_seed, "accepted for reproducible scripts" );
    pred_flags.add( predict );

    // validate
    std::string       val_db, val_records, val_out, val_group = "camera";
    ValidationOptions val_opts;
    TrainFlags        val_train;
    EstimateFlags     val_est;
    auto *validate = app.add_subcommand( "validate", "leave-one-out validation" );
    validate->add_option( "--db", val_db, "database manifest" )->required();
    validate->add_option( "--records", val_records, "records JSON" )->required();
    validate->add_option( "--seed", val_opts.seed )->capture_default_str();
    validate->add_option( "--jobs", val_opts.jobs, "worker threads" )
        ->capture_default_str()
        ->check( CLI::PositiveNumber );
    validate->add_option( "--group-by", val_group, "camera or brand" )->capture_default_str();
    validate->add_option( "--out", val_out, "output directory" )->required();
    val_train.add( validate );
    val_est.add( validate );

    // synth
    SyntheticOptions synth_opts;
    std::string      synth_out;
    auto *synth = app.add_subcommand( "synth", "write a synthetic database and records" );
    synth->add_option( "--cameras", synth_opts.cameras )->capture_default_str();
    synth->add_option( "--duplicates", synth_opts.duplicates )->capture_default_str();
    synth->add_option( "--seed", synth_opts.seed )->capture_default_str();
    synth->add_option( "--out", synth_out, "output directory" )->required();

    // render
    std::string render_camera, render_refl, render_illum = "D65", render_k, render_out;
    double      render_kelvin = 0.0, render_depth = 1.0;
    auto *render_cmd = app.add_subcommand( "render", "camera responses to a chart" );
    render_cmd->add_option( "--camera", render_camera, "wavelength_nm,r,g,b CSV" )->required();
    render_cmd->add_option( "--reflectances", render_refl, "default: bundled ColorChecker" );
    render_cmd->add_option( "--illuminant", render_illum, "A or D65" )->capture_default_str();
    render_cmd->add_option( "--kelvin", render_kelvin, "daylight CCT instead of --illuminant" );
    render_cmd->add_option( "--depth", render_depth, "metres of water" )->capture_default_str();
    render_cmd->add_option( "--attenuation", render_k, "comma separated coarse K values" );
    render_cmd->add_option( "--out", render_out, "r,g,b CSV" )->required();

    // cct
    std::string cct_camera, cct_obs, cct_refl;
    auto *cct = app.add_subcommand( "cct", "daylight CCT from chart responses" );
    cct->add_option( "--camera", cct_camera )->required();
    cct->add_option( "--observed", cct_obs, "r,g,b CSV" )->required();
    cct->add_option( "--reflectances", cct_refl );

    // kd
    std::string        kd_camera, kd_obs, kd_refl;
    double             kd_depth = 1.0;
    std::size_t        kd_nodes = 10;
    AttenuationOptions kd_opts;
    auto *kd = app.add_subcommand( "kd", "diffuse attenuation from chart responses" );
    kd->add_option( "--camera", kd_camera )->required();
    kd->add_option( "--observed", kd_obs, "r,g,b CSV" )->required();
    kd->add_option( "--reflectances", kd_refl );
    kd->add_option( "--depth", kd_depth, "metres" )->required();
    kd->add_option( "--nodes", kd_nodes )->capture_default_str();
    kd->add_option( "--lower", kd_opts.lower )->capture_default_str();
    kd->add_option( "--upper", kd_opts.upper )->capture_default_str();
    kd->add_option( "--max-iters", kd_opts.max_iters )->capture_default_str();

    // locus
    std::string locus_camera, locus_points, locus_svg_path;
    double      locus_tmin = 4000, locus_tmax = 25000, locus_threshold = 0.01;
    std::size_t locus_steps = 64;
    auto *locus = app.add_subcommand( "locus", "daylight locus in camera chromaticity" );
    locus->add_option( "--camera", locus_camera )->required();
    locus->add_option( "--t-min", locus_tmin )->capture_default_str();
    locus->add_option( "--t-max", locus_tmax )->capture_default_str();
    locus->add_option( "--steps", locus_steps )->capture_default_str();
    locus->add_option( "--points", locus_points, "r,g,b CSV of illuminant responses" );
    locus->add_option( "--threshold", locus_threshold )->capture_default_str();
    locus->add_option( "--svg", locus_svg_path );

    // raw2raw
    std::string r2r_src, r2r_tgt, r2r_refl, r2r_kelvins = "5003,5503,7504";
    bool        r2r_wb    = false;
    std::size_t r2r_white = 18;
    auto *raw2raw = app.add_subcommand( "raw2raw", "3x3 map between two cameras" );
    raw2raw->add_option( "--source", r2r_src )->required();
    raw2raw->add_option( "--target", r2r_tgt )->required();
    raw2raw->add_option( "--reflectances", r2r_refl );
    raw2raw->add_option( "--kelvin", r2r_kelvins, "daylights added to A and D65" )
        ->capture_default_str();
    raw2raw->add_flag( "--white-balance", r2r_wb );
    raw2raw->add_option( "--white-patch", r2r_white, "0-based patch index" )
        ->capture_default_str();

    try
    {
        app.parse( argc, argv );
    }
    catch ( const CLI::CallForHelp &e )
    {
        return app.exit( e );
    }
    catch ( const CLI::CallForAllHelp &e )
    {
        return app.exit( e );
    }
    catch ( const CLI::ParseError &e )
    {
        app.exit( e );
        return kExitInput;
    }

    try
    {
        if ( *extract )
            return run_extract( extract_inputs, extract_out );
        if ( *train )
            return run_train( train_db, train_exclude, train_group, train_seed, train_out,
                              train_flags.params );
        if ( *predict )
            return run_predict( pred_model, pred_records, pred_db, pred_out, pred_svg,
                                pred_flags.params );
        if ( *validate )
        {
            val_opts.group_by = parse_group_by( val_group );
            val_opts.train    = val_train.params;
            val_opts.estimate = val_est.params;
            return run_validate( val_db, val_records, val_opts, val_out );
        }
        if ( *synth )
            return run_synth( synth_opts, synth_out );
        if ( *render_cmd )
            return run_render( render_camera, render_refl, render_illum, render_kelvin,
                               render_depth, render_k, render_out );
        if ( *cct )
            return run_cct( cct_camera, cct_obs, cct_refl );
        if ( *kd )
            return run_kd( kd_camera, kd_obs, kd_refl, kd_depth, kd_nodes, kd_opts );
        if ( *locus )
            return run_locus( locus_camera, locus_tmin, locus_tmax, locus_steps, locus_points,
                              locus_threshold, locus_svg_path );
        if ( *raw2raw )
            return run_raw2raw( r2r_src, r2r_tgt, r2r_refl, r2r_kelvins, r2r_wb, r2r_white );
    }
    catch ( const Exit &e )
    {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    }
    catch ( const Error &e )
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for( e.code() );
    }
    catch ( const std::filesystem::filesystem_error &e )
    {
        std::cerr << "error: IoError: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
