// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#include "speccurve/validation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include <json.hpp>

namespace speccurve
{

std::map<std::string, CameraRecord> index_records( const std::vector<CameraRecord> &records )
{
    std::map<std::string, CameraRecord> out;
    for ( const auto &r : records )
        out.emplace( r.camera_id(), r );
    return out;
}

namespace
{

struct GroupOutcome
{
    std::vector<ValidationRow> rows;
    std::vector<std::string>   notices;
    std::vector<std::string>   trained_on;
    bool                       trained = false;
};

GroupOutcome run_group( const SensitivityDatabase                 &db,
                        const std::string                         &group,
                        std::size_t                                group_index,
                        const std::map<std::string, CameraRecord> &records,
                        const ValidationOptions                   &opts,
                        const ObserverMatrix                      &observer,
                        const CalibrationLights                   &lights )
{
    GroupOutcome out;
    const auto   members = db.members( group, opts.group_by );

    // Distinct cameras of this group that have colour matrices.
    std::vector<std::string> cameras, seen;
    for ( const auto *m : members )
    {
        if ( std::find( seen.begin(), seen.end(), m->camera_id ) != seen.end() )
            continue;
        seen.push_back( m->camera_id );
        if ( !records.contains( m->camera_id ) )
        {
            out.notices.push_back( "skipped " + m->camera_id + ": no colour matrices" );
            continue;
        }
        cameras.push_back( m->camera_id );
    }
    if ( cameras.empty() )
        return out;

    const auto trained = train_autoencoder( db, { group }, opts.train,
                                            Rng::derive( opts.seed, group_index ),
                                            opts.group_by );
    out.trained    = true;
    out.trained_on = trained.trained_ids;
    for ( const auto &id : trained.trained_ids )
    {
        if ( db.group_key( DatabaseEntry{ id, {}, {} }, opts.group_by ) == group )
            throw Error( Errc::InvalidArgument,
                         "held-out camera " + id + " leaked into training" );
    }

    const Matrix init = db.without( { group }, opts.group_by ).mean();
    for ( const auto &cam : cameras )
    {
        try
        {
            const auto est = estimate( records.at( cam ), trained.weights, init, opts.estimate,
                                       observer, lights );
            for ( const auto *m : members )
            {
                if ( m->camera_id != cam )
                    continue;
                out.rows.push_back( { group, cam, m->source,
                                      relative_full_scale_error( est.sensitivity.data,
                                                                 m->sensitivity.data ) } );
            }
        }
        catch ( const Error &e )
        {
            out.notices.push_back( "failed " + cam + ": " + e.what() );
        }
    }
    return out;
}

} // namespace

ValidationRun loov_run( const SensitivityDatabase                 &db,
                        const std::map<std::string, CameraRecord> &records,
                        const ValidationOptions                   &opts,
                        const ObserverMatrix                      &observer,
                        const CalibrationLights                   &lights )
{
    if ( db.entries.empty() )
        throw Error( Errc::EmptyDatabase, "validation database is empty" );

    const auto                groups = db.groups( opts.group_by );
    std::vector<GroupOutcome> outcomes( groups.size() );
    std::atomic<std::size_t>  next{ 0 };

    auto worker = [&]() {
        while ( true )
        {
            const std::size_t g = next.fetch_add( 1 );
            if ( g >= groups.size() )
                return;
            try
            {
                outcomes[g] =
                    run_group( db, groups[g], g, records, opts, observer, lights );
            }
            catch ( const Error &e )
            {
                outcomes[g].notices.push_back( "failed group " + groups[g] + ": " + e.what() );
            }
        }
    };

    const std::size_t        jobs = std::max<std::size_t>( 1, std::min( opts.jobs, groups.size() ) );
    std::vector<std::thread> pool;
    for ( std::size_t j = 1; j < jobs; ++j )
        pool.emplace_back( worker );
    worker();
    for ( auto &t : pool )
        t.join();

    ValidationRun run;
    for ( std::size_t g = 0; g < groups.size(); ++g )
    {
        auto &o = outcomes[g];
        run.rows.insert( run.rows.end(), o.rows.begin(), o.rows.end() );
        run.notices.insert( run.notices.end(), o.notices.begin(), o.notices.end() );
        if ( o.trained )
            run.trained_on.emplace( groups[g], std::move( o.trained_on ) );
    }
    return run;
}

ValidationSummary summarize( const std::vector<ValidationRow> &rows )
{
    if ( rows.empty() )
        throw Error( Errc::EmptyResults, "nothing to summarize" );

    auto lower_median = []( std::vector<double> v ) {
        std::sort( v.begin(), v.end() );
        return v[( v.size() - 1 ) / 2];
    };

    ValidationSummary s;
    s.count = rows.size();
    std::vector<double> means;
    for ( const auto &r : rows )
        means.push_back( r.report.re_mean );
    s.median_re = lower_median( means );
    for ( std::size_t k = 0; k < 3; ++k )
    {
        std::vector<double> ch;
        for ( const auto &r : rows )
            ch.push_back( r.report.re_per_channel[k] );
        s.per_channel_medians[k] = lower_median( ch );
    }

    std::vector<std::size_t> order( rows.size() );
    for ( std::size_t i = 0; i < order.size(); ++i )
        order[i] = i;
    std::stable_sort( order.begin(), order.end(), [&]( std::size_t a, std::size_t b ) {
        return rows[a].report.re_mean < rows[b].report.re_mean;
    } );
    s.best   = rows[order.front()].camera_id;
    s.median = rows[order[( order.size() - 1 ) / 2]].camera_id;
    s.worst  = rows[order.back()].camera_id;

    for ( const auto &r : rows )
    {
        const auto bin = std::size_t( std::floor( r.report.re_mean * 100.0 ) );
        if ( s.histogram.size() <= bin )
            s.histogram.resize( bin + 1, 0 );
        ++s.histogram[bin];
    }
    return s;
}

std::string rows_to_csv( const std::vector<ValidationRow> &rows )
{
    std::string out = "camera_id,source,re_mean,re_r,re_g,re_b\n";
    char        buf[128];
    for ( const auto &r : rows )
    {
        out += r.camera_id + "," + r.source;
        for ( double v : { r.report.re_mean, r.report.re_per_channel[0],
                           r.report.re_per_channel[1], r.report.re_per_channel[2] } )
        {
            std::snprintf( buf, sizeof buf, ",%.17g", v );
            out += buf;
        }
        out += "\n";
    }
    return out;
}

std::string summary_to_json( const ValidationSummary &s, const std::vector<std::string> &notices )
{
    nlohmann::json j;
    j["count"]               = s.count;
    j["median_re"]           = s.median_re;
    j["per_channel_medians"] = { { "r", s.per_channel_medians[0] },
                                 { "g", s.per_channel_medians[1] },
                                 { "b", s.per_channel_medians[2] } };
    j["best"]                = s.best;
    j["median"]              = s.median;
    j["worst"]               = s.worst;
    j["histogram_bin_width"] = 0.01;
    j["histogram"]           = s.histogram;
    j["notices"]             = notices;
    return j.dump( 2 ) + "\n";
}

} // namespace speccurve
