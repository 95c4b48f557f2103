// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#include <cmath>

#include "helpers.hpp"
#include "speccurve/estimator.hpp"
#include "speccurve/metrics.hpp"
#include "speccurve/synthetic.hpp"

using namespace speccurve;
using testutil::error_code_of;

namespace
{

struct Trained
{
    SensitivityDatabase       db;
    std::vector<CameraRecord> records;
    nn::AutoencoderWeights    weights;
};

// One fully trained prior on the synthetic family, shared by the cases below.
const Trained &trained()
{
    static const Trained t = [] {
        Trained    out;
        const auto &d = bundled();
        out.db        = synthetic_database( {} );
        out.records   = synthetic_records( out.db, d.observer, bundled_calibration_lights() );
        out.weights   = train_autoencoder( out.db, {}, TrainParams{}, 11 ).weights;
        return out;
    }();
    return t;
}

SpecificSystem system_of( const CameraRecord &r )
{
    return build_specific_system( r.matrices, bundled().observer, bundled_calibration_lights() );
}

const Matrix &truth( std::size_t i )
{
    return trained().db.entries[i].sensitivity.data;
}

void check_recovery( std::size_t i )
{
    const auto &t = trained();
    const auto  r = estimate( t.records[i], t.weights, t.db.mean(), EstimatorParams{},
                              bundled().observer, bundled_calibration_lights() );
    const auto  re = relative_full_scale_error( r.sensitivity.data, truth( i ) ).re_mean;
    MESSAGE( t.db.entries[i].camera_id << ": RE " << re << " after " << r.steps << " steps" );
    CHECK( re < 0.05 );
    CHECK( max_entry( r.sensitivity.data ) == 1.0 );
    CHECK( min_entry( r.sensitivity.data ) >= 0.0 );
    CHECK( r.final_objective <= r.initial_objective );
    CHECK_FALSE( r.hit_step_cap );

    // Closer to the colour matrices than the starting point.
    const auto sys = system_of( t.records[i] );
    CHECK( objective( r.sensitivity.data, sys, t.weights, 1, 0, false ).specific <
           objective( t.db.mean(), sys, t.weights, 1, 0, false ).specific );
}

} // namespace

TEST_SUITE( "estimator" )
{
    TEST_CASE( "specific term vanishes at the generating curve" )
    {
        Rng        rng( 1 );
        const auto w = nn::make_autoencoder( 31, rng );
        for ( std::uint64_t seed = 0; seed < 10; ++seed )
        {
            SensitivityDatabase db;
            Rng                 g( seed );
            db.add( "probe cam", "test", synthetic_sensitivity( SpectralGrid{}, g ) );
            const auto recs =
                synthetic_records( db, bundled().observer, bundled_calibration_lights() );
            const auto sys = system_of( recs[0] );
            const auto v   = objective( db.entries[0].sensitivity.data, sys, w, 1e2, 0.0, false );
            // Each block bottoms out at the cosine clamp, acos(1 − 1e-12) ≈ 1.41e-6.
            const double floor = std::acos( 1.0 - 1e-12 );
            CHECK( v.specific < double( sys.size() ) * floor + 1e-8 );
        }
    }

    TEST_CASE( "objective decomposes into block angles" )
    {
        Rng          rng( 2 );
        const auto   w   = nn::make_autoencoder( 31, rng );
        const auto   db  = synthetic_database( { 3, 0, 2, SpectralGrid{} } );
        const auto   sys = system_of(
            synthetic_records( db, bundled().observer, bundled_calibration_lights() )[1] );
        const Matrix s   = testutil::random_matrix( 31, 3, rng, 0.0, 1.0 );
        const auto   v   = objective( s, sys, w, 1.0, 0.0, false );
        double       sum = 0.0;
        for ( std::size_t i = 0; i < sys.size(); ++i )
            sum += angular_distance( matmul( sys.blocks_a[i], s ), sys.blocks_b[i] );
        CHECK( v.value == doctest::Approx( sum ).epsilon( 1e-14 ) );
        CHECK( v.specific == doctest::Approx( sum ).epsilon( 1e-14 ) );

        const auto both = objective( s, sys, w, 3.0, 0.5, false );
        CHECK( both.value == doctest::Approx( 3.0 * both.specific + 0.5 * both.universal ) );
    }

    TEST_CASE( "objective gradient matches finite differences" )
    {
        Rng        rng( 3 );
        const auto db   = synthetic_database( { 4, 0, 3, SpectralGrid{} } );
        const auto recs = synthetic_records( db, bundled().observer, bundled_calibration_lights() );
        for ( int point = 0; point < 20; ++point )
        {
            const auto           w   = nn::make_autoencoder( 31, rng );
            const auto           sys = system_of( recs[std::size_t( point ) % recs.size()] );
            const ScalarFunction f   = [&]( const Matrix &s, Matrix *grad ) {
                const auto v = objective( s, sys, w, 1e2, 0.2, grad != nullptr );
                if ( grad )
                    *grad = v.grad;
                return v.value;
            };
            CHECK( grad_check( f, testutil::random_matrix( 31, 3, rng, 0.05, 1.0 ) ) < 1e-4 );
        }
    }

    TEST_CASE( "objective rejects a zero curve" )
    {
        Rng        rng( 4 );
        const auto w   = nn::make_autoencoder( 31, rng );
        const auto db  = synthetic_database( { 1, 0, 4, SpectralGrid{} } );
        const auto sys = system_of(
            synthetic_records( db, bundled().observer, bundled_calibration_lights() )[0] );
        CHECK( error_code_of( [&] { objective( Matrix( 31, 3 ), sys, w, 1.0, 1.0 ); } ) ==
               Errc::ZeroMatrix );
    }

    TEST_CASE( "in-distribution recovery" )
    {
        check_recovery( 0 );
    }

    // Stalls in a shallow region: the generating curve scores 0.036 on the
    // objective, the returned estimate about 0.18.
    TEST_CASE( "in-distribution recovery of a slow camera" * doctest::may_fail() )
    {
        check_recovery( 7 );
    }

    // Settles at about 0.058 rad with this prior, also with a lower stop_lr.
    TEST_CASE( "prior-only estimate is a near fixed point of the autoencoder" * doctest::may_fail() )
    {
        const auto     &t = trained();
        EstimatorParams p;
        p.alpha      = 0.0;
        p.beta       = 1.0;
        const auto r = estimate( system_of( t.records[3] ), t.weights, t.db.mean(), p );
        const auto v = objective( r.sensitivity.data, system_of( t.records[3] ), t.weights, 0.0,
                                  1.0, false );
        MESSAGE( "prior angle " << v.universal );
        CHECK( v.universal < 0.05 );
    }

    TEST_CASE( "estimate is invariant to the scale of the colour matrices" )
    {
        const auto &t   = trained();
        const auto  sys = system_of( t.records[5] );
        auto        big = sys;
        for ( auto &b : big.blocks_b )
            b = 10.0 * b;
        EstimatorParams p;
        p.max_steps  = 20000;
        const auto a = estimate( sys, t.weights, t.db.mean(), p );
        const auto b = estimate( big, t.weights, t.db.mean(), p );
        CHECK( max_abs_diff( a.sensitivity.data, b.sensitivity.data ) < 1e-6 );
    }

    TEST_CASE( "estimate is deterministic" )
    {
        const auto     &t = trained();
        EstimatorParams p;
        p.max_steps  = 5000;
        const auto a = estimate( system_of( t.records[2] ), t.weights, t.db.mean(), p );
        const auto b = estimate( system_of( t.records[2] ), t.weights, t.db.mean(), p );
        CHECK( a.sensitivity.data == b.sensitivity.data );
        CHECK( a.steps == b.steps );
    }

    TEST_CASE( "records without supported illuminants are rejected" )
    {
        const auto &t   = trained();
        auto        rec = t.records[0];
        for ( auto &m : rec.matrices )
            m.illuminant = Illuminant::from_code( 14 );
        CHECK( error_code_of( [&] {
                   estimate( rec, t.weights, t.db.mean(), EstimatorParams{}, bundled().observer,
                             bundled_calibration_lights() );
               } ) == Errc::NoUsableRecords );
    }
}
