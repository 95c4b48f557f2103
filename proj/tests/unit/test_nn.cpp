// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#include <cmath>
#include <cstring>

#include "helpers.hpp"
#include "speccurve/nn.hpp"

using namespace speccurve;
using namespace speccurve::nn;
using testutil::error_code_of;
using testutil::random_matrix;

namespace
{

Mlp identity_linear( std::size_t width, std::size_t depth )
{
    std::vector<LayerSpec> spec( depth, LayerSpec{ width, width, Activation::None, 0.0 } );
    Mlp                    net = zeros( spec );
    for ( auto &l : net.layers )
        l.weight = Matrix::identity( width );
    return net;
}

double max_param_diff( const Mlp &a, const Mlp &b )
{
    double d = 0.0;
    for ( std::size_t l = 0; l < a.layers.size(); ++l )
    {
        d = std::max( d, max_abs_diff( a.layers[l].weight, b.layers[l].weight ) );
        for ( std::size_t i = 0; i < a.layers[l].bias.size(); ++i )
            d = std::max( d, std::abs( a.layers[l].bias[i] - b.layers[l].bias[i] ) );
    }
    return d;
}

double max_grad_diff( const Gradients &a, const Gradients &b )
{
    double d = 0.0;
    for ( std::size_t l = 0; l < a.size(); ++l )
    {
        d = std::max( d, max_abs_diff( a[l].weight, b[l].weight ) );
        for ( std::size_t i = 0; i < a[l].bias.size(); ++i )
            d = std::max( d, std::abs( a[l].bias[i] - b[l].bias[i] ) );
    }
    return d;
}

double sum_of_outputs( const Mlp &net, std::span<const double> x )
{
    double s = 0.0;
    for ( double v : ae_forward( net, x, Mode::eval() ).output )
        s += v;
    return s;
}

} // namespace

TEST_SUITE( "nn" )
{
    TEST_CASE( "autoencoder architecture" )
    {
        const auto spec = autoencoder_architecture( 31 );
        REQUIRE( spec.size() == 6 );
        const std::size_t dims[7] = { 93, 372, 186, 6, 186, 372, 93 };
        for ( std::size_t l = 0; l < 6; ++l )
        {
            CHECK( spec[l].in == dims[l] );
            CHECK( spec[l].out == dims[l + 1] );
        }
        CHECK( spec[2].activation == Activation::None );
        CHECK( spec[5].activation == Activation::None );
        for ( std::size_t l : { 0, 1, 3, 4 } )
            CHECK( spec[l].activation == Activation::Relu );
        CHECK( spec[0].dropout == 0.2 );
        CHECK( spec[1].dropout == 0.5 );
        CHECK( spec[4].dropout == 0.5 );
        CHECK( spec[2].dropout == 0.0 );
        CHECK( spec[3].dropout == 0.0 );
        CHECK( spec[5].dropout == 0.0 );
    }

    TEST_CASE( "uniform initialization respects the fan-in bound" )
    {
        Rng        rng( 1 );
        const auto w = make_autoencoder( 31, rng );
        CHECK( autoencoder_grid_n( w ) == 31 );
        for ( std::size_t l = 0; l < 6; ++l )
        {
            const double bound = 1.0 / std::sqrt( double( w.spec[l].in ) );
            CHECK( max_entry( w.layers[l].weight ) <= bound );
            CHECK( min_entry( w.layers[l].weight ) >= -bound );
            for ( double b : w.layers[l].bias )
                CHECK( std::abs( b ) <= bound );
        }
    }

    TEST_CASE( "zero network outputs zero" )
    {
        const Mlp net = zeros( autoencoder_architecture( 31 ) );
        Rng       rng( 2 );
        for ( const auto &mode : { Mode::eval(), Mode::training( rng ) } )
        {
            const auto x = random_matrix( 1, 93, rng );
            for ( double v : ae_forward( net, x.data(), mode ).output )
                CHECK( v == 0.0 );
        }
    }

    TEST_CASE( "eval mode is deterministic and ignores the RNG" )
    {
        Rng          rng( 3 );
        const auto   w = make_autoencoder( 31, rng );
        const Matrix x = random_matrix( 4, 93, rng );
        const Matrix a = forward( w, x, Mode::eval() );
        Rng          other( 99 );
        other.next();
        const Matrix b = forward( w, x, Mode::eval() );
        CHECK( a == b );
    }

    TEST_CASE( "inverted dropout is unbiased on a linear network" )
    {
        const std::vector<LayerSpec> spec{ { 4, 8, Activation::None, 0.5 },
                                           { 8, 3, Activation::None, 0.0 } };
        Rng          rng( 5 );
        const Mlp    net  = init_uniform( spec, rng );
        const Matrix x    = random_matrix( 1, 4, rng );
        const Matrix eval = forward( net, x, Mode::eval() );

        constexpr int draws = 10000;
        double        sum[3] = {}, sq[3] = {};
        Rng           drop( 6 );
        for ( int i = 0; i < draws; ++i )
        {
            const Matrix y = forward( net, x, Mode::training( drop ) );
            for ( int c = 0; c < 3; ++c )
            {
                sum[c] += y( 0, c );
                sq[c] += y( 0, c ) * y( 0, c );
            }
        }
        for ( int c = 0; c < 3; ++c )
        {
            const double mean = sum[c] / draws;
            const double sd   = std::sqrt( sq[c] / draws - mean * mean );
            CHECK( std::abs( mean - eval( 0, c ) ) < 5.0 * sd / std::sqrt( double( draws ) ) );
        }
    }

    TEST_CASE( "dropout keeps the stated fraction of units" )
    {
        const std::vector<LayerSpec> spec{ { 1, 2000, Activation::None, 0.2 } };
        Mlp                          net = zeros( spec );
        for ( std::size_t i = 0; i < 2000; ++i )
            net.layers[0].weight( i, 0 ) = 1.0;
        const Matrix x{ { 1.0 } };
        Rng          rng( 8 );
        for ( auto sem : { DropoutSemantics::Retention, DropoutSemantics::Drop } )
        {
            const Matrix y    = forward( net, x, Mode::training( rng, sem ) );
            const double keep = sem == DropoutSemantics::Retention ? 0.2 : 0.8;
            std::size_t  kept = 0;
            for ( double v : y.data() )
            {
                if ( v != 0.0 )
                {
                    ++kept;
                    CHECK( v == doctest::Approx( 1.0 / keep ) );
                }
            }
            CHECK( std::abs( double( kept ) / 2000.0 - keep ) < 0.05 );
        }
    }

    TEST_CASE( "single linear layer gradient by hand" )
    {
        const std::vector<LayerSpec> spec{ { 3, 2, Activation::None, 0.0 } };
        Rng                          rng( 10 );
        const Mlp                    net = init_uniform( spec, rng );
        const Matrix                 x   = random_matrix( 1, 3, rng );
        const Matrix                 t   = random_matrix( 1, 2, rng );
        ForwardCache                 cache;
        const Matrix                 y = forward( net, x, Mode::eval(), &cache );
        const Matrix                 r = y - t; // d(½‖y − t‖²)/dy
        auto                         g = zero_gradients( net );
        backward( net, cache, r, g );
        for ( std::size_t o = 0; o < 2; ++o )
        {
            CHECK( g[0].bias[o] == doctest::Approx( r( 0, o ) ).epsilon( 1e-15 ) );
            for ( std::size_t i = 0; i < 3; ++i )
                CHECK( g[0].weight( o, i ) ==
                       doctest::Approx( r( 0, o ) * x( 0, i ) ).epsilon( 1e-15 ) );
        }
    }

    TEST_CASE( "input gradient of an identity chain passes the upstream through" )
    {
        const Mlp    net = identity_linear( 5, 4 );
        Rng          rng( 12 );
        const Matrix x   = random_matrix( 1, 5, rng );
        const auto   fwd = ae_forward( net, x.data(), Mode::eval() );
        const Matrix up  = random_matrix( 1, 5, rng );
        const auto   bwd = ae_backward( net, fwd.cache, up.data() );
        for ( std::size_t i = 0; i < 5; ++i )
            CHECK( bwd.grad_input[i] == up( 0, i ) );
        CHECK( input_gradient( net, fwd.cache, up ) == up );
    }

    TEST_CASE( "autoencoder input gradient matches finite differences" )
    {
        Rng rng( 13 );
        for ( int point = 0; point < 20; ++point )
        {
            const auto           w = make_autoencoder( 31, rng );
            const ScalarFunction f = [&]( const Matrix &x, Matrix *grad ) {
                const auto fwd = ae_forward( w, x.data(), Mode::eval() );
                if ( grad )
                {
                    const std::vector<double> ones( 93, 1.0 );
                    const auto bwd = ae_backward( w, fwd.cache, ones );
                    *grad          = Matrix::row( bwd.grad_input );
                }
                double s = 0.0;
                for ( double v : fwd.output )
                    s += v;
                return s;
            };
            CHECK( grad_check( f, random_matrix( 1, 93, rng, 0.0, 1.0 ) ) < 1e-5 );
        }
    }

    TEST_CASE( "autoencoder parameter gradients match finite differences" )
    {
        Rng rng( 14 );
        for ( int point = 0; point < 20; ++point )
        {
            auto                      w = make_autoencoder( 31, rng );
            const Matrix              x = random_matrix( 1, 93, rng, 0.0, 1.0 );
            const auto                fwd = ae_forward( w, x.data(), Mode::eval() );
            const std::vector<double> ones( 93, 1.0 );
            const auto                bwd = ae_backward( w, fwd.cache, ones );
            constexpr double          eps = 1e-6;
            for ( std::size_t l = 0; l < 6; ++l )
            {
                for ( int probe = 0; probe < 5; ++probe )
                {
                    auto  &wt = w.layers[l].weight;
                    auto   i  = std::size_t( rng.uniform_int( 0, std::int64_t( wt.size() ) - 1 ) );
                    double o  = wt.data()[i];
                    wt.data()[i] = o + eps;
                    const double fp = sum_of_outputs( w, x.data() );
                    wt.data()[i]    = o - eps;
                    const double fm = sum_of_outputs( w, x.data() );
                    wt.data()[i]    = o;
                    const double num = ( fp - fm ) / ( 2 * eps );
                    CHECK( std::abs( bwd.grads[l].weight.data()[i] - num ) /
                               std::max( 1.0, std::abs( num ) ) <
                           1e-5 );

                    auto &b = w.layers[l].bias;
                    i       = std::size_t( rng.uniform_int( 0, std::int64_t( b.size() ) - 1 ) );
                    o       = b[i];
                    b[i]    = o + eps;
                    const double bp = sum_of_outputs( w, x.data() );
                    b[i]            = o - eps;
                    const double bm = sum_of_outputs( w, x.data() );
                    b[i]            = o;
                    const double bn = ( bp - bm ) / ( 2 * eps );
                    CHECK( std::abs( bwd.grads[l].bias[i] - bn ) / std::max( 1.0, std::abs( bn ) ) <
                           1e-5 );
                }
            }
        }
    }

    TEST_CASE( "backward rejects a stale cache" )
    {
        Rng          rng( 15 );
        const auto   w = make_autoencoder( 31, rng );
        ForwardCache cache;
        forward( w, random_matrix( 2, 93, rng ), Mode::eval(), &cache );
        auto g = zero_gradients( w );
        CHECK( error_code_of( [&] { backward( w, cache, Matrix( 3, 93 ), g ); } ) ==
               Errc::StaleCache );
        const auto other = make_autoencoder( 10, rng );
        auto       g2    = zero_gradients( other );
        CHECK( error_code_of( [&] { backward( other, cache, Matrix( 2, 30 ), g2 ); } ) ==
               Errc::StaleCache );
    }

    TEST_CASE( "sgd step with zero gradients and zero weights" )
    {
        TrainState st     = TrainState::start( zeros( autoencoder_architecture( 31 ) ), 0.1 );
        const Mlp  before = st.weights;
        sgd_step( st, zero_gradients( st.weights ) );
        CHECK( st.weights == before );
    }

    TEST_CASE( "first sgd step from zero momentum" )
    {
        Rng        rng( 16 );
        const auto w  = make_autoencoder( 31, rng );
        TrainState st = TrainState::start( w, 0.1 );
        auto       g  = zero_gradients( w );
        for ( auto &l : g )
        {
            for ( double &v : l.weight.data() )
                v = rng.uniform( -1, 1 );
            for ( double &v : l.bias )
                v = rng.uniform( -1, 1 );
        }
        sgd_step( st, g, { 0.5, 1e-4 } );
        for ( std::size_t l = 0; l < 6; ++l )
        {
            for ( std::size_t i = 0; i < w.layers[l].weight.size(); i += 97 )
            {
                const double w0 = w.layers[l].weight.data()[i];
                CHECK( st.weights.layers[l].weight.data()[i] ==
                       doctest::Approx( w0 - 0.1 * ( g[l].weight.data()[i] + 1e-4 * w0 ) )
                           .epsilon( 1e-14 ) );
            }
            const double b0 = w.layers[l].bias[0];
            CHECK( st.weights.layers[l].bias[0] ==
                   doctest::Approx( b0 - 0.1 * ( g[l].bias[0] + 1e-4 * b0 ) ).epsilon( 1e-14 ) );
        }
    }

    TEST_CASE( "two momentum steps with a constant gradient" )
    {
        const std::vector<LayerSpec> spec{ { 2, 2, Activation::None, 0.0 } };
        TrainState                   st = TrainState::start( zeros( spec ), 0.1 );
        auto                         g  = zero_gradients( st.weights );
        g[0].weight( 0, 1 )             = 2.0;
        sgd_step( st, g, { 0.5, 0.0 } );
        sgd_step( st, g, { 0.5, 0.0 } );
        // buf_1 = g, buf_2 = 0.5 g + g: displacement lr·g·(1 + 1.5).
        CHECK( st.weights.layers[0].weight( 0, 1 ) == doctest::Approx( -0.1 * 2.0 * 2.5 ) );
        CHECK( st.weights.layers[0].weight( 0, 0 ) == 0.0 );
    }

    TEST_CASE( "scheduler keeps the rate on strictly decreasing losses" )
    {
        Plateau p;
        double  lr = 0.1;
        for ( int i = 0; i < 10000; ++i )
            CHECK_FALSE( scheduler_update( p, lr, 100.0 - 0.01 * i, 0.5, 5 ) );
        CHECK( lr == 0.1 );
    }

    TEST_CASE( "scheduler decays once after patience plus one flat updates" )
    {
        Plateau p;
        double  lr = 0.1;
        CHECK_FALSE( scheduler_update( p, lr, 1.0, 0.5, 3 ) ); // first loss sets the best
        int decays = 0;
        for ( int i = 0; i < 4; ++i )
            decays += scheduler_update( p, lr, 1.0, 0.5, 3 );
        CHECK( decays == 1 );
        CHECK( lr == 0.05 );
        CHECK( p.patience_counter == 0 );
    }

    TEST_CASE( "plateau, improvement, plateau gives two decays" )
    {
        Plateau             p;
        double              lr = 1.0;
        std::vector<double> trace{ 1.0 };
        trace.insert( trace.end(), 4, 1.0 );
        trace.push_back( 0.5 );
        trace.insert( trace.end(), 4, 0.5 );
        int decays = 0;
        for ( double loss : trace )
            decays += scheduler_update( p, lr, loss, 0.5, 3 );
        CHECK( decays == 2 );
        CHECK( lr == 0.25 );
        // A change below the relative threshold does not count as improvement.
        Plateau q;
        double  lr2 = 1.0;
        scheduler_update( q, lr2, 1.0, 0.5, 0 );
        CHECK( scheduler_update( q, lr2, 1.0 - 1e-5, 0.5, 0 ) );
    }

    TEST_CASE( "checkpoint round trip is bit exact" )
    {
        Rng        rng( 17 );
        const auto w     = make_autoencoder( 31, rng );
        const auto bytes = checkpoint_bytes( w );
        CHECK( std::memcmp( bytes.data(), "SSAE", 4 ) == 0 );
        CHECK( bytes[4] == 1 );
        CHECK( bytes[8] == 31 );
        CHECK( bytes[12] == 6 );
        CHECK( parse_checkpoint( bytes ) == w );

        const auto dir = testutil::scratch_dir( "checkpoint" );
        save_checkpoint( w, dir / "w.ssae" );
        CHECK( load_checkpoint( dir / "w.ssae" ) == w );
    }

    TEST_CASE( "checkpoint errors" )
    {
        Rng  rng( 18 );
        auto bytes = checkpoint_bytes( make_autoencoder( 31, rng ) );
        auto bad   = bytes;
        std::memcpy( bad.data(), "XXXX", 4 );
        CHECK( error_code_of( [&] { parse_checkpoint( bad ); } ) == Errc::BadMagic );
        auto ver = bytes;
        ver[4]   = 2;
        CHECK( error_code_of( [&] { parse_checkpoint( ver ); } ) == Errc::VersionMismatch );
        auto cut = bytes;
        cut.resize( bytes.size() / 2 );
        CHECK( error_code_of( [&] { parse_checkpoint( cut ); } ) == Errc::Truncated );
        CHECK( error_code_of( [] { load_checkpoint( "/nonexistent/w.ssae" ); } ) ==
               Errc::IoError );
    }

    TEST_CASE( "batch trainer matches forward, backward and sgd_step" )
    {
        for ( auto sem : { DropoutSemantics::Retention, DropoutSemantics::Drop } )
        {
            Rng        rng( 19 );
            const auto w = make_autoencoder( 31, rng );
            TrainState a = TrainState::start( w, 0.1 );
            TrainState b = TrainState::start( w, 0.1 );
            Matrix     x = random_matrix( 19, 93, rng, 0.0, 1.0 );
            Matrix     up = random_matrix( 19, 93, rng, -1e-3, 1e-3 );
            Rng        ra( 7 ), rb( 7 );
            {
                BatchTrainer trainer( b, 19, {}, sem );
                for ( int step = 0; step < 20; ++step )
                {
                    ForwardCache cache;
                    const Matrix ya = forward( a.weights, x, Mode::training( ra, sem ), &cache );
                    auto         g  = zero_gradients( a.weights );
                    backward( a.weights, cache, up, g );
                    sgd_step( a, g );

                    const Matrix &yb = trainer.forward( x, rb );
                    CHECK( max_abs_diff( ya, yb ) < 1e-12 );
                    trainer.backward_and_step( up );
                }
                trainer.sync();
            }
            CHECK( max_param_diff( a.weights, b.weights ) < 1e-12 );
            CHECK( max_grad_diff( a.momentum, b.momentum ) < 1e-12 );
        }
    }
}
