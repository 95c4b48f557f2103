// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#include "speccurve/nn.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <Eigen/Core>

namespace speccurve::nn
{

namespace
{

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap   = Eigen::Map<RowMajor>;
using ConstVec = Eigen::Map<const Eigen::RowVectorXd>;
using MutVec   = Eigen::Map<Eigen::RowVectorXd>;

ConstMap view( const Matrix &m ) { return { m.data().data(), Eigen::Index( m.rows() ), Eigen::Index( m.cols() ) }; }
MutMap   view( Matrix &m ) { return { m.data().data(), Eigen::Index( m.rows() ), Eigen::Index( m.cols() ) }; }

double keep_probability( const LayerSpec &s, DropoutSemantics semantics )
{
    return semantics == DropoutSemantics::Retention ? s.dropout : 1.0 - s.dropout;
}

} // namespace

bool Mlp::operator==( const Mlp &other ) const
{
    if ( layers.size() != other.layers.size() || spec.size() != other.spec.size() )
        return false;
    for ( std::size_t l = 0; l < spec.size(); ++l )
    {
        const auto &a = spec[l];
        const auto &b = other.spec[l];
        if ( a.in != b.in || a.out != b.out || a.activation != b.activation ||
             a.dropout != b.dropout )
            return false;
        if ( !( layers[l].weight == other.layers[l].weight ) ||
             layers[l].bias != other.layers[l].bias )
            return false;
    }
    return true;
}

std::vector<LayerSpec> autoencoder_architecture( std::size_t grid_n )
{
    const std::size_t n = 3 * grid_n;
    return {
        { n, 4 * n, Activation::Relu, 0.2 },
        { 4 * n, 2 * n, Activation::Relu, 0.5 },
        { 2 * n, 6, Activation::None, 0.0 },
        { 6, 2 * n, Activation::Relu, 0.0 },
        { 2 * n, 4 * n, Activation::Relu, 0.5 },
        { 4 * n, n, Activation::None, 0.0 },
    };
}

Mlp zeros( std::vector<LayerSpec> spec )
{
    Mlp net;
    for ( const auto &s : spec )
        net.layers.push_back( { Matrix( s.out, s.in ), AlignedVector( s.out, 0.0 ) } );
    net.spec = std::move( spec );
    return net;
}

Mlp init_uniform( std::vector<LayerSpec> spec, Rng &rng )
{
    Mlp net = zeros( std::move( spec ) );
    for ( std::size_t l = 0; l < net.spec.size(); ++l )
    {
        const double bound = 1.0 / std::sqrt( double( net.spec[l].in ) );
        for ( double &w : net.layers[l].weight.data() )
            w = rng.uniform( -bound, bound );
        for ( double &b : net.layers[l].bias )
            b = rng.uniform( -bound, bound );
    }
    return net;
}

AutoencoderWeights make_autoencoder( std::size_t grid_n, Rng &rng )
{
    return init_uniform( autoencoder_architecture( grid_n ), rng );
}

std::size_t autoencoder_grid_n( const AutoencoderWeights &w ) { return w.input_size() / 3; }

Matrix forward( const Mlp &net, const Matrix &x, const Mode &mode, ForwardCache *cache )
{
    if ( x.cols() != net.input_size() )
        throw Error( Errc::ShapeMismatch, "network input width" );
    if ( mode.train && !mode.rng )
        throw Error( Errc::InvalidArgument, "training mode needs an RNG" );

    const std::size_t batch = x.rows();
    if ( cache )
    {
        cache->inputs.clear();
        cache->outputs.clear();
        cache->masks.clear();
        cache->batch = batch;
    }

    Matrix current = x;
    for ( std::size_t l = 0; l < net.spec.size(); ++l )
    {
        const LayerSpec &s = net.spec[l];
        const Linear    &p = net.layers[l];
        Matrix           y( batch, s.out );
        auto             my = view( y );
        my.noalias()        = view( current ) * view( p.weight ).transpose();
        my.rowwise() += ConstVec( p.bias.data(), Eigen::Index( s.out ) );
        if ( s.activation == Activation::Relu )
            my = my.cwiseMax( 0.0 );

        Matrix mask;
        if ( mode.train && s.dropout > 0.0 )
        {
            const double keep  = keep_probability( s, mode.semantics );
            const double scale = keep > 0.0 ? 1.0 / keep : 0.0;
            mask               = Matrix( batch, s.out );
            for ( double &m : mask.data() )
                m = mode.rng->uniform() < keep ? scale : 0.0;
        }

        if ( cache )
        {
            cache->inputs.push_back( std::move( current ) );
            cache->outputs.push_back( y );
        }
        if ( !mask.empty() )
            view( y ) = view( y ).cwiseProduct( view( mask ) );
        if ( cache )
            cache->masks.push_back( std::move( mask ) );
        current = std::move( y );
    }
    return current;
}

Gradients zero_gradients( const Mlp &net ) { return zeros( net.spec ).layers; }

namespace
{

Matrix backprop( const Mlp &net, const ForwardCache &cache, const Matrix &upstream,
                 Gradients *grads )
{
    const std::size_t depth = net.spec.size();
    if ( cache.inputs.size() != depth || cache.outputs.size() != depth ||
         cache.masks.size() != depth || ( grads && grads->size() != depth ) ||
         upstream.rows() != cache.batch || upstream.cols() != net.output_size() )
    {
        throw Error( Errc::StaleCache, "forward cache does not match this backward call" );
    }

    Matrix g = upstream;
    for ( std::size_t l = depth; l-- > 0; )
    {
        const LayerSpec &s = net.spec[l];
        if ( cache.inputs[l].cols() != s.in || cache.outputs[l].cols() != s.out ||
             ( grads && ( ( *grads )[l].weight.rows() != s.out ||
                          ( *grads )[l].weight.cols() != s.in ) ) )
            throw Error( Errc::StaleCache, "layer shape changed since forward" );

        auto mg = view( g );
        if ( !cache.masks[l].empty() )
            mg = mg.cwiseProduct( view( cache.masks[l] ) );
        if ( s.activation == Activation::Relu )
        {
            const auto out = view( cache.outputs[l] );
            mg             = ( out.array() > 0.0 ).select( mg, 0.0 );
        }
        if ( grads )
        {
            view( ( *grads )[l].weight ).noalias() += mg.transpose() * view( cache.inputs[l] );
            MutVec( ( *grads )[l].bias.data(), Eigen::Index( s.out ) ) += mg.colwise().sum();
        }

        Matrix gin( cache.batch, s.in );
        view( gin ).noalias() = mg * view( net.layers[l].weight );
        g                     = std::move( gin );
    }
    return g;
}

} // namespace

Matrix backward( const Mlp &net, const ForwardCache &cache, const Matrix &upstream,
                 Gradients &grads )
{
    return backprop( net, cache, upstream, &grads );
}

Matrix input_gradient( const Mlp &net, const ForwardCache &cache, const Matrix &upstream )
{
    return backprop( net, cache, upstream, nullptr );
}

VectorForward ae_forward( const Mlp &net, std::span<const double> x, const Mode &mode )
{
    VectorForward out;
    const Matrix  y = forward( net, Matrix::row( x ), mode, &out.cache );
    out.output.assign( y.data().begin(), y.data().end() );
    return out;
}

VectorBackward ae_backward( const Mlp &net, const ForwardCache &cache,
                            std::span<const double> upstream )
{
    VectorBackward out{ zero_gradients( net ), {} };
    const Matrix   gin = backward( net, cache, Matrix::row( upstream ), out.grads );
    out.grad_input.assign( gin.data().begin(), gin.data().end() );
    return out;
}

TrainState TrainState::start( Mlp weights, double lr )
{
    TrainState st;
    st.momentum = zero_gradients( weights );
    st.weights  = std::move( weights );
    st.lr       = lr;
    return st;
}

void sgd_step( TrainState &state, const Gradients &grads, const SgdParams &params )
{
    auto &layers = state.weights.layers;
    if ( grads.size() != layers.size() || state.momentum.size() != layers.size() )
        throw Error( Errc::ShapeMismatch, "gradient/weight layer count" );

    auto update = [&]( std::span<double> w, std::span<const double> g,
                       std::span<double> buf ) {
        if ( w.size() != g.size() || w.size() != buf.size() )
            throw Error( Errc::ShapeMismatch, "gradient/weight shape" );
        for ( std::size_t i = 0; i < w.size(); ++i )
        {
            const double gi = g[i] + params.weight_decay * w[i];
            buf[i]          = params.momentum * buf[i] + gi;
            w[i] -= state.lr * buf[i];
        }
    };
    for ( std::size_t l = 0; l < layers.size(); ++l )
    {
        update( layers[l].weight.data(), grads[l].weight.data(),
                state.momentum[l].weight.data() );
        update( layers[l].bias, grads[l].bias, state.momentum[l].bias );
    }
}

namespace
{

/// For every unit of a layer output, the samples in which it is alive: kept
/// by dropout and, after a ReLU, positive. Dead entries are exactly zero and
/// carry no gradient.
struct Incidence
{
    std::vector<std::uint32_t> sample;
    std::vector<std::uint32_t> offset; // units + 1
};

struct LayerWork
{
    bool      transposed = false; // weights held as in × out
    bool      sparse_out = false;
    RowMajor  wt, mt;             // transposed weights and momentum
    RowMajor  input;              // post-dropout input of this layer
    RowMajor  output;             // post-activation, pre-dropout
    RowMajor  mask;
    Incidence alive;
};

} // namespace

struct BatchTrainer::Impl
{
    TrainState                &state;
    SgdParams                  params;
    DropoutSemantics           semantics;
    std::size_t                batch;
    std::vector<LayerWork>     layers;
    RowMajor                   g, gin;
    Eigen::MatrixXd            scan;
    Matrix                     result;
    std::vector<std::uint64_t> draws;

    void sync()
    {
        for ( std::size_t l = 0; l < layers.size(); ++l )
        {
            if ( !layers[l].transposed )
                continue;
            view( state.weights.layers[l].weight ) = layers[l].wt.transpose();
            view( state.momentum[l].weight )       = layers[l].mt.transpose();
        }
    }
};

BatchTrainer::BatchTrainer( TrainState &state, std::size_t batch, const SgdParams &params,
                            DropoutSemantics semantics )
    : m_impl( new Impl{ state, params, semantics, batch, {}, {}, {}, {}, {}, {} } )
{
    const auto &spec = state.weights.spec;
    if ( state.momentum.size() != spec.size() )
        throw Error( Errc::ShapeMismatch, "momentum buffers do not match the network" );
    m_impl->layers.resize( spec.size() );
    for ( std::size_t l = 0; l < spec.size(); ++l )
    {
        const auto &s  = spec[l];
        auto       &lw = m_impl->layers[l];
        lw.sparse_out  = s.dropout > 0.0;
        lw.transposed  = l > 0 && m_impl->layers[l - 1].sparse_out && s.out >= 16;
        if ( lw.transposed )
        {
            lw.wt = view( state.weights.layers[l].weight ).transpose();
            lw.mt = view( state.momentum[l].weight ).transpose();
        }
        lw.input.resize( Eigen::Index( batch ), Eigen::Index( s.in ) );
        lw.output.resize( Eigen::Index( batch ), Eigen::Index( s.out ) );
        if ( s.dropout > 0.0 )
            lw.mask.resize( Eigen::Index( batch ), Eigen::Index( s.out ) );
        if ( lw.sparse_out )
        {
            lw.alive.sample.resize( batch * s.out );
            lw.alive.offset.assign( s.out + 1, 0 );
        }
    }
    m_impl->result = Matrix( batch, state.weights.output_size() );
}

BatchTrainer::~BatchTrainer() = default;

void BatchTrainer::sync() { m_impl->sync(); }

const Matrix &BatchTrainer::forward( const Matrix &x, Rng &rng )
{
    Impl       &im  = *m_impl;
    const auto &net = im.state.weights;
    if ( x.rows() != im.batch || x.cols() != net.input_size() )
        throw Error( Errc::ShapeMismatch, "batch trainer input shape" );

    const auto batch   = Eigen::Index( im.batch );
    im.layers[0].input = view( x );
    for ( std::size_t l = 0; l < net.spec.size(); ++l )
    {
        const LayerSpec &s  = net.spec[l];
        LayerWork       &lw = im.layers[l];
        RowMajor        &y  = lw.output;
        const ConstVec   bias( net.layers[l].bias.data(), Eigen::Index( s.out ) );

        if ( s.dropout > 0.0 )
        {
            // uniform() < keep, decided on the raw 53-bit draw.
            const double        keep  = keep_probability( s, im.semantics );
            const double        scale = keep > 0.0 ? 1.0 / keep : 0.0;
            const std::uint64_t limit = std::uint64_t( std::ceil( keep * 0x1.0p53 ) );
            im.draws.resize( std::size_t( lw.mask.size() ) );
            for ( auto &d : im.draws )
                d = rng.next();
            double *m = lw.mask.data();
            for ( Eigen::Index i = 0; i < lw.mask.size(); ++i )
                m[i] = ( im.draws[std::size_t( i )] >> 11 ) < limit ? scale : 0.0;
        }

        if ( lw.transposed )
        {
            const Incidence &in = im.layers[l - 1].alive;
            y.rowwise()         = bias;
            for ( std::size_t j = 0; j < s.in; ++j )
            {
                const auto wj = lw.wt.row( Eigen::Index( j ) );
                for ( std::uint32_t k = in.offset[j]; k < in.offset[j + 1]; ++k )
                {
                    const auto b = Eigen::Index( in.sample[k] );
                    y.row( b ) += lw.input( b, Eigen::Index( j ) ) * wj;
                }
            }
        }
        else if ( s.dropout > 0.0 && keep_probability( s, im.semantics ) < 0.5 )
        {
            // Mostly dropped: only kept outputs are computed, the rest are
            // left at 0 and never read.
            const auto w = view( net.layers[l].weight );
            for ( Eigen::Index b = 0; b < batch; ++b )
                for ( Eigen::Index i = 0; i < y.cols(); ++i )
                    y( b, i ) = lw.mask( b, i ) != 0.0
                                    ? bias[i] + w.row( i ).dot( lw.input.row( b ) )
                                    : 0.0;
        }
        else
        {
            y.noalias() = lw.input * view( net.layers[l].weight ).transpose();
            y.rowwise() += bias;
        }
        if ( s.activation == Activation::Relu )
            y = y.cwiseMax( 0.0 );

        RowMajor &next = l + 1 < net.spec.size() ? im.layers[l + 1].input : im.g;
        if ( s.dropout > 0.0 )
            next = y.cwiseProduct( lw.mask );
        else
            next = y;

        if ( lw.sparse_out )
        {
            // Alive: kept by dropout and, after a ReLU, positive. Scanned
            // unit by unit on a column-major copy.
            if ( s.activation == Activation::Relu )
                im.scan = next;
            else
                im.scan = lw.mask;
            auto         &alive = lw.alive;
            std::uint32_t count = 0;
            for ( std::size_t i = 0; i < s.out; ++i )
            {
                const double *col = im.scan.col( Eigen::Index( i ) ).data();
                for ( Eigen::Index b = 0; b < batch; ++b )
                {
                    alive.sample[count] = std::uint32_t( b );
                    count += col[b] > 0.0 ? 1u : 0u;
                }
                alive.offset[i + 1] = count;
            }
        }
    }
    view( im.result ) = im.g;
    return im.result;
}

void BatchTrainer::backward_and_step( const Matrix &upstream )
{
    Impl &im  = *m_impl;
    auto &net = im.state.weights;
    if ( upstream.rows() != im.batch || upstream.cols() != net.output_size() )
        throw Error( Errc::ShapeMismatch, "batch trainer upstream shape" );

    const auto   batch = Eigen::Index( im.batch );
    const double lr = im.state.lr, mu = im.params.momentum, wd = im.params.weight_decay;
    im.g = view( upstream );
    for ( std::size_t l = net.spec.size(); l-- > 0; )
    {
        const LayerSpec &s  = net.spec[l];
        LayerWork       &lw = im.layers[l];
        if ( s.dropout > 0.0 )
            im.g.array() *= lw.mask.array();
        if ( s.activation == Activation::Relu )
            im.g = ( lw.output.array() > 0.0 ).select( im.g, 0.0 );
        if ( l > 0 )
            im.gin.setZero( batch, Eigen::Index( s.in ) );

        // One pass per weight row: input gradient with the old row, then
        // buf = μ·buf + λ·w + ∇w and w −= lr·buf.
        if ( lw.transposed )
        {
            const Incidence &in = im.layers[l - 1].alive;
            for ( std::size_t j = 0; j < s.in; ++j )
            {
                const auto jj  = Eigen::Index( j );
                auto       w   = lw.wt.row( jj );
                auto       buf = lw.mt.row( jj );
                for ( std::uint32_t k = in.offset[j]; k < in.offset[j + 1]; ++k )
                {
                    const auto b = Eigen::Index( in.sample[k] );
                    im.gin( b, jj ) = im.g.row( b ).dot( w );
                }
                buf = mu * buf + wd * w;
                for ( std::uint32_t k = in.offset[j]; k < in.offset[j + 1]; ++k )
                {
                    const auto b = Eigen::Index( in.sample[k] );
                    buf += lw.input( b, jj ) * im.g.row( b );
                }
                w -= lr * buf;
            }
        }
        else if ( lw.sparse_out )
        {
            auto weights  = view( net.layers[l].weight );
            auto momentum = view( im.state.momentum[l].weight );
            for ( std::size_t i = 0; i < s.out; ++i )
            {
                const auto ii  = Eigen::Index( i );
                auto       w   = weights.row( ii );
                auto       buf = momentum.row( ii );
                if ( l > 0 )
                {
                    for ( std::uint32_t k = lw.alive.offset[i]; k < lw.alive.offset[i + 1]; ++k )
                    {
                        const auto b = Eigen::Index( lw.alive.sample[k] );
                        im.gin.row( b ) += im.g( b, ii ) * w;
                    }
                }
                buf = mu * buf + wd * w;
                for ( std::uint32_t k = lw.alive.offset[i]; k < lw.alive.offset[i + 1]; ++k )
                {
                    const auto b = Eigen::Index( lw.alive.sample[k] );
                    buf += im.g( b, ii ) * lw.input.row( b );
                }
                w -= lr * buf;
            }
        }
        else
        {
            auto w   = view( net.layers[l].weight );
            auto buf = view( im.state.momentum[l].weight );
            if ( l > 0 )
                im.gin.noalias() = im.g * w;
            buf.array() = mu * buf.array() + wd * w.array();
            buf.noalias() += im.g.transpose() * lw.input;
            w.array() -= lr * buf.array();
        }

        const auto out = Eigen::Index( s.out );
        auto       b   = MutVec( net.layers[l].bias.data(), out ).array();
        auto       bb  = MutVec( im.state.momentum[l].bias.data(), out ).array();
        bb             = mu * bb + ( im.g.colwise().sum().array() + wd * b );
        b -= lr * bb;

        if ( l > 0 )
            im.g.swap( im.gin );
    }
}

bool scheduler_update( Plateau &plateau, double &lr, double loss, double decay,
                       std::size_t patience, double threshold )
{
    if ( loss < plateau.best_loss * ( 1.0 - threshold ) )
    {
        plateau.best_loss        = loss;
        plateau.patience_counter = 0;
        return false;
    }
    if ( ++plateau.patience_counter > patience )
    {
        lr *= decay;
        plateau.patience_counter = 0;
        return true;
    }
    return false;
}

bool scheduler_update( TrainState &state, double loss, double decay, std::size_t patience,
                       double threshold )
{
    return scheduler_update( state.scheduler, state.lr, loss, decay, patience, threshold );
}

namespace
{

void put_u32( std::vector<std::uint8_t> &out, std::uint32_t v )
{
    for ( int i = 0; i < 4; ++i )
        out.push_back( std::uint8_t( v >> ( 8 * i ) ) );
}

void put_f64( std::vector<std::uint8_t> &out, double v )
{
    const auto bits = std::bit_cast<std::uint64_t>( v );
    for ( int i = 0; i < 8; ++i )
        out.push_back( std::uint8_t( bits >> ( 8 * i ) ) );
}

class ByteCursor
{
public:
    explicit ByteCursor( std::span<const std::uint8_t> b ) : m_bytes( b ) {}

    void need( std::size_t n ) const
    {
        if ( n > m_bytes.size() - m_pos )
            throw Error( Errc::Truncated, "checkpoint ends early" );
    }

    std::uint32_t u32()
    {
        need( 4 );
        std::uint32_t v = 0;
        for ( int i = 0; i < 4; ++i )
            v |= std::uint32_t( m_bytes[m_pos + i] ) << ( 8 * i );
        m_pos += 4;
        return v;
    }

    double f64()
    {
        need( 8 );
        std::uint64_t v = 0;
        for ( int i = 0; i < 8; ++i )
            v |= std::uint64_t( m_bytes[m_pos + i] ) << ( 8 * i );
        m_pos += 8;
        return std::bit_cast<double>( v );
    }

    std::span<const std::uint8_t> take( std::size_t n )
    {
        need( n );
        auto s = m_bytes.subspan( m_pos, n );
        m_pos += n;
        return s;
    }

private:
    std::span<const std::uint8_t> m_bytes;
    std::size_t                   m_pos = 0;
};

} // namespace

std::vector<std::uint8_t> checkpoint_bytes( const AutoencoderWeights &w )
{
    std::vector<std::uint8_t> out = { 'S', 'S', 'A', 'E' };
    put_u32( out, kCheckpointVersion );
    put_u32( out, std::uint32_t( autoencoder_grid_n( w ) ) );
    put_u32( out, std::uint32_t( w.layers.size() ) );
    for ( const auto &layer : w.layers )
    {
        put_u32( out, std::uint32_t( layer.weight.rows() ) );
        put_u32( out, std::uint32_t( layer.weight.cols() ) );
        for ( double v : layer.weight.data() )
            put_f64( out, v );
        for ( double v : layer.bias )
            put_f64( out, v );
    }
    return out;
}

AutoencoderWeights parse_checkpoint( std::span<const std::uint8_t> bytes )
{
    ByteCursor cur( bytes );
    const auto magic = cur.take( 4 );
    if ( std::memcmp( magic.data(), "SSAE", 4 ) != 0 )
        throw Error( Errc::BadMagic, "not an SSAE checkpoint" );
    if ( const auto version = cur.u32(); version != kCheckpointVersion )
        throw Error( Errc::VersionMismatch,
                     "checkpoint version " + std::to_string( version ) );
    const std::uint32_t grid_n = cur.u32();
    const std::uint32_t count  = cur.u32();
    if ( grid_n == 0 || grid_n > 4096 )
        throw Error( Errc::FormatError, "implausible grid size in checkpoint" );

    auto spec = autoencoder_architecture( grid_n );
    if ( count != spec.size() )
        throw Error( Errc::FormatError, "checkpoint layer count does not match" );

    Mlp net = zeros( spec );
    for ( std::size_t l = 0; l < spec.size(); ++l )
    {
        const std::uint32_t out = cur.u32();
        const std::uint32_t in  = cur.u32();
        if ( out != spec[l].out || in != spec[l].in )
            throw Error( Errc::FormatError, "checkpoint layer shape does not match" );
        cur.need( ( std::size_t( out ) * in + out ) * 8 );
        for ( double &v : net.layers[l].weight.data() )
            v = cur.f64();
        for ( double &v : net.layers[l].bias )
            v = cur.f64();
        for ( double v : net.layers[l].weight.data() )
            if ( !std::isfinite( v ) )
                throw Error( Errc::NonFinite, "checkpoint weight is not finite" );
        for ( double v : net.layers[l].bias )
            if ( !std::isfinite( v ) )
                throw Error( Errc::NonFinite, "checkpoint bias is not finite" );
    }
    return net;
}

void save_checkpoint( const AutoencoderWeights &w, const std::filesystem::path &path )
{
    const auto    bytes = checkpoint_bytes( w );
    std::ofstream out( path, std::ios::binary );
    if ( !out ||
         !out.write( reinterpret_cast<const char *>( bytes.data() ),
                     std::streamsize( bytes.size() ) ) )
        throw Error( Errc::IoError, "cannot write " + path.string() );
}

AutoencoderWeights load_checkpoint( const std::filesystem::path &path )
{
    std::ifstream in( path, std::ios::binary );
    if ( !in )
        throw Error( Errc::IoError, "cannot open " + path.string() );
    std::vector<std::uint8_t> bytes( ( std::istreambuf_iterator<char>( in ) ),
                                     std::istreambuf_iterator<char>() );
    return parse_checkpoint( bytes );
}

} // namespace speccurve::nn
