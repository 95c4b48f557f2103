// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#include "speccurve/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "speccurve/prior.hpp"

namespace speccurve
{

ObjectiveValue objective( const Matrix &s, const SpecificSystem &sys,
                          const nn::AutoencoderWeights &w, double alpha, double beta,
                          bool with_grad )
{
    const std::size_t n = s.rows();
    if ( s.cols() != 3 || w.input_size() != 3 * n )
        throw Error( Errc::ShapeMismatch, "sensitivity does not fit the autoencoder" );

    ObjectiveValue out;
    if ( with_grad )
        out.grad = Matrix( n, 3 );

    for ( std::size_t i = 0; i < sys.size(); ++i )
    {
        const Matrix as = matmul( sys.blocks_a[i], s );
        if ( with_grad )
        {
            const auto ag = angular_distance_grad( as, sys.blocks_b[i] );
            out.specific += ag.value;
            out.grad += alpha * matmul_tn( sys.blocks_a[i], ag.d_u );
        }
        else
        {
            out.specific += angular_distance( as, sys.blocks_b[i] );
        }
    }

    if ( beta != 0.0 || !with_grad )
    {
        const auto fwd   = nn::ae_forward( w, flatten_channels( s ), nn::Mode::eval() );
        const Matrix rec = unflatten_channels( fwd.output, n );
        if ( with_grad )
        {
            const auto ag = angular_distance_grad( s, rec );
            out.universal = ag.value;
            const Matrix back =
                nn::input_gradient( w, fwd.cache, Matrix::row( flatten_channels( ag.d_v ) ) );
            Matrix g = ag.d_u + unflatten_channels( back.data(), n );
            out.grad += beta * g;
        }
        else
        {
            out.universal = angular_distance( s, rec );
        }
    }

    out.value = alpha * out.specific + beta * out.universal;
    return out;
}

EstimateResult estimate( const SpecificSystem &sys, const nn::AutoencoderWeights &w,
                         const Matrix &init, const EstimatorParams &params )
{
    if ( sys.size() == 0 )
        throw Error( Errc::NoUsableRecords, "empty colour-matrix system" );
    if ( min_entry( init ) < 0.0 || max_entry( init ) <= 0.0 )
        throw Error( Errc::InvalidArgument, "initial sensitivity must be non-negative and nonzero" );

    Matrix      s  = init;
    double      lr = params.lr;
    nn::Plateau plateau;

    EstimateResult result{ SensitivityMatrix{ {}, {} }, 0, 0.0, 0.0, false };
    while ( true )
    {
        const auto obj = objective( s, sys, w, params.alpha, params.beta, true );
        if ( result.steps == 0 )
            result.initial_objective = obj.value;

        for ( std::size_t i = 0; i < s.size(); ++i )
            s.data()[i] = std::max( 0.0, s.data()[i] - lr * obj.grad.data()[i] );
        if ( max_entry( s ) < 1e-9 )
            throw Error( Errc::DivergedToZero, "estimate collapsed to zero" );

        nn::scheduler_update( plateau, lr, obj.value, params.scheduler_decay, params.patience,
                              params.threshold );
        ++result.steps;
        if ( lr < params.stop_lr )
            break;
        if ( params.max_steps && result.steps >= params.max_steps )
        {
            result.hit_step_cap = true;
            break;
        }
    }

    const double peak = max_entry( s );
    for ( double &v : s.data() )
        v /= peak;
    result.final_objective = objective( s, sys, w, params.alpha, params.beta, false ).value;
    const SpectralGrid grid{ s.rows(), 400.0, 700.0 };
    result.sensitivity     = SensitivityMatrix::checked( std::move( s ), grid );
    return result;
}

EstimateResult estimate( const CameraRecord &camera, const nn::AutoencoderWeights &w,
                         const Matrix &init, const EstimatorParams &params,
                         const ObserverMatrix &observer, const CalibrationLights &lights )
{
    return estimate( build_specific_system( camera.matrices, observer, lights ), w, init,
                     params );
}

} // namespace speccurve
