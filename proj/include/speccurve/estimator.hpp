// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#pragma once

#include <cstdint>

#include "speccurve/colorsystem.hpp"
#include "speccurve/dng.hpp"
#include "speccurve/nn.hpp"

namespace speccurve
{

struct EstimatorParams
{
    double        alpha           = 1e2;  ///< weight of the colour-matrix term
    double        beta            = 2e-1; ///< weight of the autoencoder term
    double        lr              = 8e-4;
    double        scheduler_decay = 5e-1;
    std::size_t   patience        = 2000;
    double        threshold       = 1e-4;
    double        stop_lr         = 4e-4;
    std::size_t   max_steps       = 1'000'000; ///< hard cap, 0 = none
    std::uint64_t seed            = 0; ///< the objective is deterministic; kept for reproducible CLIs
};

struct ObjectiveValue
{
    double value     = 0.0;
    double specific  = 0.0; ///< Σᵢ ∠(Aᵢ·S, Bᵢ), unweighted
    double universal = 0.0; ///< ∠(S, A_w(S)), unweighted
    Matrix grad;            ///< n×3, empty when not requested
};

/// α·Σᵢ ∠(Aᵢ·S, Bᵢ) + β·∠(S, A_w(S)) with the autoencoder in eval mode. The
/// gradient flows through both arguments of the universal angle, including
/// the autoencoder.
ObjectiveValue objective( const Matrix &s, const SpecificSystem &sys,
                          const nn::AutoencoderWeights &w, double alpha, double beta,
                          bool with_grad = true );

struct EstimateResult
{
    SensitivityMatrix sensitivity; ///< max-normalized
    std::size_t       steps              = 0;
    double            initial_objective  = 0.0;
    double            final_objective    = 0.0;
    bool              hit_step_cap       = false;
};

/// Projected SGD from `init` (clamped to the non-negative cone after every
/// step) until the plateau scheduler pushes the rate below stop_lr.
EstimateResult estimate( const SpecificSystem &sys, const nn::AutoencoderWeights &w,
                         const Matrix &init, const EstimatorParams &params );

EstimateResult estimate( const CameraRecord &camera, const nn::AutoencoderWeights &w,
                         const Matrix &init, const EstimatorParams &params,
                         const ObserverMatrix &observer, const CalibrationLights &lights );

} // namespace speccurve
