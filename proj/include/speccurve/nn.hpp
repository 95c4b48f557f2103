// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "speccurve/numerics.hpp"
#include "speccurve/random.hpp"

namespace speccurve::nn
{

enum class Activation
{
    None,
    Relu
};

/// How the per-layer dropout probability is read.
enum class DropoutSemantics
{
    Retention, ///< p is the probability of keeping a unit
    Drop,      ///< p is the probability of zeroing a unit
};

struct LayerSpec
{
    std::size_t in;
    std::size_t out;
    Activation  activation;
    double      dropout = 0.0; ///< 0 disables dropout after this layer
};

struct Linear
{
    Matrix              weight; ///< out × in
    AlignedVector       bias;   ///< out
};

/// A stack of fully connected layers.
struct Mlp
{
    std::vector<LayerSpec> spec;
    std::vector<Linear>    layers;

    std::size_t input_size() const { return spec.front().in; }
    std::size_t output_size() const { return spec.back().out; }

    bool operator==( const Mlp &other ) const;
};

/// Layer table of the autoencoder for a grid with `grid_n` samples:
/// N → 4N → 2N → 6 → 2N → 4N → N with N = 3·grid_n, ReLU everywhere except
/// the bottleneck and output, dropout 0.2, 0.5 and 0.5 after layers 1, 2, 5.
std::vector<LayerSpec> autoencoder_architecture( std::size_t grid_n );

/// Autoencoder weights; spec is always autoencoder_architecture(grid_n).
using AutoencoderWeights = Mlp;

/// Uniform(−1/√fan_in, 1/√fan_in) for weights and biases.
Mlp init_uniform( std::vector<LayerSpec> spec, Rng &rng );
Mlp zeros( std::vector<LayerSpec> spec );
AutoencoderWeights make_autoencoder( std::size_t grid_n, Rng &rng );

/// Grid size recorded in an autoencoder's input width.
std::size_t autoencoder_grid_n( const AutoencoderWeights &w );

struct Mode
{
    bool             train     = false;
    Rng             *rng       = nullptr; ///< required when train is set
    DropoutSemantics semantics = DropoutSemantics::Retention;

    static Mode eval() { return {}; }
    static Mode training( Rng &rng, DropoutSemantics s = DropoutSemantics::Retention )
    {
        return { true, &rng, s };
    }
};

/// Everything backward() needs from a forward pass over a batch.
struct ForwardCache
{
    std::vector<Matrix> inputs;      ///< input of each layer, batch × in
    std::vector<Matrix> outputs;     ///< post-activation output, pre-dropout
    std::vector<Matrix> masks;       ///< dropout scale (0 or 1/keep); empty if none
    std::size_t         batch = 0;
};

/// Batched forward; rows of x are samples.
Matrix forward( const Mlp &net, const Matrix &x, const Mode &mode,
                ForwardCache *cache = nullptr );

using Gradients = std::vector<Linear>;

Gradients zero_gradients( const Mlp &net );

/// Reverse pass for a cached forward. Gradients are summed over the batch
/// into `grads` (which must be shaped like the network); returns the
/// gradient with respect to the batch input. Throws StaleCache when the
/// cache does not match the network or upstream shape.
Matrix backward( const Mlp &net, const ForwardCache &cache, const Matrix &upstream,
                 Gradients &grads );

/// backward() without the parameter gradients.
Matrix input_gradient( const Mlp &net, const ForwardCache &cache, const Matrix &upstream );

/// Single-vector forms.
struct VectorForward
{
    std::vector<double> output;
    ForwardCache        cache;
};
VectorForward ae_forward( const Mlp &net, std::span<const double> x, const Mode &mode );

struct VectorBackward
{
    Gradients           grads;
    std::vector<double> grad_input;
};
VectorBackward ae_backward( const Mlp &net, const ForwardCache &cache,
                            std::span<const double> upstream );

struct SgdParams
{
    double momentum     = 0.5;
    double weight_decay = 1e-4;
};

struct Plateau
{
    double      best_loss        = std::numeric_limits<double>::infinity();
    std::size_t patience_counter = 0;
};

struct TrainState
{
    Mlp       weights;
    Gradients momentum;
    double    lr = 0.1;
    Plateau   scheduler;

    static TrainState start( Mlp weights, double lr );
};

/// g = grad + wd·w; buf = momentum·buf + g; w -= lr·buf.
void sgd_step( TrainState &state, const Gradients &grads, const SgdParams &params = {} );

/// Reduce-on-plateau: an update improves when loss < best·(1 − threshold);
/// after more than `patience` non-improving updates the rate is multiplied
/// by `decay` and the counter restarts. Returns true when the rate changed.
bool scheduler_update( Plateau &plateau, double &lr, double loss, double decay,
                       std::size_t patience, double threshold = 1e-4 );
bool scheduler_update( TrainState &state, double loss, double decay,
                       std::size_t patience, double threshold = 1e-4 );

/// Full-batch training with preallocated buffers that skips inputs zeroed by
/// ReLU or dropout. Equivalent, up to rounding and with the same random draws,
/// to forward() in training mode followed by backward() into zeroed gradients
/// and sgd_step(). Some layers are held internally; the state's weights are
/// current only after sync().
class BatchTrainer
{
public:
    BatchTrainer( TrainState &state, std::size_t batch, const SgdParams &params = {},
                  DropoutSemantics semantics = DropoutSemantics::Retention );
    ~BatchTrainer();
    BatchTrainer( const BatchTrainer & )            = delete;
    BatchTrainer &operator=( const BatchTrainer & ) = delete;

    /// Training-mode forward; the returned output stays valid until the next
    /// call.
    const Matrix &forward( const Matrix &x, Rng &rng );
    /// Backward from d(loss)/d(output) then one SGD step on the state.
    void backward_and_step( const Matrix &upstream );
    /// Writes the internally held weights back into the training state.
    void sync();

private:
    struct Impl;
    std::unique_ptr<Impl> m_impl;
};

/// Checkpoint layout (little-endian): "SSAE", u32 version (1), u32 grid n,
/// u32 layer count, then per layer u32 out, u32 in, f64 weights row-major,
/// f64 bias.
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> checkpoint_bytes( const AutoencoderWeights &w );
AutoencoderWeights parse_checkpoint( std::span<const std::uint8_t> bytes );
void save_checkpoint( const AutoencoderWeights &w, const std::filesystem::path &path );
AutoencoderWeights load_checkpoint( const std::filesystem::path &path );

} // namespace speccurve::nn
