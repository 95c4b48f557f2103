// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "speccurve/colorsystem.hpp"
#include "speccurve/nn.hpp"

namespace speccurve
{

struct DatabaseEntry
{
    std::string       camera_id; ///< normalized; duplicates share it
    std::string       source;
    SensitivityMatrix sensitivity;
};

enum class GroupBy
{
    Camera,
    Brand
};

/// Brand of a normalized camera id: its first word.
std::string brand_of( const std::string &camera_id );

/// Ground-truth curves, each max-normalized so its largest entry is 1.
struct SensitivityDatabase
{
    SpectralGrid               grid;
    std::vector<DatabaseEntry> entries;

    /// Adds an entry after max-normalizing it and normalizing its id.
    void add( std::string camera_id, std::string source, Matrix sensitivity );

    std::string group_key( const DatabaseEntry &e, GroupBy by = GroupBy::Camera ) const;
    /// Distinct group keys in first-appearance order.
    std::vector<std::string> groups( GroupBy by = GroupBy::Camera ) const;
    std::vector<const DatabaseEntry *> members( const std::string &key,
                                                GroupBy            by = GroupBy::Camera ) const;

    SensitivityDatabase without( const std::set<std::string> &keys,
                                 GroupBy                      by = GroupBy::Camera ) const;

    /// Elementwise mean of all entries.
    Matrix mean() const;

    /// Manifest: `{"entries": [{"camera_id", "source", "file"}]}` with each
    /// file a `wavelength_nm,r,g,b` CSV relative to the manifest.
    static SensitivityDatabase load( const std::filesystem::path &manifest,
                                     const SpectralGrid          &grid = {} );
    /// Writes the manifest plus one CSV per entry into `dir`.
    void save( const std::filesystem::path &dir,
               const std::string           &manifest_name = "manifest.json" ) const;
};

/// Column-major by channel: all red samples, then green, then blue.
std::vector<double> flatten_channels( const Matrix &s );
Matrix              unflatten_channels( std::span<const double> x, std::size_t n );

enum class RollMode
{
    PerColumn, ///< independent shift for every column of G (may merge rows)
    Global,    ///< one shift for the whole matrix
};

struct AugmentParams
{
    double   h         = 0.2;
    int      g         = 2;
    RollMode roll_mode = RollMode::PerColumn;
};

/// The n×n 0/1 roll matrix G: column i has its single 1 at row (i+u) mod n.
Matrix draw_roll_matrix( std::size_t n, int g, RollMode mode, Rng &rng );

/// G·S·H with H = diag of three uniform draws in [h, 1].
Matrix augment( const Matrix &s, const AugmentParams &p, Rng &rng );

/// ‖[(U_k − V_k)/‖U_k‖]_k‖; throws ZeroChannel if a column of U vanishes.
double delta_metric( const Matrix &u, const Matrix &v );

struct DeltaGradient
{
    double value;
    Matrix d_v; ///< gradient with respect to V
};
DeltaGradient delta_metric_grad( const Matrix &u, const Matrix &v );

struct TrainParams
{
    AugmentParams        augment;
    double               lr              = 1e-1;
    double               momentum        = 5e-1;
    double               weight_decay    = 1e-4;
    double               scheduler_decay = 5e-1;
    std::size_t          patience        = 2000;
    double               threshold       = 1e-4;
    double               stop_lr         = 1e-5;
    std::size_t          max_steps       = 2'000'000; ///< hard cap, 0 = none
    nn::DropoutSemantics dropout         = nn::DropoutSemantics::Retention;
};

struct TrainResult
{
    nn::AutoencoderWeights   weights;
    std::size_t              steps        = 0;
    double                   initial_loss = 0.0; ///< first training-mode batch loss
    double                   final_loss   = 0.0; ///< last training-mode batch loss
    double                   eval_loss    = 0.0; ///< eval-mode mean Δ on the training set
    bool                     hit_step_cap = false;
    std::vector<std::string> trained_ids; ///< camera ids of every entry used
};

/// Minimizes the mean Δ between augmented curves and their reconstructions
/// with full-batch SGD, momentum, weight decay and reduce-on-plateau until the
/// learning rate drops below stop_lr.
TrainResult train_autoencoder( const SensitivityDatabase     &db,
                               const std::set<std::string>   &exclude,
                               const TrainParams             &params,
                               std::uint64_t                  seed,
                               GroupBy                        by = GroupBy::Camera );

/// Mean eval-mode Δ(S, A(S)) over the given entries.
double reconstruction_loss( const nn::AutoencoderWeights         &w,
                            const std::vector<const Matrix *>    &curves );

} // namespace speccurve
