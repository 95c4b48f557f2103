// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "speccurve/estimator.hpp"
#include "speccurve/metrics.hpp"
#include "speccurve/prior.hpp"

namespace speccurve
{

struct ValidationRow
{
    std::string group;
    std::string camera_id;
    std::string source;
    ErrorReport report;
};

struct ValidationRun
{
    std::vector<ValidationRow> rows;
    std::vector<std::string>   notices; ///< skipped groups and per-group failures
    /// Camera ids each group's autoencoder was trained on.
    std::map<std::string, std::vector<std::string>> trained_on;
};

struct ValidationOptions
{
    TrainParams     train;
    EstimatorParams estimate;
    std::uint64_t   seed     = 0;
    std::size_t     jobs     = 1;
    GroupBy         group_by = GroupBy::Camera;
};

/// Leave-one-out: for every group, train on the database minus that whole
/// group, estimate each camera of the group once from its colour matrices and
/// score the estimate against every ground-truth duplicate. Groups are
/// processed by a pool of `jobs` workers; the output is independent of the
/// pool size.
ValidationRun loov_run( const SensitivityDatabase                  &db,
                        const std::map<std::string, CameraRecord>  &records,
                        const ValidationOptions                    &opts,
                        const ObserverMatrix                       &observer,
                        const CalibrationLights                    &lights );

/// Keys records by CameraRecord::camera_id().
std::map<std::string, CameraRecord> index_records( const std::vector<CameraRecord> &records );

struct ValidationSummary
{
    double                     median_re = 0.0;
    std::array<double, 3>      per_channel_medians{};
    std::string                best;
    std::string                median;
    std::string                worst;
    std::vector<std::size_t>   histogram; ///< counts per 1 % bin of re_mean
    std::size_t                count = 0;
};

/// Lower median for even counts; best/median/worst by re_mean.
ValidationSummary summarize( const std::vector<ValidationRow> &rows );

std::string rows_to_csv( const std::vector<ValidationRow> &rows );
std::string summary_to_json( const ValidationSummary &summary,
                             const std::vector<std::string> &notices );

} // namespace speccurve
