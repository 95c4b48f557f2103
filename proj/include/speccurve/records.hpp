// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "speccurve/dng.hpp"

namespace speccurve
{

/// JSON array of camera records:
/// `[{make, model, unique_camera_model, matrices: [{illuminant, matrix}]}]`
/// where illuminant is "A", "D65" or the numeric LightSource code and matrix
/// holds 9 numbers row-major in S_xyz·C orientation.
std::string records_to_json( const std::vector<CameraRecord> &records );
std::vector<CameraRecord> records_from_json( const std::string &text );

void write_records( const std::filesystem::path &path,
                    const std::vector<CameraRecord> &records );
std::vector<CameraRecord> read_records( const std::filesystem::path &path );

std::string read_text_file( const std::filesystem::path &path );
void write_text_file( const std::filesystem::path &path, const std::string &text );

} // namespace speccurve
