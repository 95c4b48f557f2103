// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "speccurve/colorsystem.hpp"

namespace speccurve
{

/// Camera identity plus its colour matrices (already in S_xyz·C orientation).
struct CameraRecord
{
    std::string                    make;
    std::string                    model;
    std::optional<std::string>     unique_camera_model;
    std::vector<ColorMatrixRecord> matrices;
    std::vector<std::string>       warnings;

    /// Lowercased "make model" with whitespace collapsed; a model that
    /// already starts with the make is not prefixed twice.
    std::string camera_id() const;

    bool operator==( const CameraRecord & ) const = default;
};

/// Lowercases, trims and collapses internal whitespace.
std::string normalize_camera_id( std::string_view text );

namespace dng
{

enum class Endian
{
    Little,
    Big
};

enum class FieldType : std::uint16_t
{
    Byte      = 1,
    Ascii     = 2,
    Short     = 3,
    Long      = 4,
    Rational  = 5,
    SByte     = 6,
    Undefined = 7,
    SShort    = 8,
    SLong     = 9,
    SRational = 10,
    Float     = 11,
    Double    = 12,
    Ifd       = 13,
};

/// Byte width of one value of the type, 0 for unknown types.
std::size_t field_size( std::uint16_t type );

struct IfdEntry
{
    std::uint16_t tag;
    std::uint16_t field_type;
    std::uint32_t count;
    std::uint32_t value_or_offset;
};

namespace tag
{
inline constexpr std::uint16_t Make                   = 0x010F;
inline constexpr std::uint16_t Model                  = 0x0110;
inline constexpr std::uint16_t SubIfds                = 0x014A;
inline constexpr std::uint16_t UniqueCameraModel      = 0xC614;
inline constexpr std::uint16_t ColorMatrix1           = 0xC621;
inline constexpr std::uint16_t ColorMatrix2           = 0xC622;
inline constexpr std::uint16_t CalibrationIlluminant1 = 0xC65A;
inline constexpr std::uint16_t CalibrationIlluminant2 = 0xC65B;
} // namespace tag

} // namespace dng

/// Extracts make/model and ColorMatrix1/2 with their calibration illuminants
/// from a DNG (TIFF) byte buffer. Walks IFD0, its chained IFDs and SubIFDs.
CameraRecord parse_dng( std::span<const std::uint8_t> bytes );
CameraRecord parse_dng_file( const std::filesystem::path &path );

/// A minimal TIFF holding only the tags parse_dng reads. Matrix entries are
/// stored as SRATIONAL with denominator 10⁶.
std::vector<std::uint8_t> write_minimal_dng( const CameraRecord &record,
                                             dng::Endian         endian );

} // namespace speccurve
