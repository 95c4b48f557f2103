// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace speccurve
{

enum class Errc
{
    // numerics
    SingularSystem,
    ZeroMatrix,
    ShapeMismatch,
    NonFinite,
    // spectral data and files
    FormatError,
    CoverageError,
    OutOfRange,
    IoError,
    InvalidArgument,
    // color-matrix system
    NoUsableRecords,
    // DNG / TIFF
    NotTiff,
    Truncated,
    MissingColorMatrix,
    ZeroDenominator,
    // checkpoints
    BadMagic,
    VersionMismatch,
    StaleCache,
    // prior, estimator, metrics, apps
    ZeroChannel,
    EmptyDatabase,
    DivergedToZero,
    ZeroVector,
    ZeroSum,
    RankDeficient,
    EmptyResults,
};

std::string_view errc_name( Errc code );

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to a stable exit status.
class Error : public std::runtime_error
{
public:
    Error( Errc code, const std::string &what )
        : std::runtime_error( std::string( errc_name( code ) ) + ": " + what )
        , m_code( code )
    {}

    Errc code() const noexcept { return m_code; }

private:
    Errc m_code;
};

} // namespace speccurve
