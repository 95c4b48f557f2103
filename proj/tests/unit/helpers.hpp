// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#pragma once

#include <filesystem>
#include <string>

#include <doctest.h>

#include "speccurve/numerics.hpp"
#include "speccurve/random.hpp"

namespace testutil
{

inline speccurve::Matrix random_matrix( std::size_t rows, std::size_t cols, speccurve::Rng &rng,
                                        double lo = -1.0, double hi = 1.0 )
{
    speccurve::Matrix m( rows, cols );
    for ( double &v : m.data() )
        v = rng.uniform( lo, hi );
    return m;
}

inline std::filesystem::path fixture( const std::string &name )
{
    return std::filesystem::path( SPECCURVE_FIXTURE_DIR ) / name;
}

/// Fresh, empty scratch directory.
inline std::filesystem::path scratch_dir( const std::string &name )
{
    const auto dir = std::filesystem::temp_directory_path() / ( "speccurve_unit_" + name );
    std::filesystem::remove_all( dir );
    std::filesystem::create_directories( dir );
    return dir;
}

template <class F> speccurve::Errc error_code_of( F &&f )
{
    try
    {
        f();
    }
    catch ( const speccurve::Error &e )
    {
        return e.code();
    }
    FAIL( "expected a speccurve::Error" );
    return speccurve::Errc::InvalidArgument;
}

} // namespace testutil
