// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#include "speccurve/records.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace speccurve
{

using nlohmann::json;

namespace
{

json illuminant_to_json( const Illuminant &il )
{
    if ( il.kind == Illuminant::Kind::Other )
        return il.code;
    return il.name();
}

Illuminant illuminant_from_json( const json &j )
{
    if ( j.is_string() )
    {
        const auto s = j.get<std::string>();
        if ( s == "A" )
            return Illuminant::a();
        if ( s == "D65" )
            return Illuminant::d65();
        throw Error( Errc::FormatError, "unknown illuminant name '" + s + "'" );
    }
    if ( j.is_number_unsigned() && j.get<std::uint64_t>() <= 0xFFFF )
        return Illuminant::from_code( std::uint16_t( j.get<std::uint64_t>() ) );
    throw Error( Errc::FormatError, "illuminant must be \"A\", \"D65\" or a code" );
}

} // namespace

std::string records_to_json( const std::vector<CameraRecord> &records )
{
    json arr = json::array();
    for ( const auto &r : records )
    {
        json j;
        j["make"]  = r.make;
        j["model"] = r.model;
        j["unique_camera_model"] =
            r.unique_camera_model ? json( *r.unique_camera_model ) : json( nullptr );
        json mats = json::array();
        for ( const auto &m : r.matrices )
        {
            json mj;
            mj["illuminant"] = illuminant_to_json( m.illuminant );
            mj["matrix"]     = std::vector<double>( m.matrix.data().begin(),
                                                    m.matrix.data().end() );
            mats.push_back( std::move( mj ) );
        }
        j["matrices"] = std::move( mats );
        arr.push_back( std::move( j ) );
    }
    return arr.dump( 2 ) + "\n";
}

std::vector<CameraRecord> records_from_json( const std::string &text )
{
    json doc;
    try
    {
        doc = json::parse( text );
    }
    catch ( const json::exception &e )
    {
        throw Error( Errc::FormatError, std::string( "records JSON: " ) + e.what() );
    }
    if ( !doc.is_array() )
        throw Error( Errc::FormatError, "records JSON must be an array" );

    std::vector<CameraRecord> out;
    try
    {
        for ( const auto &j : doc )
        {
            CameraRecord r;
            r.make  = j.value( "make", "" );
            r.model = j.value( "model", "" );
            if ( j.contains( "unique_camera_model" ) &&
                 j["unique_camera_model"].is_string() )
                r.unique_camera_model = j["unique_camera_model"].get<std::string>();
            for ( const auto &mj : j.at( "matrices" ) )
            {
                auto values = mj.at( "matrix" ).get<std::vector<double>>();
                if ( values.size() != 9 )
                    throw Error( Errc::FormatError, "matrix must have 9 entries" );
                r.matrices.push_back( { Matrix( 3, 3, std::move( values ) ),
                                        illuminant_from_json( mj.at( "illuminant" ) ),
                                        MatrixSource::Json } );
            }
            out.push_back( std::move( r ) );
        }
    }
    catch ( const json::exception &e )
    {
        throw Error( Errc::FormatError, std::string( "records JSON: " ) + e.what() );
    }
    return out;
}

std::string read_text_file( const std::filesystem::path &path )
{
    std::ifstream in( path, std::ios::binary );
    if ( !in )
        throw Error( Errc::IoError, "cannot open " + path.string() );
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file( const std::filesystem::path &path, const std::string &text )
{
    std::ofstream out( path, std::ios::binary );
    if ( !out || !( out << text ) )
        throw Error( Errc::IoError, "cannot write " + path.string() );
}

void write_records( const std::filesystem::path &path,
                    const std::vector<CameraRecord> &records )
{
    write_text_file( path, records_to_json( records ) );
}

std::vector<CameraRecord> read_records( const std::filesystem::path &path )
{
    return records_from_json( read_text_file( path ) );
}

} // namespace speccurve
