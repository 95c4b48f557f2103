// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#include "speccurve/dng.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace speccurve
{

std::string normalize_camera_id( std::string_view text )
{
    std::string out;
    bool        pending_space = false;
    for ( char ch : text )
    {
        const auto uc = static_cast<unsigned char>( ch );
        if ( std::isspace( uc ) )
        {
            pending_space = !out.empty();
            continue;
        }
        if ( pending_space )
            out.push_back( ' ' );
        pending_space = false;
        out.push_back( static_cast<char>( std::tolower( uc ) ) );
    }
    return out;
}

std::string CameraRecord::camera_id() const
{
    const std::string mk = normalize_camera_id( make );
    const std::string md = normalize_camera_id( model );
    if ( mk.empty() )
        return md;
    const std::string first_word = mk.substr( 0, mk.find( ' ' ) );
    if ( md.rfind( mk, 0 ) == 0 || md.rfind( first_word + " ", 0 ) == 0 || md == first_word )
        return md;
    return md.empty() ? mk : mk + " " + md;
}

namespace dng
{

std::size_t field_size( std::uint16_t type )
{
    switch ( static_cast<FieldType>( type ) )
    {
        case FieldType::Byte:
        case FieldType::Ascii:
        case FieldType::SByte:
        case FieldType::Undefined: return 1;
        case FieldType::Short:
        case FieldType::SShort: return 2;
        case FieldType::Long:
        case FieldType::SLong:
        case FieldType::Float:
        case FieldType::Ifd: return 4;
        case FieldType::Rational:
        case FieldType::SRational:
        case FieldType::Double: return 8;
    }
    return 0;
}

} // namespace dng

namespace
{

using dng::Endian;
using dng::FieldType;
using dng::IfdEntry;
namespace tag = dng::tag;

constexpr std::size_t kMaxIfds = 64;

class Reader
{
public:
    Reader( std::span<const std::uint8_t> bytes, Endian endian )
        : m_bytes( bytes ), m_endian( endian )
    {}

    std::size_t size() const { return m_bytes.size(); }

    void require( std::uint64_t offset, std::uint64_t length ) const
    {
        if ( offset > m_bytes.size() || length > m_bytes.size() - offset )
            throw Error( Errc::Truncated, "read past end of file at offset " +
                                              std::to_string( offset ) );
    }

    std::uint16_t u16( std::uint64_t offset ) const
    {
        require( offset, 2 );
        const auto *p = m_bytes.data() + offset;
        return m_endian == Endian::Little ? std::uint16_t( p[0] | ( p[1] << 8 ) )
                                          : std::uint16_t( ( p[0] << 8 ) | p[1] );
    }

    std::uint32_t u32( std::uint64_t offset ) const
    {
        require( offset, 4 );
        const auto *p = m_bytes.data() + offset;
        if ( m_endian == Endian::Little )
            return std::uint32_t( p[0] ) | ( std::uint32_t( p[1] ) << 8 ) |
                   ( std::uint32_t( p[2] ) << 16 ) | ( std::uint32_t( p[3] ) << 24 );
        return ( std::uint32_t( p[0] ) << 24 ) | ( std::uint32_t( p[1] ) << 16 ) |
               ( std::uint32_t( p[2] ) << 8 ) | std::uint32_t( p[3] );
    }

    std::uint8_t u8( std::uint64_t offset ) const
    {
        require( offset, 1 );
        return m_bytes[offset];
    }

private:
    std::span<const std::uint8_t> m_bytes;
    Endian                        m_endian;
};

struct Located
{
    IfdEntry      entry;
    std::uint64_t data_offset;
};

Located locate( const Reader &rd, const IfdEntry &e, std::uint64_t entry_offset )
{
    const std::size_t width = dng::field_size( e.field_type );
    if ( width == 0 )
        throw Error( Errc::FormatError, "unknown TIFF field type " +
                                            std::to_string( e.field_type ) );
    const std::uint64_t total = std::uint64_t( e.count ) * width;
    const std::uint64_t where = total <= 4 ? entry_offset + 8 : e.value_or_offset;
    rd.require( where, total );
    return { e, where };
}

std::string read_ascii( const Reader &rd, const Located &loc )
{
    if ( loc.entry.field_type != std::uint16_t( FieldType::Ascii ) &&
         loc.entry.field_type != std::uint16_t( FieldType::Byte ) &&
         loc.entry.field_type != std::uint16_t( FieldType::Undefined ) )
    {
        throw Error( Errc::FormatError, "string tag with non-ASCII field type" );
    }
    std::string out;
    out.reserve( loc.entry.count );
    for ( std::uint32_t i = 0; i < loc.entry.count; ++i )
    {
        const std::uint8_t b = rd.u8( loc.data_offset + i );
        out.push_back( b < 0x80 ? char( b ) : '?' );
    }
    while ( !out.empty() && out.back() == '\0' )
        out.pop_back();
    // Embedded NULs terminate the first string of a multi-string field.
    if ( auto nul = out.find( '\0' ); nul != std::string::npos )
        out.resize( nul );
    return out;
}

std::uint32_t read_integer( const Reader &rd, const Located &loc )
{
    if ( loc.entry.count < 1 )
        throw Error( Errc::FormatError, "empty integer tag" );
    switch ( static_cast<FieldType>( loc.entry.field_type ) )
    {
        case FieldType::Byte: return rd.u8( loc.data_offset );
        case FieldType::Short: return rd.u16( loc.data_offset );
        case FieldType::Long: return rd.u32( loc.data_offset );
        default: break;
    }
    throw Error( Errc::FormatError, "integer tag with unexpected field type" );
}

Matrix read_color_matrix( const Reader &rd, const Located &loc )
{
    const auto type = static_cast<FieldType>( loc.entry.field_type );
    if ( type != FieldType::SRational && type != FieldType::Rational )
        throw Error( Errc::FormatError, "ColorMatrix is not (S)RATIONAL" );
    if ( loc.entry.count != 9 )
        throw Error( Errc::FormatError, "ColorMatrix must hold 9 values (3 colour planes)" );

    // Stored row-major as XYZ -> camera on column vectors; transposing gives
    // the S_xyz * C orientation.
    Matrix m( 3, 3 );
    for ( std::size_t k = 0; k < 9; ++k )
    {
        const std::uint64_t at  = loc.data_offset + 8 * k;
        const std::uint32_t num = rd.u32( at );
        const std::uint32_t den = rd.u32( at + 4 );
        if ( den == 0 )
            throw Error( Errc::ZeroDenominator, "ColorMatrix rational with zero denominator" );
        double v = 0.0;
        if ( type == FieldType::SRational )
            v = double( std::int32_t( num ) ) / double( std::int32_t( den ) );
        else
            v = double( num ) / double( den );
        m( k % 3, k / 3 ) = v;
    }
    return m;
}

struct Collected
{
    std::map<std::uint16_t, Located> first; // first occurrence of each tag
};

void walk( const Reader &rd, std::uint64_t ifd_offset, Collected &out,
           std::set<std::uint64_t> &visited )
{
    while ( ifd_offset != 0 )
    {
        if ( visited.size() >= kMaxIfds )
            throw Error( Errc::FormatError, "too many IFDs" );
        if ( !visited.insert( ifd_offset ).second )
            return; // loop in the IFD chain
        const std::uint16_t count = rd.u16( ifd_offset );
        rd.require( ifd_offset + 2, std::uint64_t( count ) * 12 + 4 );

        std::vector<std::uint64_t> sub_ifds;
        for ( std::uint16_t i = 0; i < count; ++i )
        {
            const std::uint64_t at = ifd_offset + 2 + std::uint64_t( i ) * 12;
            const IfdEntry e{ rd.u16( at ), rd.u16( at + 2 ), rd.u32( at + 4 ),
                              rd.u32( at + 8 ) };
            switch ( e.tag )
            {
                case tag::Make:
                case tag::Model:
                case tag::UniqueCameraModel:
                case tag::ColorMatrix1:
                case tag::ColorMatrix2:
                case tag::CalibrationIlluminant1:
                case tag::CalibrationIlluminant2:
                    if ( !out.first.contains( e.tag ) )
                        out.first.emplace( e.tag, locate( rd, e, at ) );
                    break;
                case tag::SubIfds:
                {
                    if ( e.field_type != std::uint16_t( FieldType::Long ) &&
                         e.field_type != std::uint16_t( FieldType::Ifd ) )
                        break;
                    const Located loc = locate( rd, e, at );
                    for ( std::uint32_t k = 0; k < e.count; ++k )
                        sub_ifds.push_back( rd.u32( loc.data_offset + 4ull * k ) );
                    break;
                }
                default: break;
            }
        }
        for ( std::uint64_t sub : sub_ifds )
            walk( rd, sub, out, visited );
        ifd_offset = rd.u32( ifd_offset + 2 + std::uint64_t( count ) * 12 );
    }
}

} // namespace

CameraRecord parse_dng( std::span<const std::uint8_t> bytes )
{
    if ( bytes.size() < 8 )
        throw Error( Errc::NotTiff, "file shorter than a TIFF header" );
    Endian endian;
    if ( bytes[0] == 'I' && bytes[1] == 'I' )
        endian = Endian::Little;
    else if ( bytes[0] == 'M' && bytes[1] == 'M' )
        endian = Endian::Big;
    else
        throw Error( Errc::NotTiff, "bad byte-order mark" );
    const Reader rd( bytes, endian );
    if ( rd.u16( 2 ) != 42 )
        throw Error( Errc::NotTiff, "bad TIFF magic number" );

    Collected               found;
    std::set<std::uint64_t> visited;
    walk( rd, rd.u32( 4 ), found, visited );

    auto get = [&]( std::uint16_t t ) -> const Located * {
        auto it = found.first.find( t );
        return it == found.first.end() ? nullptr : &it->second;
    };

    CameraRecord rec;
    if ( const auto *l = get( tag::Make ) )
        rec.make = read_ascii( rd, *l );
    if ( const auto *l = get( tag::Model ) )
        rec.model = read_ascii( rd, *l );
    if ( const auto *l = get( tag::UniqueCameraModel ) )
        rec.unique_camera_model = read_ascii( rd, *l );

    const Located *cm1 = get( tag::ColorMatrix1 );
    const Located *cm2 = get( tag::ColorMatrix2 );
    const Located *il1 = get( tag::CalibrationIlluminant1 );
    const Located *il2 = get( tag::CalibrationIlluminant2 );
    if ( !cm1 && !cm2 )
        throw Error( Errc::MissingColorMatrix, "no ColorMatrix1/ColorMatrix2 tag" );

    const bool both = cm1 && cm2;
    auto illuminant_for = [&]( const Located *il, std::uint16_t fallback,
                               const char *label ) {
        if ( il )
            return Illuminant::from_code( std::uint16_t( read_integer( rd, *il ) & 0xFFFF ) );
        if ( both )
        {
            rec.warnings.push_back( std::string( label ) +
                                    " missing; assumed default code " +
                                    std::to_string( fallback ) );
            return Illuminant::from_code( fallback );
        }
        rec.warnings.push_back( std::string( label ) + " missing; illuminant unknown" );
        return Illuminant::from_code( 0 );
    };

    if ( cm1 )
        rec.matrices.push_back( { read_color_matrix( rd, *cm1 ),
                                  illuminant_for( il1, Illuminant::kCodeA,
                                                  "CalibrationIlluminant1" ),
                                  MatrixSource::Dng } );
    if ( cm2 )
        rec.matrices.push_back( { read_color_matrix( rd, *cm2 ),
                                  illuminant_for( il2, Illuminant::kCodeD65,
                                                  "CalibrationIlluminant2" ),
                                  MatrixSource::Dng } );
    return rec;
}

CameraRecord parse_dng_file( const std::filesystem::path &path )
{
    std::ifstream in( path, std::ios::binary );
    if ( !in )
        throw Error( Errc::IoError, "cannot open " + path.string() );
    std::vector<std::uint8_t> bytes( ( std::istreambuf_iterator<char>( in ) ),
                                     std::istreambuf_iterator<char>() );
    return parse_dng( bytes );
}

namespace
{

class Writer
{
public:
    explicit Writer( Endian endian ) : m_endian( endian ) {}

    std::vector<std::uint8_t> &bytes() { return m_bytes; }

    void u16( std::uint16_t v )
    {
        if ( m_endian == Endian::Little )
            put( { std::uint8_t( v ), std::uint8_t( v >> 8 ) } );
        else
            put( { std::uint8_t( v >> 8 ), std::uint8_t( v ) } );
    }

    void u32( std::uint32_t v )
    {
        if ( m_endian == Endian::Little )
            put( { std::uint8_t( v ), std::uint8_t( v >> 8 ), std::uint8_t( v >> 16 ),
                   std::uint8_t( v >> 24 ) } );
        else
            put( { std::uint8_t( v >> 24 ), std::uint8_t( v >> 16 ),
                   std::uint8_t( v >> 8 ), std::uint8_t( v ) } );
    }

    void put( std::initializer_list<std::uint8_t> b )
    {
        m_bytes.insert( m_bytes.end(), b );
    }

private:
    Endian                    m_endian;
    std::vector<std::uint8_t> m_bytes;
};

struct PendingTag
{
    std::uint16_t             tag;
    FieldType                 type;
    std::uint32_t             count;
    std::vector<std::uint8_t> payload; // already in file byte order
};

} // namespace

std::vector<std::uint8_t> write_minimal_dng( const CameraRecord &record, Endian endian )
{
    if ( record.matrices.empty() || record.matrices.size() > 2 )
        throw Error( Errc::InvalidArgument, "record must carry one or two matrices" );

    auto encode = [&]( auto fill ) {
        Writer w( endian );
        fill( w );
        return std::move( w.bytes() );
    };
    auto ascii = [&]( std::uint16_t t, const std::string &s ) {
        std::vector<std::uint8_t> p( s.begin(), s.end() );
        p.push_back( 0 );
        const auto n = std::uint32_t( p.size() );
        return PendingTag{ t, FieldType::Ascii, n, std::move( p ) };
    };

    std::vector<PendingTag> tags;
    tags.push_back( ascii( tag::Make, record.make ) );
    tags.push_back( ascii( tag::Model, record.model ) );
    if ( record.unique_camera_model )
        tags.push_back( ascii( tag::UniqueCameraModel, *record.unique_camera_model ) );
    for ( std::size_t i = 0; i < record.matrices.size(); ++i )
    {
        const Matrix &m = record.matrices[i].matrix;
        if ( m.rows() != 3 || m.cols() != 3 )
            throw Error( Errc::ShapeMismatch, "colour matrix must be 3x3" );
        tags.push_back(
            { std::uint16_t( tag::ColorMatrix1 + i ), FieldType::SRational, 9,
              encode( [&]( Writer &w ) {
                  for ( std::size_t k = 0; k < 9; ++k )
                  {
                      // Row-major XYZ -> camera is the transpose of m.
                      const double v = m( k % 3, k / 3 );
                      if ( !( std::abs( v ) < 2147.0 ) )
                          throw Error( Errc::InvalidArgument,
                                       "matrix entry not representable as n/1e6" );
                      w.u32( std::uint32_t( std::int32_t( std::llround( v * 1e6 ) ) ) );
                      w.u32( 1000000u );
                  }
              } ) } );
    }
    for ( std::size_t i = 0; i < record.matrices.size(); ++i )
    {
        const std::uint16_t code = record.matrices[i].illuminant.code;
        tags.push_back( { std::uint16_t( tag::CalibrationIlluminant1 + i ),
                          FieldType::Short, 1,
                          encode( [&]( Writer &w ) { w.u16( code ); } ) } );
    }

    Writer w( endian );
    if ( endian == Endian::Little )
        w.put( { 'I', 'I' } );
    else
        w.put( { 'M', 'M' } );
    w.u16( 42 );
    w.u32( 8 );

    const std::uint32_t ifd_size = 2 + 12 * std::uint32_t( tags.size() ) + 4;
    std::uint32_t       data_at  = 8 + ifd_size;
    w.u16( std::uint16_t( tags.size() ) );
    std::vector<const PendingTag *> out_of_line;
    for ( const auto &t : tags )
    {
        w.u16( t.tag );
        w.u16( std::uint16_t( t.type ) );
        w.u32( t.count );
        if ( t.payload.size() <= 4 )
        {
            for ( std::size_t k = 0; k < 4; ++k )
                w.put( { k < t.payload.size() ? t.payload[k] : std::uint8_t( 0 ) } );
        }
        else
        {
            w.u32( data_at );
            data_at += std::uint32_t( ( t.payload.size() + 1 ) & ~std::size_t( 1 ) );
            out_of_line.push_back( &t );
        }
    }
    w.u32( 0 );
    for ( const auto *t : out_of_line )
    {
        w.bytes().insert( w.bytes().end(), t->payload.begin(), t->payload.end() );
        if ( t->payload.size() % 2 )
            w.put( { 0 } );
    }
    return std::move( w.bytes() );
}

} // namespace speccurve
