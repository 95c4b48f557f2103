// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#include "speccurve/svg.hpp"

#include <algorithm>
#include <cstdio>

#include "speccurve/records.hpp"

namespace speccurve
{

namespace
{

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 60, kRight = 20, kTop = 20, kBottom = 50;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

std::string fmt( double v )
{
    char buf[32];
    std::snprintf( buf, sizeof buf, "%.2f", v );
    return buf;
}

std::string escape( const std::string &s )
{
    std::string out;
    for ( char c : s )
    {
        switch ( c )
        {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Frame
{
    double x0, x1, y0, y1;
    double px( double x ) const { return kLeft + ( x - x0 ) / ( x1 - x0 ) * kPlotW; }
    double py( double y ) const { return kTop + ( 1.0 - ( y - y0 ) / ( y1 - y0 ) ) * kPlotH; }
};

std::string header()
{
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + fmt( kWidth ) + " " +
           fmt( kHeight ) + "\" width=\"" + fmt( kWidth ) + "\" height=\"" + fmt( kHeight ) +
           "\" font-family=\"sans-serif\" font-size=\"11\">\n"
           "<rect x=\"0\" y=\"0\" width=\"" +
           fmt( kWidth ) + "\" height=\"" + fmt( kHeight ) + "\" fill=\"white\"/>\n";
}

std::string axes( const Frame &f, const std::vector<double> &xticks,
                  const std::vector<double> &yticks, const std::string &xlabel,
                  const std::string &ylabel )
{
    std::string s;
    s += "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    s += "<rect x=\"" + fmt( kLeft ) + "\" y=\"" + fmt( kTop ) + "\" width=\"" + fmt( kPlotW ) +
         "\" height=\"" + fmt( kPlotH ) + "\"/>\n";
    for ( double x : xticks )
        s += "<line x1=\"" + fmt( f.px( x ) ) + "\" y1=\"" + fmt( kTop + kPlotH ) + "\" x2=\"" +
             fmt( f.px( x ) ) + "\" y2=\"" + fmt( kTop + kPlotH + 5 ) + "\"/>\n";
    for ( double y : yticks )
        s += "<line x1=\"" + fmt( kLeft - 5 ) + "\" y1=\"" + fmt( f.py( y ) ) + "\" x2=\"" +
             fmt( kLeft ) + "\" y2=\"" + fmt( f.py( y ) ) + "\"/>\n";
    s += "</g>\n<g fill=\"black\">\n";
    for ( double x : xticks )
        s += "<text x=\"" + fmt( f.px( x ) ) + "\" y=\"" + fmt( kTop + kPlotH + 18 ) +
             "\" text-anchor=\"middle\">" + fmt( x ) + "</text>\n";
    for ( double y : yticks )
        s += "<text x=\"" + fmt( kLeft - 8 ) + "\" y=\"" + fmt( f.py( y ) + 4 ) +
             "\" text-anchor=\"end\">" + fmt( y ) + "</text>\n";
    s += "<text x=\"" + fmt( kLeft + kPlotW / 2 ) + "\" y=\"" + fmt( kHeight - 8 ) +
         "\" text-anchor=\"middle\">" + escape( xlabel ) + "</text>\n";
    s += "<text x=\"14\" y=\"" + fmt( kTop + kPlotH / 2 ) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " + fmt( kTop + kPlotH / 2 ) +
         ")\">" + escape( ylabel ) + "</text>\n";
    s += "</g>\n";
    return s;
}

} // namespace

std::string plot_svg( const std::vector<LabeledCurve> &curves )
{
    if ( curves.empty() )
        throw Error( Errc::InvalidArgument, "nothing to plot" );

    const Frame f{ 400.0, 700.0, 0.0, 1.0 };
    std::string s = header();
    s += axes( f, { 400, 450, 500, 550, 600, 650, 700 }, { 0, 0.25, 0.5, 0.75, 1.0 },
               "wavelength (nm)", "relative sensitivity" );

    static const char *colours[3] = { "#d62728", "#2ca02c", "#1f77b4" };
    for ( std::size_t c = 0; c < curves.size(); ++c )
    {
        const auto &cur  = curves[c].curve;
        const bool  dash = c % 2 == 1;
        s += "<g fill=\"none\" stroke-width=\"1.5\"" +
             std::string( dash ? " stroke-dasharray=\"6 4\"" : "" ) + ">\n";
        for ( std::size_t k = 0; k < 3; ++k )
        {
            s += "<polyline stroke=\"" + std::string( colours[k] ) + "\" points=\"";
            for ( std::size_t i = 0; i < cur.grid.n; ++i )
            {
                const double y = std::clamp( cur.data( i, k ), 0.0, 1.0 );
                s += ( i ? " " : "" ) + fmt( f.px( cur.grid.wavelength( i ) ) ) + "," +
                     fmt( f.py( y ) );
            }
            s += "\"/>\n";
        }
        s += "</g>\n";
        const double ly = kTop + 14 + 14 * double( c );
        s += "<line x1=\"" + fmt( kLeft + kPlotW - 150 ) + "\" y1=\"" + fmt( ly - 4 ) +
             "\" x2=\"" + fmt( kLeft + kPlotW - 125 ) + "\" y2=\"" + fmt( ly - 4 ) +
             "\" stroke=\"black\"" + ( dash ? " stroke-dasharray=\"6 4\"" : "" ) + "/>\n";
        s += "<text x=\"" + fmt( kLeft + kPlotW - 120 ) + "\" y=\"" + fmt( ly ) + "\">" +
             escape( curves[c].label ) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

void plot_svg( const std::vector<LabeledCurve> &curves, const std::filesystem::path &path )
{
    write_text_file( path, plot_svg( curves ) );
}

std::string locus_svg( const std::vector<LocusPoint> &locus,
                       const std::vector<RbChromaticity> &points )
{
    if ( locus.empty() )
        throw Error( Errc::InvalidArgument, "empty locus" );
    double rmin = 1, rmax = 0, bmin = 1, bmax = 0;
    auto   extend = [&]( double r, double b ) {
        rmin = std::min( rmin, r );
        rmax = std::max( rmax, r );
        bmin = std::min( bmin, b );
        bmax = std::max( bmax, b );
    };
    for ( const auto &p : locus )
        extend( p.r, p.b );
    for ( const auto &p : points )
        extend( p.r, p.b );
    const double pad_r = std::max( 0.01, ( rmax - rmin ) * 0.1 );
    const double pad_b = std::max( 0.01, ( bmax - bmin ) * 0.1 );
    const Frame  f{ rmin - pad_r, rmax + pad_r, bmin - pad_b, bmax + pad_b };

    std::vector<double> xt, yt;
    for ( int i = 0; i <= 4; ++i )
    {
        xt.push_back( f.x0 + ( f.x1 - f.x0 ) * i / 4.0 );
        yt.push_back( f.y0 + ( f.y1 - f.y0 ) * i / 4.0 );
    }
    std::string s = header();
    s += axes( f, xt, yt, "r", "b" );
    s += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    for ( std::size_t i = 0; i < locus.size(); ++i )
        s += ( i ? " " : "" ) + fmt( f.px( locus[i].r ) ) + "," + fmt( f.py( locus[i].b ) );
    s += "\"/>\n<g fill=\"#1f77b4\">\n";
    for ( const auto &p : points )
        s += "<circle cx=\"" + fmt( f.px( p.r ) ) + "\" cy=\"" + fmt( f.py( p.b ) ) +
             "\" r=\"2.5\"/>\n";
    s += "</g>\n</svg>\n";
    return s;
}

} // namespace speccurve
