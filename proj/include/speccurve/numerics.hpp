// SPDX-License-Identifier: Apache-2.0
// Copyright Contributors to the speccurve Project.

#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <new>
#include <span>
#include <vector>

#include "speccurve/error.hpp"

namespace speccurve
{

/// Cache-line aligned allocator; keeps vectorized reductions independent of
/// where the heap happens to place a buffer.
template <class T> struct AlignedAllocator
{
    using value_type                     = T;
    static constexpr std::size_t alignment = 64;

    AlignedAllocator() = default;
    template <class U> AlignedAllocator( const AlignedAllocator<U> & ) noexcept {}

    T *allocate( std::size_t n )
    {
        return static_cast<T *>( ::operator new( n * sizeof( T ), std::align_val_t{ alignment } ) );
    }
    void deallocate( T *p, std::size_t ) noexcept
    {
        ::operator delete( p, std::align_val_t{ alignment } );
    }
    template <class U> bool operator==( const AlignedAllocator<U> & ) const noexcept { return true; }
};

using AlignedVector = std::vector<double, AlignedAllocator<double>>;

/// Dense row-major matrix of doubles. Constructors reject non-finite data;
/// element access through operator() is unchecked.
class Matrix
{
public:
    Matrix() = default;
    Matrix( std::size_t rows, std::size_t cols, double fill = 0.0 );
    Matrix( std::size_t rows, std::size_t cols, std::vector<double> data );
    Matrix( std::initializer_list<std::initializer_list<double>> rows );

    static Matrix identity( std::size_t n );
    static Matrix column( std::span<const double> values );
    static Matrix row( std::span<const double> values );

    std::size_t rows() const noexcept { return m_rows; }
    std::size_t cols() const noexcept { return m_cols; }
    std::size_t size() const noexcept { return m_data.size(); }
    bool        empty() const noexcept { return m_data.empty(); }

    double &operator()( std::size_t r, std::size_t c ) noexcept
    {
        return m_data[r * m_cols + c];
    }
    double operator()( std::size_t r, std::size_t c ) const noexcept
    {
        return m_data[r * m_cols + c];
    }

    std::span<double>       data() noexcept { return m_data; }
    std::span<const double> data() const noexcept { return m_data; }
    std::span<double>       row_span( std::size_t r ) noexcept
    {
        return { m_data.data() + r * m_cols, m_cols };
    }
    std::span<const double> row_span( std::size_t r ) const noexcept
    {
        return { m_data.data() + r * m_cols, m_cols };
    }

    std::vector<double> col_values( std::size_t c ) const;

    Matrix transposed() const;

    Matrix &operator+=( const Matrix &other );
    Matrix &operator-=( const Matrix &other );
    Matrix &operator*=( double s ) noexcept;

    bool operator==( const Matrix &other ) const = default;

private:
    std::size_t         m_rows = 0;
    std::size_t         m_cols = 0;
    AlignedVector       m_data;
};

Matrix operator+( Matrix a, const Matrix &b );
Matrix operator-( Matrix a, const Matrix &b );
Matrix operator*( Matrix a, double s );
Matrix operator*( double s, Matrix a );

/// Matrix product; throws ShapeMismatch.
Matrix matmul( const Matrix &a, const Matrix &b );
/// aᵀ·b without materializing the transpose.
Matrix matmul_tn( const Matrix &a, const Matrix &b );

/// Sum of elementwise products (matrices seen as vectors).
double frobenius_dot( const Matrix &a, const Matrix &b );
double frobenius_norm( const Matrix &a );
double max_abs_diff( const Matrix &a, const Matrix &b );
double max_entry( const Matrix &a );
double min_entry( const Matrix &a );

/// Solves the square system a·x = b by Gaussian elimination with partial
/// pivoting. Throws SingularSystem when a pivot falls below 1e-14 in
/// magnitude.
Matrix solve( const Matrix &a, const Matrix &b );

/// (AᵀA)⁻¹Aᵀ for a tall full-column-rank A.
Matrix pseudoinverse( const Matrix &a );

/// Lower clamp distance from ±1 applied to the cosine before arccos.
inline constexpr double kCosineClamp = 1e-12;

/// arccos(U·V / (‖U‖‖V‖)) with the cosine clamped into [−1+1e−12, 1−1e−12].
double angular_distance( const Matrix &u, const Matrix &v );

struct AngularGradient
{
    double value;
    Matrix d_u;
    Matrix d_v;
};

/// Angle plus its gradient with respect to both arguments. At the clamp
/// boundary the derivative of arccos is taken at the clamped cosine.
AngularGradient angular_distance_grad( const Matrix &u, const Matrix &v );

/// A scalar function of a matrix that also fills in its gradient.
using ScalarFunction = std::function<double( const Matrix &x, Matrix *grad )>;

/// Max over entries of |analytic − numeric| / max(1, |numeric|) using central
/// differences with step eps.
double grad_check( const ScalarFunction &f, const Matrix &x, double eps = 1e-6 );

} // namespace speccurve
