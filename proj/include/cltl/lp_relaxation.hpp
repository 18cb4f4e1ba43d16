#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace cltl::detail
{

/// Feasibility LP  row_lo <= A x <= row_hi,  lo <= x <= hi  solved by a bounded primal
/// simplex that minimizes the sum of bound violations (phase 1 only).
///
/// Every row i gets a logical variable r_i = a_i x, so the variables are the n structural
/// columns followed by m logicals, all with bounds. The tableau is kept dense and condensed:
/// T[p][q] expresses basic variable p in terms of nonbasic variable q. The starting basis is
/// all-logical (T = A). Bounds may change between solves; the basis is kept (warm start).
class BoundedSimplex
{
public:
  enum class Result
  {
    feasible,
    infeasible,
    iteration_limit,
  };

  static constexpr double inf = std::numeric_limits<double>::infinity();

  BoundedSimplex() = default;

  BoundedSimplex( int n, std::vector<std::vector<std::pair<int, double>>> const& rows, std::vector<double> const& lo,
                  std::vector<double> const& hi, std::vector<double> const& row_lo, std::vector<double> const& row_hi )
  {
    load( n, rows, lo, hi, row_lo, row_hi );
  }

  void load( int n, std::vector<std::vector<std::pair<int, double>>> const& rows, std::vector<double> const& lo,
             std::vector<double> const& hi, std::vector<double> const& row_lo, std::vector<double> const& row_hi )
  {
    n_ = n;
    m_ = static_cast<int>( rows.size() );
    rows_ = rows;
    L_.assign( n_ + m_, 0.0 );
    U_.assign( n_ + m_, 0.0 );
    for ( int j = 0; j < n_; ++j )
    {
      L_[j] = lo[j];
      U_[j] = hi[j];
    }
    for ( int i = 0; i < m_; ++i )
    {
      L_[n_ + i] = row_lo[i];
      U_[n_ + i] = row_hi[i];
    }
    reset_basis();
  }

  int num_structural() const { return n_; }
  int num_rows() const { return m_; }
  long iterations() const { return iterations_; }

  double value( int k ) const { return x_[k]; }
  double lower( int k ) const { return L_[k]; }
  double upper( int k ) const { return U_[k]; }

  /// Changes the bounds of variable k (structural j or logical n + i).
  void set_bounds( int k, double lo, double hi )
  {
    L_[k] = lo;
    U_[k] = hi;
    if ( pos_[k] < 0 )
    {
      int const q = -pos_[k] - 1;
      double const target = snap( k, x_[k] );
      double const delta = target - x_[k];
      if ( delta != 0.0 )
      {
        x_[k] = target;
        for ( int p = 0; p < m_; ++p )
        {
          double const t = T_[idx( p, q )];
          if ( t != 0.0 )
            x_[basic_[p]] += t * delta;
        }
      }
    }
  }

  Result solve( long max_iterations )
  {
    long const start = iterations_;
    int degenerate_streak = 0;
    for ( ;; )
    {
      if ( iterations_ - last_refresh_ >= refresh_period )
        refresh();

      // infeasibility signs of the basic variables
      bool any = false;
      std::fill( d_.begin(), d_.end(), 0.0 );
      for ( int p = 0; p < m_; ++p )
      {
        int const k = basic_[p];
        double s = 0.0;
        if ( x_[k] < L_[k] - tol_for( L_[k] ) )
          s = -1.0;
        else if ( x_[k] > U_[k] + tol_for( U_[k] ) )
          s = 1.0;
        if ( s == 0.0 )
          continue;
        any = true;
        double const* row = &T_[idx( p, 0 )];
        for ( int q = 0; q < n_; ++q )
          d_[q] += s * row[q];
      }
      if ( !any )
        return Result::feasible;
      if ( iterations_ - start >= max_iterations )
        return Result::iteration_limit;

      bool const bland = degenerate_streak > bland_after;
      int enter = -1;
      double best = 0.0, dir = 0.0;
      for ( int q = 0; q < n_; ++q )
      {
        int const k = nonbasic_[q];
        double const dq = d_[q];
        double dd = 0.0;
        if ( dq < -dual_tol && x_[k] < U_[k] )
          dd = 1.0;
        else if ( dq > dual_tol && x_[k] > L_[k] )
          dd = -1.0;
        else
          continue;
        if ( bland )
        {
          if ( enter < 0 || k < nonbasic_[enter] )
          {
            enter = q;
            dir = dd;
          }
        }
        else if ( std::abs( dq ) > best )
        {
          best = std::abs( dq );
          enter = q;
          dir = dd;
        }
      }
      if ( enter < 0 )
      {
        // re-check after a fresh recomputation before declaring infeasibility
        if ( iterations_ != last_refresh_ )
        {
          refresh();
          continue;
        }
        return Result::infeasible;
      }

      int const ke = nonbasic_[enter];
      double theta = U_[ke] - L_[ke];
      int leave = -1;
      double leave_bound = 0.0, leave_alpha = 0.0;
      for ( int p = 0; p < m_; ++p )
      {
        double const t = T_[idx( p, enter )];
        if ( std::abs( t ) <= pivot_tol )
          continue;
        double const alpha = dir * t;
        int const k = basic_[p];
        double const x = x_[k];
        double limit = inf, bound = 0.0;
        if ( x < L_[k] - tol_for( L_[k] ) )
        {
          if ( alpha > 0 )
          {
            limit = ( L_[k] - x ) / alpha;
            bound = L_[k];
          }
        }
        else if ( x > U_[k] + tol_for( U_[k] ) )
        {
          if ( alpha < 0 )
          {
            limit = ( x - U_[k] ) / -alpha;
            bound = U_[k];
          }
        }
        else if ( alpha > 0 && U_[k] < inf )
        {
          limit = std::max( 0.0, ( U_[k] - x ) / alpha );
          bound = U_[k];
        }
        else if ( alpha < 0 && L_[k] > -inf )
        {
          limit = std::max( 0.0, ( x - L_[k] ) / -alpha );
          bound = L_[k];
        }
        if ( limit == inf )
          continue;
        bool take = false;
        if ( limit < theta - 1e-12 )
          take = true;
        else if ( limit <= theta + 1e-12 && leave >= 0 )
          take = bland ? k < basic_[leave] : std::abs( alpha ) > std::abs( leave_alpha );
        else if ( limit <= theta + 1e-12 && leave < 0 && theta < inf )
          take = std::abs( alpha ) > 1e-3; // prefer a pivot over a bound flip of equal length
        if ( take )
        {
          theta = std::min( theta, limit );
          leave = p;
          leave_bound = bound;
          leave_alpha = alpha;
        }
      }
      if ( theta == inf )
      {
        // cannot happen in exact arithmetic; recover with a fresh recomputation
        refresh();
        ++iterations_;
        continue;
      }

      ++iterations_;
      degenerate_streak = theta <= 1e-12 ? degenerate_streak + 1 : 0;

      // move along the edge
      double const step = dir * theta;
      if ( step != 0.0 )
      {
        x_[ke] += step;
        for ( int p = 0; p < m_; ++p )
        {
          double const t = T_[idx( p, enter )];
          if ( t != 0.0 )
            x_[basic_[p]] += t * step;
        }
      }
      if ( leave < 0 )
      {
        x_[ke] = dir > 0 ? U_[ke] : L_[ke]; // bound flip
        continue;
      }
      x_[basic_[leave]] = leave_bound;
      pivot( leave, enter );
    }
  }

  /// Recomputes basic values from the nonbasic ones.
  void refresh()
  {
    last_refresh_ = iterations_;
    for ( int p = 0; p < m_; ++p )
    {
      double s = 0.0;
      double const* row = &T_[idx( p, 0 )];
      for ( int q = 0; q < n_; ++q )
        if ( row[q] != 0.0 )
          s += row[q] * x_[nonbasic_[q]];
      x_[basic_[p]] = s;
    }
  }

  /// Largest violation of a_i x = r_i over all rows.
  double residual() const
  {
    double worst = 0.0;
    for ( int i = 0; i < m_; ++i )
    {
      double s = 0.0;
      for ( auto [j, a] : rows_[i] )
        s += a * x_[j];
      worst = std::max( worst, std::abs( s - x_[n_ + i] ) / ( 1.0 + std::abs( s ) ) );
    }
    return worst;
  }

  /// Back to the all-logical basis (cold start), keeping bounds.
  void reset_basis()
  {
    T_.assign( static_cast<std::size_t>( m_ ) * n_, 0.0 );
    for ( int i = 0; i < m_; ++i )
      for ( auto [j, a] : rows_[i] )
        T_[idx( i, j )] += a;
    basic_.resize( m_ );
    nonbasic_.resize( n_ );
    pos_.assign( n_ + m_, 0 );
    x_.assign( n_ + m_, 0.0 );
    d_.assign( n_, 0.0 );
    for ( int j = 0; j < n_; ++j )
    {
      nonbasic_[j] = j;
      pos_[j] = -j - 1;
      x_[j] = snap( j, 0.0 );
    }
    for ( int i = 0; i < m_; ++i )
    {
      basic_[i] = n_ + i;
      pos_[n_ + i] = i;
    }
    refresh();
  }

  static constexpr double pivot_tol = 1e-9;
  static constexpr double dual_tol = 1e-9;
  static constexpr long refresh_period = 200;
  static constexpr int bland_after = 50;

private:
  std::size_t idx( int p, int q ) const { return static_cast<std::size_t>( p ) * n_ + q; }

  static double tol_for( double bound ) { return 1e-9 * ( 1.0 + std::abs( bound ) ); }

  /// Nearest finite bound of k to v (nonbasic variables sit on a bound).
  double snap( int k, double v ) const
  {
    double const lo = L_[k], hi = U_[k];
    if ( lo > -inf && hi < inf )
      return ( v - lo <= hi - v ) ? lo : hi;
    if ( lo > -inf )
      return lo;
    if ( hi < inf )
      return hi;
    return 0.0;
  }

  void pivot( int r, int q )
  {
    double* row_r = &T_[idx( r, 0 )];
    double const piv = row_r[q];
    nz_.clear();
    for ( int k = 0; k < n_; ++k )
    {
      if ( k == q )
      {
        row_r[k] = 1.0 / piv;
        nz_.push_back( k );
      }
      else if ( row_r[k] != 0.0 )
      {
        row_r[k] = -row_r[k] / piv;
        if ( std::abs( row_r[k] ) < 1e-13 )
          row_r[k] = 0.0;
        else
          nz_.push_back( k );
      }
    }
    for ( int p = 0; p < m_; ++p )
    {
      if ( p == r )
        continue;
      double* row_p = &T_[idx( p, 0 )];
      double const f = row_p[q];
      if ( f == 0.0 )
        continue;
      for ( int k : nz_ )
      {
        if ( k == q )
          row_p[k] = f * row_r[k];
        else
        {
          double const v = row_p[k] + f * row_r[k];
          row_p[k] = std::abs( v ) < 1e-13 ? 0.0 : v;
        }
      }
    }
    int const kin = nonbasic_[q], kout = basic_[r];
    basic_[r] = kin;
    nonbasic_[q] = kout;
    pos_[kin] = r;
    pos_[kout] = -q - 1;
  }

  int n_ = 0;
  int m_ = 0;
  std::vector<std::vector<std::pair<int, double>>> rows_;
  std::vector<double> T_;
  std::vector<int> basic_;
  std::vector<int> nonbasic_;
  std::vector<int> pos_;
  std::vector<double> L_, U_, x_, d_;
  std::vector<int> nz_;
  long iterations_ = 0;
  long last_refresh_ = 0;
};

} // namespace cltl::detail
