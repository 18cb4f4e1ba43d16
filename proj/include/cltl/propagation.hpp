#pragma once

#include "ilp.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace cltl::detail
{

/// Activity-based bound propagation over the rows of a model, with an undo trail.
class Propagator
{
public:
  static constexpr double inf = std::numeric_limits<double>::infinity();

  explicit Propagator( IlpModel const& model )
  {
    int const n = model.num_vars();
    lo_.resize( n );
    hi_.resize( n );
    integral_.resize( n );
    cols_.resize( n );
    for ( int j = 0; j < n; ++j )
    {
      lo_[j] = model.var( j ).lo;
      hi_[j] = model.var( j ).hi;
      integral_[j] = model.var( j ).is_integral();
    }
    for ( auto const& c : model.constraints() )
    {
      int const i = static_cast<int>( rows_.size() );
      rows_.push_back( c.terms );
      row_lo_.push_back( c.sense == Sense::le ? -inf : c.rhs );
      row_hi_.push_back( c.sense == Sense::ge ? inf : c.rhs );
      for ( auto [j, a] : c.terms )
        cols_[j].push_back( i );
    }
    queued_.assign( rows_.size(), 0 );
    for ( int i = 0; i < static_cast<int>( rows_.size() ); ++i )
      enqueue( i );
  }

  int num_vars() const { return static_cast<int>( lo_.size() ); }
  int num_rows() const { return static_cast<int>( rows_.size() ); }
  double lo( int j ) const { return lo_[j]; }
  double hi( int j ) const { return hi_[j]; }
  bool fixed( int j ) const { return lo_[j] == hi_[j]; }
  bool integral( int j ) const { return integral_[j]; }
  std::vector<std::pair<int, double>> const& row( int i ) const { return rows_[i]; }
  double row_lo( int i ) const { return row_lo_[i]; }
  double row_hi( int i ) const { return row_hi_[i]; }
  long work() const { return work_; }

  std::size_t mark() const { return trail_.size(); }

  void undo( std::size_t mark )
  {
    while ( trail_.size() > mark )
    {
      auto const& e = trail_.back();
      lo_[e.var] = e.lo;
      hi_[e.var] = e.hi;
      trail_.pop_back();
    }
    clear_queue();
  }

  /// Variables whose bounds changed since `mark`, possibly with repetitions.
  template<class Fn>
  void for_each_changed( std::size_t mark, Fn&& fn ) const
  {
    for ( std::size_t k = mark; k < trail_.size(); ++k )
      fn( trail_[k].var );
  }

  bool tighten( int j, double lo, double hi )
  {
    if ( integral_[j] )
    {
      lo = std::ceil( lo - 1e-6 );
      hi = std::floor( hi + 1e-6 );
    }
    bool changed = false;
    double new_lo = lo_[j], new_hi = hi_[j];
    if ( lo > new_lo + improvement( j, new_lo ) )
    {
      new_lo = lo;
      changed = true;
    }
    if ( hi < new_hi - improvement( j, new_hi ) )
    {
      new_hi = hi;
      changed = true;
    }
    if ( !changed )
      return true;
    if ( new_lo > new_hi + 1e-9 * ( 1.0 + std::abs( new_hi ) ) )
      return false;
    if ( new_lo > new_hi )
      new_lo = new_hi = integral_[j] ? std::round( new_hi ) : 0.5 * ( new_lo + new_hi );
    trail_.push_back( { j, lo_[j], hi_[j] } );
    lo_[j] = new_lo;
    hi_[j] = new_hi;
    for ( int i : cols_[j] )
      enqueue( i );
    return true;
  }

  /// Runs the queue to a fixpoint. False on a proven conflict (the queue is cleared).
  bool propagate()
  {
    long budget = 50L * static_cast<long>( rows_.size() ) + 1000;
    while ( head_ < queue_.size() )
    {
      int const i = queue_[head_++];
      queued_[i] = 0;
      if ( --budget < 0 )
        break;
      if ( !propagate_row( i ) )
      {
        clear_queue();
        return false;
      }
    }
    clear_queue();
    return true;
  }

  /// True if every assignment within the current bounds satisfies row i.
  bool redundant( int i ) const
  {
    auto [mn, mx] = activity( i );
    return mn >= row_lo_[i] - 1e-9 && mx <= row_hi_[i] + 1e-9;
  }

  std::pair<double, double> activity( int i ) const
  {
    double mn = 0.0, mx = 0.0;
    for ( auto [j, a] : rows_[i] )
    {
      mn += a > 0 ? a * lo_[j] : a * hi_[j];
      mx += a > 0 ? a * hi_[j] : a * lo_[j];
    }
    return { mn, mx };
  }

private:
  struct TrailEntry
  {
    int var;
    double lo, hi;
  };

  double improvement( int j, double bound ) const
  {
    return integral_[j] ? 0.5 : 1e-6 * ( 1.0 + std::abs( bound ) );
  }

  void enqueue( int i )
  {
    if ( queued_[i] )
      return;
    queued_[i] = 1;
    queue_.push_back( i );
  }

  void clear_queue()
  {
    for ( std::size_t k = head_; k < queue_.size(); ++k )
      queued_[queue_[k]] = 0;
    queue_.clear();
    head_ = 0;
  }

  bool propagate_row( int i )
  {
    auto const& r = rows_[i];
    work_ += static_cast<long>( r.size() );
    double mn = 0.0, mx = 0.0;
    int mn_inf = 0, mx_inf = 0;
    for ( auto [j, a] : r )
    {
      double const cmin = a > 0 ? a * lo_[j] : a * hi_[j];
      double const cmax = a > 0 ? a * hi_[j] : a * lo_[j];
      if ( std::isinf( cmin ) )
        ++mn_inf;
      else
        mn += cmin;
      if ( std::isinf( cmax ) )
        ++mx_inf;
      else
        mx += cmax;
    }
    double const rlo = row_lo_[i], rhi = row_hi_[i];
    double const tol = 1e-6 * ( 1.0 + std::max( std::abs( mn ), std::abs( mx ) ) );
    if ( mn_inf == 0 && mn > rhi + tol )
      return false;
    if ( mx_inf == 0 && mx < rlo - tol )
      return false;
    bool const use_hi = rhi < inf && mn_inf <= 1;
    bool const use_lo = rlo > -inf && mx_inf <= 1;
    if ( !use_hi && !use_lo )
      return true;
    // cheap exit: no term can be tightened
    if ( mn_inf == 0 && mx_inf == 0 )
    {
      double max_span = 0.0;
      for ( auto [j, a] : r )
        max_span = std::max( max_span, std::abs( a ) * ( hi_[j] - lo_[j] ) );
      if ( ( !use_hi || mn + max_span <= rhi + 1e-9 ) && ( !use_lo || mx - max_span >= rlo - 1e-9 ) )
        return true;
    }
    for ( auto [j, a] : r )
    {
      double const cmin = a > 0 ? a * lo_[j] : a * hi_[j];
      double const cmax = a > 0 ? a * hi_[j] : a * lo_[j];
      double new_lo = -inf, new_hi = inf;
      if ( use_hi )
      {
        double rest;
        if ( mn_inf == 0 )
          rest = mn - cmin;
        else if ( std::isinf( cmin ) )
          rest = mn;
        else
          rest = inf;
        if ( rest < inf )
        {
          double const bound = ( rhi - rest ) / a;
          if ( a > 0 )
            new_hi = bound;
          else
            new_lo = bound;
        }
      }
      if ( use_lo )
      {
        double rest;
        if ( mx_inf == 0 )
          rest = mx - cmax;
        else if ( std::isinf( cmax ) )
          rest = mx;
        else
          rest = -inf;
        if ( rest > -inf )
        {
          double const bound = ( rlo - rest ) / a;
          if ( a > 0 )
            new_lo = std::max( new_lo, bound );
          else
            new_hi = std::min( new_hi, bound );
        }
      }
      if ( new_lo > lo_[j] || new_hi < hi_[j] )
        if ( !tighten( j, std::max( new_lo, lo_[j] ), std::min( new_hi, hi_[j] ) ) )
          return false;
    }
    return true;
  }

  std::vector<double> lo_, hi_;
  std::vector<char> integral_;
  std::vector<std::vector<std::pair<int, double>>> rows_;
  std::vector<double> row_lo_, row_hi_;
  std::vector<std::vector<int>> cols_;
  std::vector<TrailEntry> trail_;
  std::vector<int> queue_;
  std::size_t head_ = 0;
  std::vector<char> queued_;
  long work_ = 0;
};

} // namespace cltl::detail
