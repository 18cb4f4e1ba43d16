#pragma once

#include "ilp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <vector>

namespace cltl::detail
{

/// Conflict-driven search for models whose variables are all 0/1. Linear rows propagate by
/// slack counting and explain their implications lazily; learned clauses use two watches.
class ConflictSearch
{
public:
  static bool applicable( IlpModel const& model )
  {
    for ( int j = 0; j < model.num_vars(); ++j )
    {
      auto const& x = model.var( j );
      if ( !x.is_integral() || x.lo < -1e-9 || x.hi > 1 + 1e-9 )
        return false;
    }
    for ( auto const& c : model.constraints() )
      for ( auto [j, a] : c.terms )
        if ( !std::isfinite( a ) )
          return false;
    return true;
  }

  ConflictSearch( IlpModel const& model, double time_budget, long node_budget )
      : model_( model ), time_budget_( time_budget ), node_budget_( node_budget ), start_( std::chrono::steady_clock::now() )
  {
    int const n = model.num_vars();
    val_.assign( n, -1 );
    level_.assign( n, 0 );
    pos_.assign( n, 0 );
    reason_.assign( n, Reason{} );
    phase_.assign( n, 0 );
    activity_.assign( n, 0.0 );
    seen_.assign( n, 0 );
    heap_index_.assign( n, -1 );
    occ_.resize( 2 * n );
    watches_.resize( 2 * n );
    for ( auto const& c : model.constraints() )
    {
      if ( c.sense != Sense::ge )
        add_row( c.terms, 1.0, c.rhs );
      if ( c.sense != Sense::le )
        add_row( c.terms, -1.0, -c.rhs );
    }
    for ( int j = 0; j < n; ++j )
      heap_insert( j );
  }

  /// Returns feasible / infeasible / unknown; values are filled when feasible.
  SolveStatus run( std::vector<double>& values, SolveStats& stats )
  {
    SolveStatus status = search();
    stats.nodes = decisions_;
    stats.max_depth = max_level_;
    stats.propagations = propagations_;
    if ( status == SolveStatus::feasible )
    {
      values.assign( val_.size(), 0.0 );
      for ( std::size_t j = 0; j < val_.size(); ++j )
        values[j] = val_[j] > 0 ? 1.0 : 0.0;
    }
    return status;
  }

private:
  using Lit = int; // 2 * var + value; true when the variable takes that value
  static constexpr double eps = 1e-9;

  static Lit make_lit( int var, int value ) { return 2 * var + value; }
  static Lit neg( Lit l ) { return l ^ 1; }
  static int var_of( Lit l ) { return l >> 1; }

  struct Row
  {
    std::vector<std::pair<Lit, double>> terms; // c > 0, sorted by decreasing c
    double d = 0.0;                            // sum of c over true literals must stay <= d
    double sum = 0.0;
  };

  struct Clause
  {
    std::vector<Lit> lits;
    int lbd = 0;
    double activity = 0.0;
    bool deleted = false;
  };

  struct Reason
  {
    int kind = 0; // 0 decision or root, 1 row, 2 clause
    int index = -1;
  };

  struct BudgetExhausted
  {
  };

  int value( Lit l ) const
  {
    int const v = val_[var_of( l )];
    return v < 0 ? -1 : ( v == ( l & 1 ) ? 1 : 0 );
  }
  int decision_level() const { return static_cast<int>( trail_lim_.size() ); }

  /// sign * sum a_j x_j <= rhs, rewritten over literals with positive coefficients.
  void add_row( std::vector<std::pair<int, double>> const& terms, double sign, double rhs )
  {
    std::map<int, double> merged;
    for ( auto [j, a] : terms )
      merged[j] += sign * a;
    Row r;
    r.d = rhs;
    for ( auto [j, a] : merged )
    {
      if ( std::abs( a ) <= 1e-12 )
        continue;
      if ( a > 0 )
        r.terms.emplace_back( make_lit( j, 1 ), a );
      else
      {
        // a x = a - |a| (1 - x)
        r.d -= a;
        r.terms.emplace_back( make_lit( j, 0 ), -a );
      }
    }
    double total = 0.0;
    for ( auto const& t : r.terms )
      total += t.second;
    if ( total <= r.d + eps )
      return; // never binding
    if ( r.d < -eps )
    {
      root_conflict_ = true;
      return;
    }
    std::stable_sort( r.terms.begin(), r.terms.end(), []( auto const& x, auto const& y ) { return x.second > y.second; } );
    int const i = static_cast<int>( rows_.size() );
    for ( auto const& [l, c] : r.terms )
      occ_[l].emplace_back( i, c );
    rows_.push_back( std::move( r ) );
  }

  void assign( Lit l, Reason why )
  {
    int const x = var_of( l );
    val_[x] = l & 1;
    level_[x] = decision_level();
    pos_[x] = static_cast<int>( trail_.size() );
    reason_[x] = why;
    trail_.push_back( l );
  }

  /// Returns the conflicting reason, or kind 0 when propagation reached a fixpoint.
  Reason propagate()
  {
    while ( qhead_ < trail_.size() )
    {
      Lit const p = trail_[qhead_++];
      ++propagations_;
      for ( auto [i, c] : occ_[p] )
        rows_[i].sum += c;
      for ( auto [i, c] : occ_[p] )
      {
        Row const& r = rows_[i];
        if ( r.sum > r.d + eps )
          return { 1, i };
        double const slack = r.d - r.sum;
        for ( auto const& [l, cl] : r.terms )
        {
          if ( cl <= slack + eps )
            break;
          int const v = value( l );
          if ( v < 0 )
            assign( neg( l ), { 1, i } );
        }
      }
      // clauses watching the literal that just became false
      Lit const f = neg( p );
      auto& ws = watches_[f];
      std::size_t keep = 0;
      for ( std::size_t k = 0; k < ws.size(); ++k )
      {
        int const ci = ws[k];
        Clause& cl = clauses_[ci];
        if ( cl.deleted )
          continue;
        auto& lits = cl.lits;
        if ( lits[0] == f )
          std::swap( lits[0], lits[1] );
        if ( value( lits[0] ) == 1 )
        {
          ws[keep++] = ci;
          continue;
        }
        bool moved = false;
        for ( std::size_t m = 2; m < lits.size(); ++m )
          if ( value( lits[m] ) != 0 )
          {
            std::swap( lits[1], lits[m] );
            watches_[lits[1]].push_back( ci );
            moved = true;
            break;
          }
        if ( moved )
          continue;
        ws[keep++] = ci;
        if ( value( lits[0] ) == 0 )
        {
          for ( std::size_t m = k + 1; m < ws.size(); ++m )
            ws[keep++] = ws[m];
          ws.resize( keep );
          return { 2, ci };
        }
        assign( lits[0], { 2, ci } );
      }
      ws.resize( keep );
    }
    return {};
  }

  /// True literals that imply `l` (or, with l < 0, that make the reason conflicting).
  void explain( Reason why, Lit l, std::vector<Lit>& out ) const
  {
    out.clear();
    if ( why.kind == 2 )
    {
      for ( Lit q : clauses_[why.index].lits )
        if ( q != l )
          out.push_back( neg( q ) );
      return;
    }
    Row const& r = rows_[why.index];
    int const limit = l < 0 ? static_cast<int>( trail_.size() ) : pos_[var_of( l )];
    // the implied literal l is true, so its negation's term was forced false
    double need = r.d;
    if ( l >= 0 )
      for ( auto const& [q, c] : r.terms )
        if ( q == neg( l ) )
        {
          need = r.d - c;
          break;
        }
    double sum = 0.0;
    for ( auto const& [q, c] : r.terms )
    {
      if ( value( q ) != 1 || pos_[var_of( q )] >= limit )
        continue;
      out.push_back( q );
      sum += c;
      if ( sum > need + eps )
        break;
    }
  }

  void bump( int x )
  {
    if ( ( activity_[x] += var_inc_ ) > 1e100 )
    {
      for ( double& a : activity_ )
        a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    if ( heap_index_[x] >= 0 )
      heap_up( heap_index_[x] );
  }

  /// First-UIP learning. Returns the learned clause (asserting literal first) and its level.
  int analyze( Reason conflict, std::vector<Lit>& learnt )
  {
    learnt.assign( 1, -1 );
    int pending = 0;
    Lit p = -1;
    std::size_t index = trail_.size();
    std::vector<Lit> ante;
    Reason why = conflict;
    std::vector<int> touched;
    for ( ;; )
    {
      explain( why, p, ante );
      if ( why.kind == 2 )
        bump_clause( why.index );
      for ( Lit q : ante )
      {
        int const x = var_of( q );
        if ( seen_[x] || level_[x] == 0 )
          continue;
        seen_[x] = 1;
        touched.push_back( x );
        bump( x );
        if ( level_[x] == decision_level() )
          ++pending;
        else
          learnt.push_back( neg( q ) );
      }
      do
        --index;
      while ( !seen_[var_of( trail_[index] )] );
      p = trail_[index];
      seen_[var_of( p )] = 0;
      if ( --pending == 0 )
        break;
      why = reason_[var_of( p )];
    }
    learnt[0] = neg( p );
    for ( int x : touched )
      seen_[x] = 0;
    int back = 0;
    for ( std::size_t k = 1; k < learnt.size(); ++k )
      if ( level_[var_of( learnt[k] )] > back )
      {
        back = level_[var_of( learnt[k] )];
        std::swap( learnt[1], learnt[k] );
      }
    return back;
  }

  void bump_clause( int ci )
  {
    if ( ( clauses_[ci].activity += cla_inc_ ) > 1e20 )
    {
      for ( auto& c : clauses_ )
        c.activity *= 1e-20;
      cla_inc_ *= 1e-20;
    }
  }

  void backtrack( int level )
  {
    if ( decision_level() <= level )
      return;
    std::size_t const stop = trail_lim_[level];
    for ( std::size_t k = trail_.size(); k-- > stop; )
    {
      Lit const l = trail_[k];
      int const x = var_of( l );
      if ( k < qhead_ )
        for ( auto [i, c] : occ_[l] )
          rows_[i].sum -= c;
      phase_[x] = static_cast<char>( l & 1 );
      val_[x] = -1;
      if ( heap_index_[x] < 0 )
        heap_insert( x );
    }
    trail_.resize( stop );
    trail_lim_.resize( level );
    qhead_ = std::min( qhead_, trail_.size() );
  }

  int lbd( std::vector<Lit> const& lits )
  {
    ++lbd_stamp_;
    for ( Lit l : lits )
      if ( lbd_mark_.size() <= static_cast<std::size_t>( level_[var_of( l )] ) )
        lbd_mark_.resize( level_[var_of( l )] + 1, 0 );
    int count = 0;
    for ( Lit l : lits )
    {
      int const lv = level_[var_of( l )];
      if ( lbd_mark_[lv] != lbd_stamp_ )
      {
        lbd_mark_[lv] = lbd_stamp_;
        ++count;
      }
    }
    return count;
  }

  bool locked( int ci ) const
  {
    Lit const l = clauses_[ci].lits[0];
    int const x = var_of( l );
    return value( l ) == 1 && reason_[x].kind == 2 && reason_[x].index == ci;
  }

  void reduce_db()
  {
    std::vector<int> live;
    for ( int ci = 0; ci < static_cast<int>( clauses_.size() ); ++ci )
      if ( !clauses_[ci].deleted && clauses_[ci].lbd > 2 )
        live.push_back( ci );
    std::sort( live.begin(), live.end(), [&]( int a, int b ) {
      if ( clauses_[a].lbd != clauses_[b].lbd )
        return clauses_[a].lbd > clauses_[b].lbd;
      return clauses_[a].activity < clauses_[b].activity;
    } );
    std::size_t removed = 0;
    for ( std::size_t k = 0; k < live.size() / 2; ++k )
      if ( !locked( live[k] ) )
      {
        clauses_[live[k]].deleted = true;
        clauses_[live[k]].lits.shrink_to_fit();
        ++removed;
      }
    live_learnts_ -= static_cast<long>( removed );
  }

  static double luby( double y, long i )
  {
    long size = 1, seq = 0;
    while ( size < i + 1 )
    {
      ++seq;
      size = 2 * size + 1;
    }
    while ( size - 1 != i )
    {
      size = ( size - 1 ) >> 1;
      --seq;
      i %= size;
    }
    return std::pow( y, static_cast<double>( seq ) );
  }

  void check_budget()
  {
    if ( node_budget_ > 0 && decisions_ > node_budget_ )
      throw BudgetExhausted{};
    if ( time_budget_ > 0 && ( ( decisions_ + conflicts_ ) & 255 ) == 0 )
    {
      std::chrono::duration<double> const elapsed = std::chrono::steady_clock::now() - start_;
      if ( elapsed.count() > time_budget_ )
        throw BudgetExhausted{};
    }
  }

  SolveStatus search()
  {
    if ( root_conflict_ )
      return SolveStatus::infeasible;
    for ( int j = 0; j < model_.num_vars(); ++j )
    {
      auto const& x = model_.var( j );
      double const lo = std::ceil( x.lo - 1e-6 ), hi = std::floor( x.hi + 1e-6 );
      if ( lo > hi )
        return SolveStatus::infeasible;
      if ( lo == hi && val_[j] < 0 )
        assign( make_lit( j, static_cast<int>( lo ) ), {} );
    }
    // rows whose slack already forces literals with nothing assigned
    for ( int i = 0; i < static_cast<int>( rows_.size() ); ++i )
      for ( auto const& [l, c] : rows_[i].terms )
      {
        if ( c <= rows_[i].d + eps )
          break;
        if ( value( l ) == 1 )
          return SolveStatus::infeasible;
        if ( value( l ) < 0 )
          assign( neg( l ), { 1, i } );
      }
    if ( propagate().kind != 0 )
      return SolveStatus::infeasible;

    long restart_count = 0;
    double max_learnts = std::max( 2000.0, rows_.size() / 3.0 );
    std::vector<Lit> learnt;
    try
    {
      for ( ;; )
      {
        long const limit = static_cast<long>( 100 * luby( 2.0, restart_count++ ) );
        long local = 0;
        for ( ;; )
        {
          Reason const conflict = propagate();
          if ( conflict.kind != 0 )
          {
            ++conflicts_;
            ++local;
            check_budget();
            if ( decision_level() == 0 )
              return SolveStatus::infeasible;
            int const back = analyze( conflict, learnt );
            backtrack( back );
            if ( learnt.size() == 1 )
              assign( learnt[0], {} );
            else
            {
              int const ci = static_cast<int>( clauses_.size() );
              Clause c;
              c.lits = learnt;
              c.lbd = lbd( learnt );
              clauses_.push_back( std::move( c ) );
              watches_[learnt[0]].push_back( ci );
              watches_[learnt[1]].push_back( ci );
              bump_clause( ci );
              ++live_learnts_;
              assign( learnt[0], { 2, ci } );
            }
            var_inc_ /= 0.95;
            cla_inc_ /= 0.999;
            continue;
          }
          if ( local >= limit )
          {
            backtrack( 0 );
            break;
          }
          if ( live_learnts_ > max_learnts + static_cast<double>( trail_.size() ) )
          {
            reduce_db();
            max_learnts *= 1.1;
          }
          int next = -1;
          while ( !heap_.empty() )
          {
            int const x = heap_pop();
            if ( val_[x] < 0 )
            {
              next = x;
              break;
            }
          }
          if ( next < 0 )
            return SolveStatus::feasible;
          ++decisions_;
          check_budget();
          trail_lim_.push_back( trail_.size() );
          max_level_ = std::max( max_level_, decision_level() );
          assign( make_lit( next, phase_[next] ), {} );
        }
      }
    }
    catch ( BudgetExhausted const& )
    {
      return SolveStatus::unknown;
    }
  }

  // binary max-heap on activity, ties by lower index
  bool heap_less( int a, int b ) const
  {
    return activity_[a] != activity_[b] ? activity_[a] > activity_[b] : a < b;
  }
  void heap_insert( int x )
  {
    heap_index_[x] = static_cast<int>( heap_.size() );
    heap_.push_back( x );
    heap_up( heap_index_[x] );
  }
  void heap_up( int k )
  {
    int const x = heap_[k];
    while ( k > 0 )
    {
      int const parent = ( k - 1 ) / 2;
      if ( !heap_less( x, heap_[parent] ) )
        break;
      heap_[k] = heap_[parent];
      heap_index_[heap_[k]] = k;
      k = parent;
    }
    heap_[k] = x;
    heap_index_[x] = k;
  }
  int heap_pop()
  {
    int const top = heap_[0];
    heap_index_[top] = -1;
    int const last = heap_.back();
    heap_.pop_back();
    if ( !heap_.empty() )
    {
      int k = 0;
      int const n = static_cast<int>( heap_.size() );
      for ( ;; )
      {
        int child = 2 * k + 1;
        if ( child >= n )
          break;
        if ( child + 1 < n && heap_less( heap_[child + 1], heap_[child] ) )
          ++child;
        if ( !heap_less( heap_[child], last ) )
          break;
        heap_[k] = heap_[child];
        heap_index_[heap_[k]] = k;
        k = child;
      }
      heap_[k] = last;
      heap_index_[last] = k;
    }
    return top;
  }

  IlpModel const& model_;
  double time_budget_;
  long node_budget_;
  std::chrono::steady_clock::time_point start_;

  std::vector<Row> rows_;
  std::vector<std::vector<std::pair<int, double>>> occ_;
  std::vector<Clause> clauses_;
  std::vector<std::vector<int>> watches_;
  bool root_conflict_ = false;

  std::vector<int> val_, level_, pos_;
  std::vector<Reason> reason_;
  std::vector<char> phase_, seen_;
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<double> activity_;
  std::vector<int> heap_, heap_index_;
  double var_inc_ = 1.0, cla_inc_ = 1.0;
  std::vector<int> lbd_mark_;
  int lbd_stamp_ = 0;
  long live_learnts_ = 0;

  long decisions_ = 0, conflicts_ = 0, propagations_ = 0;
  int max_level_ = 0;
};

} // namespace cltl::detail
