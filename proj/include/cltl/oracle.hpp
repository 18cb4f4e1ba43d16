#pragma once

#include "encoder_continuous.hpp"
#include "encoding.hpp"
#include "error.hpp"
#include "formula.hpp"
#include "system.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace cltl
{

/// Labels along a lasso: positions 0..H-1, the successor of H-1 is `loop_start`.
struct LabeledLasso
{
  std::vector<std::vector<std::string>> labels;
  int loop_start = 0;

  int length() const { return static_cast<int>( labels.size() ); }
  int period() const { return length() - loop_start; }

  /// Position of step t of the infinite word.
  int position( long t ) const
  {
    if ( t < length() )
      return static_cast<int>( t );
    return loop_start + static_cast<int>( ( t - loop_start ) % period() );
  }
};

/// The word from step t on, as a lasso of its own.
inline LabeledLasso suffix( LabeledLasso const& lasso, long t )
{
  LabeledLasso out;
  if ( t <= lasso.loop_start )
  {
    out.labels.assign( lasso.labels.begin() + t, lasso.labels.end() );
    out.loop_start = lasso.loop_start - static_cast<int>( t );
    return out;
  }
  for ( int k = 0; k < lasso.period(); ++k )
    out.labels.push_back( lasso.labels[lasso.position( t + k )] );
  return out;
}

inline LabeledLasso labeled_lasso( TransitionSystem const& ts, LassoTrajectory const& traj )
{
  if ( traj.horizon() < 1 || traj.loop_start < 0 || traj.loop_start >= traj.horizon() )
    throw Error( "malformed lasso: horizon " + std::to_string( traj.horizon() ) + ", loop start " + std::to_string( traj.loop_start ) );
  if ( traj.states.back() != traj.states[traj.loop_start] )
    throw Error( "lasso does not close: last state differs from the loop start state" );
  LabeledLasso out;
  out.loop_start = traj.loop_start;
  for ( int t = 0; t < traj.horizon(); ++t )
    out.labels.push_back( ts.labels.at( traj.states[t] ) );
  return out;
}

inline std::vector<LabeledLasso> labeled_lassos( MultiRobotInstance const& inst, std::vector<LassoTrajectory> const& pi )
{
  std::vector<LabeledLasso> out;
  for ( std::size_t n = 0; n < pi.size(); ++n )
    out.push_back( labeled_lasso( inst.systems.at( n ), pi[n] ) );
  return out;
}

/// Atoms whose polytope contains the state (within `tol`).
inline LabeledLasso labeled_lasso( ContinuousSystem const& sys, ContinuousTrajectory const& tr, double tol = 1e-7 )
{
  LabeledLasso out;
  out.loop_start = tr.loop_start;
  for ( std::size_t t = 0; t + 1 < tr.states.size(); ++t )
  {
    std::vector<std::string> l;
    for ( auto const& [name, poly] : sys.atoms )
      if ( poly.contains( tr.states[t], tol ) )
        l.push_back( name );
    out.labels.push_back( std::move( l ) );
  }
  return out;
}

/// True if every consecutive pair of the lasso is a transition and it closes.
inline std::optional<std::string> check_lasso( TransitionSystem const& ts, LassoTrajectory const& traj, int init )
{
  if ( traj.states.empty() || traj.states.front() != init )
    return "lasso does not start in the initial state";
  if ( traj.loop_start < 0 || traj.loop_start >= traj.horizon() )
    return "loop start out of range";
  for ( std::size_t t = 0; t + 1 < traj.states.size(); ++t )
    if ( !ts.has_transition( traj.states[t], traj.states[t + 1] ) )
      return "no transition " + ts.states[traj.states[t]] + " -> " + ts.states[traj.states[t + 1]] + " at t=" + std::to_string( t );
  if ( traj.states.back() != traj.states[traj.loop_start] )
    return "lasso does not close";
  return std::nullopt;
}

namespace detail
{

/// Truth of f at every position of a lasso with `length` positions and the given loop start.
/// Leaves are decided by `leaf(payload)` returning one flag per position.
template<class Leaf, class LeafFn>
class LassoEvaluator
{
public:
  LassoEvaluator( int length, int loop_start, LeafFn leaf ) : n_( length ), loop_( loop_start ), leaf_( std::move( leaf ) ) {}

  std::vector<char> const& eval( Formula<Leaf> const& f )
  {
    std::string const key = to_string( f );
    if ( auto it = memo_.find( key ); it != memo_.end() )
      return it->second;
    auto v = compute( f );
    return memo_[key] = std::move( v );
  }

private:
  int succ( int p ) const { return p + 1 < n_ ? p + 1 : loop_; }

  std::vector<char> compute( Formula<Leaf> const& f )
  {
    std::vector<char> out( n_, 0 );
    switch ( f.kind() )
    {
    case FormulaKind::constant_true:
      std::fill( out.begin(), out.end(), 1 );
      return out;
    case FormulaKind::constant_false:
      return out;
    case FormulaKind::leaf:
      return leaf_( f.payload() );
    case FormulaKind::negation:
    {
      auto const& c = eval( f.child() );
      for ( int p = 0; p < n_; ++p )
        out[p] = !c[p];
      return out;
    }
    case FormulaKind::conjunction:
    case FormulaKind::disjunction:
    {
      bool const conj = f.kind() == FormulaKind::conjunction;
      std::fill( out.begin(), out.end(), conj ? 1 : 0 );
      for ( auto const& ch : f.children() )
      {
        auto const& c = eval( ch );
        for ( int p = 0; p < n_; ++p )
          out[p] = conj ? ( out[p] && c[p] ) : ( out[p] || c[p] );
      }
      return out;
    }
    case FormulaKind::next:
    {
      auto const& c = eval( f.child() );
      for ( int p = 0; p < n_; ++p )
        out[p] = c[succ( p )];
      return out;
    }
    case FormulaKind::until:
    case FormulaKind::eventually:
    {
      bool const ev = f.kind() == FormulaKind::eventually;
      std::vector<char> hold( n_, 1 );
      if ( !ev )
        hold = eval( f.lhs() );
      auto const goal = eval( ev ? f.child() : f.rhs() );
      return fixpoint( hold, goal, false );
    }
    case FormulaKind::release:
    case FormulaKind::always:
    {
      bool const al = f.kind() == FormulaKind::always;
      std::vector<char> stop( n_, 0 );
      if ( !al )
        stop = eval( f.lhs() );
      auto const keep = eval( al ? f.child() : f.rhs() );
      return fixpoint( stop, keep, true );
    }
    }
    return out;
  }

  /// until: least fixpoint of x = goal | (hold & X x)
  /// release: greatest fixpoint of x = keep & (stop | X x)
  std::vector<char> fixpoint( std::vector<char> const& a, std::vector<char> const& b, bool greatest )
  {
    std::vector<char> x( n_, greatest ? 1 : 0 );
    for ( bool changed = true; changed; )
    {
      changed = false;
      for ( int p = n_ - 1; p >= 0; --p )
      {
        char const nx = x[succ( p )];
        char const v = greatest ? ( b[p] && ( a[p] || nx ) ) : ( b[p] || ( a[p] && nx ) );
        if ( v != x[p] )
        {
          x[p] = v;
          changed = true;
        }
      }
    }
    return x;
  }

  int n_, loop_;
  LeafFn leaf_;
  std::map<std::string, std::vector<char>> memo_;
};

template<class Leaf, class LeafFn>
LassoEvaluator<Leaf, LeafFn> make_evaluator( int length, int loop_start, LeafFn leaf )
{
  return LassoEvaluator<Leaf, LeafFn>( length, loop_start, std::move( leaf ) );
}

inline auto atom_truth( LabeledLasso const& lasso )
{
  return [&lasso]( Atom const& a ) {
    std::vector<char> out( lasso.length(), 0 );
    for ( int p = 0; p < lasso.length(); ++p )
      out[p] = std::find( lasso.labels[p].begin(), lasso.labels[p].end(), a.name ) != lasso.labels[p].end();
    return out;
  };
}

} // namespace detail

/// Inner formula at step t of the lasso's infinite word.
inline bool eval_inner( LabeledLasso const& lasso, long t, InnerFormula const& phi )
{
  auto ev = detail::make_evaluator<Atom>( lasso.length(), lasso.loop_start, detail::atom_truth( lasso ) );
  return ev.eval( phi )[lasso.position( t )];
}

inline bool eval_inner( TransitionSystem const& ts, LassoTrajectory const& traj, long t, InnerFormula const& phi )
{
  return eval_inner( labeled_lasso( ts, traj ), t, phi );
}

/* ---------------------------------------------------------------------------------------------
 * collective executions
 * ------------------------------------------------------------------------------------------- */

/// Local counters given by explicit increments for the first steps; afterwards every counter
/// advances each step.
struct CollectiveExecution
{
  int n_robots = 0;
  std::vector<std::vector<int>> increments; ///< increments[s][n]: step s -> s+1

  static CollectiveExecution synchronous( int n_robots ) { return { n_robots, {} }; }

  /// Explicit counter vectors K(1), K(2), ... (K(0) = 0).
  static CollectiveExecution from_counters( std::vector<std::vector<int>> const& counters )
  {
    CollectiveExecution k;
    k.n_robots = counters.empty() ? 0 : static_cast<int>( counters.front().size() );
    std::vector<int> prev( k.n_robots, 0 );
    for ( auto const& c : counters )
    {
      std::vector<int> inc( k.n_robots );
      for ( int n = 0; n < k.n_robots; ++n )
      {
        inc[n] = c[n] - prev[n];
        if ( inc[n] != 0 && inc[n] != 1 )
          throw Error( "local counters must advance by 0 or 1 per step" );
      }
      k.increments.push_back( inc );
      prev = c;
    }
    return k;
  }

  int explicit_steps() const { return static_cast<int>( increments.size() ); }

  std::vector<long> counters( long T ) const
  {
    std::vector<long> k( n_robots, 0 );
    long const e = std::min<long>( T, explicit_steps() );
    for ( long s = 0; s < e; ++s )
      for ( int n = 0; n < n_robots; ++n )
        k[n] += increments[s][n];
    if ( T > e )
      for ( auto& v : k )
        v += T - e;
    return k;
  }

  /// Largest counter spread over all global times.
  int spread() const
  {
    int worst = 0;
    for ( int T = 0; T <= explicit_steps(); ++T )
    {
      auto k = counters( T );
      worst = std::max<int>( worst, static_cast<int>( *std::max_element( k.begin(), k.end() ) - *std::min_element( k.begin(), k.end() ) ) );
    }
    return worst;
  }

  bool tau_bounded( int tau ) const { return spread() <= tau; }
};

/// Anchor time: the smallest local counter.
inline long anchor_map( CollectiveExecution const& k, long T )
{
  auto c = k.counters( T );
  return c.empty() ? T : *std::min_element( c.begin(), c.end() );
}

namespace detail
{

/// The joint behaviour of (Pi, K) as a lasso over global time.
struct GlobalLasso
{
  int length = 0;
  int loop_start = 0;
  std::vector<std::vector<int>> positions; ///< [g][n]: position of robot n at global time g

  int position( long T ) const
  {
    if ( T < length )
      return static_cast<int>( T );
    return loop_start + static_cast<int>( ( T - loop_start ) % ( length - loop_start ) );
  }
};

inline GlobalLasso global_lasso( std::vector<LabeledLasso> const& pi, CollectiveExecution const& k )
{
  int const N = static_cast<int>( pi.size() );
  if ( k.n_robots != N )
    throw Error( "execution has " + std::to_string( k.n_robots ) + " counters for " + std::to_string( N ) + " robots" );
  long t0 = k.explicit_steps();
  auto c = k.counters( t0 );
  long need = 0;
  for ( int n = 0; n < N; ++n )
    need = std::max( need, pi[n].loop_start - c[n] );
  t0 += need;
  long period = 1;
  for ( auto const& l : pi )
    period = std::lcm( period, static_cast<long>( l.period() ) );
  if ( t0 + period > 50'000'000L / std::max( 1, N ) )
    throw Error( "joint lasso too long to evaluate (period " + std::to_string( period ) + ")" );
  GlobalLasso g;
  g.length = static_cast<int>( t0 + period );
  g.loop_start = static_cast<int>( t0 );
  g.positions.resize( g.length );
  for ( int T = 0; T < g.length; ++T )
  {
    auto const kt = k.counters( T );
    g.positions[T].resize( N );
    for ( int n = 0; n < N; ++n )
      g.positions[T][n] = pi[n].position( kt[n] );
  }
  return g;
}

/// Evaluates outer formulas over a fixed (Pi, K).
class OuterEvaluator
{
public:
  OuterEvaluator( std::vector<LabeledLasso> const& pi, CollectiveExecution const& k ) : pi_( pi ), g_( global_lasso( pi, k ) )
  {
    inner_.reserve( pi.size() );
    for ( auto const& l : pi_ )
      inner_.emplace_back( l.length(), l.loop_start, atom_truth( l ) );
  }

  bool at( long T, OuterFormula const& mu )
  {
    auto ev = make_evaluator<TempCountProp>( g_.length, g_.loop_start, [this]( TempCountProp const& p ) { return tcp( p ); } );
    return ev.eval( mu )[g_.position( T )];
  }

  std::vector<char> all( OuterFormula const& mu )
  {
    auto ev = make_evaluator<TempCountProp>( g_.length, g_.loop_start, [this]( TempCountProp const& p ) { return tcp( p ); } );
    return ev.eval( mu );
  }

  GlobalLasso const& global() const { return g_; }

  std::vector<char> tcp( TempCountProp const& p )
  {
    int const N = static_cast<int>( pi_.size() );
    std::vector<int> robots = p.group;
    if ( robots.empty() )
    {
      if ( p.group_name )
        throw Error( "group @" + *p.group_name + " is not resolved" );
      robots.resize( N );
      std::iota( robots.begin(), robots.end(), 0 );
    }
    std::vector<std::vector<char> const*> truth;
    for ( int n : robots )
    {
      if ( n < 0 || n >= N )
        throw Error( "group names robot " + std::to_string( n ) + " out of range" );
      truth.push_back( &inner_[n].eval( p.inner ) );
    }
    std::vector<char> out( g_.length, 0 );
    for ( int T = 0; T < g_.length; ++T )
    {
      int count = 0;
      for ( std::size_t i = 0; i < robots.size(); ++i )
        count += ( *truth[i] )[g_.positions[T][robots[i]]];
      out[T] = count >= p.count;
    }
    return out;
  }

private:
  using InnerEval = LassoEvaluator<Atom, decltype( atom_truth( std::declval<LabeledLasso const&>() ) )>;
  std::vector<LabeledLasso> const& pi_;
  GlobalLasso g_;
  std::vector<InnerEval> inner_;
};

} // namespace detail

/// Outer formula at global time T of the collective execution (Pi, K).
inline bool eval_outer( std::vector<LabeledLasso> const& pi, CollectiveExecution const& k, long T, OuterFormula const& mu )
{
  detail::OuterEvaluator ev( pi, k );
  return ev.at( T, mu );
}

inline bool eval_outer( MultiRobotInstance const& inst, std::vector<LassoTrajectory> const& pi, CollectiveExecution const& k,
                        long T, OuterFormula const& mu )
{
  return eval_outer( labeled_lassos( inst, pi ), k, T, resolve_groups( mu, inst.groups ) );
}

/* ---------------------------------------------------------------------------------------------
 * robust satisfaction
 * ------------------------------------------------------------------------------------------- */

struct RobustBudget
{
  int max_T = 8;
  long enumeration_cap = 200000;
  std::uint64_t seed = 0;
};

struct Verdict
{
  enum class Status
  {
    verified_bounded,
    falsified,
  };
  Status status = Status::verified_bounded;
  std::optional<CollectiveExecution> execution; ///< counterexample
  long time = -1;                               ///< counterexample global time
  long executions = 0;
  bool exhaustive = true;

  bool falsified() const { return status == Status::falsified; }
};

inline std::string to_string( Verdict::Status s )
{
  return s == Verdict::Status::falsified ? "falsified" : "verified_bounded";
}

namespace detail
{

inline bool next_free( OuterFormula const& mu )
{
  auto const r = check_fragment( mu );
  return r.outer_next_free && r.inner_next_free;
}

/// Checks all anchor-0 global times of one execution. Returns the first violating time.
inline std::optional<long> violation( std::vector<LabeledLasso> const& pi, CollectiveExecution const& k, OuterFormula const& mu )
{
  OuterEvaluator ev( pi, k );
  auto const truth = ev.all( mu );
  for ( long T = 0; anchor_map( k, T ) == 0; ++T )
    if ( !truth[ev.global().position( T )] )
      return T;
  return std::nullopt;
}

} // namespace detail

/// Bounded falsification search for tau-robust satisfaction at anchor time 0: executions
/// whose counters stay within tau of each other for the first max_T steps (all advance
/// afterwards), and every global time with anchor 0. Steps where no counter advances are
/// skipped when mu has no next operator, since they only repeat a joint state. When the
/// number of executions exceeds the cap, seeded random executions are sampled instead.
inline Verdict check_robust( std::vector<LabeledLasso> const& pi, OuterFormula const& mu, int tau, RobustBudget const& budget = {} )
{
  int const N = static_cast<int>( pi.size() );
  if ( N < 1 )
    throw Error( "no trajectories to check" );
  if ( N > 20 )
    throw Error( "execution enumeration supports at most 20 robots" );
  bool const skip_stutter = detail::next_free( mu );
  Verdict v;
  unsigned const full = ( 1u << N ) - 1u;

  CollectiveExecution k;
  k.n_robots = N;
  std::vector<long> counter( N, 0 );
  auto allowed = [&]( unsigned mask ) {
    if ( skip_stutter && mask == 0u )
      return false;
    long lo = counter[0] + ( mask & 1u ), hi = lo;
    for ( int n = 1; n < N; ++n )
    {
      long const c = counter[n] + ( ( mask >> n ) & 1u );
      lo = std::min( lo, c );
      hi = std::max( hi, c );
    }
    return hi - lo <= tau;
  };
  auto inc_of = [&]( unsigned mask ) {
    std::vector<int> inc( N );
    for ( int n = 0; n < N; ++n )
      inc[n] = ( mask >> n ) & 1u;
    return inc;
  };

  struct Abort
  {
  };
  // exhaustive depth-first enumeration in ascending increment order
  auto dfs = [&]( auto&& self, int step ) -> bool {
    if ( step == budget.max_T )
    {
      if ( ++v.executions > budget.enumeration_cap )
        throw Abort{};
      if ( auto T = detail::violation( pi, k, mu ) )
      {
        v.status = Verdict::Status::falsified;
        v.execution = k;
        v.time = *T;
        return true;
      }
      return false;
    }
    for ( unsigned mask = 0; mask <= full; ++mask )
    {
      if ( !allowed( mask ) )
        continue;
      k.increments.push_back( inc_of( mask ) );
      for ( int n = 0; n < N; ++n )
        counter[n] += ( mask >> n ) & 1u;
      bool const found = self( self, step + 1 );
      for ( int n = 0; n < N; ++n )
        counter[n] -= ( mask >> n ) & 1u;
      k.increments.pop_back();
      if ( found )
        return true;
    }
    return false;
  };
  try
  {
    dfs( dfs, 0 );
    return v;
  }
  catch ( Abort const& )
  {
  }

  // sampling mode
  v = Verdict{};
  v.exhaustive = false;
  std::mt19937_64 rng( budget.seed );
  for ( long s = 0; s < budget.enumeration_cap; ++s )
  {
    k.increments.clear();
    std::fill( counter.begin(), counter.end(), 0 );
    for ( int step = 0; step < budget.max_T; ++step )
    {
      std::vector<unsigned> options;
      for ( unsigned mask = 0; mask <= full; ++mask )
        if ( allowed( mask ) )
          options.push_back( mask );
      unsigned const mask = options[std::uniform_int_distribution<std::size_t>( 0, options.size() - 1 )( rng )];
      k.increments.push_back( inc_of( mask ) );
      for ( int n = 0; n < N; ++n )
        counter[n] += ( mask >> n ) & 1u;
    }
    ++v.executions;
    if ( auto T = detail::violation( pi, k, mu ) )
    {
      v.status = Verdict::Status::falsified;
      v.execution = k;
      v.time = *T;
      return v;
    }
  }
  return v;
}

inline Verdict check_robust( MultiRobotInstance const& inst, std::vector<LassoTrajectory> const& pi, OuterFormula const& mu,
                             int tau, RobustBudget const& budget = {} )
{
  return check_robust( labeled_lassos( inst, pi ), resolve_groups( mu, inst.groups ), tau, budget );
}

/* ---------------------------------------------------------------------------------------------
 * collisions
 * ------------------------------------------------------------------------------------------- */

/// Occupancy conflicts between robots under the same rules as the encoder: distinct states at
/// equal local times (tau = 0) or at local times at most tau apart, and no exchange of
/// states across one step in swap mode.
inline std::optional<std::string> check_collisions( std::vector<LassoTrajectory> const& pi, CollisionMode mode, int tau = 0 )
{
  if ( mode == CollisionMode::off || pi.size() < 2u )
    return std::nullopt;
  int const N = static_cast<int>( pi.size() );
  long loop = 0, period = 1;
  for ( auto const& p : pi )
  {
    loop = std::max<long>( loop, p.loop_start );
    period = std::lcm( period, static_cast<long>( p.horizon() - p.loop_start ) );
  }
  long const last = loop + period + tau;
  auto at = [&]( int n, long t ) {
    auto const& p = pi[n];
    long const h = p.horizon();
    return t < h ? p.states[t] : p.states[p.loop_start + ( t - p.loop_start ) % ( h - p.loop_start )];
  };
  for ( int n = 0; n < N; ++n )
    for ( int m = n + 1; m < N; ++m )
      for ( long t = 0; t <= last; ++t )
        for ( long u = std::max<long>( 0, t - tau ); u <= std::min( last, t + tau ); ++u )
          if ( at( n, t ) == at( m, u ) )
            return "robots " + std::to_string( n ) + " and " + std::to_string( m ) + " share state " +
                   std::to_string( at( n, t ) ) + " at local times " + std::to_string( t ) + " and " + std::to_string( u );
  if ( mode != CollisionMode::mutual_exclusion_plus_swap )
    return std::nullopt;
  for ( int n = 0; n < N; ++n )
    for ( int m = n + 1; m < N; ++m )
      for ( long t = 0; t < last; ++t )
        if ( at( n, t ) != at( n, t + 1 ) && at( n, t ) == at( m, t + 1 ) && at( n, t + 1 ) == at( m, t ) )
          return "robots " + std::to_string( n ) + " and " + std::to_string( m ) + " swap states at t=" + std::to_string( t );
  return std::nullopt;
}

/* ---------------------------------------------------------------------------------------------
 * brute-force synthesis
 * ------------------------------------------------------------------------------------------- */

struct BruteForceOptions
{
  double max_space = 1e7;
  std::optional<CollisionMode> collision;
  int extra_steps = 2; ///< robust check explores h + extra_steps steps
};

/// First joint lasso at horizon h (loop starts ascending, then robots' paths in
/// lexicographic order) satisfying mu synchronously (tau = 0) or passing the exhaustive
/// robust check (tau > 0).
inline std::optional<std::vector<LassoTrajectory>> brute_force_synth( MultiRobotInstance const& inst, OuterFormula const& mu,
                                                                      int h, int tau, BruteForceOptions const& opts = {} )
{
  int const N = inst.n_robots();
  double space = 1.0;
  for ( auto const& ts : inst.systems )
    space *= std::pow( static_cast<double>( ts.num_states() ), h + 1 );
  if ( space > opts.max_space )
    throw Error( "joint lasso space " + std::to_string( space ) + " exceeds the brute-force guard" );
  auto const g = resolve_groups( mu, inst.groups );
  CollisionMode const mode = opts.collision.value_or( inst.collision );
  RobustBudget budget;
  budget.max_T = h + opts.extra_steps;
  budget.enumeration_cap = 1L << 40;

  for ( int l = 0; l < h; ++l )
  {
    std::vector<std::vector<LassoTrajectory>> per_robot( N );
    for ( int n = 0; n < N; ++n )
    {
      auto const& ts = inst.systems[n];
      LassoTrajectory cur;
      cur.loop_start = l;
      cur.states.push_back( inst.initial_states[n] );
      auto rec = [&]( auto&& self ) -> void {
        if ( cur.horizon() == h )
        {
          if ( cur.states[h] == cur.states[l] )
            per_robot[n].push_back( cur );
          return;
        }
        for ( int j : ts.successors( cur.states.back() ) )
        {
          cur.states.push_back( j );
          self( self );
          cur.states.pop_back();
        }
      };
      rec( rec );
      if ( per_robot[n].empty() )
        break;
    }
    if ( std::any_of( per_robot.begin(), per_robot.end(), []( auto const& v ) { return v.empty(); } ) )
      continue;
    std::vector<std::size_t> idx( N, 0 );
    for ( ;; )
    {
      std::vector<LassoTrajectory> pi;
      for ( int n = 0; n < N; ++n )
        pi.push_back( per_robot[n][idx[n]] );
      if ( !check_collisions( pi, mode, tau ) )
      {
        auto const lassos = labeled_lassos( inst, pi );
        bool ok;
        if ( tau == 0 )
          ok = eval_outer( lassos, CollectiveExecution::synchronous( N ), 0, g );
        else
          ok = !check_robust( lassos, g, tau, budget ).falsified();
        if ( ok )
          return pi;
      }
      int n = N - 1;
      while ( n >= 0 && ++idx[n] == per_robot[n].size() )
        idx[n--] = 0;
      if ( n < 0 )
        break;
    }
  }
  return std::nullopt;
}

} // namespace cltl
