#pragma once

#include "encoding.hpp"

#include <numeric>
#include <string>
#include <vector>

namespace cltl
{

namespace detail
{

inline std::vector<int> domain_of( TempCountProp const& p, int n_robots )
{
  if ( !p.group.empty() )
    return p.group;
  std::vector<int> all( n_robots );
  std::iota( all.begin(), all.end(), 0 );
  return all;
}

} // namespace detail

/// Z variables of discrete robots: atoms read off the one-hot state vectors.
class DiscreteInnerEncoder : public InnerEncoder
{
public:
  DiscreteInnerEncoder( Circuit& circuit, VariableLayout& layout, MultiRobotInstance const& inst )
      : InnerEncoder( circuit, layout ), inst_( inst )
  {
  }

protected:
  Bit atom( int n, std::string const& a, int t ) override
  {
    auto const& ts = inst_.systems[n];
    auto const& ap = ts.ap;
    if ( std::find( ap.begin(), ap.end(), a ) == ap.end() )
      throw EncodingError( "atomic proposition '" + a + "' is not declared by the model" );
    auto const v = label_vector( ts, a );
    std::vector<int> on;
    for ( int i = 0; i < ts.num_states(); ++i )
      if ( v[i] )
        on.push_back( i );
    if ( on.empty() )
      return Bit::constant( false );
    if ( static_cast<int>( on.size() ) == ts.num_states() )
      return Bit::constant( true );
    auto const& w = layout_.W[n][t];
    if ( on.size() == 1u )
      return Bit::of( w[on.front()] );
    // v^T w >= z and v^T w < z + 1 (integral), i.e. z = v^T w on one-hot w
    Bit const z = c_.fresh( "z_r" + std::to_string( n ) + "_t" + std::to_string( t ) + "_" + a );
    LinExpr sum;
    for ( int i : on )
      sum += LinExpr( w[i] );
    c_.model().add_eq( sum, z.expr() );
    return z;
  }

private:
  MultiRobotInstance const& inst_;
};

/// Outer encoder of the synchronous problem: tcp through the count indicator with M = |S| + 1.
class SyncOuterEncoder : public OuterEncoder
{
public:
  SyncOuterEncoder( Circuit& circuit, VariableLayout& layout, InnerEncoder& inner )
      : OuterEncoder( circuit, layout ), inner_( inner )
  {
  }

protected:
  std::vector<Bit> tcp( TempCountProp const& p ) override
  {
    auto const robots = detail::domain_of( p, layout_.n_robots );
    std::vector<std::vector<Bit>> z;
    for ( int n : robots )
      z.push_back( inner_.encode( p.inner, n ) );
    std::vector<Bit> out( horizon() );
    for ( int t = 0; t < horizon(); ++t )
    {
      std::vector<Bit> in;
      for ( auto const& zn : z )
        in.push_back( zn[t] );
      out[t] = c_.at_least( in, p.count, {}, static_cast<int>( robots.size() ) + 1 );
    }
    return out;
  }

  InnerEncoder& inner_;
};

/* ---------------------------------------------------------------------------------------------
 * state constraints
 * ------------------------------------------------------------------------------------------- */

/// W[n][t] for t = 0..h: one-hot, w(0) = onehot(init), w(t+1) <= A_n w(t).
inline void encode_dynamics( IlpModel& model, VariableLayout& layout, MultiRobotInstance const& inst, int h )
{
  if ( h < 1 )
    throw EncodingError( "horizon must be at least 1" );
  model.set_tag( "dynamics" );
  layout.horizon = h;
  layout.n_robots = inst.n_robots();
  layout.W.assign( inst.n_robots(), {} );
  for ( int n = 0; n < inst.n_robots(); ++n )
  {
    auto const& ts = inst.systems[n];
    int const s = ts.num_states();
    auto& W = layout.W[n];
    for ( int t = 0; t <= h; ++t )
    {
      std::vector<VarId> w;
      LinExpr one_hot;
      for ( int i = 0; i < s; ++i )
      {
        w.push_back( model.add_binary( "w_r" + std::to_string( n ) + "_t" + std::to_string( t ) + "_s" + std::to_string( i ) ) );
        one_hot += LinExpr( w.back() );
      }
      model.add_constraint( one_hot, Sense::eq, 1.0 );
      W.push_back( std::move( w ) );
    }
    for ( int i = 0; i < s; ++i )
      model.add_constraint( LinExpr( W[0][i] ), Sense::eq, i == inst.initial_states[n] ? 1.0 : 0.0 );
    std::vector<std::vector<int>> pred( s );
    for ( int j = 0; j < s; ++j )
      pred[j] = ts.predecessors( j );
    for ( int t = 0; t < h; ++t )
      for ( int j = 0; j < s; ++j )
      {
        LinExpr e( W[t + 1][j] );
        for ( int i : pred[j] )
          e -= LinExpr( W[t][i] );
        model.add_constraint( e, Sense::le, 0.0 );
      }
  }
}

/// z_loop[t], t < h: sum z_loop = 1 and z_loop[t] = 1 implies w(h) = w(t) for every robot.
inline void encode_loop( IlpModel& model, VariableLayout& layout )
{
  int const h = layout.horizon;
  model.set_tag( "loop" );
  layout.z_loop.clear();
  LinExpr sum;
  for ( int t = 0; t < h; ++t )
  {
    layout.z_loop.push_back( Bit::of( model.add_binary( "zloop_t" + std::to_string( t ) ) ) );
    sum += layout.z_loop.back().expr();
  }
  model.add_constraint( sum, Sense::eq, 1.0 );
  for ( auto const& W : layout.W )
    for ( int t = 0; t < h; ++t )
      for ( std::size_t i = 0; i < W[h].size(); ++i )
      {
        LinExpr const diff = LinExpr( W[h][i] ) - LinExpr( W[t][i] );
        LinExpr const slack = LinExpr( 1.0 ) - layout.z_loop[t].expr();
        model.add_le( diff, slack );
        model.add_ge( diff, slack * -1.0 );
      }
}

/// Pairwise occupancy exclusion. With tau = 0 a per-state sum over robots; with tau > 0
/// every pair of robots is kept apart over all local times at most tau apart.
inline void encode_collision( IlpModel& model, VariableLayout const& layout, MultiRobotInstance const& inst,
                              CollisionMode mode )
{
  if ( mode == CollisionMode::off || inst.n_robots() < 2 )
    return;
  int const s = inst.systems.front().num_states();
  for ( auto const& ts : inst.systems )
    if ( ts.num_states() != s )
      throw EncodingError( "collision constraints need robots sharing one state space" );
  model.set_tag( "collision" );
  int const h = layout.horizon, tau = layout.tau, N = inst.n_robots();
  auto const& W = layout.W;
  if ( tau == 0 )
  {
    for ( int t = 0; t < h; ++t )
      for ( int i = 0; i < s; ++i )
      {
        LinExpr sum;
        for ( int n = 0; n < N; ++n )
          sum += LinExpr( W[n][t][i] );
        model.add_constraint( sum, Sense::le, 1.0 );
      }
  }
  else
  {
    int const last = h + tau;
    for ( int n = 0; n < N; ++n )
      for ( int m = n + 1; m < N; ++m )
        for ( int t = 0; t <= last; ++t )
          for ( int u = std::max( 0, t - tau ); u <= std::min( last, t + tau ); ++u )
            for ( int i = 0; i < s; ++i )
              model.add_constraint( LinExpr( W[n][t][i] ) + LinExpr( W[m][u][i] ), Sense::le, 1.0 );
  }
  if ( mode != CollisionMode::mutual_exclusion_plus_swap )
    return;
  auto const& ts = inst.systems.front();
  int const last = h + tau;
  for ( int n = 0; n < N; ++n )
    for ( int m = 0; m < N; ++m )
    {
      if ( n == m )
        continue;
      for ( auto [i, j] : ts.transitions )
      {
        if ( i == j || !ts.has_transition( j, i ) )
          continue;
        for ( int t = 0; t < last; ++t )
          model.add_constraint( LinExpr( W[n][t][i] ) + LinExpr( W[m][t][j] ) + LinExpr( W[n][t + 1][j] ) +
                                    LinExpr( W[m][t + 1][i] ),
                                Sense::le, 3.0 );
      }
    }
}

/// Robot lassos from a solution: the 1-entries of W and the selected loop start.
inline std::vector<LassoTrajectory> extract_trajectories( VariableLayout const& layout, std::vector<double> const& values )
{
  int const h = layout.horizon;
  int loop = -1;
  for ( int t = 0; t < h; ++t )
    if ( layout.z_loop[t].evaluate( values ) )
    {
      if ( loop >= 0 )
        throw SolverError( "assignment selects more than one loop start" );
      loop = t;
    }
  if ( loop < 0 )
    throw SolverError( "assignment selects no loop start" );
  std::vector<LassoTrajectory> out;
  for ( int n = 0; n < layout.n_robots; ++n )
  {
    LassoTrajectory traj;
    traj.loop_start = loop;
    for ( int t = 0; t <= h; ++t )
    {
      int at = -1;
      auto const& w = layout.W[n][t];
      for ( std::size_t i = 0; i < w.size(); ++i )
      {
        double const v = values.at( w[i].index );
        if ( v > 0.5 )
        {
          if ( at >= 0 )
            throw SolverError( "state vector of robot " + std::to_string( n ) + " at t=" + std::to_string( t ) + " is not one-hot" );
          at = static_cast<int>( i );
        }
      }
      if ( at < 0 )
        throw SolverError( "state vector of robot " + std::to_string( n ) + " at t=" + std::to_string( t ) + " is empty" );
      traj.states.push_back( at );
    }
    if ( traj.states[h] != traj.states[loop] )
      throw SolverError( "lasso of robot " + std::to_string( n ) + " does not close" );
    out.push_back( std::move( traj ) );
  }
  return out;
}

inline std::vector<LassoTrajectory> extract_trajectories( VariableLayout const& layout, Solution const& sol )
{
  if ( !sol.feasible() )
    throw SolverError( "cannot extract trajectories from a " + to_string( sol.status ) + " solution" );
  return extract_trajectories( layout, sol.values );
}

namespace detail
{

inline CollisionMode collision_mode( MultiRobotInstance const& inst, EncodeOptions const& opts )
{
  return opts.collision.value_or( inst.collision );
}

inline void check_instance( MultiRobotInstance const& inst )
{
  throw_if_invalid( validate( inst ) );
  if ( inst.n_robots() < 1 )
    throw EncodingError( "instance has no robots" );
}

} // namespace detail

/// Synchronous problem: dynamics, loop, inner and outer encodings, optional collision
/// constraints, and Y[mu][0] = 1.
inline Problem build_sync_problem( MultiRobotInstance const& inst, OuterFormula const& mu, int h,
                                   EncodeOptions const& opts = {} )
{
  detail::check_instance( inst );
  Problem p;
  p.formula = normalize_formula( mu, inst.n_robots(), inst.groups, false, &p.warnings );
  encode_dynamics( p.model, p.layout, inst, h );
  encode_loop( p.model, p.layout );
  p.layout.tau = 0;
  encode_collision( p.model, p.layout, inst, detail::collision_mode( inst, opts ) );
  Circuit circuit( p.model );
  DiscreteInnerEncoder inner( circuit, p.layout, inst );
  SyncOuterEncoder outer( circuit, p.layout, inner );
  p.model.set_tag( "formula" );
  Bit const root = outer.encode( p.formula )[0];
  p.model.set_tag( "root" );
  circuit.require( root );
  p.layout.root = root;
  return p;
}

} // namespace cltl
