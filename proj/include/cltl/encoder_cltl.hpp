#pragma once

#include "encoder_sync.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace cltl
{

/// Count variables of the aggregate encoding.
struct AggregateLayout
{
  int horizon = 0;
  int n_robots = 0;
  std::vector<std::vector<VarId>> w;                  ///< [t][i], t = 0..h
  std::vector<std::vector<VarId>> u;                  ///< [t][k] per transition k, t < h
  std::vector<std::pair<int, int>> edges;             ///< distinct transitions, sorted
  VariableLayout logic;                               ///< z_loop and outer Y
};

struct AggregateProblem
{
  IlpModel model;
  AggregateLayout layout;
  AggregateSystem system;
  OuterFormula formula;
  std::vector<std::string> warnings;
};

/// u_i^j(t) in [0, N] on existing transitions, sum_j u_i^j(t) = w^i(t), inflow
/// w^j(t+1) = sum_i u_i^j(t), w(0) = w0, and the loop with radius N (1 - z_loop).
inline void encode_aggregate( IlpModel& model, AggregateLayout& layout, AggregateSystem const& agg, int h )
{
  if ( h < 1 )
    throw EncodingError( "horizon must be at least 1" );
  int const N = agg.n_robots, s = agg.shared.num_states();
  layout.horizon = h;
  layout.n_robots = N;
  layout.edges = agg.shared.transitions;
  std::sort( layout.edges.begin(), layout.edges.end() );
  layout.edges.erase( std::unique( layout.edges.begin(), layout.edges.end() ), layout.edges.end() );
  model.set_tag( "aggregate" );
  layout.w.clear();
  layout.u.clear();
  for ( int t = 0; t <= h; ++t )
  {
    std::vector<VarId> w;
    for ( int i = 0; i < s; ++i )
      w.push_back( model.add_integer( 0, N, "w_t" + std::to_string( t ) + "_s" + std::to_string( i ) ) );
    layout.w.push_back( std::move( w ) );
  }
  for ( int i = 0; i < s; ++i )
    model.add_constraint( LinExpr( layout.w[0][i] ), Sense::eq, agg.w0.at( i ) );
  for ( int t = 0; t < h; ++t )
  {
    std::vector<VarId> u;
    for ( auto [i, j] : layout.edges )
      u.push_back( model.add_integer( 0, N, "u_t" + std::to_string( t ) + "_" + std::to_string( i ) + "_" + std::to_string( j ) ) );
    std::vector<LinExpr> out( s ), in( s );
    for ( std::size_t k = 0; k < layout.edges.size(); ++k )
    {
      out[layout.edges[k].first] += LinExpr( u[k] );
      in[layout.edges[k].second] += LinExpr( u[k] );
    }
    for ( int i = 0; i < s; ++i )
    {
      model.add_eq( out[i], LinExpr( layout.w[t][i] ) );
      model.add_eq( LinExpr( layout.w[t + 1][i] ), in[i] );
    }
    layout.u.push_back( std::move( u ) );
  }
  model.set_tag( "loop" );
  auto& logic = layout.logic;
  logic.horizon = h;
  logic.n_robots = N;
  logic.z_loop.clear();
  LinExpr sum;
  for ( int t = 0; t < h; ++t )
  {
    logic.z_loop.push_back( Bit::of( model.add_binary( "zloop_t" + std::to_string( t ) ) ) );
    sum += logic.z_loop.back().expr();
  }
  model.add_constraint( sum, Sense::eq, 1.0 );
  for ( int t = 0; t < h; ++t )
    for ( int i = 0; i < s; ++i )
    {
      LinExpr const diff = LinExpr( layout.w[h][i] ) - LinExpr( layout.w[t][i] );
      LinExpr const slack = ( LinExpr( 1.0 ) - logic.z_loop[t].expr() ) * static_cast<double>( N );
      model.add_le( diff, slack );
      model.add_ge( diff, slack * -1.0 );
    }
}

/// Outer encoder over robot counts: [a, m] holds iff v_a^T w(t) >= m, with M = N + 1.
class AggregateOuterEncoder : public OuterEncoder
{
public:
  AggregateOuterEncoder( Circuit& circuit, AggregateLayout& layout, AggregateSystem const& agg )
      : OuterEncoder( circuit, layout.logic ), agg_layout_( layout ), agg_( agg )
  {
  }

protected:
  std::vector<Bit> tcp( TempCountProp const& p ) override
  {
    bool const negated = p.inner.kind() == FormulaKind::negation;
    auto const& lit = negated ? p.inner.child() : p.inner;
    if ( lit.kind() != FormulaKind::leaf )
      throw EncodingError( "counting proposition " + detail::leaf_to_string( p ) +
                           " is not a cLTL proposition: inner formula '" + to_string( p.inner ) + "' is not an atom" );
    if ( p.has_group() )
      throw EncodingError( "robot groups are not expressible over robot counts: " + detail::leaf_to_string( p ) );
    auto const& ap = agg_.shared.ap;
    std::string const& a = lit.payload().name;
    if ( std::find( ap.begin(), ap.end(), a ) == ap.end() )
      throw EncodingError( "atomic proposition '" + a + "' is not declared by the model" );
    auto const v = label_vector( agg_.shared, a );
    int const N = agg_.n_robots;
    double const big_m = N + 1;
    std::vector<Bit> out( horizon() );
    for ( int t = 0; t < horizon(); ++t )
    {
      if ( p.count <= 0 )
      {
        out[t] = Bit::constant( true );
        continue;
      }
      if ( p.count > N + 1 )
      {
        out[t] = Bit::constant( false );
        continue;
      }
      LinExpr count;
      for ( std::size_t i = 0; i < v.size(); ++i )
        if ( v[i] != negated )
          count += LinExpr( agg_layout_.w[t][i] );
      out[t] = Bit::of( indicator_geq( c_.model(), count, p.count, big_m, "y_t" + std::to_string( t ) + "_" + ( negated ? "not_" : "" ) + a + "_" + std::to_string( p.count ),
                                          std::pair<double, double>( 0.0, N ) ) );
    }
    return out;
  }

private:
  AggregateLayout& agg_layout_;
  AggregateSystem const& agg_;
};

inline AggregateProblem build_cltl_problem( AggregateSystem const& agg, OuterFormula const& mu, int h )
{
  AggregateProblem p;
  p.system = agg;
  p.formula = normalize_formula( mu, agg.n_robots, {}, false, &p.warnings );
  auto atomic = []( InnerFormula const& f ) {
    return f.kind() == FormulaKind::leaf || ( f.kind() == FormulaKind::negation && f.child().kind() == FormulaKind::leaf );
  };
  for ( auto const& prop : counting_propositions( p.formula ) )
    if ( !atomic( prop.inner ) )
    {
      // name the proposition as written when possible
      auto shown = prop;
      for ( auto const& orig : counting_propositions( mu ) )
        if ( !atomic( orig.inner ) )
        {
          shown = orig;
          break;
        }
      throw EncodingError( "formula is not in cLTL: inner formula '" + to_string( shown.inner ) + "' of " +
                           detail::leaf_to_string( shown ) + " is not an atom" );
    }
  encode_aggregate( p.model, p.layout, p.system, h );
  Circuit circuit( p.model );
  AggregateOuterEncoder outer( circuit, p.layout, p.system );
  Bit const root = outer.encode( p.formula )[0];
  p.model.set_tag( "root" );
  circuit.require( root );
  p.layout.logic.root = root;
  return p;
}

inline AggregateProblem build_cltl_problem( MultiRobotInstance const& inst, OuterFormula const& mu, int h )
{
  auto g = resolve_groups( mu, inst.groups );
  return build_cltl_problem( aggregate_view( inst ), g, h );
}

/// Robot counts per state w[t][i] from a solution.
inline std::vector<std::vector<int>> aggregate_counts( AggregateLayout const& layout, std::vector<double> const& values )
{
  std::vector<std::vector<int>> out;
  for ( auto const& wt : layout.w )
  {
    std::vector<int> row;
    for ( auto v : wt )
      row.push_back( static_cast<int>( std::lround( values.at( v.index ) ) ) );
    out.push_back( std::move( row ) );
  }
  return out;
}

inline int aggregate_loop_start( AggregateLayout const& layout, std::vector<double> const& values )
{
  for ( int t = 0; t < layout.horizon; ++t )
    if ( layout.logic.z_loop[t].evaluate( values ) )
      return t;
  throw SolverError( "assignment selects no loop start" );
}

/// Splits aggregate flows into individual lassos. Robots leave a state lowest index first
/// (or in seeded random order), taking transitions in ascending target order. The loop is
/// closed by matching robots at time h to robots at time l in the same state (identity
/// where possible); a robot whose match is another robot continues along that robot's
/// loop segment, so its own horizon is l + c (h - l) where c is the length of its cycle.
inline std::vector<LassoTrajectory> decompose_flows( AggregateLayout const& layout, AggregateSystem const& agg,
                                                     std::vector<double> const& values,
                                                     std::optional<std::uint64_t> seed = std::nullopt )
{
  int const h = layout.horizon, N = agg.n_robots, s = agg.shared.num_states();
  int const l = aggregate_loop_start( layout, values );
  auto const w = aggregate_counts( layout, values );
  std::mt19937_64 rng( seed.value_or( 0 ) );

  std::vector<std::vector<int>> pos( N, std::vector<int>( h + 1, -1 ) ); // pos[r][t]
  {
    int r = 0;
    for ( int i = 0; i < s; ++i )
      for ( int k = 0; k < agg.w0[i]; ++k )
        pos[r++][0] = i;
    if ( r != N )
      throw SolverError( "initial counts do not add up to the number of robots" );
  }
  for ( int t = 0; t < h; ++t )
  {
    std::vector<std::vector<int>> at( s );
    for ( int r = 0; r < N; ++r )
      at[pos[r][t]].push_back( r );
    if ( seed )
      for ( auto& a : at )
        std::shuffle( a.begin(), a.end(), rng );
    std::vector<std::size_t> next( s, 0 );
    for ( std::size_t k = 0; k < layout.edges.size(); ++k )
    {
      auto [i, j] = layout.edges[k];
      long const flow = std::lround( values.at( layout.u[t][k].index ) );
      for ( long f = 0; f < flow; ++f )
      {
        if ( next[i] >= at[i].size() )
          throw SolverError( "flow out of state " + std::to_string( i ) + " at t=" + std::to_string( t ) + " exceeds its count" );
        pos[at[i][next[i]++]][t + 1] = j;
      }
    }
    for ( int i = 0; i < s; ++i )
      if ( next[i] != at[i].size() )
        throw SolverError( "flow out of state " + std::to_string( i ) + " at t=" + std::to_string( t ) + " does not conserve robots" );
  }
  for ( int t = 0; t <= h; ++t )
  {
    std::vector<int> count( s, 0 );
    for ( int r = 0; r < N; ++r )
      ++count[pos[r][t]];
    if ( count != w[t] )
      throw SolverError( "decomposition does not reproduce the aggregate state at t=" + std::to_string( t ) );
  }

  // match[r]: robot whose loop segment r continues with after time h
  std::vector<int> match( N, -1 );
  std::vector<char> taken( N, 0 );
  for ( int r = 0; r < N; ++r )
    if ( pos[r][h] == pos[r][l] )
    {
      match[r] = r;
      taken[r] = 1;
    }
  for ( int r = 0; r < N; ++r )
  {
    if ( match[r] >= 0 )
      continue;
    for ( int q = 0; q < N; ++q )
      if ( !taken[q] && pos[q][l] == pos[r][h] )
      {
        match[r] = q;
        taken[q] = 1;
        break;
      }
    if ( match[r] < 0 )
      throw SolverError( "aggregate loop does not close" );
  }

  std::vector<LassoTrajectory> out;
  for ( int r = 0; r < N; ++r )
  {
    LassoTrajectory traj;
    traj.loop_start = l;
    traj.states.assign( pos[r].begin(), pos[r].end() );
    for ( int q = match[r]; q != r; q = match[q] )
      traj.states.insert( traj.states.end(), pos[q].begin() + l + 1, pos[q].end() );
    out.push_back( std::move( traj ) );
  }
  return out;
}

} // namespace cltl
