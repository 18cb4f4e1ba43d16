#pragma once

#include "encoder_robust.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace cltl
{

struct ContinuousLayout
{
  std::vector<std::vector<std::vector<VarId>>> inputs;   ///< [n][t][k], t < h
  std::vector<std::vector<std::vector<LinExpr>>> states; ///< [n][t][d], t = 0..h, affine in the inputs
  VariableLayout logic;
};

struct ContinuousProblem
{
  IlpModel model;
  ContinuousLayout layout;
  OuterFormula formula;
  std::vector<std::string> warnings;
};

/// Inputs u_n(t) as continuous variables, states by forward substitution, the state box on
/// every step, and the loop w(h) = w(l) within M (1 - z_loop[l]) per coordinate.
inline void encode_cont_dynamics_loop( IlpModel& model, ContinuousLayout& layout, ContinuousSystem const& sys, int h )
{
  if ( h < 1 )
    throw EncodingError( "horizon must be at least 1" );
  throw_if_invalid( validate( sys ) );
  int const N = sys.n_robots();
  int const dw = static_cast<int>( sys.state_lo.size() ), du = static_cast<int>( sys.input_lo.size() );
  layout.inputs.assign( N, {} );
  layout.states.assign( N, {} );
  model.set_tag( "continuous" );
  for ( int n = 0; n < N; ++n )
  {
    auto const& rb = sys.robots[n];
    std::vector<LinExpr> w;
    for ( int d = 0; d < dw; ++d )
      w.emplace_back( rb.init[d] );
    layout.states[n].push_back( w );
    for ( int t = 0; t < h; ++t )
    {
      std::vector<VarId> u;
      for ( int k = 0; k < du; ++k )
        u.push_back( model.add_continuous( sys.input_lo[k], sys.input_hi[k],
                                           "u_r" + std::to_string( n ) + "_t" + std::to_string( t ) + "_" + std::to_string( k ) ) );
      std::vector<LinExpr> next;
      for ( int d = 0; d < dw; ++d )
      {
        LinExpr e( rb.c[d] );
        for ( int k = 0; k < dw; ++k )
          if ( rb.F[d][k] != 0.0 )
            e += w[k] * rb.F[d][k];
        for ( int k = 0; k < du; ++k )
          if ( rb.G[d][k] != 0.0 )
            e += LinExpr( u[k], rb.G[d][k] );
        model.add_constraint( e, Sense::ge, sys.state_lo[d] );
        model.add_constraint( e, Sense::le, sys.state_hi[d] );
        next.push_back( std::move( e ) );
      }
      layout.inputs[n].push_back( std::move( u ) );
      layout.states[n].push_back( next );
      w = std::move( next );
    }
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
  for ( int n = 0; n < N; ++n )
    for ( int t = 0; t < h; ++t )
      for ( int d = 0; d < dw; ++d )
      {
        double const big_m = sys.loop_big_m.value_or( sys.state_hi[d] - sys.state_lo[d] );
        LinExpr const diff = layout.states[n][h][d] - layout.states[n][t][d];
        LinExpr const slack = ( LinExpr( 1.0 ) - logic.z_loop[t].expr() ) * big_m;
        model.add_le( diff, slack );
        model.add_ge( diff, slack * -1.0 );
      }
}

/// Big-M of polytope row H_r w <= h_r over the state box: max |H_r w - h_r| + 1.
inline double polytope_row_big_m( std::vector<double> const& row, double rhs, ContinuousSystem const& sys )
{
  double mx = -rhs, mn = -rhs;
  for ( std::size_t k = 0; k < row.size(); ++k )
  {
    double const a = row[k] * sys.state_lo[k], b = row[k] * sys.state_hi[k];
    mx += std::max( a, b );
    mn += std::min( a, b );
  }
  return std::max( std::abs( mx ), std::abs( mn ) ) + 1.0 + sys.epsilon;
}

/// z = 1 iff w is in the polytope (up to epsilon): row indicators e with
/// H w <= h + M (1 - e) and H w >= h + eps - M e, z <= e_r, z >= 1 - d + sum e.
inline Bit encode_polytope_ap( IlpModel& model, ContinuousSystem const& sys, Polytope const& poly,
                               std::vector<LinExpr> const& w, std::string const& name )
{
  detail::TagScope scope( model, "polytope" );
  int const d = static_cast<int>( poly.H.size() );
  VarId const z = model.add_binary( name );
  LinExpr all( 1.0 - d );
  for ( int r = 0; r < d; ++r )
  {
    VarId const e = model.add_binary( name + "_e" + std::to_string( r ) );
    LinExpr hw;
    for ( std::size_t k = 0; k < w.size(); ++k )
      if ( poly.H[r][k] != 0.0 )
        hw += w[k] * poly.H[r][k];
    double const big_m = polytope_row_big_m( poly.H[r], poly.h[r], sys );
    model.add_constraint( hw + LinExpr( e, big_m ), Sense::le, poly.h[r] + big_m );
    model.add_constraint( hw + LinExpr( e, big_m ), Sense::ge, poly.h[r] + sys.epsilon );
    model.add_le( LinExpr( z ), LinExpr( e ) );
    all += LinExpr( e );
  }
  model.add_ge( LinExpr( z ), all );
  return Bit::of( z );
}

class ContinuousInnerEncoder : public InnerEncoder
{
public:
  ContinuousInnerEncoder( Circuit& circuit, ContinuousLayout& layout, ContinuousSystem const& sys )
      : InnerEncoder( circuit, layout.logic ), cont_( layout ), sys_( sys )
  {
  }

protected:
  Bit atom( int n, std::string const& a, int t ) override
  {
    auto it = sys_.atoms.find( a );
    if ( it == sys_.atoms.end() )
      throw EncodingError( "atomic proposition '" + a + "' has no polytope" );
    return encode_polytope_ap( c_.model(), sys_, it->second, cont_.states[n][t],
                               "z_r" + std::to_string( n ) + "_t" + std::to_string( t ) + "_" + a );
  }

  bool atoms_beyond_horizon() const override { return false; }

private:
  ContinuousLayout& cont_;
  ContinuousSystem const& sys_;
};

inline ContinuousProblem build_cont_problem( ContinuousSystem const& sys, OuterFormula const& mu, int h, EncodeOptions const& opts = {} )
{
  ContinuousProblem p;
  int const tau = opts.tau;
  if ( tau < 0 )
    throw EncodingError( "tau must be nonnegative" );
  bool const robust = tau > 0 || !opts.collapse_at_zero_tau;
  p.formula = normalize_formula( mu, sys.n_robots(), sys.groups, robust, &p.warnings );
  if ( robust )
    for ( auto const& prop : counting_propositions( p.formula ) )
      if ( !check_fragment( OuterFormula::leaf( prop ) ).inner_next_free )
        throw EncodingError( "inner next operator in " + detail::leaf_to_string( prop ) +
                             " cannot be made robust to asynchrony" );
  if ( sys.loop_big_m )
    for ( std::size_t d = 0; d < sys.state_lo.size(); ++d )
      if ( *sys.loop_big_m < sys.state_hi[d] - sys.state_lo[d] )
      {
        p.warnings.push_back( "loop big-M " + detail::format_number( *sys.loop_big_m ) + " is smaller than the state box width " +
                              detail::format_number( sys.state_hi[d] - sys.state_lo[d] ) + " in dimension " + std::to_string( d ) +
                              "; loop starts far from the final state are cut off" );
        break;
      }
  encode_cont_dynamics_loop( p.model, p.layout, sys, h );
  p.layout.logic.tau = tau;
  Circuit circuit( p.model );
  ContinuousInnerEncoder inner( circuit, p.layout, sys );
  Bit root;
  if ( robust )
  {
    RobustOuterEncoder outer( circuit, p.layout.logic, inner, opts.pooled_disjunction );
    root = outer.encode( p.formula )[0];
  }
  else
  {
    SyncOuterEncoder outer( circuit, p.layout.logic, inner );
    root = outer.encode( p.formula )[0];
  }
  p.model.set_tag( "root" );
  circuit.require( root );
  p.layout.logic.root = root;
  return p;
}

struct ContinuousTrajectory
{
  std::vector<std::vector<double>> inputs; ///< t < h
  std::vector<std::vector<double>> states; ///< t = 0..h, replayed through the dynamics
  int loop_start = 0;
};

/// Inputs from a solution, states replayed from the initial state.
inline std::vector<ContinuousTrajectory> extract_continuous( ContinuousLayout const& layout, ContinuousSystem const& sys,
                                                             std::vector<double> const& values )
{
  int const h = layout.logic.horizon;
  int loop = -1;
  for ( int t = 0; t < h; ++t )
    if ( layout.logic.z_loop[t].evaluate( values ) )
      loop = t;
  if ( loop < 0 )
    throw SolverError( "assignment selects no loop start" );
  std::vector<ContinuousTrajectory> out;
  for ( int n = 0; n < sys.n_robots(); ++n )
  {
    ContinuousTrajectory tr;
    tr.loop_start = loop;
    tr.states.push_back( sys.robots[n].init );
    for ( int t = 0; t < h; ++t )
    {
      std::vector<double> u;
      for ( auto v : layout.inputs[n][t] )
        u.push_back( values.at( v.index ) );
      tr.states.push_back( sys.robots[n].step( tr.states.back(), u ) );
      tr.inputs.push_back( std::move( u ) );
    }
    out.push_back( std::move( tr ) );
  }
  return out;
}

} // namespace cltl
