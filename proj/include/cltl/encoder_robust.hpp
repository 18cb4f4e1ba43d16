#pragma once

#include "encoder_sync.hpp"

#include <map>
#include <string>
#include <vector>

namespace cltl
{

/// W[n][h+k], k = 1..tau: one-hot, and z_loop[l] = 1 implies w(h+k) = w(l + (k mod (h-l))).
inline void extend_states( IlpModel& model, VariableLayout& layout, int tau )
{
  if ( tau < 0 )
    throw EncodingError( "tau must be nonnegative" );
  layout.tau = tau;
  if ( tau == 0 )
    return;
  detail::TagScope scope( model, "robust" );
  int const h = layout.horizon;
  Circuit c( model );
  for ( int n = 0; n < layout.n_robots; ++n )
  {
    auto& W = layout.W[n];
    int const s = static_cast<int>( W[0].size() );
    for ( int k = 1; k <= tau; ++k )
    {
      std::vector<VarId> w;
      LinExpr one_hot;
      for ( int i = 0; i < s; ++i )
      {
        w.push_back( model.add_binary( "w_r" + std::to_string( n ) + "_t" + std::to_string( h + k ) + "_s" + std::to_string( i ) ) );
        one_hot += LinExpr( w.back() );
      }
      model.add_constraint( one_hot, Sense::eq, 1.0 );
      for ( int l = 0; l < h; ++l )
      {
        int const src = l + ( k % ( h - l ) );
        for ( int i = 0; i < s; ++i )
          c.equal_if( layout.z_loop[l], Bit::of( w[i] ), Bit::of( W[src][i] ) );
      }
      W.push_back( std::move( w ) );
    }
  }
}

/// Outer encoder of the robust problem: windowed counting, the m = 1 special case, pooled
/// disjunctions of counting propositions and the guarded until.
class RobustOuterEncoder : public OuterEncoder
{
public:
  RobustOuterEncoder( Circuit& circuit, VariableLayout& layout, InnerEncoder& inner, bool pooled )
      : OuterEncoder( circuit, layout ), inner_( inner ), pooled_( pooled )
  {
  }

protected:
  std::vector<Bit> tcp( TempCountProp const& p ) override
  {
    int const h = horizon(), N = layout_.n_robots;
    auto const robots = detail::domain_of( p, N );
    int const big_m = static_cast<int>( robots.size() ) + 1;
    if ( p.count <= 0 )
      return std::vector<Bit>( h, Bit::constant( true ) );
    std::vector<std::vector<Bit>> r, z;
    for ( int n : robots )
      r.push_back( inner_.robust( p.inner, n ) );
    // all robots satisfying phi at t covers whichever robot anchors t; a proper subset does not
    bool const all_branch = p.count == 1 && static_cast<int>( robots.size() ) == N;
    if ( all_branch )
      for ( int n : robots )
        z.push_back( inner_.encode( p.inner, n ) );
    std::vector<Bit> out( h );
    for ( int t = 0; t < h; ++t )
    {
      std::vector<Bit> rt;
      for ( auto const& rn : r )
        rt.push_back( rn[t] );
      Bit const y_tilde = c_.at_least( rt, p.count, {}, big_m );
      if ( !all_branch )
      {
        out[t] = y_tilde;
        continue;
      }
      std::vector<Bit> zt;
      for ( auto const& zn : z )
        zt.push_back( zn[t] );
      Bit const y_bar = c_.at_least( zt, N, {}, big_m );
      out[t] = c_.disj( y_tilde, y_bar );
    }
    return out;
  }

  std::vector<Bit> disjunction( OuterFormula const& f ) override
  {
    // tcp disjuncts over the same robots form a block; everything else is or-ed plainly
    std::map<std::vector<int>, std::vector<TempCountProp>> blocks;
    std::vector<std::vector<Bit>> parts;
    for ( auto const& ch : f.children() )
    {
      if ( pooled_ && ch.kind() == FormulaKind::leaf )
        blocks[detail::domain_of( ch.payload(), layout_.n_robots )].push_back( ch.payload() );
      else
        parts.push_back( encode( ch ) );
    }
    for ( auto const& [robots, props] : blocks )
    {
      std::vector<std::vector<Bit>> kids;
      for ( auto const& p : props )
        kids.push_back( encode( OuterFormula::leaf( p ) ) );
      if ( props.size() >= 2u )
        kids.push_back( pooled( robots, props ) );
      parts.push_back( pointwise_disj( kids ) );
    }
    return pointwise_disj( parts );
  }

  std::vector<Bit> until( OuterFormula const& lhs, OuterFormula const& rhs ) override
  {
    auto const either = encode( OuterFormula::disjunction( { lhs, rhs } ) );
    auto const& goal = encode( rhs );
    return detail::guarded_values( c_, layout_.z_loop, either, goal, goal[horizon() - 1] );
  }

private:
  /// sum_n R[phi_1 | ... | phi_k][n][t] >= 1 + sum_i (m_i - 1)
  std::vector<Bit> pooled( std::vector<int> const& robots, std::vector<TempCountProp> const& props )
  {
    std::vector<InnerFormula> inners;
    int threshold = 1;
    for ( auto const& p : props )
    {
      inners.push_back( p.inner );
      threshold += p.count - 1;
    }
    auto const any = InnerFormula::disjunction( inners );
    std::vector<std::vector<Bit>> r;
    for ( int n : robots )
      r.push_back( inner_.robust( any, n ) );
    std::vector<Bit> out( horizon() );
    for ( int t = 0; t < horizon(); ++t )
    {
      std::vector<Bit> rt;
      for ( auto const& rn : r )
        rt.push_back( rn[t] );
      out[t] = c_.at_least( rt, threshold, {}, static_cast<int>( robots.size() ) + 1 );
    }
    return out;
  }

  InnerEncoder& inner_;
  bool pooled_;
};

/// Robust problem for asynchrony bounded by `opts.tau`. With tau = 0 and
/// `collapse_at_zero_tau` the synchronous problem is returned.
inline Problem build_robust_problem( MultiRobotInstance const& inst, OuterFormula const& mu, int h, EncodeOptions const& opts )
{
  int const tau = opts.tau;
  if ( tau < 0 )
    throw EncodingError( "tau must be nonnegative" );
  if ( tau == 0 && opts.collapse_at_zero_tau )
    return build_sync_problem( inst, mu, h, opts );
  detail::check_instance( inst );
  Problem p;
  p.formula = normalize_formula( mu, inst.n_robots(), inst.groups, true, &p.warnings );
  for ( auto const& prop : counting_propositions( p.formula ) )
    if ( !check_fragment( OuterFormula::leaf( prop ) ).inner_next_free )
      throw EncodingError( "inner next operator in " + detail::leaf_to_string( prop ) +
                           " cannot be made robust to asynchrony" );
  if ( !check_fragment( p.formula ).outer_next_free && tau > 0 )
    p.warnings.push_back( "outer next under tau > 0 is encoded as a plain shift of anchor times" );
  encode_dynamics( p.model, p.layout, inst, h );
  encode_loop( p.model, p.layout );
  extend_states( p.model, p.layout, tau );
  encode_collision( p.model, p.layout, inst, detail::collision_mode( inst, opts ) );
  Circuit circuit( p.model );
  DiscreteInnerEncoder inner( circuit, p.layout, inst );
  RobustOuterEncoder outer( circuit, p.layout, inner, opts.pooled_disjunction );
  Bit const root = outer.encode( p.formula )[0];
  p.model.set_tag( "root" );
  circuit.require( root );
  p.layout.root = root;
  return p;
}

inline Problem build_robust_problem( MultiRobotInstance const& inst, OuterFormula const& mu, int h, int tau )
{
  EncodeOptions opts;
  opts.tau = tau;
  return build_robust_problem( inst, mu, h, opts );
}

} // namespace cltl
