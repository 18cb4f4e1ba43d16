#pragma once

#include "circuit.hpp"
#include "error.hpp"
#include "formula.hpp"
#include "ilp.hpp"
#include "system.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cltl
{

/// Prefix-suffix trajectory s_0 ... s_h with s_h = s_l; the infinite word is
/// s_0 ... s_{l-1} (s_l ... s_{h-1})^omega.
struct LassoTrajectory
{
  std::vector<int> states;
  int loop_start = 0;

  int horizon() const { return static_cast<int>( states.size() ) - 1; }
  friend bool operator==( LassoTrajectory const&, LassoTrajectory const& ) = default;
};

struct EncodeOptions
{
  int tau = 0;
  /// Robust disjunctions of counting propositions also accept the pooled count test.
  bool pooled_disjunction = true;
  /// With tau = 0 the robust builder emits the synchronous encoding verbatim.
  bool collapse_at_zero_tau = true;
  std::optional<CollisionMode> collision;
};

/// Maps (robot, time, subformula) to model literals. Formula keys are the printed
/// subformulas.
struct VariableLayout
{
  int horizon = 0;
  int tau = 0;
  int n_robots = 0;
  std::vector<std::vector<std::vector<VarId>>> W; ///< [n][t][i], t = 0..h+tau
  std::vector<Bit> z_loop;                        ///< t = 0..h-1
  std::map<std::string, std::vector<std::vector<Bit>>> Z; ///< inner: [n][t], t < h+tau
  std::map<std::string, std::vector<std::vector<Bit>>> R; ///< robust inner: [n][t], t < h
  std::map<std::string, std::vector<Bit>> Y;              ///< outer: [t], t < h
  Bit root;

  std::vector<Bit> const& outer( std::string const& key ) const
  {
    auto it = Y.find( key );
    if ( it == Y.end() )
      throw Error( "no outer variables for '" + key + "'" );
    return it->second;
  }

  std::vector<std::vector<Bit>> const& inner( std::string const& key ) const
  {
    auto it = Z.find( key );
    if ( it == Z.end() )
      throw Error( "no inner variables for '" + key + "'" );
    return it->second;
  }
};

/// An encoded problem: the model plus the bookkeeping needed to read solutions back.
struct Problem
{
  IlpModel model;
  VariableLayout layout;
  OuterFormula formula; ///< the normalized formula that was encoded
  std::vector<std::string> warnings;
};

/* ---------------------------------------------------------------------------------------------
 * lasso recursions shared by both logic layers
 * ------------------------------------------------------------------------------------------- */

namespace detail
{

/// Switches the model's constraint tag for a scope.
class TagScope
{
public:
  TagScope( IlpModel& model, std::string tag ) : model_( model ), saved_( model.tag() ) { model_.set_tag( std::move( tag ) ); }
  ~TagScope() { model_.set_tag( saved_ ); }
  TagScope( TagScope const& ) = delete;
  TagScope& operator=( TagScope const& ) = delete;

private:
  IlpModel& model_;
  std::string saved_;
};

/// Successor value at h-1: the value at the loop start, picked by z_loop.
inline Bit loop_value( Circuit& c, std::vector<Bit> const& z_loop, std::vector<Bit> const& v )
{
  std::vector<Bit> terms;
  for ( std::size_t t = 0; t < z_loop.size(); ++t )
    terms.push_back( c.conj( z_loop[t], v[t] ) );
  return c.disj( terms );
}

inline std::vector<Bit> next_values( Circuit& c, std::vector<Bit> const& z_loop, std::vector<Bit> const& child )
{
  int const h = static_cast<int>( z_loop.size() );
  std::vector<Bit> out( h );
  for ( int t = 0; t + 1 < h; ++t )
    out[t] = child[t + 1];
  out[h - 1] = loop_value( c, z_loop, child );
  return out;
}

/// z(t) = goal(t) | (hold(t) & z(t+1)), closed at h-1 through an auxiliary pass
///   z~(h-1) = goal(h-1),  z~(t) = goal(t) | (hold(t) & z~(t+1)),
///   z(h-1) = goal(h-1) | (hold(h-1) & OR_t (z_loop(t) & z~(t))).
inline std::vector<Bit> until_values( Circuit& c, std::vector<Bit> const& z_loop, std::vector<Bit> const& hold,
                                      std::vector<Bit> const& goal )
{
  int const h = static_cast<int>( z_loop.size() );
  std::vector<Bit> aux( h ), out( h );
  aux[h - 1] = goal[h - 1];
  for ( int t = h - 2; t >= 0; --t )
    aux[t] = c.disj( goal[t], c.conj( hold[t], aux[t + 1] ) );
  out[h - 1] = c.disj( goal[h - 1], c.conj( hold[h - 1], loop_value( c, z_loop, aux ) ) );
  for ( int t = h - 2; t >= 0; --t )
    out[t] = c.disj( goal[t], c.conj( hold[t], out[t + 1] ) );
  return out;
}

/// z(t) = keep(t) & (stop(t) | z(t+1)) with the dual auxiliary pass; z~(h-1) = keep(h-1).
/// Release uses keep = mu2, stop = mu1. The robust until uses keep = mu1 | mu2 and
/// stop = mu2, with z~(h-1) = mu2(h-1) (`aux_last`).
inline std::vector<Bit> guarded_values( Circuit& c, std::vector<Bit> const& z_loop, std::vector<Bit> const& keep,
                                        std::vector<Bit> const& stop, Bit aux_last )
{
  int const h = static_cast<int>( z_loop.size() );
  std::vector<Bit> aux( h ), out( h );
  aux[h - 1] = aux_last;
  for ( int t = h - 2; t >= 0; --t )
    aux[t] = c.conj( keep[t], c.disj( stop[t], aux[t + 1] ) );
  out[h - 1] = c.conj( keep[h - 1], c.disj( stop[h - 1], loop_value( c, z_loop, aux ) ) );
  for ( int t = h - 2; t >= 0; --t )
    out[t] = c.conj( keep[t], c.disj( stop[t], out[t + 1] ) );
  return out;
}

/// Extends values on 0..h-1 to 0..h+tau-1 using the loop: for every candidate loop start
/// l, z_loop(l) implies v(h+k) = v(l + (k mod (h-l))).
inline std::vector<Bit> extend_periodic( Circuit& c, std::vector<Bit> const& z_loop, std::vector<Bit> values, int tau,
                                         std::string const& name )
{
  int const h = static_cast<int>( z_loop.size() );
  for ( int k = 0; k < tau; ++k )
  {
    std::vector<Bit> targets;
    for ( int l = 0; l < h; ++l )
      targets.push_back( values[l + ( k % ( h - l ) )] );
    bool const same = std::all_of( targets.begin(), targets.end(), [&]( Bit b ) { return b == targets.front(); } );
    if ( same )
    {
      values.push_back( targets.front() );
      continue;
    }
    Bit const v = c.fresh( name + "_x" + std::to_string( h + k ) );
    for ( int l = 0; l < h; ++l )
      c.equal_if( z_loop[l], v, targets[l] );
    values.push_back( v );
  }
  return values;
}

} // namespace detail

/* ---------------------------------------------------------------------------------------------
 * inner layer
 * ------------------------------------------------------------------------------------------- */

/// Encodes inner formulas per robot over t = 0..h+tau-1 (Z variables).
class InnerEncoder
{
public:
  InnerEncoder( Circuit& circuit, VariableLayout& layout ) : c_( circuit ), layout_( layout ) {}
  virtual ~InnerEncoder() = default;

  /// Z[phi][n][0..h+tau-1]
  std::vector<Bit> const& encode( InnerFormula const& f, int n )
  {
    std::string const key = to_string( f );
    auto& per_robot = layout_.Z[key];
    if ( per_robot.empty() )
      per_robot.resize( layout_.n_robots );
    if ( !per_robot[n].empty() )
      return per_robot[n];
    detail::TagScope scope( c_.model(), "inner" );
    auto values = build( f, n );
    auto& slot = layout_.Z[key][n]; // build() may have rehashed the map
    slot = std::move( values );
    return slot;
  }

  /// R[phi][n][t] = AND_{k=0..tau} Z[phi][n][t+k] for t < h.
  std::vector<Bit> const& robust( InnerFormula const& f, int n )
  {
    std::string const key = to_string( f );
    auto& per_robot = layout_.R[key];
    if ( per_robot.empty() )
      per_robot.resize( layout_.n_robots );
    if ( !per_robot[n].empty() )
      return per_robot[n];
    auto const& z = encode( f, n );
    detail::TagScope scope( c_.model(), "robust" );
    std::vector<Bit> r( horizon() );
    for ( int t = 0; t < horizon(); ++t )
    {
      std::vector<Bit> window( z.begin() + t, z.begin() + t + tau() + 1 );
      r[t] = c_.conj( window );
    }
    auto& slot = layout_.R[key][n];
    slot = std::move( r );
    return slot;
  }

protected:
  int horizon() const { return layout_.horizon; }
  int tau() const { return layout_.tau; }
  int extent() const { return layout_.horizon + layout_.tau; }

  /// Literal for atom `a` of robot n at time t. Called for t < h, and for t >= h when
  /// `atoms_beyond_horizon()` holds.
  virtual Bit atom( int n, std::string const& a, int t ) = 0;
  virtual bool atoms_beyond_horizon() const { return true; }

  Circuit& c_;
  VariableLayout& layout_;

private:
  std::vector<Bit> build( InnerFormula const& f, int n )
  {
    int const h = horizon(), e = extent();
    std::string const name = "r" + std::to_string( n );
    auto pointwise = [&]( auto&& op ) {
      std::vector<std::vector<Bit>> kids;
      for ( auto const& ch : f.children() )
        kids.push_back( encode( ch, n ) );
      std::vector<Bit> out( e );
      for ( int t = 0; t < e; ++t )
      {
        std::vector<Bit> args;
        for ( auto const& k : kids )
          args.push_back( k[t] );
        out[t] = op( args );
      }
      return out;
    };
    auto head = []( std::vector<Bit> const& v, int h ) { return std::vector<Bit>( v.begin(), v.begin() + h ); };
    switch ( f.kind() )
    {
    case FormulaKind::constant_true:
      return std::vector<Bit>( e, Bit::constant( true ) );
    case FormulaKind::constant_false:
      return std::vector<Bit>( e, Bit::constant( false ) );
    case FormulaKind::leaf:
    {
      std::vector<Bit> out;
      int const direct = atoms_beyond_horizon() ? e : h;
      for ( int t = 0; t < direct; ++t )
        out.push_back( atom( n, f.payload().name, t ) );
      if ( direct < e )
        out = detail::extend_periodic( c_, layout_.z_loop, out, tau(), "z_" + name + "_" + f.payload().name );
      return out;
    }
    case FormulaKind::negation:
    {
      auto out = encode( f.child(), n );
      for ( auto& b : out )
        b = !b;
      return out;
    }
    case FormulaKind::conjunction:
      return pointwise( [&]( std::vector<Bit> const& a ) { return c_.conj( a ); } );
    case FormulaKind::disjunction:
      return pointwise( [&]( std::vector<Bit> const& a ) { return c_.disj( a ); } );
    case FormulaKind::next:
    {
      if ( tau() > 0 )
        throw EncodingError( "inner next operator in '" + to_string( f ) + "' cannot be made robust to asynchrony" );
      return detail::next_values( c_, layout_.z_loop, encode( f.child(), n ) );
    }
    case FormulaKind::until:
    case FormulaKind::eventually:
    {
      bool const ev = f.kind() == FormulaKind::eventually;
      auto hold = ev ? std::vector<Bit>( e, Bit::constant( true ) ) : encode( f.lhs(), n );
      auto goal = encode( ev ? f.child() : f.rhs(), n );
      auto out = detail::until_values( c_, layout_.z_loop, head( hold, h ), head( goal, h ) );
      return detail::extend_periodic( c_, layout_.z_loop, out, tau(), "z_" + name + "_u" );
    }
    case FormulaKind::release:
    case FormulaKind::always:
    {
      bool const al = f.kind() == FormulaKind::always;
      auto stop = al ? std::vector<Bit>( e, Bit::constant( false ) ) : encode( f.lhs(), n );
      auto keep = encode( al ? f.child() : f.rhs(), n );
      auto out = detail::guarded_values( c_, layout_.z_loop, head( keep, h ), head( stop, h ), keep[h - 1] );
      return detail::extend_periodic( c_, layout_.z_loop, out, tau(), "z_" + name + "_r" );
    }
    }
    throw EncodingError( "unsupported inner formula" );
  }
};

/* ---------------------------------------------------------------------------------------------
 * outer layer
 * ------------------------------------------------------------------------------------------- */

/// Encodes outer formulas over t = 0..h-1 (Y variables). Counting propositions are left to
/// subclasses; disjunction and until may be overridden by the robust encoder.
class OuterEncoder
{
public:
  OuterEncoder( Circuit& circuit, VariableLayout& layout ) : c_( circuit ), layout_( layout ) {}
  virtual ~OuterEncoder() = default;

  std::vector<Bit> const& encode( OuterFormula const& f )
  {
    std::string const key = to_string( f );
    if ( auto it = layout_.Y.find( key ); it != layout_.Y.end() )
      return it->second;
    detail::TagScope scope( c_.model(), "outer" );
    auto values = build( f );
    return layout_.Y[key] = std::move( values );
  }

protected:
  int horizon() const { return layout_.horizon; }

  virtual std::vector<Bit> tcp( TempCountProp const& p ) = 0;

  virtual std::vector<Bit> disjunction( OuterFormula const& f )
  {
    std::vector<std::vector<Bit>> kids;
    for ( auto const& ch : f.children() )
      kids.push_back( encode( ch ) );
    return pointwise_disj( kids );
  }

  virtual std::vector<Bit> until( OuterFormula const& lhs, OuterFormula const& rhs )
  {
    return detail::until_values( c_, layout_.z_loop, encode( lhs ), encode( rhs ) );
  }

  std::vector<Bit> pointwise_disj( std::vector<std::vector<Bit>> const& kids )
  {
    std::vector<Bit> out( horizon() );
    for ( int t = 0; t < horizon(); ++t )
    {
      std::vector<Bit> args;
      for ( auto const& k : kids )
        args.push_back( k[t] );
      out[t] = c_.disj( args );
    }
    return out;
  }

  Circuit& c_;
  VariableLayout& layout_;

private:
  std::vector<Bit> build( OuterFormula const& f )
  {
    int const h = horizon();
    switch ( f.kind() )
    {
    case FormulaKind::constant_true:
      return std::vector<Bit>( h, Bit::constant( true ) );
    case FormulaKind::constant_false:
      return std::vector<Bit>( h, Bit::constant( false ) );
    case FormulaKind::leaf:
      return tcp( f.payload() );
    case FormulaKind::negation:
      throw EncodingError( "outer negation must be normalized away before encoding" );
    case FormulaKind::conjunction:
    {
      std::vector<std::vector<Bit>> kids;
      for ( auto const& ch : f.children() )
        kids.push_back( encode( ch ) );
      std::vector<Bit> out( h );
      for ( int t = 0; t < h; ++t )
      {
        std::vector<Bit> args;
        for ( auto const& k : kids )
          args.push_back( k[t] );
        out[t] = c_.conj( args );
      }
      return out;
    }
    case FormulaKind::disjunction:
      return disjunction( f );
    case FormulaKind::next:
      return detail::next_values( c_, layout_.z_loop, encode( f.child() ) );
    case FormulaKind::until:
      return until( f.lhs(), f.rhs() );
    case FormulaKind::eventually:
      return until( OuterFormula::truth(), f.child() );
    case FormulaKind::release:
    {
      auto const& keep = encode( f.rhs() );
      return detail::guarded_values( c_, layout_.z_loop, keep, encode( f.lhs() ), keep[h - 1] );
    }
    case FormulaKind::always:
    {
      auto const& keep = encode( f.child() );
      return detail::guarded_values( c_, layout_.z_loop, keep, std::vector<Bit>( h, Bit::constant( false ) ), keep[h - 1] );
    }
    }
    throw EncodingError( "unsupported outer formula" );
  }
};

/// Normalization shared by the builders: groups resolved, positive normal form, derived
/// operators rewritten (with the completeness-preserving eventually when `robust`).
inline OuterFormula normalize_formula( OuterFormula const& f, int n_robots, GroupMap const& groups, bool robust,
                                       std::vector<std::string>* warnings )
{
  auto g = resolve_groups( f, groups );
  for ( auto const& p : counting_propositions( g ) )
    for ( int r : p.group )
      if ( r < 0 || r >= n_robots )
        throw EncodingError( "group of " + detail::leaf_to_string( p ) + " names robot " + std::to_string( r ) +
                             " out of range" );
  g = to_pnf( g, n_robots, warnings );
  return expand_sugar( g, n_robots, robust );
}

} // namespace cltl
