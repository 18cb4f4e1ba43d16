#pragma once

#include "ilp.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace cltl
{

/// Boolean literal over a model: a constant, a binary variable, or its complement.
/// Complements are expressed as 1 - x inside linear constraints, so they cost nothing.
class Bit
{
public:
  Bit() = default;
  static Bit constant( bool value ) { return Bit( -1, value ); }
  static Bit of( VarId v ) { return Bit( v.index, false ); }

  bool is_constant() const noexcept { return var_ < 0; }
  bool constant_value() const noexcept { return negated_; }
  bool is_true() const noexcept { return is_constant() && negated_; }
  bool is_false() const noexcept { return is_constant() && !negated_; }
  VarId var() const noexcept { return VarId{ var_ }; }
  bool negated() const noexcept { return negated_; }

  Bit operator!() const { return Bit( var_, !negated_ ); }

  /// 1*x or 1 - x, or the constant.
  LinExpr expr() const
  {
    if ( is_constant() )
      return LinExpr( negated_ ? 1.0 : 0.0 );
    return negated_ ? LinExpr( 1.0 ) - LinExpr( var() ) : LinExpr( var() );
  }

  bool evaluate( std::vector<double> const& values ) const
  {
    if ( is_constant() )
      return negated_;
    bool const v = values.at( var_ ) > 0.5;
    return negated_ ? !v : v;
  }

  friend bool operator==( Bit, Bit ) = default;
  friend auto operator<=>( Bit, Bit ) = default;

private:
  Bit( int var, bool negated ) : var_( var ), negated_( negated ) {}

  // For constants `negated_` holds the value.
  int var_ = -1;
  bool negated_ = false;
};

/// Builds Boolean structure over an `IlpModel` with constant folding and structural
/// hashing: the same gate over the same inputs yields the same variable.
class Circuit
{
public:
  explicit Circuit( IlpModel& model ) : model_( model ) {}

  IlpModel& model() { return model_; }

  Bit fresh( std::string const& name ) { return Bit::of( model_.add_binary( name ) ); }

  Bit conj( std::vector<Bit> in, std::string const& name = {} ) { return gate( true, std::move( in ), name ); }
  Bit disj( std::vector<Bit> in, std::string const& name = {} ) { return gate( false, std::move( in ), name ); }
  Bit conj( Bit a, Bit b, std::string const& name = {} ) { return conj( std::vector<Bit>{ a, b }, name ); }
  Bit disj( Bit a, Bit b, std::string const& name = {} ) { return disj( std::vector<Bit>{ a, b }, name ); }

  /// y = 1 iff at least m of `in` hold, through the big-M indicator with the given M.
  /// `big_m` defaults to |in| + 1.
  Bit at_least( std::vector<Bit> const& in, int m, std::string const& name = {}, int big_m = -1 )
  {
    if ( big_m < 0 )
      big_m = static_cast<int>( in.size() ) + 1;
    int threshold = m;
    std::vector<Bit> live;
    for ( auto b : in )
    {
      if ( b.is_true() )
        --threshold;
      else if ( !b.is_false() )
        live.push_back( b );
    }
    if ( threshold <= 0 )
      return Bit::constant( true );
    if ( threshold > static_cast<int>( live.size() ) )
      return Bit::constant( false );
    std::sort( live.begin(), live.end() );
    auto key = std::make_tuple( 2, live, threshold );
    if ( sharing_ )
      if ( auto it = cache_.find( key ); it != cache_.end() )
        return it->second;
    LinExpr sum;
    for ( auto b : live )
      sum += b.expr();
    Bit const y = Bit::of( indicator_geq( model_, sum, threshold, big_m, name.empty() ? auto_name( "cnt" ) : name ) );
    if ( sharing_ )
      cache_.emplace( std::move( key ), y );
    return y;
  }

  /// guard = 1 implies a = b.
  void equal_if( Bit guard, Bit a, Bit b )
  {
    if ( guard.is_false() || a == b )
      return;
    LinExpr const slack = LinExpr( 1.0 ) - guard.expr();
    model_.add_le( a.expr() - b.expr(), slack );
    model_.add_le( b.expr() - a.expr(), slack );
  }

  /// Pins a literal to a value.
  void require( Bit b, bool value = true )
  {
    if ( b.is_constant() )
    {
      if ( b.constant_value() != value )
        model_.add_constraint( LinExpr(), Sense::ge, 1.0 ); // 0 >= 1
      return;
    }
    model_.add_constraint( b.expr(), Sense::eq, value ? 1.0 : 0.0 );
  }

  /// Disables structural hashing of subsequently created gates (used to reproduce a
  /// construction gate-for-gate).
  void set_sharing( bool on ) { sharing_ = on; }

private:
  std::string auto_name( char const* prefix ) const { return std::string( prefix ) + std::to_string( model_.num_vars() ); }

  Bit gate( bool is_and, std::vector<Bit> in, std::string const& name )
  {
    Bit const absorbing = Bit::constant( !is_and );
    std::vector<Bit> live;
    for ( auto b : in )
    {
      if ( b == absorbing )
        return absorbing;
      if ( !b.is_constant() )
        live.push_back( b );
    }
    std::sort( live.begin(), live.end() );
    live.erase( std::unique( live.begin(), live.end() ), live.end() );
    for ( std::size_t i = 0; i + 1 < live.size(); ++i )
      if ( live[i].var() == live[i + 1].var() )
        return absorbing; // x and !x
    if ( live.empty() )
      return Bit::constant( is_and );
    if ( live.size() == 1u )
      return live.front();
    auto key = std::make_tuple( is_and ? 0 : 1, live, 0 );
    if ( sharing_ )
      if ( auto it = cache_.find( key ); it != cache_.end() )
        return it->second;
    Bit const z = fresh( name.empty() ? auto_name( is_and ? "and" : "or" ) : name );
    LinExpr sum;
    for ( auto b : live )
    {
      if ( is_and )
        model_.add_le( z.expr(), b.expr() );
      else
        model_.add_ge( z.expr(), b.expr() );
      sum += b.expr();
    }
    if ( is_and )
      model_.add_ge( z.expr(), sum + ( 1.0 - static_cast<double>( live.size() ) ) );
    else
      model_.add_le( z.expr(), sum );
    if ( sharing_ )
      cache_.emplace( std::move( key ), z );
    return z;
  }

  IlpModel& model_;
  std::map<std::tuple<int, std::vector<Bit>, int>, Bit> cache_;
  bool sharing_ = true;
};

} // namespace cltl
