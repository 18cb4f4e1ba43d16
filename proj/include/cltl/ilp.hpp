#pragma once

#include "error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cltl
{

enum class VarKind : std::uint8_t
{
  binary,
  integer,
  continuous,
};

/// Handle to a model variable; indices are dense and follow insertion order.
struct VarId
{
  int index = -1;

  bool valid() const noexcept { return index >= 0; }
  friend bool operator==( VarId, VarId ) = default;
  friend auto operator<=>( VarId, VarId ) = default;
};

struct Variable
{
  VarKind kind;
  double lo;
  double hi;
  std::string name;
  std::string tag;

  bool is_integral() const noexcept { return kind != VarKind::continuous; }
};

/// Sparse affine expression sum_j a_j x_j + constant.
class LinExpr
{
public:
  LinExpr() = default;
  LinExpr( double constant ) : constant_( constant ) {}
  LinExpr( VarId v, double coeff = 1.0 ) { add( v, coeff ); }

  LinExpr& add( VarId v, double coeff )
  {
    if ( coeff != 0.0 )
      terms_.emplace_back( v.index, coeff );
    normalized_ = false;
    return *this;
  }

  LinExpr& operator+=( LinExpr const& o )
  {
    terms_.insert( terms_.end(), o.terms_.begin(), o.terms_.end() );
    constant_ += o.constant_;
    normalized_ = false;
    return *this;
  }

  LinExpr& operator-=( LinExpr const& o ) { return *this += o * -1.0; }
  LinExpr& operator+=( double c )
  {
    constant_ += c;
    return *this;
  }

  LinExpr& operator*=( double c )
  {
    for ( auto& t : terms_ )
      t.second *= c;
    constant_ *= c;
    if ( c == 0.0 )
      terms_.clear();
    return *this;
  }

  friend LinExpr operator+( LinExpr a, LinExpr const& b ) { return a += b; }
  friend LinExpr operator-( LinExpr a, LinExpr const& b ) { return a -= b; }
  friend LinExpr operator*( LinExpr a, double c ) { return a *= c; }
  friend LinExpr operator*( double c, LinExpr a ) { return a *= c; }

  /// Sorted by variable index, merged, zero coefficients dropped.
  std::vector<std::pair<int, double>> const& terms() const
  {
    normalize();
    return terms_;
  }

  double constant() const noexcept { return constant_; }
  bool empty() const { return terms().empty(); }

  double evaluate( std::vector<double> const& values ) const
  {
    double s = constant_;
    for ( auto [j, a] : terms() )
      s += a * values.at( j );
    return s;
  }

private:
  void normalize() const
  {
    if ( normalized_ )
      return;
    std::sort( terms_.begin(), terms_.end(), []( auto const& x, auto const& y ) { return x.first < y.first; } );
    std::size_t out = 0;
    for ( std::size_t i = 0; i < terms_.size(); )
    {
      int const j = terms_[i].first;
      double a = 0.0;
      for ( ; i < terms_.size() && terms_[i].first == j; ++i )
        a += terms_[i].second;
      if ( a != 0.0 )
        terms_[out++] = { j, a };
    }
    terms_.resize( out );
    normalized_ = true;
  }

  mutable std::vector<std::pair<int, double>> terms_;
  double constant_ = 0.0;
  mutable bool normalized_ = true;
};

inline LinExpr operator+( VarId a, VarId b ) { return LinExpr( a ) + LinExpr( b ); }
inline LinExpr operator-( VarId a, VarId b ) { return LinExpr( a ) - LinExpr( b ); }
inline LinExpr operator*( double c, VarId v ) { return LinExpr( v, c ); }

enum class Sense : std::uint8_t
{
  le,
  eq,
  ge,
};

/// expr (sense) rhs, with the expression's constant folded into rhs.
struct Constraint
{
  std::vector<std::pair<int, double>> terms;
  Sense sense;
  double rhs;
  std::string tag;
};

struct TagCounts
{
  int variables = 0;
  int constraints = 0;
  friend bool operator==( TagCounts const&, TagCounts const& ) = default;
};

class IlpModel
{
public:
  VarId add_var( VarKind kind, double lo, double hi, std::string name, std::string tag = {} )
  {
    if ( kind == VarKind::binary )
    {
      lo = std::max( lo, 0.0 );
      hi = std::min( hi, 1.0 );
    }
    if ( std::isnan( lo ) || std::isnan( hi ) || lo > hi )
      throw EncodingError( "variable '" + name + "' has invalid bounds [" + std::to_string( lo ) + ", " +
                           std::to_string( hi ) + "]" );
    if ( kind == VarKind::integer && ( !std::isfinite( lo ) || !std::isfinite( hi ) ) )
      throw EncodingError( "integer variable '" + name + "' needs finite bounds" );
    if ( kind != VarKind::continuous )
    {
      lo = std::ceil( lo - 1e-9 );
      hi = std::floor( hi + 1e-9 );
      if ( lo > hi )
        throw EncodingError( "integer variable '" + name + "' has an empty domain" );
    }
    if ( tag.empty() )
      tag = current_tag_;
    ++counts_[tag].variables;
    vars_.push_back( { kind, lo, hi, std::move( name ), std::move( tag ) } );
    return VarId{ static_cast<int>( vars_.size() ) - 1 };
  }

  VarId add_binary( std::string name, std::string tag = {} ) { return add_var( VarKind::binary, 0, 1, std::move( name ), std::move( tag ) ); }

  VarId add_integer( double lo, double hi, std::string name, std::string tag = {} )
  {
    return add_var( VarKind::integer, lo, hi, std::move( name ), std::move( tag ) );
  }

  VarId add_continuous( double lo, double hi, std::string name, std::string tag = {} )
  {
    return add_var( VarKind::continuous, lo, hi, std::move( name ), std::move( tag ) );
  }

  void add_constraint( LinExpr const& expr, Sense sense, double rhs, std::string tag = {} )
  {
    Constraint c;
    c.terms = expr.terms();
    for ( auto [j, a] : c.terms )
      if ( j < 0 || j >= num_vars() )
        throw EncodingError( "constraint references unknown variable " + std::to_string( j ) );
    c.sense = sense;
    c.rhs = rhs - expr.constant();
    c.tag = tag.empty() ? current_tag_ : std::move( tag );
    ++counts_[c.tag].constraints;
    cons_.push_back( std::move( c ) );
  }

  void add_le( LinExpr const& lhs, LinExpr const& rhs, std::string tag = {} ) { add_constraint( lhs - rhs, Sense::le, 0.0, std::move( tag ) ); }
  void add_ge( LinExpr const& lhs, LinExpr const& rhs, std::string tag = {} ) { add_constraint( lhs - rhs, Sense::ge, 0.0, std::move( tag ) ); }
  void add_eq( LinExpr const& lhs, LinExpr const& rhs, std::string tag = {} ) { add_constraint( lhs - rhs, Sense::eq, 0.0, std::move( tag ) ); }

  /// Tag applied to variables and constraints added without an explicit one.
  void set_tag( std::string tag ) { current_tag_ = std::move( tag ); }
  std::string const& tag() const { return current_tag_; }

  void set_objective( LinExpr obj ) { objective_ = std::move( obj ); }
  LinExpr const& objective() const { return objective_; }

  int num_vars() const { return static_cast<int>( vars_.size() ); }
  int num_constraints() const { return static_cast<int>( cons_.size() ); }
  Variable const& var( VarId v ) const { return vars_.at( v.index ); }
  Variable const& var( int j ) const { return vars_.at( j ); }
  std::vector<Variable> const& variables() const { return vars_; }
  std::vector<Constraint> const& constraints() const { return cons_; }

  /// Per-tag counts, keyed by tag name in lexicographic order.
  std::map<std::string, TagCounts> const& metadata() const { return counts_; }

  TagCounts count( std::string const& tag ) const
  {
    auto it = counts_.find( tag );
    return it == counts_.end() ? TagCounts{} : it->second;
  }

  /// Narrows a variable's domain in place (used to pin values).
  void fix( VarId v, double value )
  {
    auto& x = vars_.at( v.index );
    x.lo = std::max( x.lo, value );
    x.hi = std::min( x.hi, value );
  }

  void set_bounds( VarId v, double lo, double hi )
  {
    auto& x = vars_.at( v.index );
    x.lo = lo;
    x.hi = hi;
  }

  std::optional<VarId> find( std::string const& name ) const
  {
    for ( int j = 0; j < num_vars(); ++j )
      if ( vars_[j].name == name )
        return VarId{ j };
    return std::nullopt;
  }

  /// Bounds on the value of `expr` implied by variable bounds alone.
  std::pair<double, double> expression_range( LinExpr const& expr ) const
  {
    double lo = expr.constant(), hi = expr.constant();
    for ( auto [j, a] : expr.terms() )
    {
      auto const& x = vars_.at( j );
      lo += a > 0 ? a * x.lo : a * x.hi;
      hi += a > 0 ? a * x.hi : a * x.lo;
    }
    return { lo, hi };
  }

private:
  std::vector<Variable> vars_;
  std::vector<Constraint> cons_;
  std::map<std::string, TagCounts> counts_;
  std::string current_tag_ = "misc";
  LinExpr objective_;
};

/* ---------------------------------------------------------------------------------------------
 * solutions
 * ------------------------------------------------------------------------------------------- */

enum class SolveStatus
{
  feasible,
  infeasible,
  unknown,
};

inline std::string to_string( SolveStatus s )
{
  switch ( s )
  {
  case SolveStatus::feasible: return "feasible";
  case SolveStatus::infeasible: return "infeasible";
  case SolveStatus::unknown: return "unknown";
  }
  return "unknown";
}

struct SolveStats
{
  long nodes = 0;
  long lp_iterations = 0;
  long propagations = 0;
  int max_depth = 0;
};

struct Solution
{
  SolveStatus status = SolveStatus::unknown;
  std::vector<double> values;
  SolveStats stats;
  std::string message;

  bool feasible() const noexcept { return status == SolveStatus::feasible; }
  double value( VarId v ) const { return values.at( v.index ); }
  bool is_one( VarId v ) const { return values.at( v.index ) > 0.5; }
};

/// First violated bound or constraint at `values`, if any. Integral variables must hold
/// exact integers; continuous slack is `tol`.
inline std::optional<std::string> find_violation( IlpModel const& model, std::vector<double> const& values, double tol = 1e-6 )
{
  if ( static_cast<int>( values.size() ) != model.num_vars() )
    return std::string( "assignment has " + std::to_string( values.size() ) + " values for " +
                        std::to_string( model.num_vars() ) + " variables" );
  for ( int j = 0; j < model.num_vars(); ++j )
  {
    auto const& x = model.var( j );
    double const v = values[j];
    if ( !std::isfinite( v ) || v < x.lo - tol || v > x.hi + tol )
      return "variable '" + x.name + "' = " + std::to_string( v ) + " outside its bounds";
    if ( x.is_integral() && v != std::round( v ) )
      return "integral variable '" + x.name + "' = " + std::to_string( v ) + " is not an integer";
  }
  for ( int i = 0; i < model.num_constraints(); ++i )
  {
    auto const& c = model.constraints()[i];
    double s = 0.0, scale = 1.0;
    for ( auto [j, a] : c.terms )
    {
      s += a * values[j];
      scale = std::max( scale, std::abs( a * values[j] ) );
    }
    double const slack = tol * scale;
    bool const ok = c.sense == Sense::le ? s <= c.rhs + slack : c.sense == Sense::ge ? s >= c.rhs - slack : std::abs( s - c.rhs ) <= slack;
    if ( !ok )
      return "constraint " + std::to_string( i ) + " [" + c.tag + "] violated: activity " + std::to_string( s ) +
             ( c.sense == Sense::le ? " <= " : c.sense == Sense::ge ? " >= " : " = " ) + std::to_string( c.rhs );
  }
  return std::nullopt;
}

/* ---------------------------------------------------------------------------------------------
 * gadgets
 * ------------------------------------------------------------------------------------------- */

enum class GateKind
{
  and_gate,
  or_gate,
  not_gate,
};

/// Fresh binary z = op(inputs):
///   AND  z <= x_i, z >= 1 - I + sum x_i
///   OR   z >= x_i, z <= sum x_i
///   NOT  z = 1 - x
inline VarId bool_gadget( IlpModel& model, GateKind kind, std::vector<VarId> const& inputs, std::string name = {} )
{
  if ( inputs.empty() )
    throw EncodingError( "boolean gadget needs at least one input" );
  for ( auto v : inputs )
    if ( model.var( v ).kind != VarKind::binary )
      throw EncodingError( "boolean gadget input '" + model.var( v ).name + "' is not binary" );
  if ( kind == GateKind::not_gate && inputs.size() != 1u )
    throw EncodingError( "negation gadget takes exactly one input" );
  if ( name.empty() )
    name = "gate" + std::to_string( model.num_vars() );
  VarId const z = model.add_binary( name );
  switch ( kind )
  {
  case GateKind::and_gate:
  {
    LinExpr sum;
    for ( auto v : inputs )
    {
      model.add_le( z, v );
      sum.add( v, 1.0 );
    }
    model.add_ge( z, sum + ( 1.0 - static_cast<double>( inputs.size() ) ) );
    break;
  }
  case GateKind::or_gate:
  {
    LinExpr sum;
    for ( auto v : inputs )
    {
      model.add_ge( z, v );
      sum.add( v, 1.0 );
    }
    model.add_le( z, sum );
    break;
  }
  case GateKind::not_gate:
    model.add_eq( z, LinExpr( 1.0 ) - LinExpr( inputs.front() ) );
    break;
  }
  return z;
}

/// Fresh binary y with y = 1 iff expr >= m, for integer-valued `expr`:
///   expr - M y <= m - 1,  expr - M y >= m - M.
/// Rejects M when the range of `expr` shows that either side could cut off a valid point.
/// The range defaults to the one implied by variable bounds; `range` supplies a tighter one
/// known from other constraints.
inline VarId indicator_geq( IlpModel& model, LinExpr const& expr, double m, double big_m, std::string name = {},
                            std::optional<std::pair<double, double>> range = std::nullopt )
{
  auto [lo, hi] = range.value_or( model.expression_range( expr ) );
  if ( big_m < hi - m + 1.0 || big_m < m - lo )
    throw EncodingError( "big-M " + std::to_string( big_m ) + " too small for expression range [" +
                         std::to_string( lo ) + ", " + std::to_string( hi ) + "] and threshold " + std::to_string( m ) );
  if ( name.empty() )
    name = "ind" + std::to_string( model.num_vars() );
  VarId const y = model.add_binary( name );
  model.add_constraint( expr - LinExpr( y, big_m ), Sense::le, m - 1.0 );
  model.add_constraint( expr - LinExpr( y, big_m ), Sense::ge, m - big_m );
  return y;
}

/* ---------------------------------------------------------------------------------------------
 * LP export
 * ------------------------------------------------------------------------------------------- */

namespace detail
{

inline std::string format_number( double x )
{
  if ( x == std::round( x ) && std::abs( x ) < 1e15 )
    return std::to_string( static_cast<long long>( x ) );
  char buf[64];
  auto res = std::to_chars( buf, buf + sizeof( buf ), x );
  return std::string( buf, res.ptr );
}

inline std::string sanitize_name( std::string const& name )
{
  std::string out;
  for ( char c : name )
    out += ( std::isalnum( static_cast<unsigned char>( c ) ) || c == '_' ) ? c : '_';
  if ( out.empty() || std::isdigit( static_cast<unsigned char>( out.front() ) ) || out.front() == 'e' || out.front() == 'E' )
    out = "v_" + out;
  return out;
}

} // namespace detail

/// Names as they appear in LP files: sanitized to [A-Za-z0-9_] and made unique by suffixing.
inline std::vector<std::string> lp_names( IlpModel const& model )
{
  std::vector<std::string> names;
  std::set<std::string> used;
  names.reserve( model.num_vars() );
  for ( int j = 0; j < model.num_vars(); ++j )
  {
    std::string base = detail::sanitize_name( model.var( j ).name );
    std::string name = base;
    for ( int k = 2; used.count( name ); ++k )
      name = base + "_" + std::to_string( k );
    used.insert( name );
    names.push_back( std::move( name ) );
  }
  return names;
}

/// Writes the model in CPLEX LP format. Output depends only on the model (insertion order).
inline void export_lp( IlpModel const& model, std::ostream& out )
{
  auto const names = lp_names( model );
  auto write_terms = [&]( std::vector<std::pair<int, double>> const& terms ) {
    if ( terms.empty() )
    {
      out << " 0 " << ( names.empty() ? std::string( "dummy_zero" ) : names.front() );
      return;
    }
    bool first = true;
    for ( auto [j, a] : terms )
    {
      if ( a < 0 )
        out << ( first ? " -" : " - " );
      else if ( !first )
        out << " + ";
      else
        out << " ";
      out << detail::format_number( std::abs( a ) ) << " " << names[j];
      first = false;
    }
  };

  out << "\\ feasibility model: " << model.num_vars() << " variables, " << model.num_constraints() << " constraints\n";
  out << "Minimize\n obj:";
  if ( model.objective().empty() )
    out << " 0" << ( names.empty() ? "" : " " + names.front() );
  else
    write_terms( model.objective().terms() );
  out << "\nSubject To\n";
  for ( int i = 0; i < model.num_constraints(); ++i )
  {
    auto const& c = model.constraints()[i];
    out << " c" << i << ":";
    write_terms( c.terms );
    out << ( c.sense == Sense::le ? " <= " : c.sense == Sense::ge ? " >= " : " = " ) << detail::format_number( c.rhs ) << "\n";
  }
  out << "Bounds\n";
  if ( names.empty() )
    out << " dummy_zero = 0\n";
  for ( int j = 0; j < model.num_vars(); ++j )
  {
    auto const& x = model.var( j );
    if ( x.kind == VarKind::binary && x.lo == 0.0 && x.hi == 1.0 )
      continue;
    if ( x.lo == x.hi )
    {
      out << " " << names[j] << " = " << detail::format_number( x.lo ) << "\n";
      continue;
    }
    std::string const lo = std::isfinite( x.lo ) ? detail::format_number( x.lo ) : "-inf";
    std::string const hi = std::isfinite( x.hi ) ? detail::format_number( x.hi ) : "+inf";
    out << " " << lo << " <= " << names[j] << " <= " << hi << "\n";
  }
  bool any = false;
  for ( int j = 0; j < model.num_vars(); ++j )
    if ( model.var( j ).kind == VarKind::binary )
    {
      if ( !any )
        out << "Binaries\n";
      any = true;
      out << " " << names[j] << "\n";
    }
  any = false;
  for ( int j = 0; j < model.num_vars(); ++j )
    if ( model.var( j ).kind == VarKind::integer )
    {
      if ( !any )
        out << "Generals\n";
      any = true;
      out << " " << names[j] << "\n";
    }
  out << "End\n";
}

inline void export_lp( IlpModel const& model, std::string const& path )
{
  std::ofstream out( path, std::ios::binary );
  if ( !out )
    throw Error( "cannot write LP file '" + path + "'" );
  export_lp( model, out );
  if ( !out )
    throw Error( "failed writing LP file '" + path + "'" );
}

inline std::string export_lp_string( IlpModel const& model )
{
  std::ostringstream os;
  export_lp( model, os );
  return os.str();
}

} // namespace cltl
