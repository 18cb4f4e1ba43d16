#pragma once

#include "error.hpp"
#include "formula.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cltl
{

/// Labeled transition system of a single robot. Self-loops are ordinary transitions.
struct TransitionSystem
{
  std::vector<std::string> states;
  std::vector<std::pair<int, int>> transitions; ///< (from, to)
  std::vector<std::string> ap;
  std::vector<std::vector<std::string>> labels; ///< labels[i] is L(v^i)

  int num_states() const { return static_cast<int>( states.size() ); }

  bool has_transition( int from, int to ) const
  {
    return std::find( transitions.begin(), transitions.end(), std::make_pair( from, to ) ) != transitions.end();
  }

  std::vector<int> successors( int from ) const
  {
    std::vector<int> out;
    for ( auto [i, j] : transitions )
      if ( i == from )
        out.push_back( j );
    std::sort( out.begin(), out.end() );
    out.erase( std::unique( out.begin(), out.end() ), out.end() );
    return out;
  }

  std::vector<int> predecessors( int to ) const
  {
    std::vector<int> out;
    for ( auto [i, j] : transitions )
      if ( j == to )
        out.push_back( i );
    std::sort( out.begin(), out.end() );
    out.erase( std::unique( out.begin(), out.end() ), out.end() );
    return out;
  }

  bool has_label( int state, std::string const& a ) const
  {
    auto const& l = labels.at( state );
    return std::find( l.begin(), l.end(), a ) != l.end();
  }

  /// A[j][i] = 1 iff (v^i, v^j) is a transition.
  std::vector<std::vector<int>> adjacency() const
  {
    std::vector<std::vector<int>> a( states.size(), std::vector<int>( states.size(), 0 ) );
    for ( auto [i, j] : transitions )
      a[j][i] = 1;
    return a;
  }

  int state_index( std::string const& name ) const
  {
    auto it = std::find( states.begin(), states.end(), name );
    return it == states.end() ? -1 : static_cast<int>( it - states.begin() );
  }
};

enum class CollisionMode
{
  off,
  mutual_exclusion,
  mutual_exclusion_plus_swap,
};

inline std::string to_string( CollisionMode m )
{
  switch ( m )
  {
  case CollisionMode::off: return "off";
  case CollisionMode::mutual_exclusion: return "excl";
  case CollisionMode::mutual_exclusion_plus_swap: return "swap";
  }
  return "off";
}

inline CollisionMode parse_collision_mode( std::string const& s )
{
  if ( s == "off" )
    return CollisionMode::off;
  if ( s == "excl" || s == "mutual_exclusion" )
    return CollisionMode::mutual_exclusion;
  if ( s == "swap" || s == "mutual_exclusion_plus_swap" )
    return CollisionMode::mutual_exclusion_plus_swap;
  throw ModelError( "unknown collision mode '" + s + "'" );
}

struct MultiRobotInstance
{
  std::vector<TransitionSystem> systems;
  std::vector<int> initial_states;
  GroupMap groups;
  CollisionMode collision = CollisionMode::off;

  int n_robots() const { return static_cast<int>( systems.size() ); }
  std::vector<std::string> const& ap() const { return systems.front().ap; }
};

/// Count-based view of N robots sharing one transition system.
struct AggregateSystem
{
  TransitionSystem shared;
  std::vector<int> w0;
  int n_robots = 0;
};

struct Polytope
{
  std::vector<std::vector<double>> H;
  std::vector<double> h;

  bool contains( std::vector<double> const& w, double tol = 0.0 ) const
  {
    for ( std::size_t r = 0; r < H.size(); ++r )
    {
      double s = 0.0;
      for ( std::size_t k = 0; k < w.size(); ++k )
        s += H[r][k] * w[k];
      if ( s > h[r] + tol )
        return false;
    }
    return true;
  }
};

/// w(t+1) = F w(t) + G u(t) + c
struct AffineRobot
{
  std::vector<std::vector<double>> F;
  std::vector<std::vector<double>> G;
  std::vector<double> c;
  std::vector<double> init;

  int state_dim() const { return static_cast<int>( F.size() ); }
  int input_dim() const { return G.empty() ? 0 : static_cast<int>( G.front().size() ); }

  std::vector<double> step( std::vector<double> const& w, std::vector<double> const& u ) const
  {
    std::vector<double> out( c );
    for ( int i = 0; i < state_dim(); ++i )
    {
      for ( int k = 0; k < state_dim(); ++k )
        out[i] += F[i][k] * w[k];
      for ( int k = 0; k < input_dim(); ++k )
        out[i] += G[i][k] * u[k];
    }
    return out;
  }
};

struct ContinuousSystem
{
  std::vector<AffineRobot> robots;
  std::vector<double> state_lo, state_hi;
  std::vector<double> input_lo, input_hi;
  std::map<std::string, Polytope> atoms;
  GroupMap groups;
  double epsilon = 1e-6;
  std::optional<double> loop_big_m;

  int n_robots() const { return static_cast<int>( robots.size() ); }
};

using Model = std::variant<MultiRobotInstance, ContinuousSystem>;

/* ---------------------------------------------------------------------------------------------
 * validation
 * ------------------------------------------------------------------------------------------- */

inline std::vector<std::string> validate( TransitionSystem const& ts, std::string const& where = "robot" )
{
  std::vector<std::string> diags;
  int const n = ts.num_states();
  if ( n == 0 )
    diags.push_back( where + ": no states" );
  for ( auto [i, j] : ts.transitions )
    if ( i < 0 || i >= n || j < 0 || j >= n )
      diags.push_back( where + ": dangling transition (" + std::to_string( i ) + ", " + std::to_string( j ) + ")" );
  if ( static_cast<int>( ts.labels.size() ) != n )
    diags.push_back( where + ": labels defined for " + std::to_string( ts.labels.size() ) + " of " +
                     std::to_string( n ) + " states" );
  for ( auto const& l : ts.labels )
    for ( auto const& a : l )
      if ( std::find( ts.ap.begin(), ts.ap.end(), a ) == ts.ap.end() )
        diags.push_back( where + ": unknown label '" + a + "'" );
  return diags;
}

inline std::vector<std::string> validate( MultiRobotInstance const& inst )
{
  std::vector<std::string> diags;
  if ( inst.systems.empty() )
  {
    diags.push_back( "instance has no robots" );
    return diags;
  }
  if ( inst.initial_states.size() != inst.systems.size() )
    diags.push_back( "initial state count " + std::to_string( inst.initial_states.size() ) + " differs from robot count " +
                     std::to_string( inst.systems.size() ) );
  std::set<std::string> const ap0( inst.systems.front().ap.begin(), inst.systems.front().ap.end() );
  for ( int r = 0; r < inst.n_robots(); ++r )
  {
    auto const& ts = inst.systems[r];
    std::string const where = "robot " + std::to_string( r );
    auto d = validate( ts, where );
    diags.insert( diags.end(), d.begin(), d.end() );
    if ( std::set<std::string>( ts.ap.begin(), ts.ap.end() ) != ap0 )
      diags.push_back( where + ": atomic propositions differ from robot 0" );
    if ( r < static_cast<int>( inst.initial_states.size() ) &&
         ( inst.initial_states[r] < 0 || inst.initial_states[r] >= ts.num_states() ) )
      diags.push_back( where + ": initial state " + std::to_string( inst.initial_states[r] ) + " out of range" );
  }
  for ( auto const& [name, members] : inst.groups )
  {
    if ( members.empty() )
      diags.push_back( "group '" + name + "' is empty" );
    for ( int m : members )
      if ( m < 0 || m >= inst.n_robots() )
        diags.push_back( "group '" + name + "' references robot " + std::to_string( m ) + " out of range" );
  }
  if ( inst.collision != CollisionMode::off )
    for ( int r = 1; r < inst.n_robots(); ++r )
      if ( inst.systems[r].num_states() != inst.systems[0].num_states() )
        diags.push_back( "collision avoidance needs a shared state space; robot " + std::to_string( r ) +
                         " has a different state count" );
  return diags;
}

inline std::vector<std::string> validate( ContinuousSystem const& sys )
{
  std::vector<std::string> diags;
  if ( sys.robots.empty() )
    diags.push_back( "continuous system has no robots" );
  auto const dw = sys.state_lo.size();
  auto const du = sys.input_lo.size();
  if ( sys.state_hi.size() != dw || sys.input_hi.size() != du )
    diags.push_back( "bounding box lo/hi sizes differ" );
  for ( std::size_t i = 0; i < std::min( dw, sys.state_hi.size() ); ++i )
    if ( !( sys.state_lo[i] <= sys.state_hi[i] ) || !std::isfinite( sys.state_lo[i] ) || !std::isfinite( sys.state_hi[i] ) )
      diags.push_back( "state box dimension " + std::to_string( i ) + " is empty or unbounded" );
  for ( std::size_t i = 0; i < std::min( du, sys.input_hi.size() ); ++i )
    if ( !( sys.input_lo[i] <= sys.input_hi[i] ) || !std::isfinite( sys.input_lo[i] ) || !std::isfinite( sys.input_hi[i] ) )
      diags.push_back( "input box dimension " + std::to_string( i ) + " is empty or unbounded" );
  for ( std::size_t r = 0; r < sys.robots.size(); ++r )
  {
    auto const& rb = sys.robots[r];
    std::string const where = "continuous robot " + std::to_string( r );
    if ( rb.F.size() != dw || rb.G.size() != dw || rb.c.size() != dw || rb.init.size() != dw )
      diags.push_back( where + ": dimensions inconsistent with the state box" );
    for ( auto const& row : rb.F )
      if ( row.size() != dw )
        diags.push_back( where + ": F is not square" );
    for ( auto const& row : rb.G )
      if ( row.size() != du )
        diags.push_back( where + ": G column count differs from the input box" );
  }
  for ( auto const& [name, p] : sys.atoms )
  {
    if ( p.H.size() != p.h.size() || p.H.empty() )
      diags.push_back( "polytope '" + name + "': H and h row counts differ or are empty" );
    for ( auto const& row : p.H )
      if ( row.size() != dw )
        diags.push_back( "polytope '" + name + "': H column count differs from state dimension" );
  }
  if ( sys.epsilon <= 0.0 )
    diags.push_back( "epsilon must be positive" );
  return diags;
}

inline void throw_if_invalid( std::vector<std::string> const& diags )
{
  if ( diags.empty() )
    return;
  std::string msg = diags.front();
  for ( std::size_t i = 1; i < diags.size(); ++i )
    msg += "; " + diags[i];
  throw ModelError( msg );
}

/* ---------------------------------------------------------------------------------------------
 * derived views
 * ------------------------------------------------------------------------------------------- */

inline std::vector<int> label_vector( TransitionSystem const& ts, std::string const& a )
{
  if ( std::find( ts.ap.begin(), ts.ap.end(), a ) == ts.ap.end() )
    throw ModelError( "unknown atomic proposition '" + a + "'" );
  std::vector<int> v( ts.states.size(), 0 );
  for ( int i = 0; i < ts.num_states(); ++i )
    v[i] = ts.has_label( i, a ) ? 1 : 0;
  return v;
}

namespace detail
{

/// First structural difference between two systems after canonical ordering, if any.
inline std::optional<std::string> structural_difference( TransitionSystem const& a, TransitionSystem const& b )
{
  if ( a.states != b.states )
    return std::string( "state lists differ" );
  auto ta = a.transitions, tb = b.transitions;
  std::sort( ta.begin(), ta.end() );
  ta.erase( std::unique( ta.begin(), ta.end() ), ta.end() );
  std::sort( tb.begin(), tb.end() );
  tb.erase( std::unique( tb.begin(), tb.end() ), tb.end() );
  if ( ta != tb )
    return std::string( "transition relations differ" );
  for ( int i = 0; i < a.num_states(); ++i )
  {
    std::set<std::string> la( a.labels[i].begin(), a.labels[i].end() ), lb( b.labels[i].begin(), b.labels[i].end() );
    if ( la != lb )
      return "labels of state '" + a.states[i] + "' differ";
  }
  return std::nullopt;
}

} // namespace detail

inline bool identical_dynamics( MultiRobotInstance const& inst )
{
  for ( int r = 1; r < inst.n_robots(); ++r )
    if ( detail::structural_difference( inst.systems[0], inst.systems[r] ) )
      return false;
  return true;
}

inline AggregateSystem aggregate_view( MultiRobotInstance const& inst )
{
  for ( int r = 1; r < inst.n_robots(); ++r )
    if ( auto d = detail::structural_difference( inst.systems[0], inst.systems[r] ) )
      throw ModelError( "robots 0 and " + std::to_string( r ) + " do not share dynamics: " + *d );
  AggregateSystem agg;
  agg.shared = inst.systems.front();
  agg.n_robots = inst.n_robots();
  agg.w0.assign( agg.shared.states.size(), 0 );
  for ( int s : inst.initial_states )
    ++agg.w0.at( s );
  return agg;
}

/* ---------------------------------------------------------------------------------------------
 * grid generator
 * ------------------------------------------------------------------------------------------- */

/// Robot on a width x height grid: cell (x, y) has index y * width + x and may stay or
/// move to one of its four neighbours. Each region name becomes an atomic proposition.
inline TransitionSystem make_grid_system( int width, int height, std::map<std::string, std::vector<int>> const& regions,
                                          std::vector<std::string> ap = {} )
{
  if ( width < 1 || height < 1 )
    throw ModelError( "grid dimensions must be positive" );
  TransitionSystem ts;
  int const n = width * height;
  for ( int y = 0; y < height; ++y )
    for ( int x = 0; x < width; ++x )
      ts.states.push_back( "c" + std::to_string( x ) + "_" + std::to_string( y ) );
  for ( int y = 0; y < height; ++y )
    for ( int x = 0; x < width; ++x )
    {
      int const i = y * width + x;
      ts.transitions.emplace_back( i, i );
      if ( x > 0 )
        ts.transitions.emplace_back( i, i - 1 );
      if ( x + 1 < width )
        ts.transitions.emplace_back( i, i + 1 );
      if ( y > 0 )
        ts.transitions.emplace_back( i, i - width );
      if ( y + 1 < height )
        ts.transitions.emplace_back( i, i + width );
    }
  if ( ap.empty() )
    for ( auto const& [name, cells] : regions )
      ap.push_back( name );
  ts.ap = std::move( ap );
  ts.labels.assign( n, {} );
  for ( auto const& [name, cells] : regions )
  {
    if ( std::find( ts.ap.begin(), ts.ap.end(), name ) == ts.ap.end() )
      throw ModelError( "grid region '" + name + "' is not an atomic proposition" );
    for ( int c : cells )
    {
      if ( c < 0 || c >= n )
        throw ModelError( "grid region '" + name + "' has cell " + std::to_string( c ) + " off the grid" );
      ts.labels[c].push_back( name );
    }
  }
  return ts;
}

/* ---------------------------------------------------------------------------------------------
 * JSON model files
 * ------------------------------------------------------------------------------------------- */

namespace detail
{

using nlohmann::json;

inline json const& require( json const& j, char const* key, std::string const& where )
{
  if ( !j.is_object() || !j.contains( key ) )
    throw ModelError( where + ": missing key '" + key + "'" );
  return j.at( key );
}

inline std::vector<double> vec_of( json const& j, std::string const& what )
{
  if ( !j.is_array() )
    throw ModelError( what + " must be an array of numbers" );
  std::vector<double> v;
  for ( auto const& x : j )
  {
    if ( !x.is_number() )
      throw ModelError( what + " must be an array of numbers" );
    v.push_back( x.get<double>() );
  }
  return v;
}

inline std::vector<std::vector<double>> mat_of( json const& j, std::string const& what )
{
  if ( !j.is_array() )
    throw ModelError( what + " must be a nested array" );
  std::vector<std::vector<double>> m;
  for ( auto const& row : j )
    m.push_back( vec_of( row, what ) );
  return m;
}

inline int grid_cell( json const& c, int width, int height, std::string const& where )
{
  if ( c.is_number_integer() )
    return c.get<int>();
  if ( c.is_array() && c.size() == 2u && c[0].is_number_integer() && c[1].is_number_integer() )
  {
    int const x = c[0].get<int>(), y = c[1].get<int>();
    if ( x < 0 || x >= width || y < 0 || y >= height )
      throw ModelError( where + ": cell [" + std::to_string( x ) + ", " + std::to_string( y ) + "] off the grid" );
    return y * width + x;
  }
  throw ModelError( where + ": cells are indices or [x, y] pairs" );
}

inline GroupMap groups_of( json const& j )
{
  GroupMap groups;
  if ( !j.contains( "groups" ) )
    return groups;
  for ( auto const& [name, members] : j.at( "groups" ).items() )
  {
    if ( !members.is_array() )
      throw ModelError( "group '" + name + "' must be an array of robot indices" );
    for ( auto const& m : members )
    {
      if ( !m.is_number_integer() )
        throw ModelError( "group '" + name + "' must be an array of robot indices" );
      groups[name].push_back( m.get<int>() );
    }
  }
  return groups;
}

inline TransitionSystem robot_of( json const& r, std::vector<std::string> const& ap, std::string const& where, int& init )
{
  TransitionSystem ts;
  ts.ap = ap;
  for ( auto const& s : require( r, "states", where ) )
  {
    if ( !s.is_string() )
      throw ModelError( where + ": state names must be strings" );
    ts.states.push_back( s.get<std::string>() );
  }
  std::set<std::string> const unique_states( ts.states.begin(), ts.states.end() );
  if ( unique_states.size() != ts.states.size() )
    throw ModelError( where + ": duplicate state names" );
  auto index_of = [&]( json const& s ) {
    if ( s.is_number_integer() )
      return s.get<int>();
    if ( s.is_string() )
    {
      int const k = ts.state_index( s.get<std::string>() );
      if ( k < 0 )
        throw ModelError( where + ": unknown state '" + s.get<std::string>() + "'" );
      return k;
    }
    throw ModelError( where + ": state references are indices or names" );
  };
  for ( auto const& t : require( r, "transitions", where ) )
  {
    if ( !t.is_array() || t.size() != 2u )
      throw ModelError( where + ": transitions are [from, to] pairs" );
    int const i = index_of( t[0] ), j = index_of( t[1] );
    if ( i < 0 || i >= ts.num_states() || j < 0 || j >= ts.num_states() )
      throw ModelError( where + ": dangling transition (" + std::to_string( i ) + ", " + std::to_string( j ) + ")" );
    ts.transitions.emplace_back( i, j );
  }
  ts.labels.assign( ts.states.size(), {} );
  if ( r.contains( "labels" ) )
  {
    for ( auto const& [state, props] : r.at( "labels" ).items() )
    {
      int k = ts.state_index( state );
      if ( k < 0 && !state.empty() && std::all_of( state.begin(), state.end(), ::isdigit ) )
        k = std::stoi( state );
      if ( k < 0 || k >= ts.num_states() )
        throw ModelError( where + ": label on missing state '" + state + "'" );
      for ( auto const& a : props )
      {
        std::string const name = a.get<std::string>();
        if ( std::find( ap.begin(), ap.end(), name ) == ap.end() )
          throw ModelError( where + ": unknown label '" + name + "'" );
        ts.labels[k].push_back( name );
      }
    }
  }
  init = index_of( require( r, "init", where ) );
  if ( init < 0 || init >= ts.num_states() )
    throw ModelError( where + ": initial state out of range" );
  return ts;
}

inline ContinuousSystem continuous_of( json const& c, GroupMap groups )
{
  ContinuousSystem sys;
  sys.groups = std::move( groups );
  json state_box, input_box;
  if ( c.contains( "bounds" ) )
  {
    state_box = require( c.at( "bounds" ), "state", "continuous.bounds" );
    input_box = require( c.at( "bounds" ), "input", "continuous.bounds" );
  }
  else
  {
    state_box = require( c, "state_bounds", "continuous" );
    input_box = require( c, "input_bounds", "continuous" );
  }
  sys.state_lo = vec_of( require( state_box, "lo", "state bounds" ), "state bounds lo" );
  sys.state_hi = vec_of( require( state_box, "hi", "state bounds" ), "state bounds hi" );
  sys.input_lo = vec_of( require( input_box, "lo", "input bounds" ), "input bounds lo" );
  sys.input_hi = vec_of( require( input_box, "hi", "input bounds" ), "input bounds hi" );
  int k = 0;
  for ( auto const& r : require( c, "robots", "continuous" ) )
  {
    std::string const where = "continuous robot " + std::to_string( k++ );
    AffineRobot rb;
    rb.F = mat_of( require( r, "F", where ), where + ".F" );
    rb.G = mat_of( require( r, "G", where ), where + ".G" );
    rb.c = r.contains( "c" ) ? vec_of( r.at( "c" ), where + ".c" ) : std::vector<double>( rb.F.size(), 0.0 );
    rb.init = vec_of( require( r, "init", where ), where + ".init" );
    sys.robots.push_back( std::move( rb ) );
  }
  for ( auto const& [name, p] : require( c, "atoms", "continuous" ).items() )
  {
    Polytope poly;
    poly.H = mat_of( require( p, "H", "polytope " + name ), "polytope " + name + ".H" );
    poly.h = vec_of( require( p, "h", "polytope " + name ), "polytope " + name + ".h" );
    sys.atoms.emplace( name, std::move( poly ) );
  }
  if ( c.contains( "epsilon" ) )
    sys.epsilon = c.at( "epsilon" ).get<double>();
  if ( c.contains( "loop_big_m" ) )
    sys.loop_big_m = c.at( "loop_big_m" ).get<double>();
  return sys;
}

} // namespace detail

/// Builds a model from its JSON document; see README for the schema.
inline Model parse_model( nlohmann::json const& j )
{
  using detail::require;
  if ( !j.is_object() )
    throw ModelError( "model file must hold a JSON object" );
  try
  {
    GroupMap groups = detail::groups_of( j );
    if ( j.contains( "continuous" ) )
    {
      auto sys = detail::continuous_of( j.at( "continuous" ), std::move( groups ) );
      throw_if_invalid( validate( sys ) );
      return sys;
    }

    std::vector<std::string> ap;
    if ( j.contains( "ap" ) )
      for ( auto const& a : j.at( "ap" ) )
        ap.push_back( a.get<std::string>() );

    MultiRobotInstance inst;
    inst.groups = std::move( groups );
    if ( j.contains( "collision" ) )
      inst.collision = parse_collision_mode( j.at( "collision" ).get<std::string>() );

    if ( j.contains( "grid" ) )
    {
      auto const& g = j.at( "grid" );
      int const width = require( g, "width", "grid" ).get<int>();
      int const height = require( g, "height", "grid" ).get<int>();
      std::map<std::string, std::vector<int>> regions;
      if ( g.contains( "regions" ) )
        for ( auto const& [name, cells] : g.at( "regions" ).items() )
          for ( auto const& c : cells )
            regions[name].push_back( detail::grid_cell( c, width, height, "grid region '" + name + "'" ) );
      if ( ap.empty() )
        for ( auto const& [name, cells] : regions )
          ap.push_back( name );
      auto ts = make_grid_system( width, height, regions, ap );
      for ( auto const& c : require( g, "init", "grid" ) )
      {
        inst.systems.push_back( ts );
        inst.initial_states.push_back( detail::grid_cell( c, width, height, "grid init" ) );
      }
    }
    else
    {
      int k = 0;
      for ( auto const& r : require( j, "robots", "model" ) )
      {
        int init = 0;
        inst.systems.push_back( detail::robot_of( r, ap, "robot " + std::to_string( k++ ), init ) );
        inst.initial_states.push_back( init );
      }
    }
    throw_if_invalid( validate( inst ) );
    return inst;
  }
  catch ( nlohmann::json::exception const& e )
  {
    throw ModelError( std::string( "schema violation: " ) + e.what() );
  }
}

inline Model load_model( std::string const& path )
{
  std::ifstream in( path );
  if ( !in )
    throw ModelError( "cannot open model file '" + path + "'" );
  nlohmann::json j;
  try
  {
    in >> j;
  }
  catch ( nlohmann::json::exception const& e )
  {
    throw ModelError( "'" + path + "' is not valid JSON: " + e.what() );
  }
  return parse_model( j );
}

/// Serializes a discrete instance in the same schema `parse_model` reads.
inline nlohmann::json to_json( MultiRobotInstance const& inst )
{
  nlohmann::json j;
  j["ap"] = inst.ap();
  j["robots"] = nlohmann::json::array();
  for ( int r = 0; r < inst.n_robots(); ++r )
  {
    auto const& ts = inst.systems[r];
    nlohmann::json jr;
    jr["states"] = ts.states;
    jr["transitions"] = nlohmann::json::array();
    for ( auto [a, b] : ts.transitions )
      jr["transitions"].push_back( { a, b } );
    jr["labels"] = nlohmann::json::object();
    for ( int i = 0; i < ts.num_states(); ++i )
      if ( !ts.labels[i].empty() )
        jr["labels"][ts.states[i]] = ts.labels[i];
    jr["init"] = inst.initial_states[r];
    j["robots"].push_back( std::move( jr ) );
  }
  if ( !inst.groups.empty() )
    j["groups"] = inst.groups;
  j["collision"] = to_string( inst.collision );
  return j;
}

} // namespace cltl
