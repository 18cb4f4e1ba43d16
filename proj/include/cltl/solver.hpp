#pragma once

#include "conflict.hpp"
#include "error.hpp"
#include "ilp.hpp"
#include "lp_relaxation.hpp"
#include "propagation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cltl
{

struct SolverConfig
{
  double time_budget = 0.0; ///< seconds; 0 means unlimited
  long node_budget = 0;     ///< 0 means unlimited
  unsigned seed = 0;
  int threads = 1;
  bool use_lp = true;
  /// Largest dense tableau (rows x columns) the LP relaxation may allocate.
  long max_tableau_entries = 40'000'000;
  /// Models with only 0/1 variables go to the clause-learning search instead of the LP tree.
  bool conflict_search = true;
};

namespace detail
{

class BranchAndBound
{
public:
  BranchAndBound( IlpModel const& model, SolverConfig const& cfg )
      : model_( model ), cfg_( cfg ), prop_( model ), start_( std::chrono::steady_clock::now() )
  {
  }

  Solution run()
  {
    Solution sol;
    for ( int j = 0; j < model_.num_vars(); ++j )
    {
      auto const& x = model_.var( j );
      if ( !std::isfinite( x.lo ) || !std::isfinite( x.hi ) )
        throw SolverError( "variable '" + x.name + "' is unbounded; the bundled solver needs finite bounds" );
    }
    try
    {
      if ( !prop_.propagate() )
        sol.status = SolveStatus::infeasible;
      else
      {
        if ( cfg_.conflict_search && ConflictSearch::applicable( model_ ) )
        {
          ConflictSearch search( model_, cfg_.time_budget, cfg_.node_budget );
          sol.status = search.run( sol.values, stats_ );
          if ( sol.status == SolveStatus::feasible && find_violation( model_, sol.values ) )
            throw SolverError( "internal error: conflict search returned a violating point" );
          if ( sol.status == SolveStatus::unknown )
            sol.message = "budget exhausted";
          sol.stats = stats_;
          return sol;
        }
        build_lp();
        sol.status = dfs( 0 ) ? SolveStatus::feasible : SolveStatus::infeasible;
        if ( sol.status == SolveStatus::feasible )
          sol.values = incumbent_;
      }
    }
    catch ( BudgetExhausted const& )
    {
      sol.status = SolveStatus::unknown;
      sol.message = "budget exhausted";
    }
    sol.stats = stats_;
    sol.stats.propagations = prop_.work();
    return sol;
  }

private:
  struct BudgetExhausted
  {
  };

  void check_budget()
  {
    if ( cfg_.node_budget > 0 && stats_.nodes > cfg_.node_budget )
      throw BudgetExhausted{};
    if ( cfg_.time_budget > 0 && ( stats_.nodes & 15 ) == 0 )
    {
      std::chrono::duration<double> const elapsed = std::chrono::steady_clock::now() - start_;
      if ( elapsed.count() > cfg_.time_budget )
        throw BudgetExhausted{};
    }
  }

  /// LP over the variables still free after root propagation and the rows that are not
  /// already implied by the bounds.
  void build_lp()
  {
    int const n = prop_.num_vars();
    col_of_.assign( n, -1 );
    if ( !cfg_.use_lp )
      return;
    std::vector<int> rows;
    for ( int i = 0; i < prop_.num_rows(); ++i )
      if ( !prop_.redundant( i ) )
        rows.push_back( i );
    for ( int i : rows )
      for ( auto [j, a] : prop_.row( i ) )
        if ( !prop_.fixed( j ) && col_of_[j] < 0 )
        {
          col_of_[j] = static_cast<int>( lp_vars_.size() );
          lp_vars_.push_back( j );
        }
    int const ncols = static_cast<int>( lp_vars_.size() );
    if ( ncols == 0 || static_cast<long>( ncols ) * static_cast<long>( rows.size() ) > cfg_.max_tableau_entries )
    {
      lp_vars_.clear();
      col_of_.assign( n, -1 );
      return;
    }
    std::vector<std::vector<std::pair<int, double>>> lp_rows;
    std::vector<double> row_lo, row_hi, lo, hi;
    for ( int i : rows )
    {
      std::vector<std::pair<int, double>> r;
      double constant = 0.0;
      for ( auto [j, a] : prop_.row( i ) )
      {
        if ( col_of_[j] >= 0 )
          r.emplace_back( col_of_[j], a );
        else
          constant += a * prop_.lo( j );
      }
      if ( r.empty() )
        continue;
      lp_rows.push_back( std::move( r ) );
      row_lo.push_back( prop_.row_lo( i ) - constant );
      row_hi.push_back( prop_.row_hi( i ) - constant );
    }
    for ( int j : lp_vars_ )
    {
      lo.push_back( prop_.lo( j ) );
      hi.push_back( prop_.hi( j ) );
    }
    lp_.load( ncols, lp_rows, lo, hi, row_lo, row_hi );
    lp_enabled_ = true;
  }

  void sync_lp_bounds()
  {
    for ( int c = 0; c < static_cast<int>( lp_vars_.size() ); ++c )
    {
      int const j = lp_vars_[c];
      if ( lp_.lower( c ) != prop_.lo( j ) || lp_.upper( c ) != prop_.hi( j ) )
        lp_.set_bounds( c, prop_.lo( j ), prop_.hi( j ) );
    }
  }

  /// Current point: LP values for LP columns, otherwise the lower bound.
  std::vector<double> current_point( bool with_lp ) const
  {
    std::vector<double> x( prop_.num_vars() );
    for ( int j = 0; j < prop_.num_vars(); ++j )
    {
      double v = prop_.lo( j );
      if ( with_lp && col_of_[j] >= 0 )
        v = std::clamp( lp_.value( col_of_[j] ), prop_.lo( j ), prop_.hi( j ) );
      x[j] = v;
    }
    return x;
  }

  bool try_accept( std::vector<double> x )
  {
    for ( int j = 0; j < prop_.num_vars(); ++j )
      if ( prop_.integral( j ) )
        x[j] = std::round( x[j] );
    if ( find_violation( model_, x ) )
      return false;
    incumbent_ = std::move( x );
    return true;
  }

  bool dfs( int depth )
  {
    ++stats_.nodes;
    stats_.max_depth = std::max( stats_.max_depth, depth );
    check_budget();
    if ( !prop_.propagate() )
      return false;

    int branch_var = -1;
    double branch_value = 0.0;
    bool lp_ok = false;
    if ( lp_enabled_ )
    {
      sync_lp_bounds();
      long const before = lp_.iterations();
      auto const res = lp_.solve( 5000 + 20L * ( lp_.num_rows() + lp_.num_structural() ) );
      stats_.lp_iterations += lp_.iterations() - before;
      if ( res == BoundedSimplex::Result::infeasible )
        return false;
      if ( res == BoundedSimplex::Result::feasible )
      {
        if ( lp_.residual() > 1e-6 )
        {
          lp_.reset_basis();
          sync_lp_bounds();
          auto const again = lp_.solve( 5000 + 20L * ( lp_.num_rows() + lp_.num_structural() ) );
          if ( again == BoundedSimplex::Result::infeasible )
            return false;
          lp_ok = again == BoundedSimplex::Result::feasible;
        }
        else
          lp_ok = true;
      }
    }

    // most fractional integral variable, ties by lowest index
    double best = -1.0;
    for ( int c = 0; lp_ok && c < static_cast<int>( lp_vars_.size() ); ++c )
    {
      int const j = lp_vars_[c];
      if ( !prop_.integral( j ) || prop_.fixed( j ) )
        continue;
      double const v = lp_.value( c );
      double const frac = v - std::floor( v );
      double const score = std::min( frac, 1.0 - frac );
      if ( score > 1e-6 && score > best + 1e-12 )
      {
        best = score;
        branch_var = j;
        branch_value = v;
      }
    }
    if ( branch_var < 0 )
    {
      // relaxation point is integral, or there is no usable relaxation
      if ( lp_ok && try_accept( current_point( true ) ) )
        return true;
      for ( int j = 0; j < prop_.num_vars(); ++j )
        if ( prop_.integral( j ) && !prop_.fixed( j ) )
        {
          branch_var = j;
          branch_value = ( lp_ok && col_of_[j] >= 0 ) ? lp_.value( col_of_[j] ) : prop_.lo( j );
          break;
        }
      if ( branch_var < 0 )
        return !lp_enabled_ && try_accept( current_point( false ) );
    }

    double const down = std::floor( branch_value + 1e-9 );
    double const up = down + 1.0;
    bool const up_first = branch_value - down >= 0.5;
    for ( int side = 0; side < 2; ++side )
    {
      bool const go_up = ( side == 0 ) == up_first;
      std::size_t const mark = prop_.mark();
      bool const ok = go_up ? prop_.tighten( branch_var, std::max( up, prop_.lo( branch_var ) ), prop_.hi( branch_var ) )
                            : prop_.tighten( branch_var, prop_.lo( branch_var ), std::min( down, prop_.hi( branch_var ) ) );
      if ( ok && dfs( depth + 1 ) )
        return true;
      prop_.undo( mark );
    }
    return false;
  }

  IlpModel const& model_;
  SolverConfig cfg_;
  Propagator prop_;
  std::chrono::steady_clock::time_point start_;
  SolveStats stats_;
  BoundedSimplex lp_;
  bool lp_enabled_ = false;
  std::vector<int> lp_vars_;
  std::vector<int> col_of_;
  std::vector<double> incumbent_;
};

} // namespace detail

/// Bundled branch-and-bound: bound propagation plus an LP relaxation at every node,
/// depth-first, branching on the most fractional integral variable (ties: lowest index),
/// nearest rounding first. Pure 0/1 models use conflict-driven search with clause learning
/// unless `conflict_search` is off. Deterministic for a given model and configuration.
inline Solution solve_bnb( IlpModel const& model, SolverConfig const& cfg = {} )
{
  detail::BranchAndBound bnb( model, cfg );
  return bnb.run();
}

/* ---------------------------------------------------------------------------------------------
 * external solvers
 * ------------------------------------------------------------------------------------------- */

/// Parses a solution file: an optional status header, then `name value` lines or CBC-style
/// `index name value reduced_cost` lines. Variables that do not appear are zero.
inline Solution parse_solution_file( IlpModel const& model, std::string const& text )
{
  auto const names = lp_names( model );
  std::unordered_map<std::string, int> index;
  for ( int j = 0; j < model.num_vars(); ++j )
    index.emplace( names[j], j );

  Solution sol;
  sol.values.assign( model.num_vars(), 0.0 );
  std::istringstream in( text );
  std::string line;
  bool header_seen = false, any_value = false;
  std::optional<SolveStatus> header_status;
  while ( std::getline( in, line ) )
  {
    std::istringstream ls( line );
    std::vector<std::string> tok;
    for ( std::string t; ls >> t; )
      tok.push_back( t );
    if ( tok.empty() )
      continue;
    if ( tok.front() == "**" )
      tok.erase( tok.begin() );
    else if ( tok.front().rfind( "**", 0 ) == 0 )
      tok.front() = tok.front().substr( 2 );
    if ( tok.empty() )
      continue;
    if ( !header_seen && !any_value )
    {
      std::string lower;
      for ( char c : line )
        lower += static_cast<char>( std::tolower( static_cast<unsigned char>( c ) ) );
      if ( lower.find( "infeasible" ) != std::string::npos || lower.find( "unbounded" ) != std::string::npos )
      {
        header_status = SolveStatus::infeasible;
        header_seen = true;
        continue;
      }
      if ( lower.find( "optimal" ) != std::string::npos || lower.find( "feasible" ) != std::string::npos )
      {
        header_status = SolveStatus::feasible;
        header_seen = true;
        continue;
      }
      if ( lower.find( "stopped" ) != std::string::npos || lower.find( "time" ) != std::string::npos )
      {
        header_status = SolveStatus::unknown;
        header_seen = true;
        continue;
      }
    }
    std::string name, value;
    if ( tok.size() >= 3 && std::all_of( tok[0].begin(), tok[0].end(), ::isdigit ) )
    {
      name = tok[1];
      value = tok[2];
    }
    else if ( tok.size() == 2 )
    {
      name = tok[0];
      value = tok[1];
    }
    else
      throw SolverError( "unparsable solution line: '" + line + "'" );
    auto it = index.find( name );
    if ( it == index.end() )
    {
      if ( name == "dummy_zero" )
        continue;
      throw SolverError( "solution names unknown variable '" + name + "'" );
    }
    char* end = nullptr;
    double const v = std::strtod( value.c_str(), &end );
    if ( end == value.c_str() || *end != '\0' )
      throw SolverError( "unparsable value '" + value + "' for variable '" + name + "'" );
    sol.values[it->second] = v;
    any_value = true;
  }
  if ( !header_seen && !any_value )
    throw SolverError( "empty solution file" );
  sol.status = header_status.value_or( SolveStatus::feasible );
  if ( sol.status != SolveStatus::feasible )
  {
    sol.values.clear();
    return sol;
  }
  for ( int j = 0; j < model.num_vars(); ++j )
    if ( model.var( j ).is_integral() && std::abs( sol.values[j] - std::round( sol.values[j] ) ) <= 1e-6 )
      sol.values[j] = std::round( sol.values[j] );
  if ( auto v = find_violation( model, sol.values ) )
    throw SolverError( "external solution rejected (format mismatch?): " + *v );
  return sol;
}

/// Exports the model, runs `solver_cmd` with `{lp}` and `{sol}` replaced by file paths, and
/// reads the solution back. Returned points are re-checked against every constraint.
inline Solution solve_external( IlpModel const& model, std::string const& solver_cmd, std::string const& workdir )
{
  namespace fs = std::filesystem;
  fs::create_directories( workdir );
  auto const lp = ( fs::path( workdir ) / "model.lp" ).string();
  auto const sol = ( fs::path( workdir ) / "model.sol" ).string();
  fs::remove( sol );
  export_lp( model, lp );
  std::string cmd = solver_cmd;
  auto replace_all = [&]( std::string const& key, std::string const& value ) {
    for ( std::size_t p = cmd.find( key ); p != std::string::npos; p = cmd.find( key, p + value.size() ) )
      cmd.replace( p, key.size(), value );
  };
  replace_all( "{lp}", lp );
  replace_all( "{sol}", sol );
  cmd += " > " + ( fs::path( workdir ) / "solver.log" ).string() + " 2>&1";
  int const rc = std::system( cmd.c_str() );
  if ( rc != 0 )
    throw SolverError( "external solver exited with status " + std::to_string( rc ) + ": " + cmd );
  std::ifstream in( sol );
  if ( !in )
    throw SolverError( "external solver wrote no solution file '" + sol + "'" );
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_solution_file( model, ss.str() );
}

/// Default command for the CBC binary, if one can be located: $CTL_SOLVER_CMD first, then
/// `cbc` on the PATH, then the copy bundled with the Python `pulp` package.
inline std::optional<std::string> default_external_command()
{
  if ( char const* env = std::getenv( "CTL_SOLVER_CMD" ); env && *env )
    return std::string( env );
  namespace fs = std::filesystem;
  std::vector<fs::path> candidates;
  if ( char const* path = std::getenv( "PATH" ) )
  {
    std::stringstream ss( path );
    for ( std::string dir; std::getline( ss, dir, ':' ); )
      candidates.push_back( fs::path( dir ) / "cbc" );
  }
  for ( char const* base : { "/usr/local/lib/python3.10/dist-packages", "/usr/lib/python3/dist-packages",
                             "/usr/local/lib/python3.11/dist-packages", "/usr/local/lib/python3.12/dist-packages" } )
    candidates.push_back( fs::path( base ) / "pulp/solverdir/cbc/linux/i64/cbc" );
  for ( auto const& c : candidates )
  {
    std::error_code ec;
    if ( fs::is_regular_file( c, ec ) && ( fs::status( c, ec ).permissions() & fs::perms::owner_exec ) != fs::perms::none )
      return "\"" + c.string() + "\" {lp} solve solu {sol}";
  }
  return std::nullopt;
}

/* ---------------------------------------------------------------------------------------------
 * horizon sweep
 * ------------------------------------------------------------------------------------------- */

template<class Problem>
struct HorizonResult
{
  int horizon;
  Problem problem;
  Solution solution;
};

/// Builds and solves the problem for h = h_min, h_min + step, ... and returns the first
/// feasible one. `build(h)` returns a problem, `solve(problem)` a `Solution`.
template<class Build, class Solve>
auto deepen_horizon( Build&& build, Solve&& solve, int h_min, int h_max, int step = 1 )
    -> std::optional<HorizonResult<std::decay_t<decltype( build( h_min ) )>>>
{
  if ( h_min > h_max )
    throw Error( "horizon sweep needs h_min <= h_max" );
  if ( step < 1 )
    throw Error( "horizon sweep needs a positive step" );
  for ( int h = h_min; h <= h_max; h += step )
  {
    auto problem = build( h );
    Solution sol = solve( problem );
    if ( sol.feasible() )
      return HorizonResult<std::decay_t<decltype( build( h_min ) )>>{ h, std::move( problem ), std::move( sol ) };
  }
  return std::nullopt;
}

} // namespace cltl
