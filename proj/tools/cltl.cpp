// cltl: synthesize and check multirobot trajectories for counting temporal logic specs.
//
//   cltl synth    --model M --formula F --horizon H [--tau T] [--engine auto|cltlplus|cltl|continuous] ...
//   cltl simulate --model M --formula F --trajectory P [--tau T] [--max-T K] ...
//
// Exit codes: 0 feasible and verified, 1 infeasible (or unknown) within the horizon sweep,
// 2 a solution was found but the oracle rejected it, 3 usage errors, 4 input/output errors.

#include <cltl/cltl.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cltl;

namespace
{

enum Exit
{
  ok = 0,
  infeasible = 1,
  falsified = 2,
  usage = 3,
  io = 4,
};

struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

std::string read_text( std::string const& path )
{
  std::ifstream in( path );
  if ( !in )
    throw ModelError( "cannot open '" + path + "'" );
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text( std::string const& path, std::string const& text )
{
  if ( auto dir = fs::path( path ).parent_path(); !dir.empty() )
    fs::create_directories( dir );
  std::ofstream out( path, std::ios::binary );
  if ( !out )
    throw ModelError( "cannot write '" + path + "'" );
  out << text;
  if ( !out )
    throw ModelError( "write to '" + path + "' failed" );
}

/// The formula argument is a file when one exists under that name, otherwise formula text.
/// Lines starting with '#' are comments.
std::string formula_text( std::string const& arg )
{
  std::error_code ec;
  std::string raw = fs::is_regular_file( arg, ec ) ? read_text( arg ) : arg;
  std::stringstream in( raw );
  std::string out, line;
  while ( std::getline( in, line ) )
  {
    auto const first = line.find_first_not_of( " \t" );
    if ( first != std::string::npos && line[first] == '#' )
      continue;
    out += line + "\n";
  }
  return out;
}

GroupMap const& groups_of( Model const& m )
{
  return std::visit( []( auto const& x ) -> GroupMap const& { return x.groups; }, m );
}

/* ------------------------------------------------------------------------------------------- */

struct SynthArgs
{
  std::string model, formula, engine = "auto", solver = "bundled", solver_cmd, export_lp, output, stats, frames, collision;
  int horizon = 0, horizon_max = -1, tau = 0, threads = 1, max_T = -1;
  unsigned seed = 0;
  double time_limit = 0.0;
  long enumeration_cap = 200000;
};

struct SimArgs
{
  std::string model, formula, trajectory, frames;
  int tau = 0, max_T = -1;
  unsigned seed = 0;
  long enumeration_cap = 200000;
};

struct Attempt
{
  Solution solution;
  json trajectory;
  json check;                     ///< oracle report
  bool verified = false;
  std::vector<LassoTrajectory> pi; ///< discrete engines only
  std::vector<ContinuousTrajectory> cont;
};

json stats_json( IlpModel const& model )
{
  json tags = json::object();
  for ( auto const& [tag, c] : model.metadata() )
    tags[tag.empty() ? "untagged" : tag] = { { "variables", c.variables }, { "constraints", c.constraints } };
  return { { "variables", model.num_vars() }, { "constraints", model.num_constraints() }, { "tags", tags } };
}

json lasso_json( std::vector<LassoTrajectory> const& pi )
{
  json robots = json::array();
  for ( auto const& p : pi )
    robots.push_back( { { "states", p.states }, { "loop_start", p.loop_start } } );
  return robots;
}

std::vector<LassoTrajectory> lassos_from_json( json const& j )
{
  std::vector<LassoTrajectory> pi;
  for ( auto const& r : j.at( "robots" ) )
  {
    LassoTrajectory t;
    t.states = r.at( "states" ).get<std::vector<int>>();
    t.loop_start = r.at( "loop_start" ).get<int>();
    pi.push_back( std::move( t ) );
  }
  return pi;
}

std::vector<ContinuousTrajectory> continuous_from_json( json const& j )
{
  std::vector<ContinuousTrajectory> out;
  for ( auto const& r : j.at( "robots" ) )
  {
    ContinuousTrajectory t;
    t.states = r.at( "states" ).get<std::vector<std::vector<double>>>();
    if ( r.contains( "inputs" ) )
      t.inputs = r.at( "inputs" ).get<std::vector<std::vector<double>>>();
    t.loop_start = r.at( "loop_start" ).get<int>();
    out.push_back( std::move( t ) );
  }
  return out;
}

json verdict_json( Verdict const& v )
{
  json j = { { "status", to_string( v.status ) }, { "executions", v.executions }, { "exhaustive", v.exhaustive } };
  if ( v.falsified() && v.execution )
  {
    j["counterexample"] = { { "time", v.time }, { "increments", v.execution->increments } };
  }
  return j;
}

RobustBudget budget_for( int horizon, int max_T, long cap, unsigned seed )
{
  RobustBudget b;
  b.max_T = max_T >= 0 ? max_T : horizon + 2;
  b.enumeration_cap = cap;
  b.seed = seed;
  return b;
}

/// Satisfaction check of labeled lassos: synchronous evaluation for tau = 0, the bounded
/// falsification search otherwise.
json check_formula( std::vector<LabeledLasso> const& lassos, OuterFormula const& mu, int tau, RobustBudget const& budget,
                    bool& ok, std::optional<Verdict>* verdict_out = nullptr )
{
  int const N = static_cast<int>( lassos.size() );
  if ( tau == 0 )
  {
    ok = eval_outer( lassos, CollectiveExecution::synchronous( N ), 0, mu );
    return { { "mode", "synchronous" }, { "status", ok ? "satisfied" : "falsified" } };
  }
  auto v = check_robust( lassos, mu, tau, budget );
  ok = !v.falsified();
  json j = verdict_json( v );
  j["mode"] = "robust";
  j["tau"] = tau;
  j["max_T"] = budget.max_T;
  if ( verdict_out )
    *verdict_out = v;
  return j;
}

/* frames ------------------------------------------------------------------------------------ */

/// Occupancy per step as CSV: a width x height grid when states are grid cells "cX_Y",
/// otherwise one row of counts per state.
void emit_frames( std::string const& dir, TransitionSystem const& ts, std::vector<LassoTrajectory> const& pi, int steps )
{
  fs::create_directories( dir );
  static std::regex const cell( "c([0-9]+)_([0-9]+)" );
  int width = 0, height = 0;
  bool grid = true;
  std::vector<std::pair<int, int>> xy;
  for ( auto const& s : ts.states )
  {
    std::smatch m;
    if ( !std::regex_match( s, m, cell ) )
    {
      grid = false;
      break;
    }
    xy.emplace_back( std::stoi( m[1] ), std::stoi( m[2] ) );
    width = std::max( width, xy.back().first + 1 );
    height = std::max( height, xy.back().second + 1 );
  }
  for ( int t = 0; t <= steps; ++t )
  {
    std::vector<int> count( ts.num_states(), 0 );
    for ( auto const& p : pi )
    {
      int const h = p.horizon();
      int const pos = t <= h ? t : p.loop_start + ( t - p.loop_start ) % ( h - p.loop_start );
      ++count[p.states[pos]];
    }
    std::ostringstream out;
    if ( grid )
    {
      std::vector<std::vector<int>> g( height, std::vector<int>( width, 0 ) );
      for ( int i = 0; i < ts.num_states(); ++i )
        g[xy[i].second][xy[i].first] = count[i];
      for ( auto const& row : g )
        for ( int x = 0; x < width; ++x )
          out << row[x] << ( x + 1 < width ? "," : "\n" );
    }
    else
    {
      for ( int i = 0; i < ts.num_states(); ++i )
        out << ts.states[i] << ( i + 1 < ts.num_states() ? "," : "\n" );
      for ( int i = 0; i < ts.num_states(); ++i )
        out << count[i] << ( i + 1 < ts.num_states() ? "," : "\n" );
    }
    std::ostringstream name;
    name << "frame_" << std::setw( 4 ) << std::setfill( '0' ) << t << ".csv";
    write_text( ( fs::path( dir ) / name.str() ).string(), out.str() );
  }
}

void emit_continuous_frames( std::string const& dir, std::vector<ContinuousTrajectory> const& trs )
{
  std::ostringstream out;
  out << "robot,t";
  std::size_t const d = trs.empty() || trs.front().states.empty() ? 0 : trs.front().states.front().size();
  for ( std::size_t k = 0; k < d; ++k )
    out << ",w" << k;
  out << "\n";
  for ( std::size_t n = 0; n < trs.size(); ++n )
    for ( std::size_t t = 0; t < trs[n].states.size(); ++t )
    {
      out << n << "," << t;
      for ( double x : trs[n].states[t] )
        out << "," << x;
      out << "\n";
    }
  write_text( ( fs::path( dir ) / "states.csv" ).string(), out.str() );
}

/* synth ------------------------------------------------------------------------------------- */

std::string pick_engine( SynthArgs const& a, Model const& model, OuterFormula const& mu, std::optional<CollisionMode> collision )
{
  if ( std::holds_alternative<ContinuousSystem>( model ) )
  {
    if ( a.engine != "auto" && a.engine != "continuous" )
      throw UsageError( "engine '" + a.engine + "' needs a discrete model" );
    return "continuous";
  }
  auto const& inst = std::get<MultiRobotInstance>( model );
  if ( a.engine == "continuous" )
    throw UsageError( "engine 'continuous' needs a model with a continuous stanza" );
  bool const collisions = collision.value_or( inst.collision ) != CollisionMode::off;
  auto const report = check_fragment( resolve_groups( mu, inst.groups ) );
  bool const grouped = [&] {
    for ( auto const& p : counting_propositions( mu ) )
      if ( p.has_group() )
        return true;
    return false;
  }();
  bool const aggregate_ok = report.is_cltl && identical_dynamics( inst ) && a.tau == 0 && !collisions && !grouped;
  if ( a.engine == "cltl" )
  {
    if ( a.tau > 0 )
      throw UsageError( "the cltl engine has no robust encoding; use --engine cltlplus with --tau" );
    if ( collisions )
      throw UsageError( "the cltl engine cannot express collision constraints" );
    return "cltl";
  }
  if ( a.engine == "cltlplus" )
    return "cltlplus";
  if ( a.engine != "auto" )
    throw UsageError( "unknown engine '" + a.engine + "'" );
  return aggregate_ok ? "cltl" : "cltlplus";
}

int run_synth( SynthArgs const& a )
{
  Model model;
  OuterFormula mu;
  try
  {
    model = load_model( a.model );
    mu = parse_formula( formula_text( a.formula ), &groups_of( model ) );
  }
  catch ( ParseError const& e )
  {
    std::cerr << "formula: " << e.what() << "\n";
    return Exit::usage;
  }

  if ( a.horizon < 1 )
    throw UsageError( "--horizon must be at least 1" );
  if ( a.tau < 0 )
    throw UsageError( "--tau must be nonnegative" );
  int const h_max = a.horizon_max < 0 ? a.horizon : a.horizon_max;
  if ( h_max < a.horizon )
    throw UsageError( "--horizon-max must not be below --horizon" );

  std::optional<CollisionMode> collision;
  if ( !a.collision.empty() )
    collision = parse_collision_mode( a.collision );
  std::string const engine = pick_engine( a, model, mu, collision );

  std::string solver_cmd;
  if ( a.solver == "external" )
  {
    if ( !a.solver_cmd.empty() )
      solver_cmd = a.solver_cmd;
    else if ( auto cmd = default_external_command() )
      solver_cmd = *cmd;
    else
      throw UsageError( "--solver external needs --solver-cmd or CTL_SOLVER_CMD" );
  }
  else if ( a.solver != "bundled" )
    throw UsageError( "unknown solver '" + a.solver + "'" );

  SolverConfig cfg;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  cfg.time_budget = a.time_limit;
  fs::path const workdir = fs::temp_directory_path() / ( "cltl_" + std::to_string( ::getpid() ) );
  auto solve = [&]( IlpModel const& m ) {
    if ( solver_cmd.empty() )
      return solve_bnb( m, cfg );
    auto s = solve_external( m, solver_cmd, workdir.string() );
    std::error_code ec;
    fs::remove_all( workdir, ec );
    return s;
  };

  EncodeOptions eo;
  eo.tau = a.tau;
  eo.collision = collision;

  json stats;
  stats["engine"] = engine;
  stats["tau"] = a.tau;
  stats["solver"] = solver_cmd.empty() ? "bundled" : "external";
  stats["horizons"] = json::array();
  std::vector<std::string> warnings;
  std::optional<Attempt> found;
  int found_h = -1;
  std::string last_lp;

  for ( int h = a.horizon; h <= h_max && !found; ++h )
  {
    Attempt at;
    IlpModel const* m = nullptr;
    // keep the problem alive for extraction
    std::optional<Problem> pp;
    std::optional<AggregateProblem> ap;
    std::optional<ContinuousProblem> cp;
    if ( engine == "cltlplus" )
    {
      pp = build_robust_problem( std::get<MultiRobotInstance>( model ), mu, h, eo );
      m = &pp->model;
      warnings = pp->warnings;
    }
    else if ( engine == "cltl" )
    {
      ap = build_cltl_problem( std::get<MultiRobotInstance>( model ), mu, h );
      m = &ap->model;
      warnings = ap->warnings;
    }
    else
    {
      cp = build_cont_problem( std::get<ContinuousSystem>( model ), mu, h, eo );
      m = &cp->model;
      warnings = cp->warnings;
    }
    if ( !a.export_lp.empty() )
      last_lp = export_lp_string( *m );
    at.solution = solve( *m );
    json hs = stats_json( *m );
    hs["horizon"] = h;
    hs["status"] = to_string( at.solution.status );
    hs["nodes"] = at.solution.stats.nodes;
    stats["horizons"].push_back( hs );
    std::cerr << "h=" << h << ": " << to_string( at.solution.status ) << " (" << m->num_vars() << " variables, "
              << m->num_constraints() << " constraints)\n";
    if ( !at.solution.feasible() )
      continue;

    auto const budget = budget_for( h, a.max_T, a.enumeration_cap, a.seed );
    bool sat = false;
    if ( engine == "continuous" )
    {
      auto const& sys = std::get<ContinuousSystem>( model );
      at.cont = extract_continuous( cp->layout, sys, at.solution.values );
      std::vector<LabeledLasso> lassos;
      for ( auto const& tr : at.cont )
        lassos.push_back( labeled_lasso( sys, tr ) );
      at.check = check_formula( lassos, resolve_groups( mu, sys.groups ), a.tau, budget, sat );
      at.trajectory = { { "kind", "continuous" }, { "horizon", h }, { "robots", json::array() } };
      for ( auto const& tr : at.cont )
        at.trajectory["robots"].push_back( { { "inputs", tr.inputs }, { "states", tr.states }, { "loop_start", tr.loop_start } } );
      at.verified = sat;
    }
    else
    {
      auto const& inst = std::get<MultiRobotInstance>( model );
      at.pi = engine == "cltl" ? decompose_flows( ap->layout, ap->system, at.solution.values )
                               : extract_trajectories( pp->layout, at.solution );
      std::optional<std::string> bad;
      for ( int n = 0; n < inst.n_robots() && !bad; ++n )
        if ( auto e = check_lasso( inst.systems[n], at.pi[n], inst.initial_states[n] ) )
          bad = "robot " + std::to_string( n ) + ": " + *e;
      auto const mode = collision.value_or( inst.collision );
      if ( !bad )
        bad = check_collisions( at.pi, mode, a.tau );
      if ( bad )
        at.check = { { "status", "falsified" }, { "reason", *bad } };
      else
        at.check = check_formula( labeled_lassos( inst, at.pi ), resolve_groups( mu, inst.groups ), a.tau, budget, sat );
      at.check["collision"] = to_string( mode );
      at.trajectory = { { "kind", "discrete" }, { "horizon", h }, { "robots", lasso_json( at.pi ) } };
      at.verified = !bad && sat;
    }
    found = std::move( at );
    found_h = h;
  }

  for ( auto const& w : warnings )
    std::cerr << "warning: " << w << "\n";
  stats["warnings"] = warnings;
  if ( !a.export_lp.empty() )
    write_text( a.export_lp, last_lp );

  int code = Exit::infeasible;
  if ( found )
  {
    stats["horizon"] = found_h;
    stats["verification"] = found->check;
    if ( !a.output.empty() )
      write_text( a.output, found->trajectory.dump( 2 ) + "\n" );
    else
      std::cout << found->trajectory.dump( 2 ) << "\n";
    std::cerr << "verification: " << found->check.dump() << "\n";
    if ( !a.frames.empty() )
    {
      if ( engine == "continuous" )
        emit_continuous_frames( a.frames, found->cont );
      else
      {
        int steps = 0;
        for ( auto const& p : found->pi )
          steps = std::max( steps, p.horizon() + a.tau );
        emit_frames( a.frames, std::get<MultiRobotInstance>( model ).systems.front(), found->pi, steps );
      }
    }
    code = found->verified ? Exit::ok : Exit::falsified;
  }
  else
  {
    std::cerr << "no solution for horizons " << a.horizon << ".." << h_max << "\n";
  }
  stats["exit_code"] = code;
  if ( !a.stats.empty() )
    write_text( a.stats, stats.dump( 2 ) + "\n" );
  return code;
}

/* simulate ---------------------------------------------------------------------------------- */

void print_execution( CollectiveExecution const& k, long T )
{
  std::cout << "counterexample at global time " << T << " (anchor 0)\n";
  std::cout << "  T  counters\n";
  for ( long t = 0; t <= T; ++t )
  {
    auto c = k.counters( t );
    std::cout << std::setw( 3 ) << t << "  [";
    for ( std::size_t n = 0; n < c.size(); ++n )
      std::cout << ( n ? " " : "" ) << c[n];
    std::cout << "]\n";
  }
}

int run_simulate( SimArgs const& a )
{
  Model model;
  OuterFormula mu;
  try
  {
    model = load_model( a.model );
    mu = parse_formula( formula_text( a.formula ), &groups_of( model ) );
  }
  catch ( ParseError const& e )
  {
    std::cerr << "formula: " << e.what() << "\n";
    return Exit::usage;
  }
  if ( a.tau < 0 )
    throw UsageError( "--tau must be nonnegative" );
  if ( a.max_T == 0 || a.max_T < -1 || a.enumeration_cap < 1 )
    throw UsageError( "budgets must be positive" );
  json traj;
  try
  {
    traj = json::parse( read_text( a.trajectory ) );
  }
  catch ( json::exception const& e )
  {
    throw ModelError( "'" + a.trajectory + "' is not valid JSON: " + e.what() );
  }

  std::vector<LabeledLasso> lassos;
  std::vector<LassoTrajectory> pi;
  int horizon = 0;
  auto const& groups = groups_of( model );
  if ( auto const* sys = std::get_if<ContinuousSystem>( &model ) )
  {
    auto trs = continuous_from_json( traj );
    if ( static_cast<int>( trs.size() ) != sys->n_robots() )
      throw ModelError( "trajectory has " + std::to_string( trs.size() ) + " robots, model has " + std::to_string( sys->n_robots() ) );
    for ( auto const& tr : trs )
    {
      lassos.push_back( labeled_lasso( *sys, tr ) );
      horizon = std::max( horizon, lassos.back().length() );
    }
    if ( !a.frames.empty() )
      emit_continuous_frames( a.frames, trs );
  }
  else
  {
    auto const& inst = std::get<MultiRobotInstance>( model );
    pi = lassos_from_json( traj );
    if ( static_cast<int>( pi.size() ) != inst.n_robots() )
      throw ModelError( "trajectory has " + std::to_string( pi.size() ) + " robots, model has " + std::to_string( inst.n_robots() ) );
    for ( int n = 0; n < inst.n_robots(); ++n )
      if ( auto e = check_lasso( inst.systems[n], pi[n], inst.initial_states[n] ) )
        throw ModelError( "robot " + std::to_string( n ) + ": " + *e );
    lassos = labeled_lassos( inst, pi );
    for ( auto const& p : pi )
      horizon = std::max( horizon, p.horizon() );
    if ( !a.frames.empty() )
      emit_frames( a.frames, inst.systems.front(), pi, horizon + a.tau );
  }
  auto const resolved = resolve_groups( mu, groups );
  auto const budget = budget_for( horizon, a.max_T, a.enumeration_cap, a.seed );
  RobustBudget per_anchor = budget;

  std::cout << "formula: " << to_string( mu ) << "\n";
  std::cout << "robots: " << lassos.size() << ", tau: " << a.tau << ", max_T: " << budget.max_T
            << ", enumeration cap: " << budget.enumeration_cap << "\n";
  auto const v = check_robust( lassos, resolved, a.tau, budget );
  std::cout << "verdict: " << to_string( v.status ) << " (" << v.executions << " executions, "
            << ( v.exhaustive ? "exhaustive" : "sampled" ) << ")\n";
  if ( v.falsified() && v.execution )
    print_execution( *v.execution, v.time );

  // anchor t: synchronous truth at t, and the robust search restarted from a synchronized state at t
  std::cout << "\nanchor  synchronous  robust\n";
  int const N = static_cast<int>( lassos.size() );
  for ( int t = 0; t < horizon; ++t )
  {
    bool const sync = eval_outer( lassos, CollectiveExecution::synchronous( N ), t, resolved );
    std::vector<LabeledLasso> shifted;
    for ( auto const& l : lassos )
      shifted.push_back( suffix( l, t ) );
    auto const vt = check_robust( shifted, resolved, a.tau, per_anchor );
    std::cout << std::setw( 6 ) << t << "  " << std::setw( 11 ) << ( sync ? "true" : "false" ) << "  "
              << to_string( vt.status ) << "\n";
  }
  return v.falsified() ? Exit::falsified : Exit::ok;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "Counting temporal logic trajectory synthesis" };
  app.require_subcommand( 1 );

  SynthArgs s;
  auto* synth = app.add_subcommand( "synth", "synthesize trajectories" );
  synth->add_option( "--model", s.model, "model JSON file" )->required();
  synth->add_option( "--formula", s.formula, "formula file or formula text" )->required();
  synth->add_option( "--horizon", s.horizon, "horizon h (first of the sweep)" )->required();
  synth->add_option( "--horizon-max", s.horizon_max, "last horizon of the sweep" );
  synth->add_option( "--tau", s.tau, "asynchrony bound" );
  synth->add_option( "--engine", s.engine, "auto|cltlplus|cltl|continuous" );
  synth->add_option( "--solver", s.solver, "bundled|external" );
  synth->add_option( "--solver-cmd", s.solver_cmd, "external command with {lp} and {sol} placeholders" );
  synth->add_option( "--export-lp", s.export_lp, "write the last encoded model in LP format" );
  synth->add_option( "--seed", s.seed, "seed for the solver and sampled checks" );
  synth->add_option( "--threads", s.threads, "solver threads" );
  synth->add_option( "--collision", s.collision, "off|excl|swap (overrides the model)" );
  synth->add_option( "--output", s.output, "trajectory JSON (stdout when omitted)" );
  synth->add_option( "--stats", s.stats, "encoding and solve statistics JSON" );
  synth->add_option( "--emit-frames", s.frames, "directory for per-step occupancy CSV files" );
  synth->add_option( "--time-limit", s.time_limit, "bundled solver time budget in seconds per horizon" );
  synth->add_option( "--max-T", s.max_T, "robust check: explicit execution steps (default h + 2)" );
  synth->add_option( "--enumeration-cap", s.enumeration_cap, "robust check: executions before sampling" );

  SimArgs m;
  auto* sim = app.add_subcommand( "simulate", "check trajectories against a formula" );
  sim->add_option( "--model", m.model, "model JSON file" )->required();
  sim->add_option( "--formula", m.formula, "formula file or formula text" )->required();
  sim->add_option( "--trajectory", m.trajectory, "trajectory JSON written by synth" )->required();
  sim->add_option( "--tau", m.tau, "asynchrony bound" );
  sim->add_option( "--max-T", m.max_T, "explicit execution steps (default h + 2)" );
  sim->add_option( "--enumeration-cap", m.enumeration_cap, "executions before sampling" );
  sim->add_option( "--seed", m.seed, "seed for sampled executions" );
  sim->add_option( "--emit-frames", m.frames, "directory for per-step occupancy CSV files" );

  try
  {
    app.parse( argc, argv );
  }
  catch ( CLI::CallForHelp const& e )
  {
    return app.exit( e );
  }
  catch ( CLI::ParseError const& e )
  {
    app.exit( e );
    return Exit::usage;
  }

  try
  {
    if ( *synth )
      return run_synth( s );
    return run_simulate( m );
  }
  catch ( UsageError const& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::usage;
  }
  catch ( ParseError const& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::usage;
  }
  catch ( ModelError const& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::io;
  }
  catch ( std::exception const& e )
  {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::io;
  }
}
