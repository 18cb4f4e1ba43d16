#include "random_instances.hpp"

#include <gtest/gtest.h>

using namespace cltl;

namespace
{

Solution solve( IlpModel const& model )
{
  auto sol = solve_bnb( model );
  EXPECT_NE( sol.status, SolveStatus::unknown );
  return sol;
}

int state_at( std::vector<VarId> const& w, std::vector<double> const& values )
{
  for ( std::size_t i = 0; i < w.size(); ++i )
    if ( values[w[i].index] > 0.5 )
      return static_cast<int>( i );
  return -1;
}

RobustBudget exhaustive( int max_T )
{
  RobustBudget b;
  b.max_T = max_T;
  b.enumeration_cap = 1L << 40;
  return b;
}

// v0 carries a, v1 nothing; both robots start at v0 and leave it after one step.
MultiRobotInstance leave_together()
{
  return gen::make_instance( gen::make_ts( 2, { { 0, 1 }, { 1, 1 } }, { { "a" }, {} } ), { 0, 0 } );
}

// Robot 0 sees a at t = 0 only, robot 1 at t = 1 only.
MultiRobotInstance staggered()
{
  auto ts = gen::make_ts( 3, { { 0, 1 }, { 1, 1 }, { 2, 0 } }, { { "a" }, {}, {} } );
  return gen::make_instance( ts, { 0, 2 } );
}

} // namespace

TEST( ExtendStates, ModularWrap )
{
  // complete graph so every loop start is reachable
  std::vector<std::pair<int, int>> all;
  for ( int i = 0; i < 3; ++i )
    for ( int j = 0; j < 3; ++j )
      all.emplace_back( i, j );
  auto inst = gen::make_instance( gen::make_ts( 3, all ), { 0 } );
  int const h = 4, tau = 2;
  for ( int l = 0; l < h; ++l )
  {
    auto p = build_robust_problem( inst, parse_formula( "true" ), h, tau );
    p.model.fix( p.layout.z_loop[l].var(), 1.0 );
    // make the lasso non-constant where possible
    if ( l + 1 < h )
      p.model.fix( p.layout.W[0][l + 1][( l + 1 ) % 3], 1.0 );
    auto sol = solve( p.model );
    ASSERT_TRUE( sol.feasible() ) << l;
    ASSERT_EQ( static_cast<int>( p.layout.W[0].size() ), h + tau + 1 );
    for ( int k = 1; k <= tau; ++k )
      EXPECT_EQ( state_at( p.layout.W[0][h + k], sol.values ), state_at( p.layout.W[0][l + k % ( h - l )], sol.values ) )
          << "l=" << l << " k=" << k;
  }
}

TEST( ExtendStates, ShortLoops )
{
  auto inst = gen::make_instance( gen::make_ts( 2, { { 0, 1 }, { 1, 0 }, { 0, 0 } } ), { 0 } );
  int const h = 4;
  {
    auto p = build_robust_problem( inst, parse_formula( "true" ), h, 2 );
    p.model.fix( p.layout.z_loop[h - 1].var(), 1.0 );
    auto sol = solve( p.model );
    ASSERT_TRUE( sol.feasible() );
    int const s = state_at( p.layout.W[0][h - 1], sol.values );
    EXPECT_EQ( state_at( p.layout.W[0][h + 1], sol.values ), s );
    EXPECT_EQ( state_at( p.layout.W[0][h + 2], sol.values ), s );
  }
  {
    auto p = build_robust_problem( inst, parse_formula( "true" ), h, 2 );
    p.model.fix( p.layout.z_loop[h - 2].var(), 1.0 );
    auto sol = solve( p.model );
    ASSERT_TRUE( sol.feasible() );
    EXPECT_EQ( state_at( p.layout.W[0][h + 1], sol.values ), state_at( p.layout.W[0][h - 1], sol.values ) );
    EXPECT_EQ( state_at( p.layout.W[0][h + 2], sol.values ), state_at( p.layout.W[0][h - 2], sol.values ) );
  }
}

TEST( ExtendStates, ZeroTauIsNoOp )
{
  auto inst = gen::make_instance( gen::make_ts( 2, { { 0, 1 }, { 1, 0 } } ), { 0 } );
  IlpModel m;
  VariableLayout layout;
  encode_dynamics( m, layout, inst, 3 );
  encode_loop( m, layout );
  int const vars = m.num_vars(), cons = m.num_constraints();
  extend_states( m, layout, 0 );
  EXPECT_EQ( m.num_vars(), vars );
  EXPECT_EQ( m.num_constraints(), cons );
  EXPECT_EQ( layout.W[0].size(), 4u );
}

TEST( RobustInner, WindowedAnd )
{
  gen::Rng rng( 3 );
  gen::FormulaOptions opt;
  opt.next = false;
  int checked = 0;
  for ( int i = 0; i < 30; ++i )
  {
    int const N = gen::uniform( rng, 1, 3 ), tau = gen::uniform( rng, 1, 2 ), h = gen::uniform( rng, 2, 5 );
    auto inst = gen::random_instance( rng, N, gen::uniform( rng, 2, 4 ), false );
    opt.n_robots = N;
    auto p = build_robust_problem( inst, gen::random_fragment( rng, 2, opt ), h, tau );
    auto sol = solve( p.model );
    if ( !sol.feasible() )
      continue;
    for ( auto const& [k, r] : p.layout.R )
    {
      auto const& z = p.layout.inner( k );
      for ( int n = 0; n < N; ++n )
        for ( int t = 0; t < h; ++t )
        {
          bool all = true;
          for ( int d = 0; d <= tau; ++d )
            all = all && z[n][t + d].evaluate( sol.values );
          EXPECT_EQ( r[n][t].evaluate( sol.values ), all ) << k;
          ++checked;
        }
    }
  }
  EXPECT_GT( checked, 50 );
}

TEST( RobustInner, RejectsNext )
{
  auto inst = leave_together();
  EXPECT_THROW( build_robust_problem( inst, parse_formula( "[X a, 1]" ), 3, 1 ), EncodingError );
  EXPECT_NO_THROW( build_robust_problem( inst, parse_formula( "[X a, 1]" ), 3, 0 ) );
}

TEST( RobustTcp, AllRobotsAlways )
{
  auto inst = gen::make_instance( gen::make_ts( 1, { { 0, 0 } }, { { "a" } } ), { 0, 0 } );
  EXPECT_TRUE( solve( build_robust_problem( inst, parse_formula( "G [a, 2]" ), 2, 1 ).model ).feasible() );
}

TEST( RobustTcp, StaggeredSingleCountFails )
{
  auto inst = staggered();
  auto mu = parse_formula( "[a, 1]" );
  EXPECT_TRUE( solve( build_sync_problem( inst, mu, 3 ).model ).feasible() );
  EXPECT_FALSE( solve( build_robust_problem( inst, mu, 3, 1 ).model ).feasible() );
  // the only trajectories are falsified by the oracle as well
  std::vector<LassoTrajectory> pi = { { { 0, 1, 1, 1 }, 1 }, { { 2, 0, 1, 1 }, 2 } };
  EXPECT_TRUE( check_robust( inst, pi, mu, 1, exhaustive( 5 ) ).falsified() );
}

TEST( RobustTcp, AllRobotsAtAnchorSuffice )
{
  auto inst = leave_together();
  auto mu = parse_formula( "[a, 1]" );
  auto p = build_robust_problem( inst, mu, 3, 1 );
  auto sol = solve( p.model );
  ASSERT_TRUE( sol.feasible() );
  auto pi = extract_trajectories( p.layout, sol );
  EXPECT_FALSE( check_robust( inst, pi, mu, 1, exhaustive( 5 ) ).falsified() );
  // a proper group does not get the same shortcut
  inst.groups["g"] = { 0 };
  EXPECT_FALSE( solve( build_robust_problem( inst, parse_formula( "[a, @g, 1]" ), 3, 1 ).model ).feasible() );
}

TEST( RobustDisjunction, PooledCountOnExampleTraces )
{
  auto inst = std::get<MultiRobotInstance>( load_model( gen::sample_path( "phases.json" ) ) );
  auto mu = parse_formula( "[phi1, 2] | [phi2, 2]" );
  EncodeOptions opts;
  opts.tau = 1;
  for ( int h : { 2, 3 } )
  {
    auto p = build_robust_problem( inst, mu, h, opts );
    auto sol = solve( p.model );
    ASSERT_TRUE( sol.feasible() ) << h;
    EXPECT_FALSE( check_robust( inst, extract_trajectories( p.layout, sol ), mu, 1, exhaustive( h + 3 ) ).falsified() );
  }
  opts.pooled_disjunction = false;
  for ( int h : { 2, 3 } )
    EXPECT_FALSE( solve( build_robust_problem( inst, mu, h, opts ).model ).feasible() ) << h;
  for ( auto const* single : { "[phi1, 2]", "[phi2, 2]" } )
  {
    opts.pooled_disjunction = true;
    EXPECT_FALSE( solve( build_robust_problem( inst, parse_formula( single ), 3, opts ).model ).feasible() ) << single;
  }
}

TEST( RobustDisjunction, AllFalse )
{
  auto inst = gen::make_instance( gen::make_ts( 1, { { 0, 0 } } ), { 0, 0 } );
  EXPECT_FALSE( solve( build_robust_problem( inst, parse_formula( "[a, 1] | [b, 1]" ), 2, 1 ).model ).feasible() );
}

TEST( RobustUntil, GoalAtAnchorZero )
{
  auto inst = gen::make_instance( gen::make_ts( 1, { { 0, 0 } }, { { "a" } } ), { 0, 0 } );
  auto p = build_robust_problem( inst, parse_formula( "[c, 2] U [a, 2]" ), 2, 1 );
  EXPECT_TRUE( solve( p.model ).feasible() );
}

TEST( RobustRelease, GlobalGoalWithoutTrigger )
{
  auto inst = gen::make_instance( gen::make_ts( 2, { { 0, 1 }, { 1, 0 } }, { { "a" }, { "a" } } ), { 0, 1 } );
  auto mu = parse_formula( "[c, 1] R [a, 2]" );
  auto p = build_robust_problem( inst, mu, 2, 1 );
  auto sol = solve( p.model );
  ASSERT_TRUE( sol.feasible() );
  EXPECT_FALSE( check_robust( inst, extract_trajectories( p.layout, sol ), mu, 1, exhaustive( 6 ) ).falsified() );
}

TEST( Collapse, ZeroTauReturnsSyncModel )
{
  gen::Rng rng( 14 );
  gen::FormulaOptions opt;
  opt.next = false;
  for ( int i = 0; i < 10; ++i )
  {
    auto inst = gen::random_instance( rng, 2, 3, false );
    opt.n_robots = 2;
    auto mu = gen::random_fragment( rng, 2, opt );
    auto sync = build_sync_problem( inst, mu, 3 );
    auto robust = build_robust_problem( inst, mu, 3, 0 );
    EXPECT_EQ( export_lp_string( sync.model ), export_lp_string( robust.model ) );
  }
}

TEST( Collapse, UncollapsedZeroTauAgreesOnFeasibility )
{
  gen::Rng rng( 15 );
  gen::FormulaOptions opt;
  opt.next = false;
  for ( int i = 0; i < 20; ++i )
  {
    int const N = gen::uniform( rng, 1, 3 );
    auto inst = gen::random_instance( rng, N, gen::uniform( rng, 2, 4 ), false );
    opt.n_robots = N;
    auto mu = gen::random_fragment( rng, 2, opt );
    EncodeOptions opts;
    opts.collapse_at_zero_tau = false;
    int const h = gen::uniform( rng, 2, 4 );
    EXPECT_EQ( solve( build_sync_problem( inst, mu, h ).model ).feasible(),
               solve( build_robust_problem( inst, mu, h, opts ).model ).feasible() )
        << to_string( mu );
  }
}

TEST( Robust, SolutionsSurviveFalsification )
{
  gen::Rng rng( 27 );
  gen::FormulaOptions opt;
  opt.next = false;
  int checked = 0;
  for ( int i = 0; i < 30; ++i )
  {
    int const N = gen::uniform( rng, 1, 3 ), h = gen::uniform( rng, 2, 4 );
    auto inst = gen::random_instance( rng, N, gen::uniform( rng, 2, 4 ), false );
    opt.n_robots = N;
    auto mu = gen::random_fragment( rng, 2, opt );
    auto p = build_robust_problem( inst, mu, h, 1 );
    auto sol = solve( p.model );
    if ( !sol.feasible() )
      continue;
    ++checked;
    auto v = check_robust( inst, extract_trajectories( p.layout, sol ), p.formula, 1, exhaustive( h + 2 ) );
    EXPECT_FALSE( v.falsified() ) << to_string( mu );
  }
  EXPECT_GT( checked, 5 );
}
