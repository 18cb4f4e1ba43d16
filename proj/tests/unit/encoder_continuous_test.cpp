#include "random_instances.hpp"

#include <gtest/gtest.h>

using namespace cltl;

namespace
{

ContinuousSystem integrators( std::vector<double> inits, double u_max = 1.0 )
{
  ContinuousSystem sys;
  for ( double x : inits )
    sys.robots.push_back( AffineRobot{ { { 1.0 } }, { { 1.0 } }, { 0.0 }, { x } } );
  sys.state_lo = { -5.0 };
  sys.state_hi = { 5.0 };
  sys.input_lo = { -u_max };
  sys.input_hi = { u_max };
  sys.atoms["A"] = Polytope{ { { 1.0 }, { -1.0 } }, { 1.1, -0.9 } };
  return sys;
}

// w(t+1) = -w(t) + u with |u| <= 0.05: a robot starting at 1 is in A at even steps only.
ContinuousSystem flippers()
{
  ContinuousSystem sys;
  for ( int n = 0; n < 2; ++n )
    sys.robots.push_back( AffineRobot{ { { -1.0 } }, { { 1.0 } }, { 0.0 }, { 1.0 } } );
  sys.state_lo = { -5.0 };
  sys.state_hi = { 5.0 };
  sys.input_lo = { -0.05 };
  sys.input_hi = { 0.05 };
  sys.atoms["A"] = Polytope{ { { 1.0 }, { -1.0 } }, { 1.1, -0.9 } };
  return sys;
}

bool feasible( ContinuousProblem const& p ) { return solve_bnb( p.model ).feasible(); }

// Classifies a fixed point with the polytope gadget alone.
std::optional<bool> classify( ContinuousSystem const& sys, Polytope const& poly, std::vector<double> const& point )
{
  IlpModel m;
  std::vector<LinExpr> w;
  for ( double x : point )
    w.emplace_back( x );
  Bit const z = encode_polytope_ap( m, sys, poly, w, "z" );
  auto sol = solve_bnb( m );
  if ( !sol.feasible() )
    return std::nullopt;
  return z.evaluate( sol.values );
}

} // namespace

TEST( ContinuousDynamics, ZeroInputKeepsState )
{
  auto sys = integrators( { 0.5 }, 0.0 );
  auto p = build_cont_problem( sys, parse_formula( "true" ), 3 );
  auto sol = solve_bnb( p.model );
  ASSERT_TRUE( sol.feasible() );
  auto tr = extract_continuous( p.layout, sys, sol.values );
  for ( auto const& w : tr[0].states )
    EXPECT_DOUBLE_EQ( w[0], 0.5 );
}

TEST( ContinuousDynamics, ReachInTwoSteps )
{
  auto sys = integrators( { 0.0 } );
  sys.atoms["B"] = Polytope{ { { 1.0 }, { -1.0 } }, { 1.0, -1.0 } }; // w = 1
  auto p = build_cont_problem( sys, parse_formula( "F [B, 1]" ), 2 );
  auto sol = solve_bnb( p.model );
  ASSERT_TRUE( sol.feasible() );
  auto tr = extract_continuous( p.layout, sys, sol.values );
  EXPECT_TRUE( eval_outer( { labeled_lasso( sys, tr[0] ) }, CollectiveExecution::synchronous( 1 ), 0, p.formula ) );
  EXPECT_NEAR( tr[0].inputs[0][0], 1.0, 1e-6 );
  EXPECT_FALSE( feasible( build_cont_problem( integrators( { 0.0 }, 0.5 ), parse_formula( "F [A, 1]" ), 1 ) ) );
}

TEST( ContinuousDynamics, RejectsUnboundedBox )
{
  auto sys = integrators( { 0.0 } );
  sys.state_hi[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW( build_cont_problem( sys, parse_formula( "true" ), 2 ), ModelError );
}

TEST( ContinuousDynamics, WarnsOnSmallLoopBigM )
{
  auto sys = integrators( { 0.0 } );
  EXPECT_TRUE( build_cont_problem( sys, parse_formula( "true" ), 2 ).warnings.empty() );
  sys.loop_big_m = 1.0;
  EXPECT_EQ( build_cont_problem( sys, parse_formula( "true" ), 2 ).warnings.size(), 1u );
}

TEST( Polytope, InsideAndOutside )
{
  auto sys = integrators( { 0.0 } );
  auto const& A = sys.atoms.at( "A" );
  EXPECT_EQ( classify( sys, A, { 1.0 } ), std::optional<bool>( true ) );
  EXPECT_EQ( classify( sys, A, { 1.5 } ), std::optional<bool>( false ) );
  EXPECT_EQ( classify( sys, A, { -4.0 } ), std::optional<bool>( false ) );
}

TEST( Polytope, BoundaryBand )
{
  auto sys = integrators( { 0.0 } );
  sys.epsilon = 0.01;
  auto const& A = sys.atoms.at( "A" );
  EXPECT_EQ( classify( sys, A, { 1.1 } ), std::optional<bool>( true ) );
  EXPECT_EQ( classify( sys, A, { 1.105 } ), std::nullopt );
  EXPECT_EQ( classify( sys, A, { 1.11 } ), std::optional<bool>( false ) );
}

TEST( Polytope, SampledMembership )
{
  ContinuousSystem sys;
  sys.state_lo = { -5.0, -5.0 };
  sys.state_hi = { 5.0, 5.0 };
  // triangle x >= -1, y >= -1, x + y <= 2
  Polytope tri{ { { -1.0, 0.0 }, { 0.0, -1.0 }, { 1.0, 1.0 } }, { 1.0, 1.0, 2.0 } };
  gen::Rng rng( 2024 );
  std::uniform_real_distribution<double> coord( -5.0, 5.0 );
  int inside = 0, sampled = 0;
  while ( sampled < 1000 )
  {
    std::vector<double> w = { coord( rng ), coord( rng ) };
    double margin = std::numeric_limits<double>::infinity();
    for ( std::size_t r = 0; r < tri.H.size(); ++r )
      margin = std::min( margin, std::abs( tri.H[r][0] * w[0] + tri.H[r][1] * w[1] - tri.h[r] ) );
    if ( margin <= 10 * sys.epsilon )
      continue;
    ++sampled;
    bool const expected = tri.contains( w );
    inside += expected;
    EXPECT_EQ( classify( sys, tri, w ), std::optional<bool>( expected ) ) << w[0] << ", " << w[1];
  }
  EXPECT_GT( inside, 50 );
}

TEST( ContinuousProblem, TwoIntegratorsMeet )
{
  auto sys = std::get<ContinuousSystem>( load_model( gen::sample_path( "integrators.json" ) ) );
  auto p = build_cont_problem( sys, parse_formula( "F [A, 2]" ), 5 );
  auto sol = solve_bnb( p.model );
  ASSERT_TRUE( sol.feasible() );
  auto tr = extract_continuous( p.layout, sys, sol.values );
  bool met = false;
  for ( int t = 0; t <= 5; ++t )
    met = met || ( sys.atoms.at( "A" ).contains( tr[0].states[t], 1e-6 ) && sys.atoms.at( "A" ).contains( tr[1].states[t], 1e-6 ) );
  EXPECT_TRUE( met );
  EXPECT_FALSE( feasible( build_cont_problem( sys, parse_formula( "F [A, 3]" ), 5 ) ) );
}

TEST( ContinuousProblem, ReplayMatchesEncodedStates )
{
  auto sys = std::get<ContinuousSystem>( load_model( gen::sample_path( "integrators.json" ) ) );
  auto p = build_cont_problem( sys, parse_formula( "G F [A, 1] & F [A, 2]" ), 6 );
  auto sol = solve_bnb( p.model );
  ASSERT_TRUE( sol.feasible() );
  auto tr = extract_continuous( p.layout, sys, sol.values );
  for ( int n = 0; n < 2; ++n )
    for ( int t = 0; t <= 6; ++t )
      EXPECT_NEAR( tr[n].states[t][0], p.layout.states[n][t][0].evaluate( sol.values ), 1e-6 );
  EXPECT_NEAR( tr[0].states[6][0], tr[0].states[tr[0].loop_start][0], 1e-6 );
}

TEST( ContinuousProblem, InstantaneousMeetingIsNotRobust )
{
  auto sys = flippers();
  auto mu = parse_formula( "F [A, 2]" );
  EXPECT_TRUE( feasible( build_cont_problem( sys, mu, 4 ) ) );
  EncodeOptions robust;
  robust.tau = 1;
  EXPECT_FALSE( feasible( build_cont_problem( sys, mu, 4, robust ) ) );
  // with m = 1, all robots inside at the anchor is enough
  EXPECT_TRUE( feasible( build_cont_problem( sys, parse_formula( "F [A, 1]" ), 4, robust ) ) );
}
