#include "random_instances.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace cltl;

namespace
{

bool feasible( IlpModel model, std::vector<std::pair<VarId, double>> const& fixings, bool conflict_search = true )
{
  for ( auto [v, x] : fixings )
    model.fix( v, x );
  SolverConfig cfg;
  cfg.conflict_search = conflict_search;
  auto sol = solve_bnb( model, cfg );
  EXPECT_NE( sol.status, SolveStatus::unknown );
  return sol.feasible();
}

} // namespace

TEST( Variables, KindsAndBounds )
{
  IlpModel m;
  auto b = m.add_binary( "b" );
  auto i = m.add_integer( 0, 4, "i" );
  auto c = m.add_continuous( -1.5, 2.5, "c" );
  EXPECT_EQ( m.var( b ).kind, VarKind::binary );
  EXPECT_EQ( m.var( b ).lo, 0.0 );
  EXPECT_EQ( m.var( b ).hi, 1.0 );
  EXPECT_EQ( m.var( i ).hi, 4.0 );
  EXPECT_EQ( m.var( c ).lo, -1.5 );
  EXPECT_NE( b, i );
  EXPECT_THROW( m.add_continuous( 2.0, 1.0, "bad" ), EncodingError );
  EXPECT_THROW( m.add_integer( 0, std::numeric_limits<double>::infinity(), "unbounded" ), EncodingError );
}

TEST( Constraints, TagsAndCounts )
{
  IlpModel m;
  auto x = m.add_binary( "x", "collision" );
  auto y = m.add_binary( "y", "collision" );
  m.add_constraint( x + y, Sense::le, 1.0, "collision" );
  m.set_tag( "other" );
  m.add_ge( LinExpr( x ), LinExpr( 0.0 ) );
  EXPECT_EQ( m.count( "collision" ).constraints, 1 );
  EXPECT_EQ( m.count( "collision" ).variables, 2 );
  EXPECT_EQ( m.count( "other" ).constraints, 1 );
  int vars = 0, cons = 0;
  for ( auto const& [tag, c] : m.metadata() )
  {
    vars += c.variables;
    cons += c.constraints;
  }
  EXPECT_EQ( vars, m.num_vars() );
  EXPECT_EQ( cons, m.num_constraints() );
  EXPECT_THROW( m.add_constraint( LinExpr( VarId{ 42 } ), Sense::le, 1.0 ), EncodingError );
}

TEST( Constraints, ConstantInfeasibleRowIsStored )
{
  IlpModel m;
  m.add_binary( "x" );
  m.add_constraint( LinExpr(), Sense::le, -1.0 );
  EXPECT_EQ( m.num_constraints(), 1 );
  EXPECT_EQ( solve_bnb( m ).status, SolveStatus::infeasible );
  SolverConfig tree;
  tree.conflict_search = false;
  EXPECT_EQ( solve_bnb( m, tree ).status, SolveStatus::infeasible );
}

TEST( Gadgets, TruthTablesExhaustive )
{
  for ( auto kind : { GateKind::and_gate, GateKind::or_gate, GateKind::not_gate } )
    for ( int I = 1; I <= ( kind == GateKind::not_gate ? 1 : 4 ); ++I )
      for ( unsigned mask = 0; mask < ( 1u << I ); ++mask )
      {
        IlpModel m;
        std::vector<VarId> in;
        for ( int k = 0; k < I; ++k )
          in.push_back( m.add_binary( "x" + std::to_string( k ) ) );
        auto z = bool_gadget( m, kind, in );
        std::vector<std::pair<VarId, double>> fix;
        int ones = 0;
        for ( int k = 0; k < I; ++k )
        {
          fix.emplace_back( in[k], ( mask >> k ) & 1u );
          ones += ( mask >> k ) & 1u;
        }
        bool const expected = kind == GateKind::and_gate ? ones == I : kind == GateKind::or_gate ? ones > 0 : ones == 0;
        for ( bool cdcl : { true, false } )
        {
          auto with = fix;
          with.emplace_back( z, expected ? 1.0 : 0.0 );
          EXPECT_TRUE( feasible( m, with, cdcl ) );
          with.back().second = expected ? 0.0 : 1.0;
          EXPECT_FALSE( feasible( m, with, cdcl ) );
        }
      }
}

TEST( Gadgets, AndForcedZero )
{
  IlpModel m;
  auto a = m.add_binary( "a" ), b = m.add_binary( "b" ), c = m.add_binary( "c" );
  auto z = bool_gadget( m, GateKind::and_gate, { a, b, c } );
  m.fix( a, 1 );
  m.fix( b, 1 );
  m.fix( c, 0 );
  auto sol = solve_bnb( m );
  ASSERT_TRUE( sol.feasible() );
  EXPECT_EQ( sol.value( z ), 0.0 );
}

TEST( Gadgets, RejectsBadInputs )
{
  IlpModel m;
  auto a = m.add_binary( "a" ), b = m.add_binary( "b" );
  auto i = m.add_integer( 0, 3, "i" );
  EXPECT_THROW( bool_gadget( m, GateKind::and_gate, {} ), EncodingError );
  EXPECT_THROW( bool_gadget( m, GateKind::not_gate, { a, b } ), EncodingError );
  EXPECT_THROW( bool_gadget( m, GateKind::or_gate, { a, i } ), EncodingError );
}

TEST( Indicator, AllFixingsOfThreeInputs )
{
  for ( unsigned mask = 0; mask < 8u; ++mask )
  {
    IlpModel m;
    std::vector<VarId> z;
    LinExpr sum;
    for ( int k = 0; k < 3; ++k )
    {
      z.push_back( m.add_binary( "z" + std::to_string( k ) ) );
      sum.add( z.back(), 1.0 );
    }
    auto y = indicator_geq( m, sum, 2, 4 );
    std::vector<std::pair<VarId, double>> fix;
    int ones = 0;
    for ( int k = 0; k < 3; ++k )
    {
      fix.emplace_back( z[k], ( mask >> k ) & 1u );
      ones += ( mask >> k ) & 1u;
    }
    bool const expected = ones >= 2;
    auto with = fix;
    with.emplace_back( y, expected ? 1.0 : 0.0 );
    EXPECT_TRUE( feasible( m, with ) ) << mask;
    with.back().second = expected ? 0.0 : 1.0;
    EXPECT_FALSE( feasible( m, with ) ) << mask;
  }
}

TEST( Indicator, ThresholdExtremes )
{
  for ( int m_value : { 0, 4 } )
    for ( unsigned mask = 0; mask < 8u; ++mask )
    {
      IlpModel m;
      LinExpr sum;
      std::vector<std::pair<VarId, double>> fix;
      for ( int k = 0; k < 3; ++k )
      {
        auto v = m.add_binary( "z" + std::to_string( k ) );
        sum.add( v, 1.0 );
        fix.emplace_back( v, ( mask >> k ) & 1u );
      }
      auto y = indicator_geq( m, sum, m_value, 4 );
      auto with = fix;
      with.emplace_back( y, m_value == 0 ? 0.0 : 1.0 );
      EXPECT_FALSE( feasible( m, with ) ) << "m=" << m_value << " mask=" << mask;
    }
}

TEST( Indicator, RejectsSmallBigM )
{
  IlpModel m;
  LinExpr sum;
  for ( int k = 0; k < 3; ++k )
    sum.add( m.add_binary( "z" + std::to_string( k ) ), 1.0 );
  EXPECT_THROW( indicator_geq( m, sum, 2, 1 ), EncodingError );
  EXPECT_NO_THROW( indicator_geq( m, sum, 2, 4 ) );
}

TEST( LpExport, EmptyModel )
{
  IlpModel m;
  auto text = export_lp_string( m );
  EXPECT_NE( text.find( "Minimize" ), std::string::npos );
  EXPECT_NE( text.find( "obj: 0" ), std::string::npos );
  EXPECT_NE( text.find( "Subject To" ), std::string::npos );
  EXPECT_EQ( text.substr( text.size() - 4 ), "End\n" );
}

TEST( LpExport, SectionsAndSanitizedNames )
{
  IlpModel m;
  auto a = m.add_binary( "x.1" );
  auto b = m.add_binary( "x_1" );
  auto c = m.add_integer( 0, 5, "count[0]" );
  auto d = m.add_continuous( -2, 2, "e0" );
  m.add_constraint( a + b, Sense::le, 1.0 );
  m.add_constraint( LinExpr( c ) - LinExpr( d, 0.5 ), Sense::ge, 1.0 );
  auto names = lp_names( m );
  EXPECT_EQ( names[0], "x_1" );
  EXPECT_EQ( names[1], "x_1_2" );
  EXPECT_EQ( names[2], "count_0_" );
  EXPECT_EQ( names[3], "v_e0" );
  for ( auto const& n : names )
    for ( char ch : n )
      EXPECT_TRUE( std::isalnum( static_cast<unsigned char>( ch ) ) || ch == '_' ) << n;
  auto text = export_lp_string( m );
  for ( auto const* section : { "Subject To", "Bounds", "Binaries", "Generals", "End" } )
    EXPECT_NE( text.find( section ), std::string::npos ) << section;
  EXPECT_NE( text.find( " c0: 1 x_1 + 1 x_1_2 <= 1" ), std::string::npos ) << text;
  EXPECT_NE( text.find( " c1: 1 count_0_ - 0.5 v_e0 >= 1" ), std::string::npos ) << text;
}

TEST( LpExport, Deterministic )
{
  auto build = [] {
    gen::Rng rng( 1 );
    auto inst = gen::random_instance( rng, 2, 4, false );
    return build_sync_problem( inst, parse_formula( "G F [a, 1] & F [b | c, 2]" ), 4 );
  };
  auto p = build(), q = build();
  EXPECT_EQ( export_lp_string( p.model ), export_lp_string( q.model ) );
  EXPECT_EQ( export_lp_string( p.model ), export_lp_string( p.model ) );
}

TEST( ExternalSolver, RoundTrip )
{
  auto cmd = default_external_command();
  if ( !cmd )
    GTEST_SKIP() << "no external solver found";
  auto dir = ( std::filesystem::temp_directory_path() / "cltl_external_test" ).string();

  IlpModel m;
  auto x = m.add_binary( "x" ), y = m.add_binary( "y" );
  m.add_constraint( x + y, Sense::ge, 1.0 );
  m.add_constraint( LinExpr( x ), Sense::le, 0.0 );
  auto sol = solve_external( m, *cmd, dir );
  ASSERT_TRUE( sol.feasible() );
  EXPECT_EQ( sol.value( y ), 1.0 );

  IlpModel bad;
  auto u = bad.add_binary( "u" ), v = bad.add_binary( "v" );
  bad.add_constraint( u + v, Sense::ge, 1.0 );
  bad.add_constraint( u + v, Sense::le, 0.0 );
  EXPECT_EQ( solve_external( bad, *cmd, dir ).status, SolveStatus::infeasible );
}

TEST( ExternalSolver, SolutionFileParsing )
{
  IlpModel m;
  auto x = m.add_binary( "x" );
  auto y = m.add_integer( 0, 3, "y" );
  m.add_constraint( LinExpr( x ) + LinExpr( y ), Sense::ge, 2.0 );
  auto ok = parse_solution_file( m, "Optimal - objective value 0\n      0 x  1  0\n      1 y  1  0\n" );
  ASSERT_TRUE( ok.feasible() );
  EXPECT_EQ( ok.value( y ), 1.0 );
  auto plain = parse_solution_file( m, "x 0\ny 2\n" );
  EXPECT_EQ( plain.value( y ), 2.0 );
  EXPECT_EQ( parse_solution_file( m, "Infeasible - objective value 0\n" ).status, SolveStatus::infeasible );
  EXPECT_THROW( parse_solution_file( m, "x one\n" ), SolverError );
  EXPECT_THROW( parse_solution_file( m, "z 1\n" ), SolverError );
  EXPECT_THROW( parse_solution_file( m, "x 0\ny 0\n" ), SolverError ); // violates the row
  EXPECT_THROW( parse_solution_file( m, "" ), SolverError );
}
