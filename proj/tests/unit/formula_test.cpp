#include "random_instances.hpp"

#include <gtest/gtest.h>

using namespace cltl;
using F = OuterFormula;
using I = InnerFormula;

namespace
{

std::vector<LabeledLasso> all_lassos( std::vector<std::string> const& atoms, int max_length )
{
  std::vector<std::vector<std::string>> subsets;
  for ( unsigned m = 0; m < ( 1u << atoms.size() ); ++m )
  {
    std::vector<std::string> s;
    for ( std::size_t i = 0; i < atoms.size(); ++i )
      if ( m >> i & 1u )
        s.push_back( atoms[i] );
    subsets.push_back( s );
  }
  std::vector<LabeledLasso> out;
  for ( int len = 1; len <= max_length; ++len )
  {
    long total = 1;
    for ( int t = 0; t < len; ++t )
      total *= static_cast<long>( subsets.size() );
    for ( long code = 0; code < total; ++code )
    {
      LabeledLasso l;
      long c = code;
      for ( int t = 0; t < len; ++t )
      {
        l.labels.push_back( subsets[c % subsets.size()] );
        c /= static_cast<long>( subsets.size() );
      }
      for ( int loop = 0; loop < len; ++loop )
      {
        l.loop_start = loop;
        out.push_back( l );
      }
    }
  }
  return out;
}

} // namespace

TEST( Parse, CountingPropositionWithEventually )
{
  auto f = parse_formula( "[F a, 5]" );
  EXPECT_EQ( f, tcp( I::eventually( atom( "a" ) ), 5 ) );
}

TEST( Parse, TrueLiteral )
{
  EXPECT_EQ( parse_formula( "true" ), F::truth() );
  EXPECT_EQ( parse_formula( "false" ), F::falsity() );
}

TEST( Parse, BridgeClause )
{
  auto f = parse_formula( "G !([D,1]) & (!([B,1]) U ([B1,1] & [B2,1]))" );
  auto expected = F::conjunction( { F::always( F::negation( tcp( atom( "D" ), 1 ) ) ),
                                    F::until( F::negation( tcp( atom( "B" ), 1 ) ),
                                              F::conjunction( { tcp( atom( "B1" ), 1 ), tcp( atom( "B2" ), 1 ) } ) ) } );
  EXPECT_EQ( f, expected );
}

TEST( Parse, DerivedOperatorsKept )
{
  EXPECT_EQ( parse_formula( "F [a, 1]" ).kind(), FormulaKind::eventually );
  EXPECT_EQ( parse_formula( "G [a, 1]" ).kind(), FormulaKind::always );
  EXPECT_EQ( parse_formula( "[a, 1] R [b, 1]" ).kind(), FormulaKind::release );
  EXPECT_EQ( parse_formula( "[a, 1] | [b, 1]" ).kind(), FormulaKind::disjunction );
}

TEST( Parse, Precedence )
{
  auto a = tcp( atom( "a" ), 1 ), b = tcp( atom( "b" ), 1 ), c = tcp( atom( "c" ), 1 );
  EXPECT_EQ( parse_formula( "[a,1] U [b,1] | [c,1]" ), F::until( a, F::disjunction( { b, c } ) ) );
  EXPECT_EQ( parse_formula( "[a,1] | [b,1] & [c,1]" ), F::disjunction( { a, F::conjunction( { b, c } ) } ) );
  EXPECT_EQ( parse_formula( "!X [a,1] & [b,1]" ), F::conjunction( { F::negation( F::next( a ) ), b } ) );
  EXPECT_EQ( parse_formula( "[a U b | c, 2]" ),
             tcp( I::until( atom( "a" ), I::disjunction( { atom( "b" ), atom( "c" ) } ) ), 2 ) );
}

TEST( Parse, GroupReference )
{
  GroupMap groups{ { "team", { 0, 2 } } };
  auto f = parse_formula( "[a, @team, 1]", &groups );
  ASSERT_EQ( f.kind(), FormulaKind::leaf );
  EXPECT_EQ( f.payload().group_name, std::optional<std::string>( "team" ) );
  EXPECT_EQ( f.payload().count, 1 );
}

TEST( Parse, Errors )
{
  auto position = []( std::string const& text, GroupMap const* groups = nullptr ) {
    try
    {
      parse_formula( text, groups );
    }
    catch ( ParseError const& e )
    {
      return std::make_pair( e.line(), e.column() );
    }
    return std::make_pair( -1, -1 );
  };
  EXPECT_EQ( position( "[a, 1] $ [b, 1]" ), std::make_pair( 1, 8 ) );
  EXPECT_EQ( position( "G [a, 1] &\n  ([b, 1]" ).first, 2 );
  EXPECT_EQ( position( "[a, -1]" ), std::make_pair( 1, 5 ) );
  GroupMap groups{ { "team", { 0 } } };
  EXPECT_EQ( position( "[a, @crew, 1]", &groups ), std::make_pair( 1, 5 ) );
  EXPECT_EQ( position( "[a, 1]]" ).first, 1 );
  EXPECT_EQ( position( "" ).first, 1 );
}

TEST( Parse, PrintParseFixedPoint )
{
  gen::Rng rng( 11 );
  gen::FormulaOptions opt;
  opt.inner_depth = 2;
  for ( int i = 0; i < 300; ++i )
  {
    auto f = gen::random_outer( rng, 4, opt );
    auto g = parse_formula( to_string( f ) );
    EXPECT_EQ( g, f ) << to_string( f );
    EXPECT_EQ( to_string( g ), to_string( f ) );
  }
  GroupMap groups{ { "g0", { 0 } } };
  auto f = parse_formula( "[G a, @g0, 1] U !X [b, 2]", &groups );
  EXPECT_EQ( parse_formula( to_string( f ), &groups ), f );
}

TEST( Pnf, DualizesNegatedCount )
{
  auto f = to_pnf( F::negation( tcp( atom( "a" ), 3 ) ), 10 );
  EXPECT_EQ( f, tcp( I::negation( atom( "a" ) ), 8 ) );
  auto g = to_pnf( F::negation( tcp( I::eventually( atom( "a" ) ), 3 ) ), 10 );
  EXPECT_EQ( g, tcp( I::always( I::negation( atom( "a" ) ) ), 8 ) );
}

TEST( Pnf, DoubleNegation )
{
  auto mu = tcp( I::until( atom( "a" ), atom( "b" ) ), 2 );
  EXPECT_EQ( to_pnf( F::negation( F::negation( mu ) ), 3 ), mu );
}

TEST( Pnf, DeMorganAgreesWithOracle )
{
  auto f = parse_formula( "!([a,1] & [b,2])" );
  auto g = to_pnf( f, 2 );
  EXPECT_EQ( g, parse_formula( "[!a, 2] | [!b, 1]" ) );
  auto const lassos = all_lassos( { "a", "b" }, 3 );
  auto const k = CollectiveExecution::synchronous( 2 );
  long checked = 0;
  for ( auto const& x : lassos )
    for ( auto const& y : lassos )
    {
      std::vector<LabeledLasso> pi{ x, y };
      ASSERT_EQ( eval_outer( pi, k, 0, f ), eval_outer( pi, k, 0, g ) );
      ++checked;
    }
  EXPECT_EQ( checked, 228L * 228L );
}

TEST( Pnf, ClampsOutOfRangeThresholds )
{
  std::vector<std::string> warnings;
  auto f = to_pnf( F::negation( tcp( atom( "a" ), 5 ) ), 2, &warnings );
  ASSERT_EQ( f.kind(), FormulaKind::leaf );
  EXPECT_EQ( f.payload().count, 0 );
  EXPECT_FALSE( warnings.empty() );
  warnings.clear();
  auto g = to_pnf( F::negation( tcp( atom( "a" ), 0 ) ), 2, &warnings );
  EXPECT_EQ( g.payload().count, 3 );
}

TEST( Pnf, EquivalentUnderOracle )
{
  gen::Rng rng( 5 );
  for ( int i = 0; i < 400; ++i )
  {
    int const N = gen::uniform( rng, 1, 3 );
    gen::FormulaOptions opt;
    opt.n_robots = N;
    opt.inner_depth = gen::uniform( rng, 0, 2 );
    auto f = gen::random_outer( rng, gen::uniform( rng, 1, 4 ), opt );
    auto g = to_pnf( f, N );
    EXPECT_TRUE( check_fragment( g ).is_pnf ) << to_string( g );
    std::vector<LabeledLasso> pi;
    for ( int n = 0; n < N; ++n )
      pi.push_back( gen::random_lasso( rng, opt.atoms, 6 ) );
    for ( auto const& k : { CollectiveExecution::synchronous( N ), gen::random_execution( rng, N, 6, 2 ) } )
      for ( long T = 0; T < 3; ++T )
        ASSERT_EQ( eval_outer( pi, k, T, f ), eval_outer( pi, k, T, g ) ) << to_string( f ) << "  vs  " << to_string( g );
  }
}

TEST( Sugar, RobustEventually )
{
  auto f = expand_sugar( F::eventually( tcp( atom( "a" ), 4 ) ), 10, true );
  EXPECT_EQ( f, F::until( tcp( I::negation( atom( "a" ) ), 7 ), tcp( atom( "a" ), 4 ) ) );
}

TEST( Sugar, AlwaysAndEventually )
{
  auto mu = tcp( atom( "a" ), 1 );
  EXPECT_EQ( expand_sugar( F::always( mu ), 3, false ), F::release( F::falsity(), mu ) );
  EXPECT_EQ( expand_sugar( F::eventually( mu ), 3, false ), F::until( F::truth(), mu ) );
  auto inner = expand_sugar( F::leaf( tcp( I::eventually( atom( "a" ) ), 1 ).payload() ), 3, false );
  EXPECT_EQ( inner, tcp( I::until( I::truth(), atom( "a" ) ), 1 ) );
}

TEST( Sugar, EquivalentUnderOracle )
{
  gen::Rng rng( 9 );
  for ( int i = 0; i < 200; ++i )
  {
    gen::FormulaOptions opt;
    opt.n_robots = 2;
    auto f = gen::random_outer( rng, 3, opt );
    auto g = expand_sugar( f, 2, false );
    std::vector<LabeledLasso> pi{ gen::random_lasso( rng, opt.atoms, 5 ), gen::random_lasso( rng, opt.atoms, 5 ) };
    auto const k = CollectiveExecution::synchronous( 2 );
    ASSERT_EQ( eval_outer( pi, k, 0, f ), eval_outer( pi, k, 0, g ) ) << to_string( f );
  }
}

TEST( Fragment, Classification )
{
  EXPECT_TRUE( check_fragment( parse_formula( "G F [a, 2]" ) ).is_cltl );
  EXPECT_FALSE( check_fragment( parse_formula( "[G F a, 2]" ) ).is_cltl );
  EXPECT_FALSE( check_fragment( parse_formula( "[X a, 1]" ) ).inner_next_free );
  EXPECT_TRUE( check_fragment( parse_formula( "[F a, 1]" ) ).inner_next_free );
  EXPECT_FALSE( check_fragment( parse_formula( "![a, 1]" ) ).is_pnf );
  EXPECT_FALSE( check_fragment( parse_formula( "[!F a, 1]" ) ).is_pnf );
  EXPECT_TRUE( check_fragment( parse_formula( "[!a, 1] & [b, 2]" ) ).is_pnf );
}

TEST( Fragment, CompletenessGrammar )
{
  auto r = check_fragment( parse_formula( "[a, 1] & ([b, 1] U [c, 2]) & F [a, 2]" ) );
  EXPECT_TRUE( r.in_completeness_fragment );
  EXPECT_TRUE( r.mutually_exclusive_required );
  auto plain = check_fragment( parse_formula( "[a, 1] & [b, 2]" ) );
  EXPECT_TRUE( plain.in_completeness_fragment );
  EXPECT_FALSE( plain.mutually_exclusive_required );
  EXPECT_FALSE( check_fragment( parse_formula( "G [a, 1]" ) ).in_completeness_fragment );
  EXPECT_FALSE( check_fragment( parse_formula( "([a, 1] & [b, 1]) | [c, 1]" ) ).in_completeness_fragment );
}

TEST( Length, NodeCount )
{
  EXPECT_EQ( formula_length( F::truth() ), 1 );
  EXPECT_EQ( formula_length( parse_formula( "[a, 1]" ) ), 2 );
  EXPECT_EQ( formula_length( parse_formula( "G F [a, 3]" ) ), 4 );
  EXPECT_EQ( formula_length( parse_formula( "[a U b, 1]" ) ), 4 );
}
