#pragma once

#include "error.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cltl
{

enum class FormulaKind : std::uint8_t
{
  constant_true,
  constant_false,
  leaf,
  negation,
  conjunction,
  disjunction,
  next,
  until,
  release,
  eventually,
  always,
};

/// Immutable formula tree shared by the inner (per-robot) and outer (counting) layers.
///
/// A `Formula` is a cheap handle to a shared node; copies share structure and the tree
/// can be read concurrently. `Leaf` is the payload of the `leaf` kind: an atomic
/// proposition for the inner layer and a temporal counting proposition for the outer one.
template<class Leaf>
class Formula
{
public:
  Formula() = default;

  static Formula truth() { return Formula( FormulaKind::constant_true, Leaf{}, {} ); }
  static Formula falsity() { return Formula( FormulaKind::constant_false, Leaf{}, {} ); }
  static Formula leaf( Leaf payload ) { return Formula( FormulaKind::leaf, std::move( payload ), {} ); }
  static Formula negation( Formula f ) { return unary( FormulaKind::negation, std::move( f ) ); }
  static Formula next( Formula f ) { return unary( FormulaKind::next, std::move( f ) ); }
  static Formula eventually( Formula f ) { return unary( FormulaKind::eventually, std::move( f ) ); }
  static Formula always( Formula f ) { return unary( FormulaKind::always, std::move( f ) ); }

  static Formula conjunction( std::vector<Formula> fs ) { return nary( FormulaKind::conjunction, std::move( fs ) ); }
  static Formula disjunction( std::vector<Formula> fs ) { return nary( FormulaKind::disjunction, std::move( fs ) ); }

  static Formula until( Formula lhs, Formula rhs )
  {
    return Formula( FormulaKind::until, Leaf{}, { std::move( lhs ), std::move( rhs ) } );
  }

  static Formula release( Formula lhs, Formula rhs )
  {
    return Formula( FormulaKind::release, Leaf{}, { std::move( lhs ), std::move( rhs ) } );
  }

  bool is_null() const noexcept { return node_ == nullptr; }
  FormulaKind kind() const { return node_->kind; }
  Leaf const& payload() const { return node_->payload; }
  std::vector<Formula> const& children() const { return node_->children; }
  Formula const& child( std::size_t i = 0 ) const { return node_->children.at( i ); }
  Formula const& lhs() const { return child( 0 ); }
  Formula const& rhs() const { return child( 1 ); }

  bool is( FormulaKind k ) const { return node_ && node_->kind == k; }

  friend bool operator==( Formula const& a, Formula const& b )
  {
    if ( a.node_ == b.node_ )
      return true;
    if ( !a.node_ || !b.node_ )
      return false;
    return a.node_->kind == b.node_->kind && a.node_->payload == b.node_->payload &&
           a.node_->children == b.node_->children;
  }

private:
  struct Node
  {
    FormulaKind kind;
    Leaf payload;
    std::vector<Formula> children;
  };

  Formula( FormulaKind kind, Leaf payload, std::vector<Formula> children )
      : node_( std::make_shared<Node const>( Node{ kind, std::move( payload ), std::move( children ) } ) )
  {
  }

  static Formula unary( FormulaKind kind, Formula f )
  {
    std::vector<Formula> cs;
    cs.push_back( std::move( f ) );
    return Formula( kind, Leaf{}, std::move( cs ) );
  }

  static Formula nary( FormulaKind kind, std::vector<Formula> fs )
  {
    if ( fs.empty() )
      return kind == FormulaKind::conjunction ? truth() : falsity();
    if ( fs.size() == 1u )
      return std::move( fs.front() );
    return Formula( kind, Leaf{}, std::move( fs ) );
  }

  std::shared_ptr<Node const> node_;
};

struct Atom
{
  std::string name;
  friend bool operator==( Atom const&, Atom const& ) = default;
};

using InnerFormula = Formula<Atom>;

/// `[inner, m]` or `[inner, @group, m]`: true when at least `count` robots (of the group,
/// if any) satisfy `inner`.
struct TempCountProp
{
  InnerFormula inner;
  int count = 0;
  std::optional<std::string> group_name;
  std::vector<int> group; ///< resolved robot indices; empty means "all robots"

  bool has_group() const { return group_name.has_value() || !group.empty(); }

  /// Number of robots the proposition counts over.
  int domain_size( int n_robots ) const { return group.empty() ? n_robots : static_cast<int>( group.size() ); }

  friend bool operator==( TempCountProp const&, TempCountProp const& ) = default;
};

using OuterFormula = Formula<TempCountProp>;

inline InnerFormula atom( std::string name ) { return InnerFormula::leaf( Atom{ std::move( name ) } ); }

inline OuterFormula tcp( InnerFormula inner, int count )
{
  return OuterFormula::leaf( TempCountProp{ std::move( inner ), count, std::nullopt, {} } );
}

inline OuterFormula tcp( InnerFormula inner, std::string group_name, std::vector<int> group, int count )
{
  return OuterFormula::leaf( TempCountProp{ std::move( inner ), count, std::move( group_name ), std::move( group ) } );
}

/* ---------------------------------------------------------------------------------------------
 * printing
 * ------------------------------------------------------------------------------------------- */

namespace detail
{

inline std::string leaf_to_string( Atom const& a ) { return a.name; }

template<class Leaf>
std::string print_formula( Formula<Leaf> const& f );

inline std::string leaf_to_string( TempCountProp const& p )
{
  std::string out = "[" + print_formula( p.inner ) + ", ";
  if ( p.group_name )
  {
    out += "@" + *p.group_name + ", ";
  }
  else if ( !p.group.empty() )
  {
    std::string name = "S";
    for ( int r : p.group )
      name += "_" + std::to_string( r );
    out += "@" + name + ", ";
  }
  return out + std::to_string( p.count ) + "]";
}

template<class Leaf>
std::string print_formula( Formula<Leaf> const& f )
{
  if ( f.is_null() )
    return "<null>";
  auto join = [&]( std::string const& sep ) {
    std::string out = "(";
    for ( std::size_t i = 0; i < f.children().size(); ++i )
    {
      if ( i )
        out += sep;
      out += print_formula( f.children()[i] );
    }
    return out + ")";
  };
  switch ( f.kind() )
  {
  case FormulaKind::constant_true:
    return "true";
  case FormulaKind::constant_false:
    return "false";
  case FormulaKind::leaf:
    return leaf_to_string( f.payload() );
  case FormulaKind::negation:
    return "!" + print_formula( f.child() );
  case FormulaKind::next:
    return "X " + print_formula( f.child() );
  case FormulaKind::eventually:
    return "F " + print_formula( f.child() );
  case FormulaKind::always:
    return "G " + print_formula( f.child() );
  case FormulaKind::conjunction:
    return join( " & " );
  case FormulaKind::disjunction:
    return join( " | " );
  case FormulaKind::until:
    return "(" + print_formula( f.lhs() ) + " U " + print_formula( f.rhs() ) + ")";
  case FormulaKind::release:
    return "(" + print_formula( f.lhs() ) + " R " + print_formula( f.rhs() ) + ")";
  }
  return "?";
}

} // namespace detail

/// Concrete syntax accepted by `parse_formula`; binary operators are always parenthesized
/// so that printing and re-parsing reproduces the same tree.
inline std::string to_string( InnerFormula const& f ) { return detail::print_formula( f ); }
inline std::string to_string( OuterFormula const& f ) { return detail::print_formula( f ); }

/* ---------------------------------------------------------------------------------------------
 * parsing
 * ------------------------------------------------------------------------------------------- */

using GroupMap = std::map<std::string, std::vector<int>>;

namespace detail
{

enum class TokenType
{
  identifier,
  number,
  lparen,
  rparen,
  lbracket,
  rbracket,
  comma,
  at,
  bang,
  amp,
  bar,
  minus,
  end,
};

struct Token
{
  TokenType type;
  std::string text;
  int line;
  int column;
};

inline std::vector<Token> tokenize( std::string_view text )
{
  std::vector<Token> tokens;
  int line = 1, column = 1;
  std::size_t i = 0;
  auto advance = [&]( std::size_t n ) {
    for ( std::size_t k = 0; k < n; ++k, ++i )
    {
      if ( text[i] == '\n' )
      {
        ++line;
        column = 1;
      }
      else
      {
        ++column;
      }
    }
  };
  while ( i < text.size() )
  {
    char const c = text[i];
    if ( std::isspace( static_cast<unsigned char>( c ) ) )
    {
      advance( 1 );
      continue;
    }
    if ( c == '#' ) // comment until end of line
    {
      while ( i < text.size() && text[i] != '\n' )
        advance( 1 );
      continue;
    }
    int const tl = line, tc = column;
    if ( std::isalpha( static_cast<unsigned char>( c ) ) || c == '_' )
    {
      std::size_t j = i;
      while ( j < text.size() && ( std::isalnum( static_cast<unsigned char>( text[j] ) ) || text[j] == '_' ) )
        ++j;
      tokens.push_back( { TokenType::identifier, std::string( text.substr( i, j - i ) ), tl, tc } );
      advance( j - i );
      continue;
    }
    if ( std::isdigit( static_cast<unsigned char>( c ) ) )
    {
      std::size_t j = i;
      while ( j < text.size() && std::isdigit( static_cast<unsigned char>( text[j] ) ) )
        ++j;
      tokens.push_back( { TokenType::number, std::string( text.substr( i, j - i ) ), tl, tc } );
      advance( j - i );
      continue;
    }
    TokenType type;
    switch ( c )
    {
    case '(': type = TokenType::lparen; break;
    case ')': type = TokenType::rparen; break;
    case '[': type = TokenType::lbracket; break;
    case ']': type = TokenType::rbracket; break;
    case ',': type = TokenType::comma; break;
    case '@': type = TokenType::at; break;
    case '!': type = TokenType::bang; break;
    case '&': type = TokenType::amp; break;
    case '|': type = TokenType::bar; break;
    case '-': type = TokenType::minus; break;
    default:
      throw ParseError( std::string( "unexpected character '" ) + c + "'", tl, tc );
    }
    tokens.push_back( { type, std::string( 1, c ), tl, tc } );
    advance( 1 );
  }
  tokens.push_back( { TokenType::end, "", line, column } );
  return tokens;
}

class Parser
{
public:
  Parser( std::vector<Token> tokens, GroupMap const* groups ) : tokens_( std::move( tokens ) ), groups_( groups ) {}

  OuterFormula parse_outer_document()
  {
    auto f = expression<TempCountProp>();
    expect_end();
    return f;
  }

  InnerFormula parse_inner_document()
  {
    auto f = expression<Atom>();
    expect_end();
    return f;
  }

private:
  Token const& peek( std::size_t ahead = 0 ) const { return tokens_[std::min( pos_ + ahead, tokens_.size() - 1 )]; }
  Token const& take() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail( std::string const& msg, Token const& at ) const { throw ParseError( msg, at.line, at.column ); }

  void expect( TokenType type, char const* what )
  {
    if ( peek().type != type )
      fail( std::string( "expected " ) + what + describe( peek() ), peek() );
    take();
  }

  void expect_end()
  {
    if ( peek().type == TokenType::rparen || peek().type == TokenType::rbracket )
      fail( "unbalanced '" + peek().text + "'", peek() );
    if ( peek().type != TokenType::end )
      fail( "unexpected token" + describe( peek() ), peek() );
  }

  static std::string describe( Token const& t )
  {
    return t.type == TokenType::end ? " (found end of input)" : " (found '" + t.text + "')";
  }

  static bool is_word( Token const& t, char const* w ) { return t.type == TokenType::identifier && t.text == w; }
  static bool is_prefix_keyword( Token const& t ) { return is_word( t, "X" ) || is_word( t, "F" ) || is_word( t, "G" ); }

  /// Whether `t` can begin an operand; used to tell the operators X/F/G apart from atoms
  /// that happen to carry the same name.
  static bool starts_operand( Token const& t )
  {
    switch ( t.type )
    {
    case TokenType::identifier:
      return !is_word( t, "U" ) && !is_word( t, "R" );
    case TokenType::lparen:
    case TokenType::lbracket:
    case TokenType::bang:
    case TokenType::number:
    case TokenType::minus:
      return true;
    default:
      return false;
    }
  }

  template<class Leaf>
  Formula<Leaf> expression()
  {
    auto lhs = disjunction<Leaf>();
    if ( is_word( peek(), "U" ) || is_word( peek(), "R" ) )
    {
      bool const is_until = peek().text == "U";
      take();
      auto rhs = expression<Leaf>();
      return is_until ? Formula<Leaf>::until( std::move( lhs ), std::move( rhs ) )
                      : Formula<Leaf>::release( std::move( lhs ), std::move( rhs ) );
    }
    return lhs;
  }

  template<class Leaf>
  Formula<Leaf> disjunction()
  {
    std::vector<Formula<Leaf>> parts{ conjunction<Leaf>() };
    while ( peek().type == TokenType::bar )
    {
      take();
      parts.push_back( conjunction<Leaf>() );
    }
    return Formula<Leaf>::disjunction( std::move( parts ) );
  }

  template<class Leaf>
  Formula<Leaf> conjunction()
  {
    std::vector<Formula<Leaf>> parts{ unary<Leaf>() };
    while ( peek().type == TokenType::amp )
    {
      take();
      parts.push_back( unary<Leaf>() );
    }
    return Formula<Leaf>::conjunction( std::move( parts ) );
  }

  template<class Leaf>
  Formula<Leaf> unary()
  {
    Token const& t = peek();
    if ( t.type == TokenType::bang )
    {
      take();
      return Formula<Leaf>::negation( unary<Leaf>() );
    }
    if ( is_prefix_keyword( t ) && starts_operand( peek( 1 ) ) )
    {
      std::string const op = take().text;
      auto operand = unary<Leaf>();
      if ( op == "X" )
        return Formula<Leaf>::next( std::move( operand ) );
      if ( op == "F" )
        return Formula<Leaf>::eventually( std::move( operand ) );
      return Formula<Leaf>::always( std::move( operand ) );
    }
    return primary<Leaf>();
  }

  template<class Leaf>
  Formula<Leaf> primary()
  {
    Token const& t = peek();
    if ( t.type == TokenType::lparen )
    {
      take();
      auto f = expression<Leaf>();
      if ( peek().type != TokenType::rparen )
        fail( "unbalanced '(': expected ')'" + describe( peek() ), peek() );
      take();
      return f;
    }
    if ( is_word( t, "true" ) )
    {
      take();
      return Formula<Leaf>::truth();
    }
    if ( is_word( t, "false" ) )
    {
      take();
      return Formula<Leaf>::falsity();
    }
    return leaf( static_cast<Leaf const*>( nullptr ) );
  }

  InnerFormula leaf( Atom const* )
  {
    Token const& t = peek();
    if ( t.type != TokenType::identifier )
    {
      if ( t.type == TokenType::rparen || t.type == TokenType::rbracket )
        fail( "unbalanced '" + t.text + "'", t );
      fail( "expected an atomic proposition" + describe( t ), t );
    }
    return atom( take().text );
  }

  OuterFormula leaf( TempCountProp const* )
  {
    Token const& open = peek();
    if ( open.type != TokenType::lbracket )
    {
      if ( open.type == TokenType::identifier )
        fail( "atomic proposition '" + open.text + "' outside a counting proposition", open );
      if ( open.type == TokenType::rparen || open.type == TokenType::rbracket )
        fail( "unbalanced '" + open.text + "'", open );
      fail( "expected '[' or an operator" + describe( open ), open );
    }
    take();
    auto inner = expression<Atom>();
    expect( TokenType::comma, "','" );

    TempCountProp p;
    p.inner = std::move( inner );
    if ( peek().type == TokenType::at )
    {
      Token const at = take();
      if ( peek().type != TokenType::identifier )
        fail( "expected a group name after '@'", peek() );
      std::string name = take().text;
      if ( groups_ )
      {
        auto it = groups_->find( name );
        if ( it == groups_->end() )
          fail( "unknown group name '" + name + "'", at );
        p.group = it->second;
      }
      p.group_name = std::move( name );
      expect( TokenType::comma, "','" );
    }
    if ( peek().type == TokenType::minus )
      fail( "negative count", peek() );
    if ( peek().type != TokenType::number )
      fail( "expected a nonnegative count" + describe( peek() ), peek() );
    Token const num = take();
    if ( num.text.size() > 9 )
      fail( "count too large", num );
    p.count = std::stoi( num.text );
    if ( peek().type != TokenType::rbracket )
      fail( "unbalanced '[': expected ']'" + describe( peek() ), peek() );
    take();
    return OuterFormula::leaf( std::move( p ) );
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  GroupMap const* groups_;
};

} // namespace detail

/// Parses an outer (counting) formula. When `groups` is given, `@name` references are
/// resolved against it and unknown names are rejected.
inline OuterFormula parse_formula( std::string_view text, GroupMap const* groups = nullptr )
{
  return detail::Parser( detail::tokenize( text ), groups ).parse_outer_document();
}

inline InnerFormula parse_inner_formula( std::string_view text )
{
  return detail::Parser( detail::tokenize( text ), nullptr ).parse_inner_document();
}

/* ---------------------------------------------------------------------------------------------
 * traversal helpers
 * ------------------------------------------------------------------------------------------- */

/// Visits every node in pre-order.
template<class Leaf, class Fn>
void visit( Formula<Leaf> const& f, Fn&& fn )
{
  fn( f );
  for ( auto const& c : f.children() )
    visit( c, fn );
}

/// Rebuilds `f` bottom-up, replacing leaves with `leaf_fn(payload)`.
template<class Leaf, class LeafFn>
Formula<Leaf> map_leaves( Formula<Leaf> const& f, LeafFn&& leaf_fn )
{
  using F = Formula<Leaf>;
  switch ( f.kind() )
  {
  case FormulaKind::constant_true:
  case FormulaKind::constant_false:
    return f;
  case FormulaKind::leaf:
    return leaf_fn( f.payload() );
  case FormulaKind::negation:
    return F::negation( map_leaves( f.child(), leaf_fn ) );
  case FormulaKind::next:
    return F::next( map_leaves( f.child(), leaf_fn ) );
  case FormulaKind::eventually:
    return F::eventually( map_leaves( f.child(), leaf_fn ) );
  case FormulaKind::always:
    return F::always( map_leaves( f.child(), leaf_fn ) );
  case FormulaKind::until:
    return F::until( map_leaves( f.lhs(), leaf_fn ), map_leaves( f.rhs(), leaf_fn ) );
  case FormulaKind::release:
    return F::release( map_leaves( f.lhs(), leaf_fn ), map_leaves( f.rhs(), leaf_fn ) );
  case FormulaKind::conjunction:
  case FormulaKind::disjunction:
  {
    std::vector<F> cs;
    for ( auto const& c : f.children() )
      cs.push_back( map_leaves( c, leaf_fn ) );
    return f.kind() == FormulaKind::conjunction ? F::conjunction( std::move( cs ) ) : F::disjunction( std::move( cs ) );
  }
  }
  return f;
}

/// Collects the counting propositions of an outer formula in pre-order.
inline std::vector<TempCountProp> counting_propositions( OuterFormula const& f )
{
  std::vector<TempCountProp> out;
  visit( f, [&]( OuterFormula const& g ) {
    if ( g.kind() == FormulaKind::leaf )
      out.push_back( g.payload() );
  } );
  return out;
}

inline std::vector<std::string> atoms_of( InnerFormula const& f )
{
  std::vector<std::string> out;
  visit( f, [&]( InnerFormula const& g ) {
    if ( g.kind() == FormulaKind::leaf && std::find( out.begin(), out.end(), g.payload().name ) == out.end() )
      out.push_back( g.payload().name );
  } );
  return out;
}

/// Resolves `@name` references against an instance's group table.
inline OuterFormula resolve_groups( OuterFormula const& f, GroupMap const& groups )
{
  return map_leaves( f, [&]( TempCountProp const& p ) {
    TempCountProp q = p;
    if ( q.group_name && q.group.empty() )
    {
      auto it = groups.find( *q.group_name );
      if ( it == groups.end() )
        throw EncodingError( "unknown group name '" + *q.group_name + "'" );
      q.group = it->second;
    }
    return OuterFormula::leaf( std::move( q ) );
  } );
}

/* ---------------------------------------------------------------------------------------------
 * normal forms
 * ------------------------------------------------------------------------------------------- */

/// Negation normal form of an inner formula: negations only directly above atoms.
inline InnerFormula to_nnf( InnerFormula const& f, bool negate = false )
{
  using F = InnerFormula;
  auto all = [&]( bool neg ) {
    std::vector<F> cs;
    for ( auto const& c : f.children() )
      cs.push_back( to_nnf( c, neg ) );
    return cs;
  };
  switch ( f.kind() )
  {
  case FormulaKind::constant_true:
    return negate ? F::falsity() : F::truth();
  case FormulaKind::constant_false:
    return negate ? F::truth() : F::falsity();
  case FormulaKind::leaf:
    return negate ? F::negation( f ) : f;
  case FormulaKind::negation:
    return to_nnf( f.child(), !negate );
  case FormulaKind::conjunction:
    return negate ? F::disjunction( all( true ) ) : F::conjunction( all( false ) );
  case FormulaKind::disjunction:
    return negate ? F::conjunction( all( true ) ) : F::disjunction( all( false ) );
  case FormulaKind::next:
    return F::next( to_nnf( f.child(), negate ) );
  case FormulaKind::eventually:
    return negate ? F::always( to_nnf( f.child(), true ) ) : F::eventually( to_nnf( f.child(), false ) );
  case FormulaKind::always:
    return negate ? F::eventually( to_nnf( f.child(), true ) ) : F::always( to_nnf( f.child(), false ) );
  case FormulaKind::until:
    return negate ? F::release( to_nnf( f.lhs(), true ), to_nnf( f.rhs(), true ) )
                  : F::until( to_nnf( f.lhs(), false ), to_nnf( f.rhs(), false ) );
  case FormulaKind::release:
    return negate ? F::until( to_nnf( f.lhs(), true ), to_nnf( f.rhs(), true ) )
                  : F::release( to_nnf( f.lhs(), false ), to_nnf( f.rhs(), false ) );
  }
  return f;
}

namespace detail
{

inline int clamp_count( int count, int domain, std::vector<std::string>* warnings, TempCountProp const& p )
{
  if ( count < 0 || count > domain + 1 )
  {
    int const clamped = count < 0 ? 0 : domain + 1;
    if ( warnings )
      warnings->push_back( "count " + std::to_string( count ) + " of " + leaf_to_string( p ) +
                           " outside [0, " + std::to_string( domain + 1 ) + "], clamped to " +
                           std::to_string( clamped ) );
    return clamped;
  }
  return count;
}

inline OuterFormula pnf( OuterFormula const& f, bool negate, int n_robots, std::vector<std::string>* warnings )
{
  using F = OuterFormula;
  auto all = [&]( bool neg ) {
    std::vector<F> cs;
    for ( auto const& c : f.children() )
      cs.push_back( pnf( c, neg, n_robots, warnings ) );
    return cs;
  };
  switch ( f.kind() )
  {
  case FormulaKind::constant_true:
    return negate ? F::falsity() : F::truth();
  case FormulaKind::constant_false:
    return negate ? F::truth() : F::falsity();
  case FormulaKind::leaf:
  {
    TempCountProp p = f.payload();
    if ( negate )
    {
      int const domain = p.domain_size( n_robots );
      p.inner = to_nnf( p.inner, true );
      p.count = clamp_count( domain + 1 - p.count, domain, warnings, f.payload() );
    }
    else
    {
      p.inner = to_nnf( p.inner, false );
    }
    return F::leaf( std::move( p ) );
  }
  case FormulaKind::negation:
    return pnf( f.child(), !negate, n_robots, warnings );
  case FormulaKind::conjunction:
    return negate ? F::disjunction( all( true ) ) : F::conjunction( all( false ) );
  case FormulaKind::disjunction:
    return negate ? F::conjunction( all( true ) ) : F::disjunction( all( false ) );
  case FormulaKind::next:
    return F::next( pnf( f.child(), negate, n_robots, warnings ) );
  case FormulaKind::eventually:
    return negate ? F::always( pnf( f.child(), true, n_robots, warnings ) )
                  : F::eventually( pnf( f.child(), false, n_robots, warnings ) );
  case FormulaKind::always:
    return negate ? F::eventually( pnf( f.child(), true, n_robots, warnings ) )
                  : F::always( pnf( f.child(), false, n_robots, warnings ) );
  case FormulaKind::until:
    return negate ? F::release( pnf( f.lhs(), true, n_robots, warnings ), pnf( f.rhs(), true, n_robots, warnings ) )
                  : F::until( pnf( f.lhs(), false, n_robots, warnings ), pnf( f.rhs(), false, n_robots, warnings ) );
  case FormulaKind::release:
    return negate ? F::until( pnf( f.lhs(), true, n_robots, warnings ), pnf( f.rhs(), true, n_robots, warnings ) )
                  : F::release( pnf( f.lhs(), false, n_robots, warnings ), pnf( f.rhs(), false, n_robots, warnings ) );
  }
  return f;
}

} // namespace detail

/// Positive normal form: outer negations are pushed to the counting propositions and
/// absorbed there as `![phi, m] -> [!phi, N+1-m]` (N = group size for grouped
/// propositions); inner formulas end up in negation normal form. Thresholds that fall
/// outside [0, N+1] are clamped and reported in `warnings`.
inline OuterFormula to_pnf( OuterFormula const& f, int n_robots, std::vector<std::string>* warnings = nullptr )
{
  if ( n_robots < 1 )
    throw EncodingError( "to_pnf needs at least one robot" );
  return detail::pnf( f, false, n_robots, warnings );
}

/// Rewrites F/G (both layers) into U/R. With `robust`, an outer `F [phi, m]` becomes
/// `[!phi, N-m+1] U [phi, m]` instead of `true U [phi, m]`.
inline InnerFormula expand_sugar( InnerFormula const& f )
{
  using F = InnerFormula;
  switch ( f.kind() )
  {
  case FormulaKind::constant_true:
  case FormulaKind::constant_false:
  case FormulaKind::leaf:
    return f;
  case FormulaKind::negation:
    return F::negation( expand_sugar( f.child() ) );
  case FormulaKind::next:
    return F::next( expand_sugar( f.child() ) );
  case FormulaKind::eventually:
    return F::until( F::truth(), expand_sugar( f.child() ) );
  case FormulaKind::always:
    return F::release( F::falsity(), expand_sugar( f.child() ) );
  case FormulaKind::until:
    return F::until( expand_sugar( f.lhs() ), expand_sugar( f.rhs() ) );
  case FormulaKind::release:
    return F::release( expand_sugar( f.lhs() ), expand_sugar( f.rhs() ) );
  case FormulaKind::conjunction:
  case FormulaKind::disjunction:
  {
    std::vector<F> cs;
    for ( auto const& c : f.children() )
      cs.push_back( expand_sugar( c ) );
    return f.kind() == FormulaKind::conjunction ? F::conjunction( std::move( cs ) ) : F::disjunction( std::move( cs ) );
  }
  }
  return f;
}

inline OuterFormula expand_sugar( OuterFormula const& f, int n_robots, bool robust )
{
  using F = OuterFormula;
  switch ( f.kind() )
  {
  case FormulaKind::constant_true:
  case FormulaKind::constant_false:
    return f;
  case FormulaKind::leaf:
  {
    TempCountProp p = f.payload();
    p.inner = expand_sugar( p.inner );
    return F::leaf( std::move( p ) );
  }
  case FormulaKind::negation:
    return F::negation( expand_sugar( f.child(), n_robots, robust ) );
  case FormulaKind::next:
    return F::next( expand_sugar( f.child(), n_robots, robust ) );
  case FormulaKind::eventually:
  {
    auto body = expand_sugar( f.child(), n_robots, robust );
    if ( robust && body.kind() == FormulaKind::leaf )
    {
      TempCountProp guard = body.payload();
      int const domain = guard.domain_size( n_robots );
      guard.inner = to_nnf( guard.inner, true );
      guard.count = std::max( 0, domain - body.payload().count + 1 );
      return F::until( F::leaf( std::move( guard ) ), std::move( body ) );
    }
    return F::until( F::truth(), std::move( body ) );
  }
  case FormulaKind::always:
    return F::release( F::falsity(), expand_sugar( f.child(), n_robots, robust ) );
  case FormulaKind::until:
    return F::until( expand_sugar( f.lhs(), n_robots, robust ), expand_sugar( f.rhs(), n_robots, robust ) );
  case FormulaKind::release:
    return F::release( expand_sugar( f.lhs(), n_robots, robust ), expand_sugar( f.rhs(), n_robots, robust ) );
  case FormulaKind::conjunction:
  case FormulaKind::disjunction:
  {
    std::vector<F> cs;
    for ( auto const& c : f.children() )
      cs.push_back( expand_sugar( c, n_robots, robust ) );
    return f.kind() == FormulaKind::conjunction ? F::conjunction( std::move( cs ) ) : F::disjunction( std::move( cs ) );
  }
  }
  return f;
}

/* ---------------------------------------------------------------------------------------------
 * classification
 * ------------------------------------------------------------------------------------------- */

struct FragmentReport
{
  bool is_cltl = true;         ///< every counting proposition counts a bare atom
  bool inner_next_free = true; ///< no X inside any counting proposition
  bool outer_next_free = true;
  bool is_pnf = true;          ///< no outer negation, inner negation only on atoms
  bool in_completeness_fragment = true;
  bool mutually_exclusive_required = false;
};

namespace detail
{

inline bool inner_is_nnf( InnerFormula const& f )
{
  if ( f.kind() == FormulaKind::negation )
    return f.child().kind() == FormulaKind::leaf;
  for ( auto const& c : f.children() )
    if ( !inner_is_nnf( c ) )
      return false;
  return true;
}

/// Grammar: mu ::= true | tcp | mu & mu | tcp | tcp | tcp U tcp | F tcp | X mu
inline bool in_completeness_grammar( OuterFormula const& f, bool& uses_choice )
{
  auto is_tcp = []( OuterFormula const& g ) { return g.kind() == FormulaKind::leaf; };
  switch ( f.kind() )
  {
  case FormulaKind::constant_true:
  case FormulaKind::leaf:
    return true;
  case FormulaKind::conjunction:
    for ( auto const& c : f.children() )
      if ( !in_completeness_grammar( c, uses_choice ) )
        return false;
    return true;
  case FormulaKind::disjunction:
    uses_choice = true;
    return f.children().size() == 2u && is_tcp( f.lhs() ) && is_tcp( f.rhs() );
  case FormulaKind::until:
    uses_choice = true;
    return is_tcp( f.lhs() ) && is_tcp( f.rhs() );
  case FormulaKind::eventually:
    uses_choice = true;
    return is_tcp( f.child() );
  case FormulaKind::next:
    return in_completeness_grammar( f.child(), uses_choice );
  default:
    return false;
  }
}

} // namespace detail

inline FragmentReport check_fragment( OuterFormula const& f )
{
  FragmentReport r;
  visit( f, [&]( OuterFormula const& g ) {
    switch ( g.kind() )
    {
    case FormulaKind::negation:
      r.is_pnf = false;
      break;
    case FormulaKind::next:
      r.outer_next_free = false;
      break;
    case FormulaKind::leaf:
    {
      auto const& inner = g.payload().inner;
      if ( inner.kind() != FormulaKind::leaf )
        r.is_cltl = false;
      if ( !detail::inner_is_nnf( inner ) )
        r.is_pnf = false;
      visit( inner, [&]( InnerFormula const& h ) {
        if ( h.kind() == FormulaKind::next )
          r.inner_next_free = false;
      } );
      break;
    }
    default:
      break;
    }
  } );
  bool uses_choice = false;
  r.in_completeness_fragment = detail::in_completeness_grammar( f, uses_choice );
  r.mutually_exclusive_required = r.in_completeness_fragment && uses_choice;
  return r;
}

/// Number of AST nodes, counting each counting proposition as one node plus its inner tree.
template<class Leaf>
int formula_length( Formula<Leaf> const& f )
{
  int n = 1;
  if constexpr ( std::is_same_v<Leaf, TempCountProp> )
  {
    if ( f.kind() == FormulaKind::leaf )
      n += formula_length( f.payload().inner );
  }
  for ( auto const& c : f.children() )
    n += formula_length( c );
  return n;
}

} // namespace cltl
