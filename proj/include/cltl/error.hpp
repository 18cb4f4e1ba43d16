#pragma once

#include <stdexcept>
#include <string>

namespace cltl
{

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed formula text. Carries the 1-based position of the offending token.
class ParseError : public Error
{
public:
  ParseError( std::string const& message, int line, int column )
      : Error( std::to_string( line ) + ":" + std::to_string( column ) + ": " + message ),
        line_( line ), column_( column ), bare_message_( message )
  {
  }

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  std::string const& bare_message() const noexcept { return bare_message_; }

private:
  int line_;
  int column_;
  std::string bare_message_;
};

/// Invalid robot model or model file.
class ModelError : public Error
{
public:
  using Error::Error;
};

/// A formula or instance that an encoder cannot translate.
class EncodingError : public Error
{
public:
  using Error::Error;
};

/// Solver failures: unbounded variables, numerical trouble, external process errors.
class SolverError : public Error
{
public:
  using Error::Error;
};

} // namespace cltl
