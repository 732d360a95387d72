#pragma once

#include <stdexcept>
#include <string>

namespace geocell
{
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error
{
public:
  using Error::Error;
};

// Malformed input text: tokens, JSON lines, TSV rows, model files.
class ParseError : public Error
{
public:
  using Error::Error;
};

// Well-formed input that breaks a record invariant (spans, lengths).
class ValidationError : public Error
{
public:
  using Error::Error;
};

class NoCandidateError : public Error
{
public:
  using Error::Error;
};

class UndefinedMetricError : public Error
{
public:
  using Error::Error;
};

// Model file version, shape or configuration mismatch.
class FormatError : public Error
{
public:
  using Error::Error;
};

class NumericError : public Error
{
public:
  using Error::Error;
};

inline std::string AtLine(std::string const & path, size_t line)
{
  return path + ":" + std::to_string(line) + ": ";
}
}  // namespace geocell
