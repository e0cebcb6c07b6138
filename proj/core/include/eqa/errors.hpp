#pragma once

#include <stdexcept>
#include <string>

namespace eqa {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed JSON input; message carries the byte offset reported by the parser.
struct ParseError : Error {
  using Error::Error;
};

// Structurally valid JSON missing a required field; message names the JSON path.
struct SchemaError : Error {
  using Error::Error;
};

// Duplicate ids and similar cross-object breaches detected at parse time.
struct IntegrityError : Error {
  using Error::Error;
};

// Requested format cannot represent the data (e.g. 1.1 with impossible qas).
struct ConversionError : Error {
  using Error::Error;
};

// Article cannot be shuffled (fewer than 2 question-bearing paragraphs).
struct NotShufflableError : Error {
  using Error::Error;
};

// Count/fraction arguments outside the valid range for the population.
struct RangeError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace eqa
