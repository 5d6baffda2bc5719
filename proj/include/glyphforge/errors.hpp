#pragma once

#include <stdexcept>
#include <string>

namespace glyphforge {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Domain errors (CLI exit code 1).
class EmptyGlyph : public Error { using Error::Error; };
class ExtractionError : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class TrainError : public Error { using Error::Error; };
class DegenerateWeights : public Error { using Error::Error; };
class SplitError : public Error { using Error::Error; };
class LabelError : public Error { using Error::Error; };

// Input/output errors (CLI exit code 2).
class IoError : public Error { using Error::Error; };
class CorpusError : public Error { using Error::Error; };
class FormatError : public Error { using Error::Error; };

/// True for errors caused by the filesystem or malformed input files.
bool is_io_error(const Error& e) noexcept;

}  // namespace glyphforge
