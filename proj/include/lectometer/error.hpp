#pragma once

#include <stdexcept>
#include <string>

namespace lecto {

// Base class for everything the library throws on bad input. The CLI maps
// these to exit code 2; anything else is treated as an internal error (1).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed bytes/text: broken JSON, truncated RIFF chunks, bad CSV rows.
// Carries a 1-based line number when the input is line oriented.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, long line = -1)
        : Error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

// Well-formed input that violates a documented constraint (ranges, ordering,
// duplicates, coverage, degenerate shapes).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what, long line = -1)
        : Error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

// Recognizable container, unsupported encoding (stereo WAV, 8-bit PCM, ...).
class UnsupportedFormatError : public Error {
public:
    using Error::Error;
};

// Caller asked for something that does not exist (unknown report format,
// unknown config key).
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace lecto
