#pragma once

#include <stdexcept>
#include <string>

namespace fractop {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ifs_core
struct NotContractive : Error { using Error::Error; };
struct Degenerate : Error { using Error::Error; };
struct LetterOutOfRange : Error { using Error::Error; };
struct NoBranch : Error { using Error::Error; };

// measure
struct InvalidWeights : Error { using Error::Error; };
struct EmptyMeasure : Error { using Error::Error; };

// opspace / word_algebra
struct LevelOverflow : Error { using Error::Error; };
struct LevelUnderflow : Error { using Error::Error; };
struct InsufficientLevel : Error { using Error::Error; };
struct SyntaxError : Error {
    std::size_t position;
    SyntaxError(const std::string& what, std::size_t pos)
        : Error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};
struct GeneratorOutOfRange : Error { using Error::Error; };

// approx
struct MissingContinuityData : Error { using Error::Error; };

// cli
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

}  // namespace fractop
