#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace attrforge {

// Malformed input text (corpus, rule, lexicon, config or predictions file).
// line and column are 1-based; 0 means "not applicable".
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column = 0);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// Model file problems: wrong header/version or a truncated stream.
class ModelFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input that parses but cannot be used, e.g. a predictions file that names
// a sentence id absent from the gold corpus.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace attrforge
