#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace glovekit {

/// Bad user input: config values, CLI arguments, violated preconditions.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable files, short reads, lock conflicts.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed file content, reported with file and line context.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
          file_(file),
          line_(line) {}

    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

/// Training aborted (too many skipped records, non-finite parameters).
struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace glovekit
