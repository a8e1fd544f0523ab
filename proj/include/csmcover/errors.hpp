#ifndef CSMCOVER_ERRORS_HPP
#define CSMCOVER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace csmcover {

/// Bad input: out-of-range values, malformed files, inconsistent datasets.
/// The CLI maps this family to exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input. Carries the 1-based line number of the offending row.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : ValidationError(source + ":" + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Failure while running a computation (training, solving, I/O). Exit code 3.
class RuntimeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace csmcover

#endif
