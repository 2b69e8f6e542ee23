#pragma once
#include <stdexcept>
#include <string>

namespace puffer {

enum class ErrorKind {
    input,
    rank,
    domain,
    numerical,
};

inline const char* to_string(ErrorKind k)
{
    switch (k) {
        case ErrorKind::input: return "input";
        case ErrorKind::rank: return "rank";
        case ErrorKind::domain: return "domain";
        case ErrorKind::numerical: return "numerical";
    }
    return "unknown";
}

class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind)
    {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Malformed data, inconsistent dimensions, NaN, violated size preconditions.
class InputError : public Error
{
public:
    explicit InputError(const std::string& msg) : Error(ErrorKind::input, msg) {}
};

// Rank deficiency where full rank is required.
class RankError : public Error
{
public:
    explicit RankError(const std::string& msg) : Error(ErrorKind::rank, msg) {}
};

// Argument outside the mathematical domain of a function (e.g. pen'(0)).
class DomainError : public Error
{
public:
    explicit DomainError(const std::string& msg) : Error(ErrorKind::domain, msg) {}
};

class NumericalError : public Error
{
public:
    explicit NumericalError(const std::string& msg) : Error(ErrorKind::numerical, msg) {}
};

} // namespace puffer
