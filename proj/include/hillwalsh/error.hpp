#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hillwalsh {

// Every error carries a short machine-readable kind ("domain", "size", ...)
// that the CLI prints as the reason prefix.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error("domain", what) {}
};

class SizeError : public Error {
public:
    explicit SizeError(const std::string& what) : Error("size", what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what, double condition = 0.0)
        : Error("numeric", what), condition_(condition) {}

    // Reciprocal condition estimate when the failure came from a linear solve.
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io", what) {}
};

/// Raised when 1 + tau^2 q_n / 2^(2k+2) vanishes for some sample, i.e. the
/// triangular discriminant matrices lose their diagonal.
class SingularityError : public Error {
public:
    SingularityError(std::size_t index, const std::string& what)
        : Error("singularity", what), index_(index) {}

    /// 1-based sample index n of the offending p_n.
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

}  // namespace hillwalsh
