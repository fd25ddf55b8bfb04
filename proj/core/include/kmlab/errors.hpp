#pragma once

#include <stdexcept>
#include <string>

namespace kmlab {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid or inconsistent scenario / kernel configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical routine could not reach its accuracy target.
class AccuracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unreadable file.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace kmlab
