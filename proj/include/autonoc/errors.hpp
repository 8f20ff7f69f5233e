#pragma once

#include <stdexcept>
#include <string>

namespace autonoc {

// Invalid or inconsistent configuration input; message names the offending field.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class NotFoundError : public std::runtime_error {
public:
    explicit NotFoundError(const std::string& what) : std::runtime_error(what) {}
};

class ConflictError : public std::runtime_error {
public:
    explicit ConflictError(const std::string& what) : std::runtime_error(what) {}
};

class UnsupportedChannelError : public std::runtime_error {
public:
    explicit UnsupportedChannelError(const std::string& what) : std::runtime_error(what) {}
};

class InvalidImpairmentError : public std::runtime_error {
public:
    explicit InvalidImpairmentError(const std::string& what) : std::runtime_error(what) {}
};

class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

class AmbiguousClassificationError : public std::runtime_error {
public:
    explicit AmbiguousClassificationError(const std::string& what) : std::runtime_error(what) {}
};

class CannotLocalizeError : public std::runtime_error {
public:
    explicit CannotLocalizeError(const std::string& what) : std::runtime_error(what) {}
};

class InfeasibleDemandError : public std::runtime_error {
public:
    explicit InfeasibleDemandError(const std::string& what) : std::runtime_error(what) {}
};

class IllegalTransitionError : public std::runtime_error {
public:
    explicit IllegalTransitionError(const std::string& what) : std::runtime_error(what) {}
};

class IngestError : public std::runtime_error {
public:
    explicit IngestError(const std::string& what) : std::runtime_error(what) {}
};

class EncodingError : public std::runtime_error {
public:
    explicit EncodingError(const std::string& what) : std::runtime_error(what) {}
};

// Parse failure carrying the 1-based line number where parsing stopped.
class HandoffParseError : public std::runtime_error {
public:
    HandoffParseError(const std::string& what, int line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class NotAHandoffError : public std::runtime_error {
public:
    explicit NotAHandoffError(const std::string& what) : std::runtime_error(what) {}
};

class RoutingError : public std::runtime_error {
public:
    explicit RoutingError(const std::string& what) : std::runtime_error(what) {}
};

class BackendError : public std::runtime_error {
public:
    explicit BackendError(const std::string& what) : std::runtime_error(what) {}
};

class SetupError : public std::runtime_error {
public:
    explicit SetupError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace autonoc
