#pragma once

#include <stdexcept>
#include <string>

namespace seqforge {

inline constexpr const char* kToolVersion = "0.1.0";

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Residue index mismatch between two objects that must correspond 1:1.
class CorrespondenceError : public Error {
public:
    using Error::Error;
};

// Sequence contains a character outside the configured alphabet.
class AlphabetError : public Error {
public:
    using Error::Error;
};

// LoRA rank exceeds min(H, F).
class RankError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace seqforge
