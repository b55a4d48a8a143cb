#pragma once

#include <stdexcept>
#include <string>

namespace qss {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Party count or party index outside the supported range.
class BoundsError : public Error {
public:
    using Error::Error;
};

// Invalid scheme, adversary or session parameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Operation needs an even-Y round but got an OddY one.
class InvalidRoundError : public Error {
public:
    using Error::Error;
};

class InvalidInputError : public Error {
public:
    using Error::Error;
};

// Reconstruction attempted without every participant's share.
class CollusionIncompleteError : public Error {
public:
    using Error::Error;
};

}  // namespace qss
