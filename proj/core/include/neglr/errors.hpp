#pragma once

#include <stdexcept>
#include <string>

namespace neglr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class InvalidArchitecture : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class EmptyInput : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class InvalidUpdate : public Error {
public:
    using Error::Error;
};

/// Parameters stopped being finite during training.
class ExplosionError : public Error {
public:
    using Error::Error;
};

class OrderingError : public Error {
public:
    using Error::Error;
};

class InvalidState : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace neglr
