// errors.hpp: exception types thrown by the hgphase library

#pragma once

#include <stdexcept>
#include <string>

namespace hgphase {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
    using Error::Error;
};

struct DegenerateParameterError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

struct GridError : Error {
    using Error::Error;
};

struct HermiticityError : Error {
    using Error::Error;
};

// arg() of an overlap whose modulus is below the overlap floor
struct OrthogonalEndpointError : Error {
    using Error::Error;
};

struct NormalizationError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace hgphase
