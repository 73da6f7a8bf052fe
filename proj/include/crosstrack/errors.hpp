#pragma once

#include <stdexcept>
#include <string>

namespace crosstrack {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DepthTooSmall : Error { using Error::Error; };
struct DisparityTooSmall : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct EmptyCluster : Error { using Error::Error; };
struct DegenerateWeights : Error { using Error::Error; };
struct InsufficientPoints : Error { using Error::Error; };
struct SingularInnovation : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };
struct MissingLog : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

}  // namespace crosstrack
