#pragma once

#include <stdexcept>
#include <string>

namespace gibbsgeom {

// Exit-code contract: 2 = clan explosion, 3 = validation, 4 = oracle infeasible.
struct ClanExplosionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OracleInfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientPointsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateSiteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PotentialEnvelopeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace gibbsgeom
