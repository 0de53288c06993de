#pragma once

#include <cstdint>
#include <string>

#include "ym/fields.hpp"

namespace ym {

// Resumable state of a sampling run. The RNG state string pins the exact
// draw sequence, so a resumed run reproduces an uninterrupted one byte for
// byte.
struct Checkpoint {
    std::uint64_t config_hash = 0;
    long long sweep = 0;  // measurement sweeps completed
    double eps = 0.0;     // frozen Metropolis step
    std::string rng_state;
    GaugeField field;
};

// Binary, little-endian, written atomically (temp file + rename).
void write_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint read_checkpoint(const std::string& path);  // throws on mismatch

}  // namespace ym
