#include "ym/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "ym/su.hpp"

namespace ym {

namespace {
constexpr char kMagic[4] = {'Y', 'M', 'C', 'K'};
constexpr std::uint64_t kVersion = 1;
}  // namespace

void write_checkpoint(const std::string& path, const Checkpoint& c) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("checkpoint: cannot open " + tmp);
        os.write(kMagic, 4);
        write_u64(os, kVersion);
        write_u64(os, c.config_hash);
        write_u64(os, static_cast<std::uint64_t>(c.sweep));
        write_f64(os, c.eps);
        write_u64(os, c.rng_state.size());
        os.write(c.rng_state.data(), static_cast<std::streamsize>(c.rng_state.size()));
        write_gauge_field(os, c.field);
        if (!os) throw std::runtime_error("checkpoint: write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("checkpoint: rename failed for " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != std::string(kMagic, 4))
        throw std::runtime_error("checkpoint: bad magic in " + path);
    if (read_u64(is) != kVersion) throw std::runtime_error("checkpoint: unsupported version");
    Checkpoint c;
    c.config_hash = read_u64(is);
    c.sweep = static_cast<long long>(read_u64(is));
    c.eps = read_f64(is);
    std::uint64_t len = read_u64(is);
    if (len > (1u << 20)) throw std::runtime_error("checkpoint: implausible rng state size");
    c.rng_state.resize(len);
    is.read(c.rng_state.data(), static_cast<std::streamsize>(len));
    c.field = read_gauge_field(is);
    if (!is) throw std::runtime_error("checkpoint: truncated file " + path);
    return c;
}

}  // namespace ym
