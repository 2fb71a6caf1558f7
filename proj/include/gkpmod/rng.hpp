#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string_view>

#include "gkpmod/core.hpp"

namespace gkpmod {

std::uint64_t splitmix64(std::uint64_t x);
// stream key for (seed, tag, index); tag is normally the CLI command name
std::uint64_t stream_key(std::uint64_t seed, std::string_view tag, std::uint64_t index);

// mt19937_64 plus hand-rolled transforms, so draws do not depend on the standard
// library's distribution implementations
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    static Rng substream(std::uint64_t seed, std::string_view tag, std::uint64_t index) {
        return Rng(stream_key(seed, tag, index));
    }

    double uniform();  // [0, 1)
    double normal();
    // complex normal with E|z - mean|^2 = total_variance
    cplx complex_normal(cplx mean = {}, double total_variance = 1.0);
    // index drawn from unnormalized nonnegative weights given as a running sum
    int discrete_from_cumulative(const RVec& cumulative);

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// runs body(i) for i in [0, n) on up to `threads` workers; callers write into slot i
// so the result order never depends on scheduling
void parallel_for(int n, int threads, const std::function<void(int)>& body);

}  // namespace gkpmod
