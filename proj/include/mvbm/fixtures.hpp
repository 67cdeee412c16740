#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mvbm/instance.hpp"
#include "mvbm/rational.hpp"

namespace mvbm {

// Deterministic 64-bit PRNG (SplitMix64). Chosen because it is trivial to
// re-implement bit-exactly in any language, so generated instances are
// reproducible outside this codebase. below(bound) reduces by plain modulo;
// the slight bias is irrelevant here and keeps the stream derivation obvious.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform-ish value in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) { return next() % bound; }

private:
    std::uint64_t state_;
};

// Named benchmark instances. The small ones are hand-built worst cases and
// demonstration instances; the two *_family ids are seeded generators whose
// outputs satisfy a structural guarantee by construction.
enum class FixtureId {
    thm1_impossibility,
    thm3_tightness,
    ex1_collusion,
    ex2_order_dependence,
    thm8_poa,
    thm9_lower_bound,
    app_ex_bfs_vs_dfs,
    app_ex_classes,
    degree_leq_capacity_family,
    complete_contested_family,
};

FixtureId parse_fixture_id(std::string_view name);
std::string to_string(FixtureId id);
const std::vector<FixtureId>& all_fixture_ids();
// One-line human description of the instance a fixture id produces.
std::string fixture_description(FixtureId id);

struct FixtureParams {
    // Gap parameter for the tightness instances (must be > 0).
    Rational eps = Rational(1, 100);
    // Generator knobs for the *_family fixtures.
    std::uint64_t seed = 0;
    int n = 4;
    int m = 4;
    int b_max = 2;
};

Instance fixture(FixtureId id, const FixtureParams& params = {});

enum class ValueMode { distinct, with_ties };

ValueMode parse_value_mode(std::string_view name);
std::string to_string(ValueMode mode);

struct RandomInstanceParams {
    std::uint64_t seed = 0;
    int n = 3;
    int m = 3;
    int b_max = 2;
    // Probability of each (agent, task) edge; must be in (0, 1] and have
    // numerator/denominator that fit in a long.
    Rational density = Rational(1, 2);
    ValueMode value_mode = ValueMode::distinct;
};

// Seed-deterministic random instance. Draw order (one SplitMix64 stream
// seeded with params.seed): capacities for agents 0..n-1, then task values
// for tasks 0..m-1, then edge coin flips row-major ((0,0), (0,1), ...).
//   capacity   b_i = 1 + below(b_max)
//   value      distinct:  (below(10000)+1)/10000, redrawn until unseen
//              with_ties: (below(8)+1)/8
//   edge       present iff below(den) < num, for density num/den
// Isolated agents (or tasks) are kept as-is.
Instance random_instance(const RandomInstanceParams& params);

}  // namespace mvbm
