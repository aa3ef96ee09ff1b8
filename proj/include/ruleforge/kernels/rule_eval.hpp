#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ruleforge/policy.hpp"

namespace ruleforge::kernels {

/// Policy in flat arrays, ready for batched evaluation. Predicates of rule r
/// occupy [rule_begin[r], rule_begin[r + 1]).
struct FlatPolicy {
    std::vector<std::uint32_t> dims;
    std::vector<double> thresholds;
    std::vector<std::uint8_t> greater;  // 1 for '>', 0 for '<'
    std::vector<std::uint32_t> rule_begin;
    std::vector<std::int32_t> actions;
    std::int32_t fallback = 0;
    std::size_t obs_dim = 0;

    std::size_t rule_count() const noexcept { return actions.size(); }
};

/// Throws ValidationError when a predicate reads past obs_dim.
FlatPolicy flatten(const Policy& policy, std::size_t obs_dim);

/// Structure-of-arrays block of states: component d of lane i lives at
/// data[d * stride + i]. Lanes [0, lanes) are evaluated.
struct StateBlock {
    std::span<const double> data;
    std::size_t stride = 0;
    std::size_t lanes = 0;
};

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa) noexcept;

/// Whether this build contains the variant and the CPU can run it.
bool isa_available(Isa isa) noexcept;

/// Best available variant; RULEFORGE_SIMD=scalar|avx2|neon overrides it at startup.
Isa active_isa() noexcept;

/// Forces a variant for the rest of the process. Throws UsageError if unavailable.
void set_active_isa(Isa isa);

/// Writes the chosen action for each lane into out[0, lanes).
void eval_batch(const FlatPolicy& policy, const StateBlock& states, std::span<std::int32_t> out);

/// Runs one specific variant, bypassing dispatch.
void eval_batch_with(Isa isa, const FlatPolicy& policy, const StateBlock& states, std::span<std::int32_t> out);

namespace detail {

using EvalFn = void (*)(const FlatPolicy&, const double* states, std::size_t stride, std::size_t lanes,
                        std::int32_t* out);

void eval_scalar(const FlatPolicy&, const double*, std::size_t, std::size_t, std::int32_t*);
#if defined(RULEFORGE_HAVE_AVX2)
void eval_avx2(const FlatPolicy&, const double*, std::size_t, std::size_t, std::int32_t*);
#endif
#if defined(RULEFORGE_HAVE_NEON)
void eval_neon(const FlatPolicy&, const double*, std::size_t, std::size_t, std::int32_t*);
#endif

}  // namespace detail

}  // namespace ruleforge::kernels
