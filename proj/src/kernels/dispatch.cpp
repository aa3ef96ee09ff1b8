#include <atomic>
#include <cstdlib>
#include <string>

#include "ruleforge/errors.hpp"
#include "ruleforge/kernels/rule_eval.hpp"

namespace ruleforge::kernels {

FlatPolicy flatten(const Policy& policy, std::size_t obs_dim) {
    FlatPolicy flat;
    flat.obs_dim = obs_dim;
    flat.fallback = static_cast<std::int32_t>(policy.fallback_action);
    flat.rule_begin.push_back(0);
    for (const auto& rule : policy.rules) {
        for (const auto& p : rule.predicates) {
            if (p.dim >= obs_dim) {
                throw ValidationError("predicate reads s[" + std::to_string(p.dim) + "] but observations have " +
                                      std::to_string(obs_dim) + " entries");
            }
            flat.dims.push_back(static_cast<std::uint32_t>(p.dim));
            flat.thresholds.push_back(p.threshold);
            flat.greater.push_back(p.op == Op::GreaterThan ? 1 : 0);
        }
        flat.rule_begin.push_back(static_cast<std::uint32_t>(flat.dims.size()));
        flat.actions.push_back(static_cast<std::int32_t>(rule.action));
    }
    return flat;
}

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
        default: return "scalar";
    }
}

bool isa_available(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(RULEFORGE_HAVE_AVX2)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case Isa::Neon:
#if defined(RULEFORGE_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

namespace {

Isa detect() noexcept {
    if (const char* env = std::getenv("RULEFORGE_SIMD")) {
        const std::string_view want(env);
        for (auto isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
            if (want == isa_name(isa) && isa_available(isa)) return isa;
        }
    }
    if (isa_available(Isa::Avx2)) return Isa::Avx2;
    if (isa_available(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
}

std::atomic<Isa>& active() noexcept {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

detail::EvalFn kernel_for(Isa isa) noexcept {
    switch (isa) {
#if defined(RULEFORGE_HAVE_AVX2)
        case Isa::Avx2: return detail::eval_avx2;
#endif
#if defined(RULEFORGE_HAVE_NEON)
        case Isa::Neon: return detail::eval_neon;
#endif
        default: return detail::eval_scalar;
    }
}

void check_block(const FlatPolicy& policy, const StateBlock& states, std::span<std::int32_t> out) {
    if (out.size() < states.lanes || states.stride < states.lanes ||
        states.data.size() < policy.obs_dim * states.stride) {
        throw UsageError("state block does not cover the requested lanes");
    }
}

}  // namespace

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
    if (!isa_available(isa)) {
        throw UsageError("SIMD variant '" + std::string(isa_name(isa)) + "' is not available on this machine");
    }
    active().store(isa, std::memory_order_relaxed);
}

void eval_batch(const FlatPolicy& policy, const StateBlock& states, std::span<std::int32_t> out) {
    eval_batch_with(active_isa(), policy, states, out);
}

void eval_batch_with(Isa isa, const FlatPolicy& policy, const StateBlock& states, std::span<std::int32_t> out) {
    if (!isa_available(isa)) {
        throw UsageError("SIMD variant '" + std::string(isa_name(isa)) + "' is not available on this machine");
    }
    check_block(policy, states, out);
    if (states.lanes == 0) return;
    kernel_for(isa)(policy, states.data.data(), states.stride, states.lanes, out.data());
}

}  // namespace ruleforge::kernels
