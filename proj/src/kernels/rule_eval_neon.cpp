#include <arm_neon.h>

#include "ruleforge/kernels/rule_eval.hpp"

namespace ruleforge::kernels::detail {

void eval_neon(const FlatPolicy& policy, const double* states, std::size_t stride, std::size_t lanes,
               std::int32_t* out) {
    const auto rules = policy.rule_count();
    std::size_t lane = 0;
    for (; lane + 2 <= lanes; lane += 2) {
        float64x2_t action = vdupq_n_f64(static_cast<double>(policy.fallback));
        uint64x2_t open = vdupq_n_u64(~0ULL);
        for (std::size_t r = 0; r < rules; ++r) {
            uint64x2_t match = open;
            for (auto k = policy.rule_begin[r]; k < policy.rule_begin[r + 1]; ++k) {
                const float64x2_t x = vld1q_f64(states + policy.dims[k] * stride + lane);
                const float64x2_t th = vdupq_n_f64(policy.thresholds[k]);
                match = vandq_u64(match, policy.greater[k] ? vcgtq_f64(x, th) : vcltq_f64(x, th));
            }
            action = vbslq_f64(match, vdupq_n_f64(static_cast<double>(policy.actions[r])), action);
            open = vbicq_u64(open, match);
            if ((vgetq_lane_u64(open, 0) | vgetq_lane_u64(open, 1)) == 0) break;
        }
        out[lane] = static_cast<std::int32_t>(vgetq_lane_f64(action, 0));
        out[lane + 1] = static_cast<std::int32_t>(vgetq_lane_f64(action, 1));
    }
    if (lane < lanes) {
        eval_scalar(policy, states + lane, stride, lanes - lane, out + lane);
    }
}

}  // namespace ruleforge::kernels::detail
