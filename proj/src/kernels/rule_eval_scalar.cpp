#include "ruleforge/kernels/rule_eval.hpp"

namespace ruleforge::kernels::detail {

// Reference kernel: lane by lane, first match wins.
void eval_scalar(const FlatPolicy& policy, const double* states, std::size_t stride, std::size_t lanes,
                 std::int32_t* out) {
    const auto rules = policy.rule_count();
    for (std::size_t lane = 0; lane < lanes; ++lane) {
        std::int32_t action = policy.fallback;
        for (std::size_t r = 0; r < rules; ++r) {
            bool match = true;
            for (auto k = policy.rule_begin[r]; k < policy.rule_begin[r + 1] && match; ++k) {
                const double x = states[policy.dims[k] * stride + lane];
                const double th = policy.thresholds[k];
                match = policy.greater[k] ? x > th : x < th;
            }
            if (match) {
                action = policy.actions[r];
                break;
            }
        }
        out[lane] = action;
    }
}

}  // namespace ruleforge::kernels::detail
