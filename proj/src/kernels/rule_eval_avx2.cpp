#include <immintrin.h>

#include "ruleforge/kernels/rule_eval.hpp"

namespace ruleforge::kernels::detail {

namespace {

// Evaluates four lanes starting at `lane`; every lane must be in range.
inline __m256d eval4(const FlatPolicy& policy, const double* states, std::size_t stride, std::size_t lane) {
    __m256d action = _mm256_set1_pd(static_cast<double>(policy.fallback));
    __m256d open = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    const auto rules = policy.rule_count();
    for (std::size_t r = 0; r < rules; ++r) {
        __m256d match = open;
        for (auto k = policy.rule_begin[r]; k < policy.rule_begin[r + 1]; ++k) {
            const __m256d x = _mm256_loadu_pd(states + policy.dims[k] * stride + lane);
            const __m256d th = _mm256_set1_pd(policy.thresholds[k]);
            const __m256d cmp = policy.greater[k] ? _mm256_cmp_pd(x, th, _CMP_GT_OQ) : _mm256_cmp_pd(x, th, _CMP_LT_OQ);
            match = _mm256_and_pd(match, cmp);
            if (_mm256_movemask_pd(match) == 0) break;
        }
        action = _mm256_blendv_pd(action, _mm256_set1_pd(static_cast<double>(policy.actions[r])), match);
        open = _mm256_andnot_pd(match, open);
        if (_mm256_movemask_pd(open) == 0) break;
    }
    return action;
}

}  // namespace

void eval_avx2(const FlatPolicy& policy, const double* states, std::size_t stride, std::size_t lanes,
               std::int32_t* out) {
    std::size_t lane = 0;
    for (; lane + 4 <= lanes; lane += 4) {
        const __m128i actions = _mm256_cvtpd_epi32(eval4(policy, states, stride, lane));
        _mm_storeu_si128(reinterpret_cast<__m128i*>(out + lane), actions);
    }
    if (lane < lanes) {
        eval_scalar(policy, states + lane, stride, lanes - lane, out + lane);
    }
}

}  // namespace ruleforge::kernels::detail
