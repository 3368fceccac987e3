#pragma once

#include <vector>

#include "edgetwin/environment.hpp"

namespace edgetwin {

// The no-twin benchmark sees the same world through a keyhole: every
// DT-derived feature is zeroed and the dt_adjust bit is stripped before it
// reaches the environment (no refresh, no prediction energy). Everything
// else, including the gap terms the stale twin inflicts, is unchanged, so
// rewards stay directly comparable with the full agent's.

inline std::vector<int> benchmark_masked_indices(int k_candidates) {
    std::vector<int> idx{1, 3, 5, 7, 9};
    for (int k = 0; k < k_candidates; ++k) idx.push_back(12 + 5 * k + 2);
    return idx;
}

class BenchmarkEnv {
public:
    explicit BenchmarkEnv(Environment& env)
        : env_(env), masked_(benchmark_masked_indices(env.candidate_count())) {}

    int state_size() const { return env_.state_size(); }
    int action_count() const { return env_.action_count(); }
    int user_count() const { return env_.user_count(); }
    int horizon() const { return env_.horizon(); }
    Environment& inner() { return env_; }

    MdpState reset(std::uint64_t seed) {
        MdpState st = env_.reset(seed);
        mask(st);
        return st;
    }

    StepOutcome step(int action_index) {
        MdpAction a = decode_action(action_index, env_.candidate_count());
        a.dt_adjust = false;
        StepOutcome out = env_.step(a);
        mask(out.next_state);
        return out;
    }

private:
    void mask(MdpState& st) const {
        for (int i : masked_) st.feature_vector[static_cast<std::size_t>(i)] = 0.0;
    }

    Environment& env_;
    std::vector<int> masked_;
};

inline BenchmarkEnv wrap_benchmark(Environment& env) { return BenchmarkEnv(env); }

}  // namespace edgetwin
