#include <algorithm>
#include <atomic>
#include <thread>

#include "t20/engine.hpp"
#include "t20/error.hpp"
#include "t20/rng.hpp"

namespace t20 {

namespace {

/// Cumulative distribution over the outcome indices; the last entry is 1.
struct Sampler {
    std::array<double, kOutcomeCount> cum{};

    explicit Sampler(const OutcomeVector& v) {
        double acc = 0.0;
        for (std::size_t k = 0; k < kOutcomeCount; ++k) {
            acc += v.values()[k];
            cum[k] = acc;
        }
        cum[kOutcomeCount - 1] = 1.0;
    }

    std::size_t draw(double u) const noexcept {
        std::size_t k = 0;
        while (k + 1 < kOutcomeCount && u >= cum[k]) ++k;
        return k;
    }
};

constexpr std::size_t kWicket = index_of(Outcome::Wicket);

/// Splits [0, n_sims) into fixed chunks, runs `chunk_fn(begin, end)` on a
/// bounded set of threads and sums the per-chunk success counts. The sum is
/// independent of scheduling because every trajectory owns its substream.
template <typename ChunkFn>
std::uint64_t run_chunks(std::uint64_t n_sims, const SimOptions& options, ChunkFn&& chunk_fn) {
    const std::uint64_t batch = std::max<std::uint64_t>(1, options.batch_size);
    const std::uint64_t chunks = (n_sims + batch - 1) / batch;
    std::vector<std::uint64_t> wins(chunks, 0);
    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunks));

    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (std::uint64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
            const std::uint64_t begin = c * batch;
            wins[c] = chunk_fn(begin, std::min(n_sims, begin + batch));
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    std::uint64_t total = 0;
    for (auto w : wins) total += w;
    return total;
}

}  // namespace

EvalResult simulate_batting(const BattingScenario& scenario, std::span<const int> order,
                            std::uint64_t n_sims, std::uint64_t seed, const SimOptions& options) {
    scenario.validate();
    check_order(scenario, order);
    if (n_sims == 0) throw DomainError("n_sims must be >= 1");

    // Lineup slot 0 is the crease survivor; slot 1 + i is order[i].
    std::vector<std::array<Sampler, kPhaseCount>> samplers;
    auto add = [&](const Batsman& b) {
        samplers.push_back({Sampler(b.profiles[0]), Sampler(b.profiles[1]), Sampler(b.profiles[2])});
    };
    add(scenario.fixed_non_striker);
    for (int idx : order) add(scenario.pool[static_cast<std::size_t>(idx)]);

    const int usable = scenario.usable_wickets();
    const bool new_on_strike = scenario.initial_striker == InitialStriker::NewBatsman;
    const std::uint8_t first_striker = new_on_strike ? 1 : 0;
    const std::uint8_t first_partner = new_on_strike ? 0 : 1;

    auto chunk = [&](std::uint64_t begin, std::uint64_t end) -> std::uint64_t {
        const std::size_t n = static_cast<std::size_t>(end - begin);
        std::vector<int> runs(n, scenario.runs);
        std::vector<std::uint8_t> lost(n, 0), striker(n, first_striker), partner(n, first_partner);
        std::vector<Xoshiro256> rng;
        rng.reserve(n);
        std::vector<std::uint32_t> live(n);
        for (std::size_t i = 0; i < n; ++i) {
            rng.emplace_back(derive_seed(seed, {begin + i}));
            live[i] = static_cast<std::uint32_t>(i);
        }
        std::uint64_t wins = 0;
        for (int b = scenario.balls; b > 0 && !live.empty(); --b) {
            const int bowled = kInningsBalls - b;
            const bool end_of_over = bowled % kBallsPerOver == kBallsPerOver - 1;
            const std::size_t phase = index_of(phase_of_over(bowled / kBallsPerOver));
            std::size_t kept = 0;
            for (std::uint32_t i : live) {
                const std::size_t k = samplers[striker[i]][phase].draw(rng[i].uniform());
                if (k == kWicket) {
                    if (++lost[i] == usable) continue;  // all out
                    striker[i] = static_cast<std::uint8_t>(1 + lost[i]);
                    if (end_of_over) std::swap(striker[i], partner[i]);
                } else {
                    const int r = kOutcomeRuns[k];
                    runs[i] -= r;
                    if (runs[i] <= 0) {
                        ++wins;
                        continue;
                    }
                    if (((r & 1) == 1) != end_of_over) std::swap(striker[i], partner[i]);
                }
                live[kept++] = i;
            }
            live.resize(kept);
        }
        return wins;
    };

    return make_eval_result(run_chunks(n_sims, options, chunk), n_sims, seed);
}

EvalResult simulate_bowling(const BowlingScenario& scenario, const BowlingPlan& plan,
                            std::uint64_t n_sims, std::uint64_t seed, const SimOptions& options,
                            ProfileSource source) {
    scenario.validate();
    if (auto violated = violated_constraint(plan, scenario))
        throw InfeasibleError(*violated, "bowling plan violates the " + *violated + " constraint");
    if (source == ProfileSource::BattingProxy && !scenario.batting_proxy)
        throw ValidationError("batting_proxy", "required for proxy evaluation");
    if (n_sims == 0) throw DomainError("n_sims must be >= 1");

    // One sampler per remaining ball, fixed by the plan and the phase.
    std::vector<Sampler> per_ball;
    per_ball.reserve(static_cast<std::size_t>(scenario.balls));
    const int first_over = scenario.slots.front();
    for (int b = scenario.balls; b > 0; --b) {
        const int over = (kInningsBalls - b) / kBallsPerOver;
        const Phase phase = phase_of_over(over);
        const std::size_t slot = static_cast<std::size_t>(over - first_over);
        const PhaseProfiles& profiles =
            source == ProfileSource::Bowlers
                ? scenario.bowlers[static_cast<std::size_t>(plan.bowlers[slot])].profiles
                : *scenario.batting_proxy;
        per_ball.emplace_back(profiles[index_of(phase)]);
    }

    auto chunk = [&](std::uint64_t begin, std::uint64_t end) -> std::uint64_t {
        const std::size_t n = static_cast<std::size_t>(end - begin);
        std::vector<int> runs(n, scenario.runs);
        std::vector<int> taken(n, 0);
        std::vector<Xoshiro256> rng;
        rng.reserve(n);
        std::vector<std::uint32_t> live(n);
        for (std::size_t i = 0; i < n; ++i) {
            rng.emplace_back(derive_seed(seed, {begin + i}));
            live[i] = static_cast<std::uint32_t>(i);
        }
        std::uint64_t defended = 0;
        for (const Sampler& sampler : per_ball) {
            if (live.empty()) break;
            std::size_t kept = 0;
            for (std::uint32_t i : live) {
                const std::size_t k = sampler.draw(rng[i].uniform());
                if (k == kWicket) {
                    if (++taken[i] == scenario.w_max) {
                        ++defended;
                        continue;
                    }
                } else {
                    runs[i] -= kOutcomeRuns[k];
                    if (runs[i] <= 0) continue;  // target reached
                }
                live[kept++] = i;
            }
            live.resize(kept);
        }
        return defended + live.size();  // balls exhausted with runs still to defend
    };

    return make_eval_result(run_chunks(n_sims, options, chunk), n_sims, seed);
}

}  // namespace t20
