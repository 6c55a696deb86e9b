#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "tsks/calibration.hpp"
#include "tsks/config.hpp"
#include "tsks/env/edge_env.hpp"
#include "tsks/env/gaussian_env.hpp"
#include "tsks/env/portfolio_env.hpp"
#include "tsks/policy.hpp"
#include "tsks/version.hpp"

// Experiment orchestration: paired-seed replications of every configured
// policy on one of the three environments, with regret accounting against
// the per-step oracle mean.

namespace tsks {

enum class EnvironmentKind { gaussian, edge, portfolio };

inline const char* environment_name(EnvironmentKind k) {
    switch (k) {
        case EnvironmentKind::gaussian: return "gaussian";
        case EnvironmentKind::edge: return "edge";
        case EnvironmentKind::portfolio: return "portfolio";
    }
    return "?";
}

inline EnvironmentKind environment_from_name(const std::string& s) {
    if (s == "gaussian") return EnvironmentKind::gaussian;
    if (s == "edge") return EnvironmentKind::edge;
    if (s == "portfolio") return EnvironmentKind::portfolio;
    throw std::invalid_argument("unknown environment: " + s);
}

/// Three synthetic portfolios with distinct regime schedules, so the
/// counterfactual leader changes over the series.
inline std::vector<std::vector<double>> default_portfolio_prices(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> prices;
    prices.push_back(synth_prices(
        100.0, {{0.0012, 0.010, 900}, {-0.0030, 0.015, 300}, {0.0004, 0.010, 600}}, rng));
    prices.push_back(synth_prices(
        100.0, {{0.0002, 0.010, 900}, {0.0010, 0.010, 300}, {0.0012, 0.010, 600}}, rng));
    prices.push_back(synth_prices(
        100.0, {{-0.0004, 0.012, 900}, {0.0006, 0.012, 300}, {0.0016, 0.012, 600}}, rng));
    return prices;
}

struct ExperimentConfig {
    EnvironmentKind environment = EnvironmentKind::gaussian;
    GaussianEnvParams gaussian;
    EdgeEnvParams edge;
    PortfolioEnvParams portfolio;
    std::vector<std::vector<double>> prices;  // portfolio environment only
    std::string prices_path;                  // "" when synthetic
    std::uint64_t prices_seed = 7;            // synthetic series seed

    std::vector<PolicyKind> policies{PolicyKind::ts, PolicyKind::dts, PolicyKind::ts_cd,
                                     PolicyKind::ts_ks};
    long long horizon = 10000;
    long long replications = 1;
    std::uint64_t base_seed = 1;
    double epsilon_b = 0.01;
    double discount = 0.95;
    bool record_steps = true;
    unsigned threads = 1;
    std::string output_path;

    double estimate_tolerance = std::nan("");  // NaN: t_ref / 2
    WarmupRule warmup_rule = WarmupRule::fallback;
    DetectorCalibration calibration = DetectorCalibration::calibrate(
        0.05, 0.1, 0.05, 0.1, 0.5, 1.5, 0.5, 0.5, std::nan(""), WarmupRule::fallback);

    void validate() const {
        if (horizon < 1) throw std::invalid_argument("ExperimentConfig: horizon must be >= 1");
        if (replications < 1)
            throw std::invalid_argument("ExperimentConfig: replications must be >= 1");
        if (policies.empty()) throw std::invalid_argument("ExperimentConfig: no policies");
        if (environment == EnvironmentKind::gaussian) gaussian.validate();
        if (environment == EnvironmentKind::edge) edge.validate();
        if (environment == EnvironmentKind::portfolio) {
            portfolio.validate();
            if (prices.empty())
                throw std::invalid_argument("ExperimentConfig: portfolio run needs price series");
        }
        if (!(calibration.test_window >= 1 && calibration.estimate_window >= 1 &&
              calibration.warmup_plays >= 1 && calibration.t_ref > 0.0))
            throw std::invalid_argument("ExperimentConfig: invalid calibration");
    }

    /// Reads a flattened config record; missing keys keep their defaults.
    static ExperimentConfig from_config(const KeyValueConfig& kv) {
        ExperimentConfig c;
        c.environment = environment_from_name(kv.get_string("experiment.environment", "gaussian"));
        c.horizon = kv.get_int("experiment.horizon", c.horizon);
        c.replications = kv.get_int("experiment.replications", c.replications);
        c.base_seed = static_cast<std::uint64_t>(
            kv.get_int("experiment.base_seed", static_cast<long long>(c.base_seed)));
        c.epsilon_b = kv.get_double("experiment.epsilon_b", c.epsilon_b);
        c.discount = kv.get_double("experiment.discount", c.discount);
        c.record_steps = kv.get_int("experiment.record_steps", c.record_steps ? 1 : 0) != 0;
        c.threads = static_cast<unsigned>(kv.get_int("experiment.threads", c.threads));
        c.output_path = kv.get_string("experiment.output", c.output_path);
        c.policies.clear();
        for (const auto& name : kv.get_list("experiment.policies", {"TS", "dTS", "TS-CD", "TS-KS"}))
            c.policies.push_back(policy_from_name(name));

        c.gaussian.arms = static_cast<std::size_t>(kv.get_int("gaussian.arms", 2));
        c.gaussian.sigma = kv.get_double("gaussian.sigma", c.gaussian.sigma);
        c.gaussian.change_rate = kv.get_double("gaussian.change_rate", c.gaussian.change_rate);
        c.gaussian.delta_min = kv.get_double("gaussian.delta_min", c.gaussian.delta_min);
        c.gaussian.delta_max = kv.get_double("gaussian.delta_max", c.gaussian.delta_max);
        c.gaussian.delta_mu = kv.get_double("gaussian.delta_mu", c.gaussian.delta_mu);
        c.gaussian.mu_min = kv.get_double("gaussian.mu_min", c.gaussian.mu_min);
        c.gaussian.mu_max = kv.get_double("gaussian.mu_max", c.gaussian.mu_max);

        c.edge.servers = static_cast<std::size_t>(kv.get_int("edge.servers", 3));
        c.edge.users = static_cast<std::size_t>(kv.get_int("edge.users", 1000));
        c.edge.offload_rate = kv.get_double("edge.offload_rate", c.edge.offload_rate);
        c.edge.task_size = kv.get_double("edge.task_size", c.edge.task_size);
        c.edge.deadline = kv.get_double("edge.deadline", c.edge.deadline);
        c.edge.mean_epoch = kv.get_double("edge.mean_epoch", c.edge.mean_epoch);
        c.edge.buffer_cap_lo = kv.get_double("edge.buffer_cap_lo", c.edge.buffer_cap_lo);
        c.edge.buffer_cap_hi = kv.get_double("edge.buffer_cap_hi", c.edge.buffer_cap_hi);
        c.edge.capacity_lo = kv.get_double("edge.capacity_lo", c.edge.capacity_lo);
        c.edge.capacity_hi = kv.get_double("edge.capacity_hi", c.edge.capacity_hi);

        c.portfolio.window_days = kv.get_int("portfolio.window_days", c.portfolio.window_days);
        c.portfolio.cap = kv.get_double("portfolio.cap", c.portfolio.cap);
        c.prices_path = kv.get_string("portfolio.prices", "");
        c.prices_seed = static_cast<std::uint64_t>(
            kv.get_int("portfolio.prices_seed", static_cast<long long>(c.prices_seed)));
        if (c.environment == EnvironmentKind::portfolio) {
            c.prices = c.prices_path.empty() ? default_portfolio_prices(c.prices_seed)
                                             : load_prices(c.prices_path);
        }

        const double pf = kv.get_double("calibration.p_false_alarm", 0.05);
        const double pm = kv.get_double("calibration.p_missed", 0.1);
        const double pl = kv.get_double("calibration.p_loc", 0.05);
        const double pc = kv.get_double("calibration.p_change", 0.1);
        const double dmin = kv.get_double("calibration.delta_min", 0.5);
        const double dmax = kv.get_double("calibration.delta_max", 1.5);
        const double dmu = kv.get_double("calibration.delta_mu", 0.5);
        const double sig = kv.get_double("calibration.sigma", 0.5);
        c.estimate_tolerance = kv.get_double("calibration.estimate_tolerance", std::nan(""));
        c.warmup_rule = kv.get_string("calibration.warmup_rule", "fallback") == "lemma"
                            ? WarmupRule::lemma
                            : WarmupRule::fallback;
        c.calibration = DetectorCalibration::calibrate(pf, pm, pl, pc, dmin, dmax, dmu, sig,
                                                       c.estimate_tolerance, c.warmup_rule);
        // Direct window overrides, for studies that pin the windows.
        if (kv.has("calibration.test_window"))
            c.calibration.test_window = kv.get_int("calibration.test_window", 0);
        if (kv.has("calibration.estimate_window"))
            c.calibration.estimate_window = kv.get_int("calibration.estimate_window", 0);
        if (kv.has("calibration.warmup_plays"))
            c.calibration.warmup_plays = kv.get_int("calibration.warmup_plays", 0);
        if (kv.has("calibration.test_window") || kv.has("calibration.estimate_window"))
            c.calibration.t_ref = compute_t_ref(c.calibration.test_window, pf);
        if (kv.has("calibration.t_ref"))
            c.calibration.t_ref = kv.get_double("calibration.t_ref", 0.0);
        return c;
    }

    /// Echoes the full configuration as a replayable config record.
    KeyValueConfig to_config() const {
        KeyValueConfig kv;
        kv.set("experiment.environment", environment_name(environment));
        kv.set("experiment.horizon", std::to_string(horizon));
        kv.set("experiment.replications", std::to_string(replications));
        kv.set("experiment.base_seed", std::to_string(base_seed));
        kv.set("experiment.epsilon_b", fmt(epsilon_b));
        kv.set("experiment.discount", fmt(discount));
        kv.set("experiment.record_steps", record_steps ? "1" : "0");
        kv.set("experiment.output", output_path);
        std::string pols;
        for (const auto p : policies) {
            if (!pols.empty()) pols += ",";
            pols += policy_name(p);
        }
        kv.set("experiment.policies", pols);

        kv.set("gaussian.arms", std::to_string(gaussian.arms));
        kv.set("gaussian.sigma", fmt(gaussian.sigma));
        kv.set("gaussian.change_rate", fmt(gaussian.change_rate));
        kv.set("gaussian.delta_min", fmt(gaussian.delta_min));
        kv.set("gaussian.delta_max", fmt(gaussian.delta_max));
        kv.set("gaussian.delta_mu", fmt(gaussian.delta_mu));
        kv.set("gaussian.mu_min", fmt(gaussian.mu_min));
        kv.set("gaussian.mu_max", fmt(gaussian.mu_max));

        kv.set("edge.servers", std::to_string(edge.servers));
        kv.set("edge.users", std::to_string(edge.users));
        kv.set("edge.offload_rate", fmt(edge.offload_rate));
        kv.set("edge.task_size", fmt(edge.task_size));
        kv.set("edge.deadline", fmt(edge.deadline));
        kv.set("edge.mean_epoch", fmt(edge.mean_epoch));
        kv.set("edge.buffer_cap_lo", fmt(edge.buffer_cap_lo));
        kv.set("edge.buffer_cap_hi", fmt(edge.buffer_cap_hi));
        kv.set("edge.capacity_lo", fmt(edge.capacity_lo));
        kv.set("edge.capacity_hi", fmt(edge.capacity_hi));

        kv.set("portfolio.window_days", std::to_string(portfolio.window_days));
        kv.set("portfolio.cap", fmt(portfolio.cap));
        if (!prices_path.empty()) kv.set("portfolio.prices", prices_path);
        kv.set("portfolio.prices_seed", std::to_string(prices_seed));

        kv.set("calibration.p_false_alarm", fmt(calibration.p_false_alarm));
        kv.set("calibration.p_missed", fmt(calibration.p_missed));
        kv.set("calibration.p_loc", fmt(calibration.p_loc));
        kv.set("calibration.p_change", fmt(calibration.p_change));
        kv.set("calibration.delta_min", fmt(calibration.delta_min));
        kv.set("calibration.delta_max", fmt(calibration.delta_max));
        kv.set("calibration.delta_mu", fmt(calibration.delta_mu));
        kv.set("calibration.sigma", fmt(calibration.sigma));
        if (!std::isnan(estimate_tolerance))
            kv.set("calibration.estimate_tolerance", fmt(estimate_tolerance));
        kv.set("calibration.warmup_rule", warmup_rule == WarmupRule::lemma ? "lemma" : "fallback");
        kv.set("calibration.test_window", std::to_string(calibration.test_window));
        kv.set("calibration.estimate_window", std::to_string(calibration.estimate_window));
        kv.set("calibration.warmup_plays", std::to_string(calibration.warmup_plays));
        kv.set("calibration.t_ref", fmt(calibration.t_ref));
        return kv;
    }

    static std::string fmt(double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    }
};

struct StepLog {
    long long step = 0;
    std::size_t arm = 0;
    double raw_reward = 0.0;
    double mapped_reward = 0.0;
    std::size_t oracle_arm = 0;
    double oracle_mean = 0.0;
    bool detected = false;
};

struct RunRecord {
    PolicyKind policy = PolicyKind::ts;
    long long replication = 0;
    std::uint64_t env_seed = 0;
    std::vector<StepLog> steps;              // empty when step recording is off
    std::vector<double> cumulative_regret;   // length horizon, non-decreasing
    double cumulative_reward = 0.0;          // sum of raw rewards
    std::vector<long long> detection_times;
    std::vector<long long> change_times;
};

struct PolicyRegretStats {
    PolicyKind policy = PolicyKind::ts;
    std::vector<double> mean_regret;  // per checkpoint
    std::vector<double> std_regret;   // per checkpoint
    double normalized_regret = 0.0;   // final mean regret / horizon
};

struct RegretSummary {
    long long horizon = 0;
    std::vector<long long> checkpoints;  // 5 evenly spaced horizon fractions
    std::vector<PolicyRegretStats> policies;
};

struct ExperimentResult {
    std::vector<RunRecord> records;  // ordered by (replication, policy)
    RegretSummary summary;
};

namespace detail {

/// Per-policy RNG stream, decorrelated from the environment seed.
inline std::uint64_t policy_seed(std::uint64_t env_seed, std::size_t policy_index) {
    std::uint64_t z = env_seed + 0x9E3779B97F4A7C15ull * (policy_index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

template <typename Env>
RunRecord run_one(const ExperimentConfig& cfg, Env& env, std::size_t arms, long long horizon,
                  PolicyKind kind, long long replication, std::uint64_t env_seed,
                  std::size_t policy_index, const RewardMapper* mapper) {
    const bool detecting = kind == PolicyKind::ts_cd || kind == PolicyKind::ts_ks;
    PolicyState policy(kind, arms, policy_seed(env_seed, policy_index),
                       detecting ? std::optional<DetectorCalibration>(cfg.calibration)
                                 : std::nullopt,
                       cfg.discount);
    RunRecord rec;
    rec.policy = kind;
    rec.replication = replication;
    rec.env_seed = env_seed;
    rec.cumulative_regret.reserve(static_cast<std::size_t>(horizon));
    if (cfg.record_steps) rec.steps.reserve(static_cast<std::size_t>(horizon));

    double regret = 0.0;
    for (long long n = 1; n <= horizon; ++n) {
        const std::size_t arm = policy.select_arm();
        const StepOutcome out = env.step(arm);
        const double success = out.binary_reward ? *out.binary_reward : mapper->map(out.raw_reward);
        const UpdateResult up = policy.update(arm, out.raw_reward, success);

        regret += out.oracle_mean - out.chosen_mean;
        rec.cumulative_regret.push_back(regret);
        rec.cumulative_reward += out.raw_reward;
        if (out.change_occurred) rec.change_times.push_back(n);
        const bool fired = up.detection && up.detection->changed;
        if (fired) rec.detection_times.push_back(n);
        if (cfg.record_steps)
            rec.steps.push_back(
                {n, arm, out.raw_reward, success, out.oracle_arm, out.oracle_mean, fired});
    }
    return rec;
}

inline RunRecord run_replication_policy(const ExperimentConfig& cfg, long long horizon,
                                        long long replication, std::size_t policy_index) {
    const std::uint64_t env_seed = cfg.base_seed + static_cast<std::uint64_t>(replication);
    const PolicyKind kind = cfg.policies[policy_index];
    switch (cfg.environment) {
        case EnvironmentKind::gaussian: {
            PiecewiseGaussianEnv env(cfg.gaussian, env_seed);
            const RewardMapper mapper(cfg.gaussian.mu_min, cfg.gaussian.mu_max,
                                      std::max(cfg.gaussian.sigma, 1e-12), cfg.epsilon_b);
            return run_one(cfg, env, cfg.gaussian.arms, horizon, kind, replication, env_seed,
                           policy_index, &mapper);
        }
        case EnvironmentKind::edge: {
            EdgeComputeEnv env(cfg.edge, env_seed);
            return run_one(cfg, env, cfg.edge.servers, horizon, kind, replication, env_seed,
                           policy_index, nullptr);
        }
        case EnvironmentKind::portfolio: {
            PortfolioEnv env(cfg.prices, cfg.portfolio);
            return run_one(cfg, env, cfg.prices.size(), horizon, kind, replication, env_seed,
                           policy_index, nullptr);
        }
    }
    throw std::logic_error("run_replication_policy: unreachable");
}

} // namespace detail

/// Sample mean and (n-1)-normalized standard deviation.
inline std::pair<double, double> mean_std(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

inline RegretSummary summarize(const ExperimentConfig& cfg, long long horizon,
                               const std::vector<RunRecord>& records) {
    RegretSummary s;
    s.horizon = horizon;
    for (int i = 1; i <= 5; ++i) s.checkpoints.push_back(horizon * i / 5);
    for (const auto kind : cfg.policies) {
        PolicyRegretStats st;
        st.policy = kind;
        for (const long long cp : s.checkpoints) {
            std::vector<double> vals;
            for (const auto& rec : records)
                if (rec.policy == kind)
                    vals.push_back(rec.cumulative_regret[static_cast<std::size_t>(cp - 1)]);
            const auto [m, sd] = mean_std(vals);
            st.mean_regret.push_back(m);
            st.std_regret.push_back(sd);
        }
        st.normalized_regret = st.mean_regret.back() / static_cast<double>(horizon);
        s.policies.push_back(std::move(st));
    }
    return s;
}

/// Runs every configured policy on an identically-seeded environment copy
/// per replication (seed = base_seed + r).  Replications are pre-assigned
/// to output slots, so the result is identical for any thread count.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    long long horizon = cfg.horizon;
    if (cfg.environment == EnvironmentKind::portfolio) {
        const PortfolioEnv probe(cfg.prices, cfg.portfolio);
        horizon = std::min(horizon, probe.max_steps());
    }

    const std::size_t total = static_cast<std::size_t>(cfg.replications) * cfg.policies.size();
    std::vector<RunRecord> records(total);
    auto run_slot = [&](std::size_t slot) {
        const long long r = static_cast<long long>(slot / cfg.policies.size());
        const std::size_t p = slot % cfg.policies.size();
        records[slot] = detail::run_replication_policy(cfg, horizon, r, p);
    };

    const unsigned workers = std::max(1u, cfg.threads);
    if (workers == 1) {
        for (std::size_t slot = 0; slot < total; ++slot) run_slot(slot);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t slot = w; slot < total; slot += workers) run_slot(slot);
            });
        for (auto& t : pool) t.join();
    }

    auto summary = summarize(cfg, horizon, records);
    return {std::move(records), std::move(summary)};
}

/// Writes steps.csv, summary.csv and manifest.txt under `path` (a
/// directory, created if needed).
inline void emit_results(const std::vector<RunRecord>& records, const RegretSummary& summary,
                         const ExperimentConfig& cfg, const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    const auto file = [&](const char* name) {
        std::ofstream out(std::filesystem::path(path) / name, std::ios::binary);
        if (!out) throw std::runtime_error(std::string("emit_results: cannot write ") + name +
                                           " under " + path);
        return out;
    };

    {
        auto out = file("steps.csv");
        out << "step,policy,replication,arm,raw_reward,regret,detected\n";
        std::ostringstream os;
        os.precision(17);
        for (const auto& rec : records)
            for (const auto& s : rec.steps) {
                os.str("");
                os << s.step << ',' << policy_name(rec.policy) << ',' << rec.replication << ','
                   << s.arm << ',' << s.raw_reward << ','
                   << rec.cumulative_regret[static_cast<std::size_t>(s.step - 1)] << ','
                   << (s.detected ? 1 : 0) << '\n';
                out << os.str();
            }
    }
    {
        auto out = file("summary.csv");
        out << "policy,checkpoint,mean_regret,std_regret\n";
        std::ostringstream os;
        os.precision(17);
        for (const auto& st : summary.policies)
            for (std::size_t i = 0; i < summary.checkpoints.size(); ++i) {
                os.str("");
                os << policy_name(st.policy) << ',' << summary.checkpoints[i] << ','
                   << st.mean_regret[i] << ',' << st.std_regret[i] << '\n';
                out << os.str();
            }
    }
    {
        auto out = file("manifest.txt");
        out << "# toolkit_version = " << toolkit_version << '\n';
        out << cfg.to_config().serialize();
    }
}

} // namespace tsks
