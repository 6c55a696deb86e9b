// Command-line harness: simulate | bounds | delay | edge | portfolio.
// Every subcommand accepts a config file plus flag overrides (flags win).

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsks/config.hpp"
#include "tsks/harness/bounds.hpp"
#include "tsks/harness/delay.hpp"
#include "tsks/harness/experiment.hpp"

namespace {

struct FlagOverrides {
    std::optional<long long> horizon, replications, base_seed, threads, window_days;
    std::optional<double> mean_epoch, change_rate;
    std::optional<std::string> policies, output, prices;
    std::optional<int> record_steps;

    void apply(tsks::KeyValueConfig& kv) const {
        if (horizon) kv.set("experiment.horizon", std::to_string(*horizon));
        if (replications) kv.set("experiment.replications", std::to_string(*replications));
        if (base_seed) kv.set("experiment.base_seed", std::to_string(*base_seed));
        if (threads) kv.set("experiment.threads", std::to_string(*threads));
        if (policies) kv.set("experiment.policies", *policies);
        if (output) kv.set("experiment.output", *output);
        if (record_steps) kv.set("experiment.record_steps", std::to_string(*record_steps));
        if (prices) kv.set("portfolio.prices", *prices);
        if (window_days) kv.set("portfolio.window_days", std::to_string(*window_days));
        if (mean_epoch) kv.set("edge.mean_epoch", tsks::ExperimentConfig::fmt(*mean_epoch));
        if (change_rate) kv.set("gaussian.change_rate", tsks::ExperimentConfig::fmt(*change_rate));
    }
};

void add_common_flags(CLI::App* cmd, std::string& config_path, FlagOverrides& fo) {
    cmd->add_option("-c,--config", config_path, "Config file (key = value with [sections])")
        ->check(CLI::ExistingFile);
    cmd->add_option("--horizon", fo.horizon, "Steps per replication");
    cmd->add_option("--replications", fo.replications, "Replication count");
    cmd->add_option("--seed", fo.base_seed, "Base seed (replication r uses base+r)");
    cmd->add_option("--threads", fo.threads, "Worker threads (output is identical for any count)");
    cmd->add_option("--policies", fo.policies, "Comma list from {TS,dTS,TS-CD,TS-KS}");
    cmd->add_option("-o,--output", fo.output, "Output directory for CSVs and manifest");
    cmd->add_option("--record-steps", fo.record_steps, "1: write per-step CSV (default), 0: skip");
}

tsks::KeyValueConfig load_config(const std::string& path, const FlagOverrides& fo,
                                 const std::string& environment) {
    auto kv = path.empty() ? tsks::KeyValueConfig{} : tsks::KeyValueConfig::from_file(path);
    fo.apply(kv);
    kv.set("experiment.environment", environment);
    return kv;
}

int run_and_emit(const tsks::KeyValueConfig& kv) {
    const auto cfg = tsks::ExperimentConfig::from_config(kv);
    const auto result = tsks::run_experiment(cfg);
    const auto& s = result.summary;
    std::cout << "horizon " << s.horizon << ", " << cfg.replications << " replication(s)\n";
    std::cout << "policy";
    for (const long long cp : s.checkpoints) std::cout << "\tregret@" << cp;
    std::cout << "\tnormalized\n";
    for (const auto& st : s.policies) {
        std::cout << tsks::policy_name(st.policy);
        for (const double m : st.mean_regret) std::cout << '\t' << m;
        std::cout << '\t' << st.normalized_regret << '\n';
    }
    if (!cfg.output_path.empty()) {
        tsks::emit_results(result.records, s, cfg, cfg.output_path);
        std::cout << "wrote steps.csv, summary.csv, manifest.txt to " << cfg.output_path << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Piecewise-stationary bandit toolkit (KS-test adaptive Thompson sampling)"};
    app.require_subcommand(1);

    std::string config_path;
    FlagOverrides fo;

    auto* simulate = app.add_subcommand("simulate", "Piecewise-Gaussian bandit experiment");
    add_common_flags(simulate, config_path, fo);
    simulate->add_option("--change-rate", fo.change_rate, "Mean changes per step (lambda_C)");

    auto* edge = app.add_subcommand("edge", "Edge-compute task-offloading case study");
    add_common_flags(edge, config_path, fo);
    edge->add_option("--mean-epoch", fo.mean_epoch, "Mean epoch duration in steps");

    auto* portfolio = app.add_subcommand("portfolio", "Portfolio investment case study");
    add_common_flags(portfolio, config_path, fo);
    portfolio->add_option("--prices", fo.prices, "Price CSV (date,portfolio_id,value)");
    portfolio->add_option("--window", fo.window_days, "Investment gap in days");

    auto* bounds = app.add_subcommand("bounds", "Calibration chain and Theorem-1 bound");
    double b_pf = 0.05, b_pm = 0.1, b_ploc = 0.05, b_pchange = 0.1;
    double b_dmin = 0.5, b_dmax = 1.5, b_dmu = 0.5, b_sigma = 1.0;
    double b_tol = 0.1, b_horizon = 1e4;
    bool b_fallback = false;
    bounds->add_option("-c,--config", config_path, "Config file ([calibration] section)")
        ->check(CLI::ExistingFile);
    bounds->add_option("--p-false-alarm", b_pf, "False-alarm budget P_F");
    bounds->add_option("--p-missed", b_pm, "Missed-detection budget P_M");
    bounds->add_option("--p-loc", b_ploc, "Localisation failure budget p_loc");
    bounds->add_option("--p-change", b_pchange, "Mid-window change budget p_change");
    bounds->add_option("--delta-min", b_dmin, "Smallest change magnitude");
    bounds->add_option("--delta-max", b_dmax, "Largest change magnitude");
    bounds->add_option("--delta-mu", b_dmu, "Optimality gap between arms");
    bounds->add_option("--sigma", b_sigma, "Reward noise scale");
    bounds->add_option("--estimate-tol", b_tol, "DKWM tolerance of the estimate window");
    bounds->add_option("--horizon", b_horizon, "Horizon T for the regret bound");
    bounds->add_flag("--fallback-warmup", b_fallback,
                     "Use the universal 2N warmup floor instead of the Lemma formula");

    auto* delay = app.add_subcommand("delay", "Detection-delay comparison (KS vs mean-shift)");
    double d_shift = 0.5, d_sigma = 0.5, d_ratio = 1.0, d_tol = std::nan("");
    long long d_reps = 200, d_seed = 1, d_test = 0, d_estimate = 0;
    double dl_pf = 0.05, dl_pm = 0.1, dl_ploc = 0.05, dl_dmin = 0.5, dl_dmax = 1.5;
    delay->add_option("--shift", d_shift, "Injected mean shift");
    delay->add_option("--sigma", d_sigma, "Pre-change noise scale");
    delay->add_option("--sigma-ratio", d_ratio, "Post/pre sigma ratio");
    delay->add_option("--replications", d_reps, "Trial count");
    delay->add_option("--seed", d_seed, "Base seed");
    delay->add_option("--p-false-alarm", dl_pf, "False-alarm budget P_F");
    delay->add_option("--p-missed", dl_pm, "Missed-detection budget P_M");
    delay->add_option("--p-loc", dl_ploc, "Localisation failure budget p_loc");
    delay->add_option("--delta-min", dl_dmin, "Smallest change magnitude");
    delay->add_option("--delta-max", dl_dmax, "Largest change magnitude");
    delay->add_option("--estimate-tol", d_tol, "DKWM tolerance (default t_ref/2)");
    delay->add_option("--test-window", d_test, "Override n_T");
    delay->add_option("--estimate-window", d_estimate, "Override N");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return run_and_emit(load_config(config_path, fo, "gaussian"));
        if (edge->parsed()) return run_and_emit(load_config(config_path, fo, "edge"));
        if (portfolio->parsed()) return run_and_emit(load_config(config_path, fo, "portfolio"));

        if (bounds->parsed()) {
            if (!config_path.empty()) {
                const auto kv = tsks::KeyValueConfig::from_file(config_path);
                b_pf = kv.get_double("calibration.p_false_alarm", b_pf);
                b_pm = kv.get_double("calibration.p_missed", b_pm);
                b_ploc = kv.get_double("calibration.p_loc", b_ploc);
                b_pchange = kv.get_double("calibration.p_change", b_pchange);
                b_dmin = kv.get_double("calibration.delta_min", b_dmin);
                b_dmax = kv.get_double("calibration.delta_max", b_dmax);
                b_dmu = kv.get_double("calibration.delta_mu", b_dmu);
                b_sigma = kv.get_double("calibration.sigma", b_sigma);
                b_tol = kv.get_double("calibration.estimate_tolerance", b_tol);
            }
            const auto cal = tsks::DetectorCalibration::calibrate(
                b_pf, b_pm, b_ploc, b_pchange, b_dmin, b_dmax, b_dmu, b_sigma, b_tol,
                b_fallback ? tsks::WarmupRule::fallback : tsks::WarmupRule::lemma);
            std::cout << cal.serialize();
            std::cout << "total_confidence="
                      << tsks::total_confidence(b_ploc, b_pchange, b_pm) << '\n';
            std::cout << "regret_bound(T=" << b_horizon << ")="
                      << tsks::regret_bound(b_horizon, cal.warmup_plays, cal.test_window,
                                            cal.max_change_rate)
                      << "  (up to the Theorem-1 constant)\n";
            return 0;
        }

        if (delay->parsed()) {
            auto cal = tsks::DetectorCalibration::calibrate(dl_pf, dl_pm, dl_ploc, 0.1, dl_dmin,
                                                            dl_dmax, 0.5, d_sigma, d_tol);
            if (d_test > 0) {
                cal.test_window = d_test;
                cal.t_ref = tsks::compute_t_ref(d_test, dl_pf);
            }
            if (d_estimate > 0) cal.estimate_window = d_estimate;
            const auto res = tsks::detection_delay_experiment(
                cal, d_shift, d_sigma, d_reps, static_cast<std::uint64_t>(d_seed), d_ratio);
            std::cout << "n_T=" << cal.test_window << " N=" << cal.estimate_window
                      << " t_ref=" << cal.t_ref << " censor=" << res.censor_limit << '\n';
            std::cout << "ks_mean_delay=" << res.ks_mean_delay
                      << " ks_detect_rate=" << res.ks_detect_rate << '\n';
            std::cout << "mean_shift_mean_delay=" << res.mean_shift_mean_delay
                      << " mean_shift_detect_rate=" << res.mean_shift_detect_rate << '\n';
            std::cout << "delay_difference(KS-mean)=" << res.delay_difference << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
