#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsks/env/common.hpp"

// Portfolio investment environment: arms are portfolios, one buy-only
// investment every `window_days` days, reward is the unrealized return of
// the chosen portfolio's accumulated position.

namespace tsks {

struct PriceRegime {
    double drift = 0.0;       // per-day fractional drift
    double volatility = 0.0;  // per-day lognormal volatility
    long long duration = 1;   // days
};

/// Geometric random-walk price series with piecewise regimes; strictly
/// positive.
template <typename Rng>
std::vector<double> synth_prices(double initial, const std::vector<PriceRegime>& regimes,
                                 Rng& rng) {
    if (!(initial > 0.0)) throw std::invalid_argument("synth_prices: initial price must be positive");
    std::vector<double> prices;
    prices.push_back(initial);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (const auto& reg : regimes) {
        if (reg.duration < 1) throw std::invalid_argument("synth_prices: regime duration must be >= 1");
        for (long long d = 0; d < reg.duration; ++d) {
            const double shock = reg.volatility > 0.0 ? reg.volatility * normal(rng) : 0.0;
            const double next = prices.back() * (1.0 + reg.drift) * std::exp(shock);
            prices.push_back(std::max(next, 1e-12));
        }
    }
    return prices;
}

/// Loads `date,portfolio_id,value` CSV into per-portfolio daily series.
/// Gap days are forward-filled; series are truncated to the common length.
inline std::vector<std::vector<double>> load_prices(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_prices: cannot open " + path);
    std::string line;
    long long lineno = 0;
    std::map<std::string, std::vector<std::pair<long long, double>>> by_portfolio;

    auto parse_date = [](const std::string& s) -> long long {
        int y, m, d;
        char c1, c2;
        std::istringstream ds(s);
        if (!(ds >> y >> c1 >> m >> c2 >> d) || c1 != '-' || c2 != '-') return -1;
        return static_cast<long long>(y) * 372 + m * 31 + d;  // order-preserving key
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1 && line.rfind("date", 0) == 0) continue;
        std::istringstream ls(line);
        std::string date, pid, value;
        if (!std::getline(ls, date, ',') || !std::getline(ls, pid, ',') ||
            !std::getline(ls, value)) {
            throw std::runtime_error("load_prices: malformed row at line " + std::to_string(lineno));
        }
        const long long key = parse_date(date);
        if (key < 0) throw std::runtime_error("load_prices: bad date at line " + std::to_string(lineno));
        double v;
        try {
            v = std::stod(value);
        } catch (const std::exception&) {
            throw std::runtime_error("load_prices: bad value at line " + std::to_string(lineno));
        }
        if (!(v > 0.0))
            throw std::runtime_error("load_prices: non-positive price at line " + std::to_string(lineno));
        auto& series = by_portfolio[pid];
        if (!series.empty() && key <= series.back().first)
            throw std::runtime_error("load_prices: unordered date at line " + std::to_string(lineno));
        series.emplace_back(key, v);
    }
    if (by_portfolio.empty()) throw std::runtime_error("load_prices: no data rows in " + path);

    std::vector<std::vector<double>> out;
    std::size_t common = std::numeric_limits<std::size_t>::max();
    for (const auto& [pid, series] : by_portfolio) {
        std::vector<double> daily;
        for (std::size_t i = 0; i < series.size(); ++i) {
            daily.push_back(series[i].second);
            if (i + 1 < series.size()) {
                // forward-fill calendar gaps within the same month span
                long long gap = series[i + 1].first - series[i].first;
                for (long long g = 1; g < gap; ++g) daily.push_back(series[i].second);
            }
        }
        common = std::min(common, daily.size());
        out.push_back(std::move(daily));
    }
    for (auto& s : out) s.resize(common);
    return out;
}

struct PortfolioEnvParams {
    long long window_days = 30;  // investment gap
    double cap = 1000.0;         // H, max spend per investment

    void validate() const {
        if (window_days < 1) throw std::invalid_argument("PortfolioEnvParams: window_days must be >= 1");
        if (!(cap > 0.0)) throw std::invalid_argument("PortfolioEnvParams: cap must be positive");
    }
};

class PortfolioEnv {
public:
    PortfolioEnv(std::vector<std::vector<double>> prices, PortfolioEnvParams params)
        : prices_(std::move(prices)), params_(params), ledgers_(prices_.size()) {
        params_.validate();
        if (prices_.empty()) throw std::invalid_argument("PortfolioEnv: no portfolios");
        for (const auto& s : prices_)
            if (s.size() != prices_.front().size())
                throw std::invalid_argument("PortfolioEnv: unequal series lengths");
    }

    /// Number of investment steps the price series supports.
    long long max_steps() const {
        return static_cast<long long>(prices_.front().size() - 1) / params_.window_days + 1;
    }

    bool exhausted() const { return next_index_ >= max_steps(); }

    /// Unrealized return of portfolio k's current position at investment
    /// index i; 0 for an empty ledger.
    double unrealized_return(std::size_t k, long long i) const {
        const auto& ledger = ledgers_[k];
        if (ledger.empty()) return 0.0;
        const double price = price_at(k, i);
        double shares = 0.0, cost = 0.0;
        for (const auto& buy : ledger) {
            shares += buy.shares;
            cost += buy.price * buy.shares;
        }
        if (cost <= 0.0) return 0.0;
        return price * shares / cost - 1.0;
    }

    StepOutcome step(std::size_t portfolio) {
        if (portfolio >= prices_.size()) throw std::out_of_range("PortfolioEnv: bad portfolio");
        if (exhausted()) throw std::runtime_error("PortfolioEnv: price series exhausted");
        const long long i = next_index_++;
        StepOutcome out;
        out.raw_reward = unrealized_return(portfolio, i);
        out.binary_reward = out.raw_reward > 0.0 ? 1.0 : 0.0;

        // Counterfactual oracle: best unrealized return over all portfolios,
        // each under its own current ledger.
        out.oracle_arm = 0;
        out.oracle_mean = unrealized_return(0, i);
        for (std::size_t k = 1; k < prices_.size(); ++k) {
            const double r = unrealized_return(k, i);
            if (r > out.oracle_mean) {
                out.oracle_mean = r;
                out.oracle_arm = k;
            }
        }
        out.chosen_mean = out.raw_reward;

        // Buy after the reward is computed.
        const double price = price_at(portfolio, i);
        const double shares = std::floor(params_.cap / price);
        if (shares > 0.0) ledgers_[portfolio].push_back({price, shares});
        return out;
    }

    long long next_index() const { return next_index_; }
    const std::vector<std::vector<double>>& prices() const { return prices_; }

private:
    struct Buy {
        double price;
        double shares;
    };

    double price_at(std::size_t k, long long i) const {
        const auto day = static_cast<std::size_t>(
            std::min<long long>(i * params_.window_days,
                                static_cast<long long>(prices_[k].size()) - 1));
        return prices_[k][day];
    }

    std::vector<std::vector<double>> prices_;
    PortfolioEnvParams params_;
    std::vector<std::vector<Buy>> ledgers_;
    long long next_index_ = 0;
};

} // namespace tsks
