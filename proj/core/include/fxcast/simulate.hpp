#pragma once

#include <cstdint>
#include <vector>

#include "fxcast/dataio.hpp"
#include "fxcast/volatility.hpp"

namespace fxcast {

// Synthetic-data generators backing the verification suites and the
// `simulate` CLI subcommand. All are deterministic per seed.

/// GARCH path eps_t = z_t sqrt(h_t), z_t ~ N(0,1); the first 500 burn-in
/// draws are discarded.
std::vector<double> gen_garch(const GarchParams& params, int n, std::uint64_t seed);

/// EGARCH counterpart of gen_garch.
std::vector<double> gen_egarch(const GarchParams& params, int n, std::uint64_t seed,
                               bool literal_leverage = false);

/// y_t = y_{t-1} + drift + N(0,1), y_0 = 0.
std::vector<double> gen_random_walk(int n, double drift, std::uint64_t seed);

/// Frame with columns u (iid uniform on [-1, 1]) and
/// y_t = 0.5 y_{t-1} + tanh(u_{t-1}) + noise_sd * N(0,1).
TimeSeriesFrame gen_narx_process(int n, std::uint64_t seed, double noise_sd = 0.01);

/// High-signal regression regime: eight exogenous columns led by a smooth
/// level series x1, with target = 0.98 * x1 + noise_sd * N(0,1).
TimeSeriesFrame gen_signal_frame(int n, std::uint64_t seed, double noise_sd = 0.05);

/// Sequential daily dates starting at 2000-01-01, for synthetic frames.
std::vector<Date> synthetic_dates(int n);

}  // namespace fxcast
