#pragma once

#include <array>
#include <cstdint>

namespace llchess::models {

// Centipawns, positive favors white.
using Centipawns = int;

inline constexpr Centipawns kMateSentinel = 10000;
inline constexpr Centipawns kEvalCap = 5000;
inline constexpr Centipawns kDrawishBound = 150;

// One-hot order of the classifier output.
enum class PositionClass : std::uint8_t { BlackWinning = 0, Drawish = 1, WhiteWinning = 2 };
inline constexpr int kClassCount = 3;

const char* to_string(PositionClass c);

// cp < -150 black winning, cp > 150 white winning, otherwise drawish (boundaries included).
PositionClass label(Centipawns cp);

std::array<float, kClassCount> one_hot(PositionClass c);

// 2 * (clamp(cp, -5000, 5000) + 5000) / 10000 - 1.
double normalize_cp(Centipawns cp);

// Inverse of normalize_cp: round(v * 5000). Values outside [-1, 1] are clamped
// and counted in denormalize_clamp_count().
Centipawns denormalize(double v);
std::uint64_t denormalize_clamp_count();

// Two readings of a normalized-scale MSE in centipawns.
double mse_to_cp_linear(double mse);  // mse * 5000
double mse_to_cp_rmse(double mse);    // sqrt(mse) * 5000

}  // namespace llchess::models
