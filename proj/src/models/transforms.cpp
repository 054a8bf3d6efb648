#include "llchess/models/transforms.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace llchess::models {
namespace {
std::atomic<std::uint64_t> g_clamped{0};
}

const char* to_string(PositionClass c) {
    switch (c) {
        case PositionClass::BlackWinning: return "black-winning";
        case PositionClass::Drawish: return "drawish";
        case PositionClass::WhiteWinning: return "white-winning";
    }
    return "?";
}

PositionClass label(Centipawns cp) {
    if (cp < -kDrawishBound) return PositionClass::BlackWinning;
    if (cp > kDrawishBound) return PositionClass::WhiteWinning;
    return PositionClass::Drawish;
}

std::array<float, kClassCount> one_hot(PositionClass c) {
    std::array<float, kClassCount> v{};
    v[static_cast<int>(c)] = 1.0f;
    return v;
}

double normalize_cp(Centipawns cp) {
    const double clamped = std::clamp(cp, -kEvalCap, kEvalCap);
    return 2.0 * (clamped + kEvalCap) / (2.0 * kEvalCap) - 1.0;
}

Centipawns denormalize(double v) {
    if (v > 1.0 || v < -1.0 || std::isnan(v)) {
        g_clamped.fetch_add(1, std::memory_order_relaxed);
        v = std::isnan(v) ? 0.0 : std::clamp(v, -1.0, 1.0);
    }
    return static_cast<Centipawns>(std::lround(v * kEvalCap));
}

std::uint64_t denormalize_clamp_count() { return g_clamped.load(std::memory_order_relaxed); }

double mse_to_cp_linear(double mse) { return mse * kEvalCap; }
double mse_to_cp_rmse(double mse) { return std::sqrt(mse) * kEvalCap; }

}  // namespace llchess::models
