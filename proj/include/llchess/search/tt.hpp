#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>

#include "llchess/chess/types.hpp"

namespace llchess::search {

enum class Bound : std::uint8_t { Exact = 0, Lower = 1, Upper = 2 };

// 16-bit move code: from | to << 6 | promotion << 12 (0 none, 1 N, 2 B, 3 R, 4 Q).
using MoveCode = std::uint16_t;
inline constexpr MoveCode kNoMove = 0;
MoveCode encode_move(const chess::Move& m);
bool same_move(MoveCode code, const chess::Move& m);

struct TTEntry {
    std::uint64_t key = 0;
    float value = 0.0f;  // node-relative, normalized scale
    int depth = 0;
    Bound bound = Bound::Exact;
    MoveCode move = kNoMove;
    std::uint8_t generation = 0;
};

// One entry per slot, addressed by the key. Each slot is two relaxed atomics (key^data,
// data) so torn writes from racing threads show up as a key mismatch rather than a
// wrong entry.
class TranspositionTable {
public:
    explicit TranspositionTable(std::size_t capacity);
    static TranspositionTable with_megabytes(std::size_t mb);

    std::size_t capacity() const { return capacity_; }
    void clear();
    // Starts a new search; entries from older generations are replaced first.
    void new_generation() { generation_ = static_cast<std::uint8_t>((generation_ + 1) & 0x1F); }
    std::uint8_t generation() const { return generation_; }

    // Full-key match of any depth. Use usable_for_cutoff before trusting the value.
    std::optional<TTEntry> probe(std::uint64_t key) const;
    static bool usable_for_cutoff(const TTEntry& e, int depth) { return e.depth >= depth; }

    // Replaces the slot when it is empty, holds the same key, is from an older
    // generation, or is not deeper than the new entry.
    void store(std::uint64_t key, int depth, float value, Bound bound, MoveCode move);

    // Slots currently holding an entry of this generation, per mille of capacity.
    int hashfull() const;

private:
    struct Slot {
        std::atomic<std::uint64_t> check{0};
        std::atomic<std::uint64_t> data{0};
    };
    std::size_t index(std::uint64_t key) const {
        return static_cast<std::size_t>((static_cast<unsigned __int128>(key) * capacity_) >> 64);
    }

    std::size_t capacity_;
    std::unique_ptr<Slot[]> slots_;
    std::uint8_t generation_ = 0;
};

}  // namespace llchess::search
