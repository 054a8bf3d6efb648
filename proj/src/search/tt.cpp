#include "llchess/search/tt.hpp"

#include <bit>
#include <stdexcept>

namespace llchess::search {
namespace {

// data layout: value bits [0,32) | depth [32,40) | bound [40,42) | generation [42,47) |
// occupied bit 47 | move [48,64). A zero data word is an empty slot.
std::uint64_t pack(float value, int depth, Bound bound, std::uint8_t generation, MoveCode move) {
    return static_cast<std::uint64_t>(std::bit_cast<std::uint32_t>(value)) |
           static_cast<std::uint64_t>(static_cast<std::uint8_t>(depth)) << 32 |
           static_cast<std::uint64_t>(bound) << 40 | static_cast<std::uint64_t>(generation & 0x1F) << 42 |
           static_cast<std::uint64_t>(move) << 48 | (std::uint64_t{1} << 47);
}

TTEntry unpack(std::uint64_t key, std::uint64_t d) {
    TTEntry e;
    e.key = key;
    e.value = std::bit_cast<float>(static_cast<std::uint32_t>(d));
    e.depth = static_cast<int>((d >> 32) & 0xFF);
    e.bound = static_cast<Bound>((d >> 40) & 0x3);
    e.generation = static_cast<std::uint8_t>((d >> 42) & 0x1F);
    e.move = static_cast<MoveCode>(d >> 48);
    return e;
}

}  // namespace

MoveCode encode_move(const chess::Move& m) {
    int promo = 0;
    if (m.promotion) promo = chess::index(*m.promotion);  // Knight=1 .. Queen=4
    return static_cast<MoveCode>(m.from | m.to << 6 | promo << 12);
}

bool same_move(MoveCode code, const chess::Move& m) { return code != kNoMove && code == encode_move(m); }

TranspositionTable::TranspositionTable(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("transposition table capacity must be positive");
    slots_ = std::make_unique<Slot[]>(capacity);
}

TranspositionTable TranspositionTable::with_megabytes(std::size_t mb) {
    return TranspositionTable(std::max<std::size_t>(1, mb * 1024 * 1024 / sizeof(Slot)));
}

void TranspositionTable::clear() {
    for (std::size_t i = 0; i < capacity_; ++i) {
        slots_[i].check.store(0, std::memory_order_relaxed);
        slots_[i].data.store(0, std::memory_order_relaxed);
    }
    generation_ = 0;
}

std::optional<TTEntry> TranspositionTable::probe(std::uint64_t key) const {
    const Slot& s = slots_[index(key)];
    const std::uint64_t d = s.data.load(std::memory_order_relaxed);
    const std::uint64_t c = s.check.load(std::memory_order_relaxed);
    if (d == 0 || (c ^ d) != key) return std::nullopt;
    return unpack(key, d);
}

void TranspositionTable::store(std::uint64_t key, int depth, float value, Bound bound, MoveCode move) {
    Slot& s = slots_[index(key)];
    const std::uint64_t old_d = s.data.load(std::memory_order_relaxed);
    if (old_d != 0) {
        const std::uint64_t old_key = s.check.load(std::memory_order_relaxed) ^ old_d;
        const TTEntry old = unpack(old_key, old_d);
        const bool stale = old.generation != (generation_ & 0x1F);
        if (old_key != key && !stale && old.depth > depth) return;
        // Keep the known best move when re-storing the same position without one.
        if (old_key == key && move == kNoMove) move = old.move;
    }
    const std::uint64_t d = pack(value, depth, bound, generation_ & 0x1F, move);
    s.check.store(key ^ d, std::memory_order_relaxed);
    s.data.store(d, std::memory_order_relaxed);
}

int TranspositionTable::hashfull() const {
    const std::size_t n = std::min<std::size_t>(capacity_, 1000);
    int used = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t d = slots_[i].data.load(std::memory_order_relaxed);
        if (d != 0 && unpack(0, d).generation == (generation_ & 0x1F)) ++used;
    }
    return static_cast<int>(used * 1000 / n);
}

}  // namespace llchess::search
