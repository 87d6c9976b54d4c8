#include "vodswarm/piece_map.hpp"

#include <bit>

#include <fmt/format.h>

#include "vodswarm/sim_core.hpp"

namespace vodswarm {

PieceMap::PieceMap(PieceIndex piece_count, std::uint32_t blocks_per_piece)
    : piece_count_(piece_count),
      blocks_per_piece_(blocks_per_piece),
      words_((piece_count + 63) / 64, 0) {
    if (piece_count == 0 || blocks_per_piece == 0) {
        throw std::invalid_argument("piece map needs at least one piece and one block");
    }
}

PieceMap PieceMap::full(PieceIndex piece_count, std::uint32_t blocks_per_piece) {
    PieceMap map(piece_count, blocks_per_piece);
    for (PieceIndex p = 1; p <= piece_count; ++p) map.set_owned(p);
    return map;
}

void PieceMap::check_index(PieceIndex piece) const {
    if (piece < 1 || piece > piece_count_) {
        throw std::out_of_range(fmt::format("piece {} outside [1, {}]", piece, piece_count_));
    }
}

bool PieceMap::owns(PieceIndex piece) const {
    check_index(piece);
    const PieceIndex bit = piece - 1;
    return (words_[bit / 64] >> (bit % 64)) & 1U;
}

std::uint32_t PieceMap::blocks_done(PieceIndex piece) const {
    if (owns(piece)) return blocks_per_piece_;
    auto it = partial_.find(piece);
    return it == partial_.end() ? 0 : static_cast<std::uint32_t>(it->second.size());
}

std::uint32_t PieceMap::missing_blocks(PieceIndex piece) const {
    return blocks_per_piece_ - blocks_done(piece);
}

std::uint32_t PieceMap::first_missing_block(PieceIndex piece) const {
    if (owns(piece)) return blocks_per_piece_;
    auto it = partial_.find(piece);
    if (it == partial_.end()) return 0;
    std::uint32_t b = 0;
    for (auto done : it->second) {
        if (done != b) break;
        ++b;
    }
    return b;
}

bool PieceMap::complete_block(PieceIndex piece, std::uint32_t block) {
    if (owns(piece)) {
        throw SimulationFault(fmt::format("block {} of piece {} arrived after the piece was owned",
                                          block, piece));
    }
    if (block >= blocks_per_piece_) {
        throw std::out_of_range(fmt::format("block {} outside piece of {} blocks", block,
                                            blocks_per_piece_));
    }
    auto& blocks = partial_[piece];
    if (!blocks.insert(block).second) {
        throw SimulationFault(fmt::format("block {} of piece {} downloaded twice", block, piece));
    }
    if (blocks.size() < blocks_per_piece_) return false;
    partial_.erase(piece);
    set_owned(piece);
    return true;
}

void PieceMap::set_owned(PieceIndex piece) {
    if (owns(piece)) return;
    const PieceIndex bit = piece - 1;
    words_[bit / 64] |= std::uint64_t{1} << (bit % 64);
    partial_.erase(piece);
    ++owned_count_;
}

bool PieceMap::lacks_any_of(const PieceMap& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (other.words_[i] & ~words_[i]) return true;
    }
    return false;
}

PieceIndex PieceMap::first_missing() const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
        const std::uint64_t free = ~words_[i];
        if (free == 0) continue;
        const auto p = static_cast<PieceIndex>(i * 64 + std::countr_zero(free) + 1);
        return p <= piece_count_ ? p : 0;
    }
    return 0;
}

}  // namespace vodswarm
