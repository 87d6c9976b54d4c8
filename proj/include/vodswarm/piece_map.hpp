#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace vodswarm {

/// 1-based piece index in [1, t].
using PieceIndex = std::uint32_t;

/// Ownership bitmap over a file's pieces plus per-piece block progress.
///
/// A piece is owned iff every one of its blocks has completed. Only owned
/// pieces can be served to other peers.
class PieceMap {
public:
    PieceMap(PieceIndex piece_count, std::uint32_t blocks_per_piece);

    /// A map with every piece owned (the seed).
    static PieceMap full(PieceIndex piece_count, std::uint32_t blocks_per_piece);

    PieceIndex piece_count() const noexcept { return piece_count_; }
    std::uint32_t blocks_per_piece() const noexcept { return blocks_per_piece_; }
    PieceIndex owned_count() const noexcept { return owned_count_; }
    bool complete() const noexcept { return owned_count_ == piece_count_; }

    bool owns(PieceIndex piece) const;

    /// Completed blocks of a piece that is not yet owned.
    std::uint32_t blocks_done(PieceIndex piece) const;
    /// Lowest-index block of the piece not yet completed.
    std::uint32_t first_missing_block(PieceIndex piece) const;
    std::uint32_t missing_blocks(PieceIndex piece) const;

    /// Marks one block complete. Returns true when this completes the piece.
    /// Throws SimulationFault if the piece or block is already complete.
    bool complete_block(PieceIndex piece, std::uint32_t block);

    /// Marks a whole piece owned (test and seeding helper).
    void set_owned(PieceIndex piece);

    /// True iff `other` owns at least one piece this map lacks.
    bool lacks_any_of(const PieceMap& other) const;

    /// Lowest-index piece not owned, or 0 if complete.
    PieceIndex first_missing() const;

    const std::vector<std::uint64_t>& words() const noexcept { return words_; }

private:
    void check_index(PieceIndex piece) const;

    PieceIndex piece_count_;
    std::uint32_t blocks_per_piece_;
    PieceIndex owned_count_ = 0;
    std::vector<std::uint64_t> words_;
    std::map<PieceIndex, std::set<std::uint32_t>> partial_;
};

/// Peer a is interested in peer b: b owns a piece a does not.
inline bool interested(const PieceMap& a, const PieceMap& b) { return a.lacks_any_of(b); }

}  // namespace vodswarm
