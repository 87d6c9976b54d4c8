#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "vodswarm/client_behavior.hpp"
#include "vodswarm/peer_selection.hpp"
#include "vodswarm/piece_selection.hpp"

namespace vodswarm {

inline constexpr std::uint64_t kKiB = 1024;
inline constexpr std::uint64_t kMiB = 1024 * 1024;

enum class FileType : std::uint8_t { AllMedia, Music, TvSeries, Movies };

std::string_view to_string(FileType type);
FileType parse_file_type(std::string_view name);

/// Fully parameterized experiment cell.
struct ScenarioConfig {
    FileType f_type = FileType::Movies;
    std::uint64_t f_size = 200 * kMiB;
    std::uint32_t s_size = 25;  // peers in steady state, the seed included
    std::uint32_t m = 1;
    double r_up = 20.0 * kKiB;
    double r_down = 20.0 * kKiB;
    std::uint64_t p_size = 256 * kKiB;
    std::uint64_t b_size = 16 * kKiB;

    std::string setting_name = "su1";
    PeerSelectionParams setting;

    InteractivityProfile profile;

    PolicyKind protocol = PolicyKind::Eisp;
    double sim_time = kDefaultHorizon;
    std::uint32_t runs = 10;
    std::uint64_t master_seed = 1;

    PieceIndex pieces() const { return static_cast<PieceIndex>(f_size / p_size); }
    std::uint32_t blocks_per_piece() const { return static_cast<std::uint32_t>(p_size / b_size); }
    /// Window length w: the play length in pieces.
    PieceIndex window() const { return fraction_to_pieces(profile.l_play_fraction, pieces()); }
    /// Urgency threshold v: half the window, rounded up.
    PieceIndex urgency() const { return (window() + 1) / 2; }
    PlaybackGeometry geometry() const;
    /// Seconds to play one piece (playback rate equals r_down).
    double piece_play_seconds() const { return static_cast<double>(p_size) / r_down; }
    std::uint32_t leechers() const { return s_size - m; }

    /// Throws std::invalid_argument describing the first inconsistency.
    void validate() const;

    bool operator==(const ScenarioConfig&) const;
};

PeerSelectionParams setting_preset(std::string_view name);

/// Named cell, e.g. preset("movies", "su1", "mi", PolicyKind::Eisp).
ScenarioConfig preset(std::string_view scenario, std::string_view setting,
                      std::string_view profile, PolicyKind protocol);

/// "movies/su1/mi/eisp"
ScenarioConfig preset_from_path(std::string_view path);

/// INI-style text with [scenario], [setting], [profile] and [run] sections.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
/// Inverse of parse_config; derived quantities are appended as comments.
std::string dump_config(const ScenarioConfig& cfg);

}  // namespace vodswarm
