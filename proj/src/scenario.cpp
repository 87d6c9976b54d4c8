#include "vodswarm/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace vodswarm {

namespace pt = boost::property_tree;

std::string_view to_string(FileType type) {
    switch (type) {
        case FileType::AllMedia: return "all_media";
        case FileType::Music: return "music";
        case FileType::TvSeries: return "tv";
        case FileType::Movies: return "movies";
    }
    return "unknown";
}

FileType parse_file_type(std::string_view name) {
    for (auto t : {FileType::AllMedia, FileType::Music, FileType::TvSeries, FileType::Movies}) {
        if (to_string(t) == name) return t;
    }
    throw std::invalid_argument(fmt::format("unknown scenario '{}'", name));
}

PlaybackGeometry ScenarioConfig::geometry() const {
    PlaybackGeometry geo;
    geo.l_play = window();
    geo.l_jump = fraction_to_pieces(profile.l_jump_fraction, pieces());
    geo.l_pause = profile.l_play_fraction * static_cast<double>(f_size) / r_down;
    return geo;
}

void ScenarioConfig::validate() const {
    if (p_size == 0 || b_size == 0 || f_size == 0) {
        throw std::invalid_argument("file, piece and block sizes must be positive");
    }
    if (p_size % b_size != 0) {
        throw std::invalid_argument(
            fmt::format("block size {} does not divide piece size {}", b_size, p_size));
    }
    if (f_size % p_size != 0) {
        throw std::invalid_argument(
            fmt::format("piece size {} does not divide file size {}", p_size, f_size));
    }
    if (m != 1) throw std::invalid_argument("exactly one seed is supported");
    if (s_size < m + 1) throw std::invalid_argument("swarm needs at least one leecher");
    if (!(r_up > 0.0) || !(r_down > 0.0)) throw std::invalid_argument("rates must be positive");
    if (!(sim_time > 0.0)) throw std::invalid_argument("simulation time must be positive");
    if (runs == 0) throw std::invalid_argument("at least one run is required");
    setting.validate();
    profile.validate();
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
    return f_type == o.f_type && f_size == o.f_size && s_size == o.s_size && m == o.m &&
           r_up == o.r_up && r_down == o.r_down && p_size == o.p_size && b_size == o.b_size &&
           setting_name == o.setting_name && setting.x1 == o.setting.x1 &&
           setting.x2 == o.setting.x2 && setting.k == o.setting.k &&
           setting.delta == o.setting.delta && profile.name == o.profile.name &&
           profile.lambda == o.profile.lambda &&
           profile.l_play_fraction == o.profile.l_play_fraction &&
           profile.l_jump_fraction == o.profile.l_jump_fraction && profile.p == o.profile.p &&
           profile.playback == o.profile.playback && protocol == o.protocol &&
           sim_time == o.sim_time && runs == o.runs && master_seed == o.master_seed;
}

PeerSelectionParams setting_preset(std::string_view name) {
    if (name == "su1") return {3, 1, 3, 10.0};
    if (name == "su2") return {4, 1, 3, 10.0};
    if (name == "su3") return {2, 2, 4, 10.0};
    throw std::invalid_argument(fmt::format("unknown setting '{}'", name));
}

ScenarioConfig preset(std::string_view scenario, std::string_view setting,
                      std::string_view profile, PolicyKind protocol) {
    ScenarioConfig cfg;
    cfg.f_type = parse_file_type(scenario);
    switch (cfg.f_type) {
        case FileType::AllMedia: cfg.f_size = 20 * kMiB; cfg.s_size = 7; break;
        case FileType::Music: cfg.f_size = 10 * kMiB; cfg.s_size = 10; break;
        case FileType::TvSeries: cfg.f_size = 100 * kMiB; cfg.s_size = 15; break;
        case FileType::Movies: cfg.f_size = 200 * kMiB; cfg.s_size = 25; break;
    }
    cfg.setting_name = std::string(setting);
    cfg.setting = setting_preset(setting);
    cfg.profile = profile_preset(profile);
    cfg.protocol = protocol;
    return cfg;
}

ScenarioConfig preset_from_path(std::string_view path) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : path) {
        if (c == '/') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    if (parts.size() != 4) {
        throw std::invalid_argument(
            fmt::format("preset '{}' must look like scenario/setting/profile/protocol", path));
    }
    return preset(parts[0], parts[1], parts[2], parse_policy(parts[3]));
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"scenario", {"name", "f_size", "s_size", "m", "r_up", "r_down", "p_size", "b_size"}},
        {"setting", {"name", "x1", "x2", "k", "delta"}},
        {"profile",
         {"name", "lambda", "l_play", "l_jump", "p0", "p1", "p2", "p3", "playback"}},
        {"run", {"protocol", "sim_time", "runs", "master_seed"}},
    };
    return keys;
}

template <typename T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
    auto node = tree.get_child_optional(key);
    if (!node) return fallback;
    try {
        return node->get_value<T>();
    } catch (const pt::ptree_bad_data&) {
        throw std::invalid_argument(fmt::format("bad value '{}' for {}", node->data(), key));
    }
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(fmt::format("malformed config: {}", e.message()));
    }
    for (const auto& [section, body] : tree) {
        auto it = known_keys().find(section);
        if (it == known_keys().end()) {
            throw std::invalid_argument(fmt::format("unknown config section [{}]", section));
        }
        for (const auto& [key, value] : body) {
            if (!it->second.contains(key)) {
                throw std::invalid_argument(
                    fmt::format("unknown key '{}' in section [{}]", key, section));
            }
        }
    }

    // Start from the named presets, then apply explicit values.
    const auto scenario = get<std::string>(tree, "scenario.name", "movies");
    const auto setting = get<std::string>(tree, "setting.name", "su1");
    const auto profile = get<std::string>(tree, "profile.name", "mi");
    const auto protocol = get<std::string>(tree, "run.protocol", "eisp");

    ScenarioConfig cfg = preset(scenario, "su1", "mi", parse_policy(protocol));
    cfg.setting_name = setting;
    try {
        cfg.setting = setting_preset(setting);
    } catch (const std::invalid_argument&) {
        // Custom setting: parameters below start from su1.
    }
    try {
        cfg.profile = profile_preset(profile);
    } catch (const std::invalid_argument&) {
        cfg.profile.name = profile;
    }

    cfg.f_size = get(tree, "scenario.f_size", cfg.f_size);
    cfg.s_size = get(tree, "scenario.s_size", cfg.s_size);
    cfg.m = get(tree, "scenario.m", cfg.m);
    cfg.r_up = get(tree, "scenario.r_up", cfg.r_up);
    cfg.r_down = get(tree, "scenario.r_down", cfg.r_down);
    cfg.p_size = get(tree, "scenario.p_size", cfg.p_size);
    cfg.b_size = get(tree, "scenario.b_size", cfg.b_size);

    cfg.setting.x1 = get(tree, "setting.x1", cfg.setting.x1);
    cfg.setting.x2 = get(tree, "setting.x2", cfg.setting.x2);
    cfg.setting.k = get(tree, "setting.k", cfg.setting.k);
    cfg.setting.delta = get(tree, "setting.delta", cfg.setting.delta);

    cfg.profile.lambda = get(tree, "profile.lambda", cfg.profile.lambda);
    cfg.profile.l_play_fraction = get(tree, "profile.l_play", cfg.profile.l_play_fraction);
    cfg.profile.l_jump_fraction = get(tree, "profile.l_jump", cfg.profile.l_jump_fraction);
    for (int i = 0; i < 4; ++i) {
        cfg.profile.p[i] = get(tree, fmt::format("profile.p{}", i), cfg.profile.p[i]);
    }
    cfg.profile.playback = get(tree, "profile.playback", cfg.profile.playback);

    cfg.sim_time = get(tree, "run.sim_time", cfg.sim_time);
    cfg.runs = get(tree, "run.runs", cfg.runs);
    cfg.master_seed = get(tree, "run.master_seed", cfg.master_seed);

    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument(fmt::format("cannot open config '{}'", path));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string dump_config(const ScenarioConfig& cfg) {
    const auto geo = cfg.geometry();
    std::string out;
    out += "[scenario]\n";
    out += fmt::format("name = {}\n", to_string(cfg.f_type));
    out += fmt::format("f_size = {}\n", cfg.f_size);
    out += fmt::format("s_size = {}\n", cfg.s_size);
    out += fmt::format("m = {}\n", cfg.m);
    out += fmt::format("r_up = {}\n", cfg.r_up);
    out += fmt::format("r_down = {}\n", cfg.r_down);
    out += fmt::format("p_size = {}\n", cfg.p_size);
    out += fmt::format("b_size = {}\n", cfg.b_size);
    out += "\n[setting]\n";
    out += fmt::format("name = {}\n", cfg.setting_name);
    out += fmt::format("x1 = {}\n", cfg.setting.x1);
    out += fmt::format("x2 = {}\n", cfg.setting.x2);
    out += fmt::format("k = {}\n", cfg.setting.k);
    out += fmt::format("delta = {}\n", cfg.setting.delta);
    out += "\n[profile]\n";
    out += fmt::format("name = {}\n", cfg.profile.name);
    out += fmt::format("lambda = {}\n", cfg.profile.lambda);
    out += fmt::format("l_play = {}\n", cfg.profile.l_play_fraction);
    out += fmt::format("l_jump = {}\n", cfg.profile.l_jump_fraction);
    for (int i = 0; i < 4; ++i) out += fmt::format("p{} = {}\n", i, cfg.profile.p[i]);
    out += fmt::format("playback = {}\n", cfg.profile.playback ? "true" : "false");
    out += "\n[run]\n";
    out += fmt::format("protocol = {}\n", to_string(cfg.protocol));
    out += fmt::format("sim_time = {}\n", cfg.sim_time);
    out += fmt::format("runs = {}\n", cfg.runs);
    out += fmt::format("master_seed = {}\n", cfg.master_seed);
    out += "\n; derived\n";
    out += fmt::format("; t = {} pieces, {} blocks per piece\n", cfg.pieces(),
                       cfg.blocks_per_piece());
    out += fmt::format("; w = {}, v = {}, l_jump = {} pieces, l_pause = {} s\n", cfg.window(),
                       cfg.urgency(), geo.l_jump, geo.l_pause);
    out += fmt::format("; leechers = {}, piece play time = {} s\n", cfg.leechers(),
                       cfg.piece_play_seconds());
    return out;
}

}  // namespace vodswarm
