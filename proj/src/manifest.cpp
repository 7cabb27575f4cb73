#include "forge/manifest.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <random>
#include <tuple>

#include "forge/error.hpp"
#include "forge/layering.hpp"
#include "forge/random.hpp"

namespace forge {

int phase_of(int layer, Complexity tier) {
    if (layer < 1 || layer > kLayerCount) {
        throw ConfigError("layer " + std::to_string(layer) + " outside [1, 6]");
    }
    return 4 * (layer - 1) + tier_index(tier);
}

std::vector<ManifestEntry> build_manifest(const std::vector<Sample>& samples, int epochs_per_phase,
                                          std::uint64_t shuffle_seed) {
    if (epochs_per_phase < 1) {
        throw ConfigError("epochs per phase must be >= 1");
    }
    std::array<std::vector<const Sample*>, kPhaseCount> phases;
    for (const auto& s : samples) {
        if (!s.layer || !s.complexity) {
            throw UnlabeledSample("sample " + s.id + " (" + s.source_path + ") lacks " +
                                  (s.layer ? "a complexity tier" : "a layer"));
        }
        phases[static_cast<std::size_t>(phase_of(*s.layer, *s.complexity))].push_back(&s);
    }

    std::vector<ManifestEntry> entries;
    entries.reserve(samples.size());
    for (std::size_t phase = 0; phase < phases.size(); ++phase) {
        auto& members = phases[phase];
        std::sort(members.begin(), members.end(), [](const Sample* a, const Sample* b) {
            return std::tie(a->id, a->source_path) < std::tie(b->id, b->source_path);
        });
        std::mt19937_64 rng(derive_seed(shuffle_seed, phase));
        seeded_shuffle(std::span<const Sample*>(members), rng);
        for (const Sample* s : members) {
            entries.push_back({s->id, static_cast<int>(phase), entries.size(), layer_weight(*s->layer),
                               epochs_per_phase, s->description.value_or(""), s->code});
        }
    }
    return entries;
}

nlohmann::ordered_json to_json(const ManifestEntry& e) {
    return {{"sample_id", e.sample_id}, {"phase", e.phase},
            {"order", e.order},         {"loss_weight", e.loss_weight},
            {"epochs", e.epochs},       {"description", e.description},
            {"code", e.code}};
}

ManifestEntry manifest_entry_from_json(const nlohmann::json& j) {
    ManifestEntry e;
    e.sample_id = j.at("sample_id").get<std::string>();
    e.phase = j.at("phase").get<int>();
    e.order = j.at("order").get<std::size_t>();
    e.loss_weight = j.at("loss_weight").get<double>();
    e.epochs = j.at("epochs").get<int>();
    e.description = j.at("description").get<std::string>();
    e.code = j.at("code").get<std::string>();
    return e;
}

std::string render_manifest(const std::vector<ManifestEntry>& entries) {
    std::string out;
    for (const auto& e : entries) {
        out += to_json(e).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        out += '\n';
    }
    return out;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
    write_file_atomic(path, render_manifest(entries));
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ForgeError("cannot open " + path.string());
    }
    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        try {
            entries.push_back(manifest_entry_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return entries;
}

std::vector<Sample> corrupt_dataset(const std::vector<Sample>& samples, std::uint64_t seed) {
    if (samples.size() < 2) {
        throw ConfigError("corruption needs at least two samples to mismatch");
    }
    const auto code_from = random_derangement(samples.size(), derive_seed(seed, 0));
    const auto description_from = random_derangement(samples.size(), derive_seed(seed, 1));
    const auto rank_from = random_derangement(samples.size(), derive_seed(seed, 2));

    std::vector<Sample> out = samples;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].code = samples[code_from[i]].code;
        out[i].description = samples[description_from[i]].description;
        out[i].rank = samples[rank_from[i]].rank;
        if (out[i].rank && out[i].compile_status && out[i].compile_status != CompileStatus::SyntaxError) {
            out[i].layer = assign_layer(out[i]).layer;
        }
    }
    return out;
}

}  // namespace forge
