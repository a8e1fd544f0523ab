#include "csmcover/grid.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csmcover/errors.hpp"
#include "csmcover/util.hpp"

namespace csmcover {

namespace {

constexpr std::array<std::string_view, kParameterCount> kKeys{
    "demosaicking", "denoising", "sharpen_micro", "downsampling", "post_resize_sharpening"};
constexpr std::array<std::string_view, kParameterCount> kNames{
    "Demosaicking", "Denoising", "SharpenMicro", "Downsampling", "PostResizeSharpening"};

}  // namespace

std::string_view parameter_key(Parameter p) { return kKeys[static_cast<std::size_t>(p)]; }
std::string_view parameter_name(Parameter p) { return kNames[static_cast<std::size_t>(p)]; }

std::optional<Parameter> parse_parameter(std::string_view text) {
    for (std::size_t k = 0; k < kParameterCount; ++k) {
        if (text == kKeys[k] || text == kNames[k]) return static_cast<Parameter>(k);
    }
    return std::nullopt;
}

int encode(const Levels& levels) {
    int index = 0;
    for (std::size_t k = 0; k < kParameterCount; ++k) {
        if (levels[k] < 0 || levels[k] >= kLevelCount) {
            throw ValidationError("level " + std::to_string(levels[k]) + " for parameter " +
                                  std::string(kNames[k]) + " is outside {0,1,2}");
        }
        index = index * kLevelCount + levels[k];
    }
    return index;
}

Levels decode(int index) {
    if (index < 0 || index >= kGridSize) {
        throw ValidationError("pipeline index " + std::to_string(index) + " is outside 0..242");
    }
    Levels levels{};
    for (std::size_t k = kParameterCount; k-- > 0;) {
        levels[k] = index % kLevelCount;
        index /= kLevelCount;
    }
    return levels;
}

PipelineDirectory::PipelineDirectory(std::vector<PipelineDescriptor> entries, std::string metadata)
    : entries_(std::move(entries)), metadata_(std::move(metadata)) {
    if (entries_.size() != static_cast<std::size_t>(kGridSize)) {
        throw ValidationError("pipeline directory must hold 243 entries, got " +
                              std::to_string(entries_.size()));
    }
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return a.index < b.index; });
    for (int i = 0; i < kGridSize; ++i) {
        const auto& e = entries_[static_cast<std::size_t>(i)];
        if (e.index != i) {
            throw ValidationError("pipeline directory indices are not a permutation of 0..242 (missing " +
                                  std::to_string(i) + ")");
        }
        if (encode(e.levels) != e.index) {
            throw ValidationError("pipeline " + std::to_string(e.index) +
                                  " has levels inconsistent with its index");
        }
    }
}

const PipelineDescriptor& PipelineDirectory::at(int index) const {
    if (index < 0 || index >= kGridSize) {
        throw ValidationError("pipeline " + std::to_string(index) + " is not in the directory");
    }
    return entries_[static_cast<std::size_t>(index)];
}

PipelineDirectory enumerate_grid() {
    std::vector<PipelineDescriptor> entries;
    entries.reserve(kGridSize);
    for (int i = 0; i < kGridSize; ++i) entries.push_back(PipelineDescriptor::from_index(i));
    return PipelineDirectory(std::move(entries), std::string(kDefaultDirectoryMetadata));
}

ParameterPin parse_pin(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
        throw ValidationError("pin '" + std::string(text) + "' must look like parameter=level");
    }
    const auto name = text.substr(0, eq);
    const auto value = text.substr(eq + 1);
    const auto param = parse_parameter(name);
    if (!param) throw ValidationError("unknown pipeline parameter '" + std::string(name) + "'");
    int level = -1;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), level);
    if (ec != std::errc{} || ptr != value.data() + value.size() || level < 0 || level >= kLevelCount) {
        throw ValidationError("level for " + std::string(name) + " must be 0, 1 or 2");
    }
    return {*param, level};
}

std::vector<int> select_subgrid(const std::vector<ParameterPin>& pins) {
    std::vector<int> out;
    for (int i = 0; i < kGridSize; ++i) {
        const auto d = PipelineDescriptor::from_index(i);
        const bool keep = std::all_of(pins.begin(), pins.end(),
                                      [&](const ParameterPin& p) { return d.level(p.parameter) == p.level; });
        if (keep) out.push_back(i);
    }
    return out;
}

std::string directory_to_json(const PipelineDirectory& dir) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& e : dir.entries()) {
        nlohmann::ordered_json levels;
        for (std::size_t k = 0; k < kParameterCount; ++k) levels[std::string(kKeys[k])] = e.levels[k];
        nlohmann::ordered_json item;
        item["index"] = e.index;
        item["levels"] = std::move(levels);
        arr.push_back(std::move(item));
    }
    return arr.dump(2) + "\n";
}

PipelineDirectory directory_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("pipeline directory is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw ValidationError("pipeline directory must be a JSON array");
    std::vector<PipelineDescriptor> entries;
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("index") || !item.contains("levels")) {
            throw ValidationError("pipeline directory entry needs 'index' and 'levels'");
        }
        Levels levels{};
        for (std::size_t k = 0; k < kParameterCount; ++k) {
            const auto key = std::string(kKeys[k]);
            if (!item["levels"].contains(key) || !item["levels"][key].is_number_integer()) {
                throw ValidationError("pipeline directory entry lacks integer level '" + key + "'");
            }
            levels[k] = item["levels"][key].get<int>();
        }
        const int index = item["index"].get<int>();
        if (encode(levels) != index) {
            throw ValidationError("pipeline " + std::to_string(index) + " levels do not encode to its index");
        }
        entries.push_back({index, levels});
    }
    std::vector<bool> seen(kGridSize, false);
    for (const auto& e : entries) {
        if (seen[static_cast<std::size_t>(e.index)]) {
            throw ValidationError("pipeline " + std::to_string(e.index) + " appears twice in the directory");
        }
        seen[static_cast<std::size_t>(e.index)] = true;
    }
    return PipelineDirectory(std::move(entries), std::string(kDefaultDirectoryMetadata));
}

void save_directory(const PipelineDirectory& dir, const std::filesystem::path& path) {
    write_text_file(path, directory_to_json(dir));
}

PipelineDirectory load_directory(const std::filesystem::path& path) {
    return directory_from_json(read_text_file(path));
}

}  // namespace csmcover
