#ifndef CSMCOVER_GRID_HPP
#define CSMCOVER_GRID_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace csmcover {

/// The five development operations that span the pipeline grid, in digit
/// order of the base-3 index (most significant first).
enum class Parameter : std::uint8_t {
    Demosaicking = 0,
    Denoising = 1,
    SharpenMicro = 2,
    Downsampling = 3,
    PostResizeSharpening = 4,
};

inline constexpr std::size_t kParameterCount = 5;
inline constexpr int kLevelCount = 3;
inline constexpr int kGridSize = 243;  // 3^5

inline constexpr std::array<Parameter, kParameterCount> kAllParameters{
    Parameter::Demosaicking, Parameter::Denoising, Parameter::SharpenMicro,
    Parameter::Downsampling, Parameter::PostResizeSharpening};

/// snake_case key used in files ("sharpen_micro").
std::string_view parameter_key(Parameter p);
/// Display name ("SharpenMicro").
std::string_view parameter_name(Parameter p);
/// Accepts either the key or the display name.
std::optional<Parameter> parse_parameter(std::string_view text);

/// Ordinal level per parameter. 0 means off/minimum, 2 means maximum.
using Levels = std::array<int, kParameterCount>;

int encode(const Levels& levels);
Levels decode(int index);

struct PipelineDescriptor {
    int index = 0;
    Levels levels{};

    int level(Parameter p) const { return levels[static_cast<std::size_t>(p)]; }

    static PipelineDescriptor from_index(int index) { return {index, decode(index)}; }
    static PipelineDescriptor from_levels(const Levels& levels) { return {encode(levels), levels}; }

    bool operator==(const PipelineDescriptor&) const = default;
};

/// All 243 pipelines. `metadata` describes the fixed tail of every pipeline
/// and is not part of the directory file.
class PipelineDirectory {
public:
    PipelineDirectory(std::vector<PipelineDescriptor> entries, std::string metadata);

    const std::vector<PipelineDescriptor>& entries() const { return entries_; }
    const std::string& metadata() const { return metadata_; }
    std::size_t size() const { return entries_.size(); }

    /// Descriptor with the given index; throws ValidationError if absent.
    const PipelineDescriptor& at(int index) const;

    bool operator==(const PipelineDirectory& other) const { return entries_ == other.entries_; }

private:
    std::vector<PipelineDescriptor> entries_;  // sorted by index
    std::string metadata_;
};

inline constexpr std::string_view kDefaultDirectoryMetadata = "jpeg_quality_factor=98";

PipelineDirectory enumerate_grid();

/// A constraint fixing one parameter to one level, used to carve sub-grids.
struct ParameterPin {
    Parameter parameter;
    int level;
};

/// Parses "denoising=1".
ParameterPin parse_pin(std::string_view text);

/// Pipeline indices (ascending) that satisfy every pin.
std::vector<int> select_subgrid(const std::vector<ParameterPin>& pins);

std::string directory_to_json(const PipelineDirectory& dir);
PipelineDirectory directory_from_json(const std::string& text);

void save_directory(const PipelineDirectory& dir, const std::filesystem::path& path);
PipelineDirectory load_directory(const std::filesystem::path& path);

}  // namespace csmcover

#endif
