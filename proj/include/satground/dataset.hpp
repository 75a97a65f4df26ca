#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace satground::dataset {

// Axis-aligned extent in a local planar frame, meters.
struct GeoExtent {
    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;

    void validate() const;  // max > min on both axes
    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
};

enum class Split { Unassigned, Train, Test };
const char* split_name(Split s);

struct Tile {
    int row = 0;
    int col = 0;
    GeoExtent bounds;  // edge length = tile_size_m (may overhang the extent)
    Split split = Split::Unassigned;
};

inline constexpr std::array<const char*, 4> kViewLabels = {"LF", "LR", "RF", "RR"};

struct SampleRecord {
    std::string id;
    double lon = 0, lat = 0, elevation = 0;  // degrees, degrees, meters
    double heading_deg = 0;
    std::string pano_path;
    std::map<std::string, std::string> view_paths;  // keyed by LF/LR/RF/RR
    std::vector<std::string> satapp_paths;          // rendered satellite appearance
    std::vector<std::string> depth_paths;           // rendered depth
    int tile_row = -1, tile_col = -1;
};

struct Sequence {
    std::string id;
    std::vector<std::string> record_ids;
    std::vector<double> spacings_m;  // between consecutive members
};

struct DatasetManifest {
    double origin_lon = 0, origin_lat = 0;  // local planar projection origin
    GeoExtent extent;
    double tile_size_m = 600.0;
    std::vector<Tile> tiles;
    std::vector<SampleRecord> records;
    std::vector<Sequence> sequences;
};

// Local equirectangular projection about (origin_lon, origin_lat): meters
// east/north. Adequate at city scale.
std::array<double, 2> local_xy(double lon, double lat, double origin_lon, double origin_lat);

// Ceil-partition of the extent into tile_size_m cells anchored at
// (min_x, min_y); tiles ordered row-major.
std::vector<Tile> tile_extent(const GeoExtent& extent, double tile_size_m = 600.0);

// Seeded Fisher-Yates shuffle, then the first train_count tiles become train,
// the next test_count test, the remainder unassigned. Deterministic per seed.
void split_tiles(std::vector<Tile>& tiles, int train_count, int test_count, std::uint64_t seed);

// Greedy chaining along capture order: a sequence starts at each unconsumed
// record and extends while the gap to the next record lies in
// [min_gap_m, max_gap_m]; it is emitted once `length` records are chained.
// positions[i] is the planar location of records[i].
std::vector<Sequence> build_sequences(const std::vector<SampleRecord>& records,
                                      const std::vector<std::array<double, 2>>& positions,
                                      int length = 5, double min_gap_m = 3.0,
                                      double max_gap_m = 10.0);

// Drops sequences whose members do not all share the split of the first
// member's tile (train/test leakage guard).
std::vector<Sequence> drop_split_straddlers(const std::vector<Sequence>& sequences,
                                            const DatasetManifest& manifest);

// Tile index for a record position, or {-1, -1} outside the extent grid.
std::array<int, 2> tile_index_for(const DatasetManifest& manifest, double x, double y);

// Planar positions of all manifest records.
std::vector<std::array<double, 2>> record_positions(const DatasetManifest& manifest);

struct ManifestValidation {
    std::vector<std::string> warnings;

    bool ok() const { return warnings.empty(); }
};

// Line-oriented versioned text format; see the format notes in the README.
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

// Non-aborting semantic checks: referenced files exist (relative to base_dir),
// view labels are from the four-label set, tile indices and splits are
// consistent, sequences respect spacing bounds.
ManifestValidation validate_manifest(const DatasetManifest& manifest,
                                     const std::filesystem::path& base_dir);

}  // namespace satground::dataset
