#include <doctest.h>

#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "satground/dataset.hpp"
#include "satground/errors.hpp"
#include "satground/rng.hpp"

using namespace satground;
using namespace satground::dataset;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "satground_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void touch(const fs::path& p) {
    fs::create_directories(p.parent_path());
    std::ofstream(p) << "x";
}

DatasetManifest grid_manifest(double w, double h, double tile) {
    DatasetManifest m;
    m.extent = {0, 0, w, h};
    m.tile_size_m = tile;
    m.tiles = tile_extent(m.extent, tile);
    return m;
}

}  // namespace

TEST_CASE("square extent partitions into a row-major grid") {
    GeoExtent e{0, 0, 1800, 1800};
    auto tiles = tile_extent(e, 600.0);
    REQUIRE(tiles.size() == 9);
    for (int k = 0; k < 9; ++k) {
        CHECK(tiles[k].row == k / 3);
        CHECK(tiles[k].col == k % 3);
        CHECK(tiles[k].bounds.min_x == doctest::Approx(600.0 * (k % 3)));
        CHECK(tiles[k].bounds.min_y == doctest::Approx(600.0 * (k / 3)));
        CHECK(tiles[k].bounds.width() == doctest::Approx(600.0));
        CHECK(tiles[k].bounds.height() == doctest::Approx(600.0));
        CHECK(tiles[k].split == Split::Unassigned);
    }
}

TEST_CASE("partial tiles overhang the extent") {
    auto tiles = tile_extent(GeoExtent{0, 0, 1801, 600}, 600.0);
    REQUIRE(tiles.size() == 4);  // ceil(1801/600) x ceil(600/600)
    CHECK(tiles.back().row == 0);
    CHECK(tiles.back().col == 3);
    CHECK(tiles.back().bounds.max_x == doctest::Approx(2400.0));

    CHECK_THROWS_AS(tile_extent(GeoExtent{0, 0, 0, 100}, 600.0), UsageError);
    CHECK_THROWS_AS(tile_extent(GeoExtent{0, 0, 100, 100}, 0.0), UsageError);
}

TEST_CASE("every interior position maps to exactly one tile") {
    DatasetManifest m = grid_manifest(1801, 1150, 600);
    NormalRng rng(11);
    for (int i = 0; i < 300; ++i) {
        double x = rng.uniform() * 1801.0;
        double y = rng.uniform() * 1150.0;
        auto [row, col] = tile_index_for(m, x, y);
        REQUIRE(row >= 0);
        REQUIRE(col >= 0);
        const Tile& t = m.tiles[std::size_t(row) * 4 + col];
        CHECK(t.row == row);
        CHECK(t.col == col);
        CHECK(x >= t.bounds.min_x);
        CHECK(x <= t.bounds.max_x);
        CHECK(y >= t.bounds.min_y);
        CHECK(y <= t.bounds.max_y);
    }
    CHECK(tile_index_for(m, -0.001, 10) == std::array<int, 2>{-1, -1});
    CHECK(tile_index_for(m, 10, 1150.001) == std::array<int, 2>{-1, -1});
    // extent edges are inside; the far edges clamp to the last tile
    CHECK(tile_index_for(m, 1801, 1150) == std::array<int, 2>{1, 3});
    CHECK(tile_index_for(m, 0, 0) == std::array<int, 2>{0, 0});
}

TEST_CASE("tile split produces exact disjoint counts deterministically") {
    auto make_tiles = [] { return tile_extent(GeoExtent{0, 0, 5400, 6000}, 600.0); };
    auto tiles = make_tiles();
    REQUIRE(tiles.size() == 90);
    split_tiles(tiles, 70, 20, 42);

    int train = 0, test = 0, unassigned = 0;
    for (const auto& t : tiles) {
        if (t.split == Split::Train) ++train;
        if (t.split == Split::Test) ++test;
        if (t.split == Split::Unassigned) ++unassigned;
    }
    CHECK(train == 70);
    CHECK(test == 20);
    CHECK(unassigned == 0);

    auto again = make_tiles();
    split_tiles(again, 70, 20, 42);
    for (std::size_t i = 0; i < tiles.size(); ++i) CHECK(tiles[i].split == again[i].split);

    auto other = make_tiles();
    split_tiles(other, 70, 20, 43);
    int moved = 0;
    for (std::size_t i = 0; i < tiles.size(); ++i) moved += tiles[i].split != other[i].split;
    CHECK(moved > 0);

    CHECK_THROWS_AS(split_tiles(tiles, 95, 20, 1), UsageError);
    CHECK_THROWS_AS(split_tiles(tiles, -1, 20, 1), UsageError);
}

TEST_CASE("five evenly spaced records chain into one sequence") {
    std::vector<SampleRecord> recs(5);
    std::vector<std::array<double, 2>> pos;
    for (int i = 0; i < 5; ++i) {
        recs[i].id = "r" + std::to_string(i);
        pos.push_back({10.0 * i, 0.0});
    }
    auto seqs = build_sequences(recs, pos, 5, 3.0, 10.0);
    REQUIRE(seqs.size() == 1);
    CHECK(seqs[0].id == "seq0000");
    REQUIRE(seqs[0].record_ids.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(seqs[0].record_ids[i] == recs[i].id);
    REQUIRE(seqs[0].spacings_m.size() == 4);
    for (double s : seqs[0].spacings_m) CHECK(s == doctest::Approx(10.0).epsilon(1e-12));

    // 50 m gaps exceed the bound: no sequences at all
    std::vector<std::array<double, 2>> far;
    for (int i = 0; i < 5; ++i) far.push_back({50.0 * i, 0.0});
    CHECK(build_sequences(recs, far, 5, 3.0, 10.0).empty());

    CHECK_THROWS_AS(build_sequences(recs, pos, 1, 3.0, 10.0), UsageError);
    CHECK_THROWS_AS(build_sequences(recs, pos, 5, 12.0, 10.0), UsageError);
    pos.pop_back();
    CHECK_THROWS_AS(build_sequences(recs, pos, 5, 3.0, 10.0), ContractError);
}

TEST_CASE("gap bounds are inclusive") {
    std::vector<SampleRecord> recs(3);
    for (int i = 0; i < 3; ++i) recs[i].id = "r" + std::to_string(i);
    std::vector<std::array<double, 2>> pos{{0, 0}, {3, 0}, {13, 0}};  // gaps exactly 3 and 10
    auto seqs = build_sequences(recs, pos, 3, 3.0, 10.0);
    REQUIRE(seqs.size() == 1);
    CHECK(seqs[0].record_ids.size() == 3);
}

TEST_CASE("greedy chaining matches a reference enumeration on a mixed corpus") {
    // synthetic capture strip with gaps drawn from {2, 5, 8, 12} meters
    const int n = 100;
    std::vector<SampleRecord> recs(n);
    std::vector<std::array<double, 2>> pos(n);
    NormalRng rng(99);
    double x = 0.0;
    const double choices[4] = {2.0, 5.0, 8.0, 12.0};
    for (int i = 0; i < n; ++i) {
        recs[i].id = "r" + std::to_string(i);
        pos[i] = {x, 0.0};
        x += choices[rng.bounded(4)];
    }
    const int length = 5;
    const double lo = 3.0, hi = 10.0;
    auto seqs = build_sequences(recs, pos, length, lo, hi);

    // reference: walk capture order, count chainable gaps, consume on emit
    std::vector<std::vector<int>> want;
    int i = 0;
    while (i < n) {
        int j = i;
        while (j - i + 1 < length && j + 1 < n) {
            double g = pos[j + 1][0] - pos[j][0];
            if (g < lo || g > hi) break;
            ++j;
        }
        if (j - i + 1 == length) {
            std::vector<int> members;
            for (int k = i; k <= j; ++k) members.push_back(k);
            want.push_back(members);
            i = j + 1;
        } else {
            ++i;
        }
    }

    REQUIRE(seqs.size() == want.size());
    CHECK(!seqs.empty());
    for (std::size_t s = 0; s < seqs.size(); ++s) {
        REQUIRE(seqs[s].record_ids.size() == std::size_t(length));
        for (int k = 0; k < length; ++k)
            CHECK(seqs[s].record_ids[k] == recs[want[s][k]].id);
        for (int k = 0; k + 1 < length; ++k) {
            double g = pos[want[s][k + 1]][0] - pos[want[s][k]][0];
            CHECK(seqs[s].spacings_m[k] == doctest::Approx(g).epsilon(1e-12));
            CHECK(g >= lo);
            CHECK(g <= hi);
        }
    }
}

TEST_CASE("sequences that straddle splits are dropped") {
    DatasetManifest m = grid_manifest(1200, 600, 600);
    REQUIRE(m.tiles.size() == 2);
    m.tiles[0].split = Split::Train;
    m.tiles[1].split = Split::Test;

    SampleRecord a, b, c;
    a.id = "a";
    a.tile_row = 0;
    a.tile_col = 0;
    b.id = "b";
    b.tile_row = 0;
    b.tile_col = 0;
    c.id = "c";
    c.tile_row = 0;
    c.tile_col = 1;
    m.records = {a, b, c};

    Sequence inside;
    inside.id = "s0";
    inside.record_ids = {"a", "b"};
    Sequence crossing;
    crossing.id = "s1";
    crossing.record_ids = {"b", "c"};
    Sequence dangling;
    dangling.id = "s2";
    dangling.record_ids = {"a", "nope"};

    auto kept = drop_split_straddlers({inside, crossing, dangling}, m);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].id == "s0");
}

TEST_CASE("local planar projection matches the earth-radius closed form") {
    auto xy = local_xy(1.0, 0.0, 0.0, 0.0);
    CHECK(xy[0] == doctest::Approx(6378137.0 * M_PI / 180.0).epsilon(1e-12));
    CHECK(xy[1] == 0.0);

    auto ns = local_xy(0.0, 1.0, 0.0, 0.0);
    CHECK(ns[1] == doctest::Approx(6378137.0 * M_PI / 180.0).epsilon(1e-12));

    // east-west meters shrink with the cosine of the origin latitude
    auto high = local_xy(1.0, 60.0, 0.0, 60.0);
    CHECK(high[0] == doctest::Approx(xy[0] * std::cos(60.0 * M_PI / 180.0)).epsilon(1e-9));
}

TEST_CASE("manifest round trip preserves every field bit-exactly") {
    DatasetManifest m = grid_manifest(1800, 1800, 600);
    m.origin_lon = -122.41941529999999;
    m.origin_lat = 37.774929500000003;
    split_tiles(m.tiles, 5, 4, 7);

    SampleRecord rec;
    rec.id = "pano_000123";
    rec.lon = -122.41940000000001;
    rec.lat = 37.774899999999988;
    rec.elevation = 12.625;
    rec.heading_deg = 271.34999999999991;
    rec.pano_path = "panos/with spaces/pano 000123.ppm";
    rec.view_paths["LF"] = "views/lf.ppm";
    rec.view_paths["LR"] = "views/lr.ppm";
    rec.view_paths["RF"] = "views/rf.ppm";
    rec.view_paths["RR"] = "views/rr.ppm";
    rec.satapp_paths = {"satapp/a.ppm", "satapp/b.ppm"};
    rec.depth_paths = {"depth/a.pfm"};
    rec.tile_row = 1;
    rec.tile_col = 2;
    SampleRecord bare;
    bare.id = "pano_000124";
    bare.lon = 0.1;
    bare.lat = 0.2;
    m.records = {rec, bare};

    Sequence seq;
    seq.id = "seq0000";
    seq.record_ids = {"pano_000123", "pano_000124"};
    seq.spacings_m = {5.1249999999999902};
    m.sequences = {seq};

    fs::path dir = temp_dir("manifest_roundtrip");
    fs::path path = dir / "manifest.txt";
    write_manifest(m, path);
    DatasetManifest back = read_manifest(path);

    CHECK(back.origin_lon == m.origin_lon);
    CHECK(back.origin_lat == m.origin_lat);
    CHECK(back.extent.min_x == m.extent.min_x);
    CHECK(back.extent.max_y == m.extent.max_y);
    CHECK(back.tile_size_m == m.tile_size_m);
    REQUIRE(back.tiles.size() == m.tiles.size());
    for (std::size_t i = 0; i < m.tiles.size(); ++i) {
        CHECK(back.tiles[i].row == m.tiles[i].row);
        CHECK(back.tiles[i].col == m.tiles[i].col);
        CHECK(back.tiles[i].split == m.tiles[i].split);
    }
    REQUIRE(back.records.size() == 2);
    const SampleRecord& r = back.records[0];
    CHECK(r.id == rec.id);
    CHECK(r.lon == rec.lon);
    CHECK(r.lat == rec.lat);
    CHECK(r.elevation == rec.elevation);
    CHECK(r.heading_deg == rec.heading_deg);
    CHECK(r.pano_path == rec.pano_path);
    CHECK(r.view_paths == rec.view_paths);
    CHECK(r.satapp_paths == rec.satapp_paths);
    CHECK(r.depth_paths == rec.depth_paths);
    CHECK(r.tile_row == 1);
    CHECK(r.tile_col == 2);
    CHECK(back.records[1].pano_path.empty());
    REQUIRE(back.sequences.size() == 1);
    CHECK(back.sequences[0].id == seq.id);
    CHECK(back.sequences[0].record_ids == seq.record_ids);
    CHECK(back.sequences[0].spacings_m == seq.spacings_m);

    // writing again from the parsed struct reproduces the file byte for byte
    fs::path path2 = dir / "manifest2.txt";
    write_manifest(back, path2);
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
}

TEST_CASE("manifest ids must be whitespace-free tokens") {
    DatasetManifest m = grid_manifest(600, 600, 600);
    SampleRecord rec;
    rec.id = "bad id";
    m.records = {rec};
    fs::path path = temp_dir("manifest_badid") / "manifest.txt";
    CHECK_THROWS_AS(write_manifest(m, path), ValidationError);
}

TEST_CASE("malformed manifests report the file and line") {
    fs::path dir = temp_dir("manifest_malformed");

    auto write_text = [&](const std::string& name, const std::string& text) {
        fs::path p = dir / name;
        std::ofstream(p, std::ios::binary) << text;
        return p;
    };

    fs::path bad_header = write_text("h.txt", "not a manifest\n");
    CHECK_THROWS_WITH_AS(read_manifest(bad_header),
                         doctest::Contains(":1: expected header"), IoError);

    fs::path bad_number =
        write_text("n.txt", "satground-manifest v1\norigin 0 0\ntile_size abc\n");
    CHECK_THROWS_WITH_AS(read_manifest(bad_number), doctest::Contains(":3:"), IoError);

    fs::path bad_key = write_text("k.txt", "satground-manifest v1\nbogus 1 2\n");
    CHECK_THROWS_WITH_AS(read_manifest(bad_key), doctest::Contains("unknown directive"), IoError);

    fs::path no_end = write_text("e.txt", "satground-manifest v1\nrecord r0\npos 0 0 0\n");
    CHECK_THROWS_WITH_AS(read_manifest(no_end), doctest::Contains("missing 'end'"), IoError);

    CHECK_THROWS_AS(read_manifest(dir / "does_not_exist.txt"), IoError);
}

TEST_CASE("validation flags missing files, bad labels and leakage") {
    fs::path dir = temp_dir("manifest_validate");
    DatasetManifest m = grid_manifest(1200, 600, 600);
    m.tiles[0].split = Split::Train;
    m.tiles[1].split = Split::Test;

    SampleRecord good;
    good.id = "g";
    good.tile_row = 0;
    good.tile_col = 0;
    good.pano_path = "panos/g.ppm";
    good.view_paths["LF"] = "views/g_lf.ppm";
    touch(dir / good.pano_path);
    touch(dir / good.view_paths["LF"]);

    SampleRecord bad;
    bad.id = "b";
    bad.tile_row = 0;
    bad.tile_col = 1;
    bad.pano_path = "panos/missing.ppm";
    bad.view_paths["XX"] = "views/g_lf.ppm";
    m.records = {good, bad};

    Sequence straddle;
    straddle.id = "s0";
    straddle.record_ids = {"g", "b"};
    straddle.spacings_m = {5.0};
    m.sequences = {straddle};

    ManifestValidation v = validate_manifest(m, dir);
    CHECK(!v.ok());
    bool missing_named = false, label_named = false, straddle_named = false;
    for (const auto& w : v.warnings) {
        missing_named = missing_named || w.find("b panorama missing") != std::string::npos;
        label_named = label_named || w.find("unknown view label XX") != std::string::npos;
        straddle_named = straddle_named || w.find("straddles") != std::string::npos;
    }
    CHECK(missing_named);
    CHECK(label_named);
    CHECK(straddle_named);

    // the clean record alone validates without warnings
    DatasetManifest clean = grid_manifest(1200, 600, 600);
    clean.records = {good};
    ManifestValidation cv = validate_manifest(clean, dir);
    CHECK(cv.ok());
}

TEST_CASE("ten thousand records survive a round trip quickly") {
    DatasetManifest m = grid_manifest(1800, 1800, 600);
    m.records.resize(10000);
    for (int i = 0; i < 10000; ++i) {
        SampleRecord& r = m.records[i];
        r.id = "rec" + std::to_string(i);
        r.lon = -122.0 + i * 1e-6;
        r.lat = 37.0 + i * 1e-6;
        r.elevation = i * 0.01;
        r.heading_deg = double(i % 360);
        r.pano_path = "panos/" + r.id + ".ppm";
        r.tile_row = 0;
        r.tile_col = 0;
    }
    fs::path path = temp_dir("manifest_bulk") / "manifest.txt";

    auto t0 = std::chrono::steady_clock::now();
    write_manifest(m, path);
    DatasetManifest back = read_manifest(path);
    auto t1 = std::chrono::steady_clock::now();

    REQUIRE(back.records.size() == 10000);
    CHECK(back.records[9999].lon == m.records[9999].lon);
    CHECK(back.records[9999].pano_path == m.records[9999].pano_path);
    double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    CHECK(ms < 1000.0);
}
