#include "satground/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "satground/errors.hpp"
#include "satground/math3d.hpp"
#include "satground/rng.hpp"

namespace satground::dataset {

namespace {

constexpr double kEarthRadiusM = 6378137.0;

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool has_whitespace(const std::string& s) {
    return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

void require_token(const std::string& s, const char* what) {
    if (s.empty() || has_whitespace(s))
        throw ValidationError(std::string(what) + " must be a non-empty whitespace-free token: '" +
                              s + "'");
}

struct LineReader {
    std::istream& in;
    std::string path;
    int line_no = 0;
    std::string line;

    bool next() {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw IoError(path + ":" + std::to_string(line_no) + ": " + msg);
    }
};

std::vector<std::string> tokenize(const std::string& s) {
    std::istringstream iss(s);
    std::vector<std::string> out;
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

double parse_double(const LineReader& r, const std::string& tok) {
    try {
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        r.fail("expected a number, got '" + tok + "'");
    }
}

int parse_int(const LineReader& r, const std::string& tok) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        r.fail("expected an integer, got '" + tok + "'");
    }
}

// Remainder of the line after `n_skip` whitespace-separated tokens.
std::string rest_after(const LineReader& r, int n_skip) {
    std::size_t i = 0;
    for (int t = 0; t < n_skip; ++t) {
        while (i < r.line.size() && std::isspace((unsigned char)r.line[i])) ++i;
        while (i < r.line.size() && !std::isspace((unsigned char)r.line[i])) ++i;
    }
    while (i < r.line.size() && std::isspace((unsigned char)r.line[i])) ++i;
    if (i >= r.line.size()) r.fail("missing path field");
    return r.line.substr(i);
}

int grid_cols(const DatasetManifest& m) {
    return int(std::ceil(m.extent.width() / m.tile_size_m));
}
int grid_rows(const DatasetManifest& m) {
    return int(std::ceil(m.extent.height() / m.tile_size_m));
}

}  // namespace

void GeoExtent::validate() const {
    if (!(max_x > min_x && max_y > min_y))
        throw UsageError("degenerate extent: max must exceed min on both axes");
}

const char* split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Test: return "test";
        default: return "unassigned";
    }
}

std::array<double, 2> local_xy(double lon, double lat, double origin_lon, double origin_lat) {
    double x = kEarthRadiusM * deg2rad(lon - origin_lon) * std::cos(deg2rad(origin_lat));
    double y = kEarthRadiusM * deg2rad(lat - origin_lat);
    return {x, y};
}

std::vector<Tile> tile_extent(const GeoExtent& extent, double tile_size_m) {
    extent.validate();
    if (!(tile_size_m > 0.0)) throw UsageError("tile_size_m must be positive");
    const int cols = int(std::ceil(extent.width() / tile_size_m));
    const int rows = int(std::ceil(extent.height() / tile_size_m));
    std::vector<Tile> tiles;
    tiles.reserve(std::size_t(rows) * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            Tile t;
            t.row = r;
            t.col = c;
            t.bounds = {extent.min_x + c * tile_size_m, extent.min_y + r * tile_size_m,
                        extent.min_x + (c + 1) * tile_size_m, extent.min_y + (r + 1) * tile_size_m};
            tiles.push_back(t);
        }
    return tiles;
}

void split_tiles(std::vector<Tile>& tiles, int train_count, int test_count, std::uint64_t seed) {
    if (train_count < 0 || test_count < 0) throw UsageError("split counts must be non-negative");
    if (std::size_t(train_count) + std::size_t(test_count) > tiles.size())
        throw UsageError("train + test counts exceed tile count");
    std::vector<std::size_t> order(tiles.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    NormalRng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i)  // Fisher-Yates
        std::swap(order[i - 1], order[rng.bounded(i)]);
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (k < std::size_t(train_count))
            tiles[order[k]].split = Split::Train;
        else if (k < std::size_t(train_count) + std::size_t(test_count))
            tiles[order[k]].split = Split::Test;
        else
            tiles[order[k]].split = Split::Unassigned;
    }
}

std::vector<Sequence> build_sequences(const std::vector<SampleRecord>& records,
                                      const std::vector<std::array<double, 2>>& positions,
                                      int length, double min_gap_m, double max_gap_m) {
    if (records.size() != positions.size())
        throw ContractError("build_sequences requires one position per record");
    if (length < 2) throw UsageError("sequence length must be >= 2");
    if (!(min_gap_m >= 0.0 && min_gap_m <= max_gap_m))
        throw UsageError("require 0 <= min_gap_m <= max_gap_m");

    auto gap = [&](std::size_t a, std::size_t b) {
        double dx = positions[b][0] - positions[a][0];
        double dy = positions[b][1] - positions[a][1];
        return std::hypot(dx, dy);
    };

    std::vector<Sequence> out;
    std::size_t i = 0;
    while (i < records.size()) {
        std::size_t j = i;
        while (int(j - i + 1) < length && j + 1 < records.size()) {
            double g = gap(j, j + 1);
            if (g < min_gap_m || g > max_gap_m) break;
            ++j;
        }
        if (int(j - i + 1) == length) {
            Sequence s;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "seq%04zu", out.size());
            s.id = buf;
            for (std::size_t k = i; k <= j; ++k) {
                s.record_ids.push_back(records[k].id);
                if (k > i) s.spacings_m.push_back(gap(k - 1, k));
            }
            out.push_back(std::move(s));
            i = j + 1;  // members are consumed only when a sequence is emitted
        } else {
            ++i;
        }
    }
    return out;
}

std::vector<Sequence> drop_split_straddlers(const std::vector<Sequence>& sequences,
                                            const DatasetManifest& manifest) {
    std::map<std::string, std::array<int, 2>> record_tile;
    for (const auto& rec : manifest.records) record_tile[rec.id] = {rec.tile_row, rec.tile_col};
    std::map<std::pair<int, int>, Split> tile_split;
    for (const auto& t : manifest.tiles) tile_split[{t.row, t.col}] = t.split;

    auto split_of = [&](const std::string& rec_id, Split& out) {
        auto rit = record_tile.find(rec_id);
        if (rit == record_tile.end()) return false;
        auto tit = tile_split.find({rit->second[0], rit->second[1]});
        if (tit == tile_split.end()) return false;
        out = tit->second;
        return true;
    };

    std::vector<Sequence> kept;
    for (const auto& seq : sequences) {
        bool ok = !seq.record_ids.empty();
        Split first = Split::Unassigned;
        for (std::size_t k = 0; ok && k < seq.record_ids.size(); ++k) {
            Split s;
            if (!split_of(seq.record_ids[k], s)) {
                ok = false;
                break;
            }
            if (k == 0)
                first = s;
            else
                ok = s == first;
        }
        if (ok) kept.push_back(seq);
    }
    return kept;
}

std::array<int, 2> tile_index_for(const DatasetManifest& manifest, double x, double y) {
    const GeoExtent& e = manifest.extent;
    if (x < e.min_x || x > e.max_x || y < e.min_y || y > e.max_y) return {-1, -1};
    int col = std::min(int((x - e.min_x) / manifest.tile_size_m), grid_cols(manifest) - 1);
    int row = std::min(int((y - e.min_y) / manifest.tile_size_m), grid_rows(manifest) - 1);
    return {row, col};
}

std::vector<std::array<double, 2>> record_positions(const DatasetManifest& manifest) {
    std::vector<std::array<double, 2>> out;
    out.reserve(manifest.records.size());
    for (const auto& rec : manifest.records)
        out.push_back(local_xy(rec.lon, rec.lat, manifest.origin_lon, manifest.origin_lat));
    return out;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary: stable newlines across platforms
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "satground-manifest v1\n";
    out << "origin " << fmt_double(manifest.origin_lon) << " " << fmt_double(manifest.origin_lat)
        << "\n";
    out << "extent " << fmt_double(manifest.extent.min_x) << " " << fmt_double(manifest.extent.min_y)
        << " " << fmt_double(manifest.extent.max_x) << " " << fmt_double(manifest.extent.max_y)
        << "\n";
    out << "tile_size " << fmt_double(manifest.tile_size_m) << "\n";
    for (const auto& t : manifest.tiles)
        out << "tile " << t.row << " " << t.col << " " << split_name(t.split) << "\n";
    for (const auto& rec : manifest.records) {
        require_token(rec.id, "record id");
        out << "record " << rec.id << "\n";
        out << "pos " << fmt_double(rec.lon) << " " << fmt_double(rec.lat) << " "
            << fmt_double(rec.elevation) << "\n";
        out << "heading " << fmt_double(rec.heading_deg) << "\n";
        out << "tile " << rec.tile_row << " " << rec.tile_col << "\n";
        if (!rec.pano_path.empty()) out << "pano " << rec.pano_path << "\n";
        for (const auto& [label, p] : rec.view_paths) {
            require_token(label, "view label");
            out << "view " << label << " " << p << "\n";
        }
        for (const auto& p : rec.satapp_paths) out << "satapp " << p << "\n";
        for (const auto& p : rec.depth_paths) out << "depth " << p << "\n";
        out << "end\n";
    }
    for (const auto& seq : manifest.sequences) {
        require_token(seq.id, "sequence id");
        out << "sequence " << seq.id << "\n";
        out << "members";
        for (const auto& id : seq.record_ids) {
            require_token(id, "sequence member id");
            out << " " << id;
        }
        out << "\n";
        out << "spacings";
        for (double s : seq.spacings_m) out << " " << fmt_double(s);
        out << "\n";
        out << "end\n";
    }
    if (!out) throw IoError("failed writing " + path.string());
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    LineReader r{in, path.string()};
    if (!r.next() || r.line != "satground-manifest v1")
        r.fail("expected header 'satground-manifest v1'");

    DatasetManifest m;
    m.tile_size_m = 0.0;
    while (r.next()) {
        auto toks = tokenize(r.line);
        const std::string& key = toks[0];
        if (key == "origin") {
            if (toks.size() != 3) r.fail("origin expects 2 fields");
            m.origin_lon = parse_double(r, toks[1]);
            m.origin_lat = parse_double(r, toks[2]);
        } else if (key == "extent") {
            if (toks.size() != 5) r.fail("extent expects 4 fields");
            m.extent = {parse_double(r, toks[1]), parse_double(r, toks[2]),
                        parse_double(r, toks[3]), parse_double(r, toks[4])};
        } else if (key == "tile_size") {
            if (toks.size() != 2) r.fail("tile_size expects 1 field");
            m.tile_size_m = parse_double(r, toks[1]);
        } else if (key == "tile") {
            if (toks.size() != 4) r.fail("tile expects 3 fields");
            Tile t;
            t.row = parse_int(r, toks[1]);
            t.col = parse_int(r, toks[2]);
            if (toks[3] == "train")
                t.split = Split::Train;
            else if (toks[3] == "test")
                t.split = Split::Test;
            else if (toks[3] == "unassigned")
                t.split = Split::Unassigned;
            else
                r.fail("unknown split '" + toks[3] + "'");
            t.bounds = {m.extent.min_x + t.col * m.tile_size_m, m.extent.min_y + t.row * m.tile_size_m,
                        m.extent.min_x + (t.col + 1) * m.tile_size_m,
                        m.extent.min_y + (t.row + 1) * m.tile_size_m};
            m.tiles.push_back(t);
        } else if (key == "record") {
            if (toks.size() != 2) r.fail("record expects an id");
            SampleRecord rec;
            rec.id = toks[1];
            while (r.next() && r.line != "end") {
                auto f = tokenize(r.line);
                const std::string& fk = f[0];
                if (fk == "pos") {
                    if (f.size() != 4) r.fail("pos expects 3 fields");
                    rec.lon = parse_double(r, f[1]);
                    rec.lat = parse_double(r, f[2]);
                    rec.elevation = parse_double(r, f[3]);
                } else if (fk == "heading") {
                    if (f.size() != 2) r.fail("heading expects 1 field");
                    rec.heading_deg = parse_double(r, f[1]);
                } else if (fk == "tile") {
                    if (f.size() != 3) r.fail("record tile expects 2 fields");
                    rec.tile_row = parse_int(r, f[1]);
                    rec.tile_col = parse_int(r, f[2]);
                } else if (fk == "pano") {
                    rec.pano_path = rest_after(r, 1);
                } else if (fk == "view") {
                    if (f.size() < 3) r.fail("view expects a label and a path");
                    rec.view_paths[f[1]] = rest_after(r, 2);
                } else if (fk == "satapp") {
                    rec.satapp_paths.push_back(rest_after(r, 1));
                } else if (fk == "depth") {
                    rec.depth_paths.push_back(rest_after(r, 1));
                } else {
                    r.fail("unknown record field '" + fk + "'");
                }
            }
            if (r.line != "end") r.fail("record block missing 'end'");
            m.records.push_back(std::move(rec));
        } else if (key == "sequence") {
            if (toks.size() != 2) r.fail("sequence expects an id");
            Sequence seq;
            seq.id = toks[1];
            while (r.next() && r.line != "end") {
                auto f = tokenize(r.line);
                if (f[0] == "members") {
                    seq.record_ids.assign(f.begin() + 1, f.end());
                } else if (f[0] == "spacings") {
                    for (std::size_t k = 1; k < f.size(); ++k)
                        seq.spacings_m.push_back(parse_double(r, f[k]));
                } else {
                    r.fail("unknown sequence field '" + f[0] + "'");
                }
            }
            if (r.line != "end") r.fail("sequence block missing 'end'");
            m.sequences.push_back(std::move(seq));
        } else {
            r.fail("unknown directive '" + key + "'");
        }
    }
    return m;
}

ManifestValidation validate_manifest(const DatasetManifest& manifest,
                                     const std::filesystem::path& base_dir) {
    ManifestValidation v;
    auto warn = [&](const std::string& msg) { v.warnings.push_back(msg); };

    if (!(manifest.extent.max_x > manifest.extent.min_x &&
          manifest.extent.max_y > manifest.extent.min_y))
        warn("extent is degenerate");
    if (!(manifest.tile_size_m > 0.0)) {
        warn("tile_size_m must be positive");
        return v;
    }

    std::map<std::pair<int, int>, Split> tile_split;
    for (const auto& t : manifest.tiles) {
        if (!tile_split.emplace(std::pair{t.row, t.col}, t.split).second)
            warn("duplicate tile (" + std::to_string(t.row) + ", " + std::to_string(t.col) + ")");
        if (std::abs(t.bounds.width() - manifest.tile_size_m) > 1e-6 ||
            std::abs(t.bounds.height() - manifest.tile_size_m) > 1e-6)
            warn("tile (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                 ") bounds do not match tile_size_m");
    }

    auto check_file = [&](const std::string& rel, const std::string& what) {
        if (rel.empty()) return;
        if (!std::filesystem::exists(base_dir / rel)) warn(what + " missing: " + rel);
    };

    std::map<std::string, const SampleRecord*> by_id;
    for (const auto& rec : manifest.records) {
        if (!by_id.emplace(rec.id, &rec).second) warn("duplicate record id " + rec.id);
        for (const auto& [label, p] : rec.view_paths) {
            if (std::find(kViewLabels.begin(), kViewLabels.end(), std::string(label)) ==
                kViewLabels.end())
                warn("record " + rec.id + " uses unknown view label " + label);
            check_file(p, "record " + rec.id + " view " + label);
        }
        check_file(rec.pano_path, "record " + rec.id + " panorama");
        for (const auto& p : rec.satapp_paths) check_file(p, "record " + rec.id + " satapp");
        for (const auto& p : rec.depth_paths) check_file(p, "record " + rec.id + " depth");
        if (rec.tile_row >= 0 || rec.tile_col >= 0) {
            if (!tile_split.count({rec.tile_row, rec.tile_col}))
                warn("record " + rec.id + " references unknown tile (" +
                     std::to_string(rec.tile_row) + ", " + std::to_string(rec.tile_col) + ")");
        }
    }

    for (const auto& seq : manifest.sequences) {
        if (seq.record_ids.size() < 2) {
            warn("sequence " + seq.id + " has fewer than 2 members");
            continue;
        }
        if (seq.spacings_m.size() + 1 != seq.record_ids.size())
            warn("sequence " + seq.id + " spacing count does not match member count");
        for (double s : seq.spacings_m)
            if (!(s > 0.0)) warn("sequence " + seq.id + " has a non-positive spacing");
        Split first = Split::Unassigned;
        bool have_first = false;
        for (const auto& id : seq.record_ids) {
            auto it = by_id.find(id);
            if (it == by_id.end()) {
                warn("sequence " + seq.id + " references unknown record " + id);
                continue;
            }
            auto ts = tile_split.find({it->second->tile_row, it->second->tile_col});
            if (ts == tile_split.end()) continue;
            if (!have_first) {
                first = ts->second;
                have_first = true;
            } else if (ts->second != first) {
                warn("sequence " + seq.id + " straddles train/test tiles");
                break;
            }
        }
    }
    return v;
}

}  // namespace satground::dataset
