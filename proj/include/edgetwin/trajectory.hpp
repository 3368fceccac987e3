#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "edgetwin/errors.hpp"
#include "edgetwin/types.hpp"

namespace edgetwin {

struct TrajectorySample {
    double t_s = 0.0;  // epoch seconds
    double lon = 0.0;
    double lat = 0.0;
};

struct Trajectory {
    std::string user_id;                     // taxi id from the file
    std::vector<TrajectorySample> samples;   // strictly increasing timestamps
    std::vector<Position> positions;         // mapped + resampled, one per slot
};

struct TrajectorySet {
    std::vector<Trajectory> trajectories;
    int malformed_rows = 0;       // unparseable lines, skipped
    int non_monotonic_rows = 0;   // duplicate or backwards timestamps, dropped
};

namespace detail {

// Hinnant's days-from-civil; we only need differences, but exact epoch math
// keeps midnight-crossing fixtures honest.
inline std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1u;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline bool parse_datetime(const std::string& text, double& epoch_s) {
    int y, mo, d, h, mi, s;
    if (std::sscanf(text.c_str(), "%d-%d-%d %d:%d:%d", &y, &mo, &d, &h, &mi, &s) != 6)
        return false;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 ||
        s < 0 || s > 60)
        return false;
    epoch_s = static_cast<double>(days_from_civil(y, mo, d)) * 86400.0 + h * 3600.0 +
              mi * 60.0 + s;
    return true;
}

inline bool parse_double(const std::string& text, double& value) {
    try {
        std::size_t used = 0;
        value = std::stod(text, &used);
        // allow trailing whitespace only
        for (std::size_t i = used; i < text.size(); ++i)
            if (!std::isspace(static_cast<unsigned char>(text[i]))) return false;
        return std::isfinite(value);
    } catch (...) {
        return false;
    }
}

}  // namespace detail

// T-Drive release format: "taxi_id,datetime,longitude,latitude" per line.
// The lon/lat bounding box of all usable samples is affinely mapped onto the
// [0, side] x [0, side] square, then each trajectory is resampled onto its
// own slot grid by linear interpolation.
inline TrajectorySet load_tdrive(const std::string& path, double area_side_km,
                                 double slot_s) {
    if (!(area_side_km > 0.0)) throw ConfigError("load_tdrive: area side must be > 0");
    if (!(slot_s > 0.0)) throw ConfigError("load_tdrive: slot must be > 0");
    std::ifstream in(path);
    if (!in) throw DataError("load_tdrive: cannot open: " + path);

    TrajectorySet set;
    std::map<std::string, std::size_t> index;  // taxi id -> trajectory slot
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string id, when, lon_text, lat_text;
        if (!std::getline(row, id, ',') || !std::getline(row, when, ',') ||
            !std::getline(row, lon_text, ',') || !std::getline(row, lat_text)) {
            ++set.malformed_rows;
            continue;
        }
        TrajectorySample sample;
        if (!detail::parse_datetime(when, sample.t_s) ||
            !detail::parse_double(lon_text, sample.lon) ||
            !detail::parse_double(lat_text, sample.lat)) {
            ++set.malformed_rows;
            continue;
        }
        auto [it, inserted] = index.try_emplace(id, set.trajectories.size());
        if (inserted) {
            set.trajectories.emplace_back();
            set.trajectories.back().user_id = id;
        }
        auto& traj = set.trajectories[it->second];
        if (!traj.samples.empty() && sample.t_s <= traj.samples.back().t_s) {
            ++set.non_monotonic_rows;
            continue;
        }
        traj.samples.push_back(sample);
    }

    // need two samples to interpolate anything
    std::erase_if(set.trajectories, [](const Trajectory& t) { return t.samples.size() < 2; });
    if (set.trajectories.empty())
        throw DataError("load_tdrive: no usable trajectories in " + path);

    double lon_min = 1e300, lon_max = -1e300, lat_min = 1e300, lat_max = -1e300;
    for (const auto& t : set.trajectories)
        for (const auto& s : t.samples) {
            lon_min = std::min(lon_min, s.lon);
            lon_max = std::max(lon_max, s.lon);
            lat_min = std::min(lat_min, s.lat);
            lat_max = std::max(lat_max, s.lat);
        }
    const double lon_span = lon_max - lon_min;
    const double lat_span = lat_max - lat_min;
    auto map_point = [&](double lon, double lat) -> Position {
        Position p;
        p.x_km = lon_span > 0.0 ? (lon - lon_min) / lon_span * area_side_km
                                : area_side_km / 2.0;
        p.y_km = lat_span > 0.0 ? (lat - lat_min) / lat_span * area_side_km
                                : area_side_km / 2.0;
        return p;
    };

    for (auto& t : set.trajectories) {
        const double t0 = t.samples.front().t_s;
        const double t_end = t.samples.back().t_s;
        const auto slots = static_cast<std::size_t>(std::floor((t_end - t0) / slot_s)) + 1;
        t.positions.reserve(slots);
        std::size_t seg = 0;
        for (std::size_t k = 0; k < slots; ++k) {
            const double when = t0 + static_cast<double>(k) * slot_s;
            while (seg + 2 < t.samples.size() && t.samples[seg + 1].t_s <= when) ++seg;
            const auto& a = t.samples[seg];
            const auto& b = t.samples[seg + 1];
            const double u = std::clamp((when - a.t_s) / (b.t_s - a.t_s), 0.0, 1.0);
            t.positions.push_back(
                map_point(a.lon + u * (b.lon - a.lon), a.lat + u * (b.lat - a.lat)));
        }
    }
    return set;
}

}  // namespace edgetwin
