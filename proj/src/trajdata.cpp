#include "gnp/trajdata.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace gnp::traj {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, std::size_t line_no, const std::string& col) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing chars");
        return v;
    } catch (const std::exception&) {
        throw DataError("line " + std::to_string(line_no) + ": cannot parse '" + s + "' in column " + col);
    }
}

long parse_long(const std::string& s, std::size_t line_no, const std::string& col) {
    try {
        std::size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing chars");
        return v;
    } catch (const std::exception&) {
        throw DataError("line " + std::to_string(line_no) + ": cannot parse '" + s + "' in column " + col);
    }
}

struct ColumnMap {
    int frame = -1, id = -1, x = -1, y = -1, vx = -1, vy = -1, lane = -1;
    bool swap_xy = false;  // NGSIM stores longitudinal position in Local_Y
};

ColumnMap resolve_columns(const std::vector<std::string>& header, Schema schema, std::size_t line_no) {
    ColumnMap m;
    auto find = [&](std::initializer_list<const char*> names) -> int {
        for (const char* n : names) {
            for (std::size_t i = 0; i < header.size(); ++i) {
                if (lower(trim(header[i])) == n) return static_cast<int>(i);
            }
        }
        return -1;
    };
    switch (schema) {
        case Schema::Canonical:
            m.frame = find({"frame"});
            m.id = find({"vehicle_id"});
            m.x = find({"x"});
            m.y = find({"y"});
            m.vx = find({"vx"});
            m.vy = find({"vy"});
            m.lane = find({"lane_id"});
            break;
        case Schema::NgsimLike:
            m.frame = find({"frame_id"});
            m.id = find({"vehicle_id"});
            m.x = find({"local_y"});  // longitudinal
            m.y = find({"local_x"});  // lateral
            m.lane = find({"lane_id"});
            break;
        case Schema::HighdLike:
            m.frame = find({"frame"});
            m.id = find({"id"});
            m.x = find({"x"});
            m.y = find({"y"});
            m.vx = find({"xvelocity"});
            m.vy = find({"yvelocity"});
            m.lane = find({"laneid"});
            break;
    }
    if (m.frame < 0 || m.id < 0 || m.x < 0 || m.y < 0)
        throw DataError("line " + std::to_string(line_no) + ": header is missing required columns (frame, id, x, y)");
    return m;
}

struct RawRow {
    long frame;
    Vec2 pos;
    std::optional<Vec2> vel;
    int lane = -1;
};

}  // namespace

std::vector<Vec2> derive_velocities(const std::vector<Vec2>& positions, double dt) {
    const std::size_t n = positions.size();
    std::vector<Vec2> vel(n, Vec2::Zero());
    if (n == 0) return vel;
    if (n == 1) return vel;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) {
            vel[i] = (positions[1] - positions[0]) / dt;
        } else if (i + 1 == n) {
            vel[i] = (positions[n - 1] - positions[n - 2]) / dt;
        } else {
            vel[i] = (positions[i + 1] - positions[i - 1]) / (2.0 * dt);
        }
    }
    return vel;
}

Dataset load_trajectories(const std::string& path, Schema schema, double dt) {
    if (dt <= 0.0) throw ConfigError("dt must be positive");
    std::ifstream in(path);
    if (!in) throw DataError("cannot open trajectory file: " + path);

    Dataset ds;
    ds.dt = dt;

    std::string line;
    std::size_t line_no = 0;
    ColumnMap cols;
    bool have_header = false;
    std::map<long, std::vector<RawRow>> by_vehicle;

    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty()) continue;
        auto fields = split_csv_line(t);
        if (!have_header) {
            cols = resolve_columns(fields, schema, line_no);
            have_header = true;
            continue;
        }
        auto need = [&](int idx, const char* name) -> const std::string& {
            if (idx < 0 || idx >= static_cast<int>(fields.size()))
                throw DataError("line " + std::to_string(line_no) + ": missing column " + name);
            return fields[static_cast<std::size_t>(idx)];
        };
        RawRow row;
        row.frame = parse_long(need(cols.frame, "frame"), line_no, "frame");
        long vid = parse_long(need(cols.id, "vehicle_id"), line_no, "vehicle_id");
        row.pos.x() = parse_double(need(cols.x, "x"), line_no, "x");
        row.pos.y() = parse_double(need(cols.y, "y"), line_no, "y");
        if (cols.vx >= 0 && cols.vy >= 0 && cols.vx < static_cast<int>(fields.size()) &&
            cols.vy < static_cast<int>(fields.size())) {
            const std::string& sx = fields[static_cast<std::size_t>(cols.vx)];
            const std::string& sy = fields[static_cast<std::size_t>(cols.vy)];
            if (!trim(sx).empty() && !trim(sy).empty()) {
                row.vel = Vec2(parse_double(sx, line_no, "vx"), parse_double(sy, line_no, "vy"));
            }
        }
        if (cols.lane >= 0 && cols.lane < static_cast<int>(fields.size()) &&
            !trim(fields[static_cast<std::size_t>(cols.lane)]).empty()) {
            row.lane = static_cast<int>(parse_long(fields[static_cast<std::size_t>(cols.lane)], line_no, "lane_id"));
        }
        by_vehicle[vid].push_back(row);
    }

    for (auto& [vid, rows] : by_vehicle) {
        std::stable_sort(rows.begin(), rows.end(),
                         [](const RawRow& a, const RawRow& b) { return a.frame < b.frame; });
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].frame == rows[i - 1].frame)
                throw DataError("vehicle " + std::to_string(vid) + ": duplicate frame " +
                                std::to_string(rows[i].frame));
        }
        // split at frame gaps into contiguous runs
        std::size_t run_start = 0;
        for (std::size_t i = 1; i <= rows.size(); ++i) {
            bool boundary = (i == rows.size()) || (rows[i].frame != rows[i - 1].frame + 1);
            if (!boundary) continue;
            VehicleTrack track;
            track.vehicle_id = vid;
            track.start_frame = rows[run_start].frame;
            bool all_vel = true;
            std::vector<Vec2> positions;
            for (std::size_t j = run_start; j < i; ++j) {
                VehicleState st;
                st.position = rows[j].pos;
                if (rows[j].vel)
                    st.velocity = *rows[j].vel;
                else
                    all_vel = false;
                track.states.push_back(st);
                positions.push_back(rows[j].pos);
                track.lane_ids.push_back(rows[j].lane);
            }
            if (!all_vel) {
                auto vel = derive_velocities(positions, dt);
                for (std::size_t j = 0; j < vel.size(); ++j) track.states[j].velocity = vel[j];
            }
            ds.tracks.push_back(std::move(track));
            run_start = i;
        }
    }
    return ds;
}

std::size_t Dataset::total_frames() const {
    std::size_t n = 0;
    for (const auto& t : tracks) n += t.states.size();
    return n;
}

void write_canonical_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "frame,vehicle_id,x,y,vx,vy,lane_id\n";
    for (const auto& track : ds.tracks) {
        for (std::size_t i = 0; i < track.states.size(); ++i) {
            const auto& st = track.states[i];
            int lane = track.lane_ids.empty() ? -1 : track.lane_ids[i];
            out << (track.start_frame + static_cast<long>(i)) << ',' << track.vehicle_id << ','
                << fmt_fixed(st.position.x()) << ',' << fmt_fixed(st.position.y()) << ','
                << fmt_fixed(st.velocity.x()) << ',' << fmt_fixed(st.velocity.y()) << ',' << lane << '\n';
        }
    }
}

void LaneGeometry::validate() const {
    if (lines.size() < 2) throw DataError("lane geometry needs at least 2 lines");
    int boundaries = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i > 0 && lines[i].offset <= lines[i - 1].offset)
            throw DataError("lane line offsets must be strictly increasing");
        if (lines[i].kind == LineKind::Boundary) ++boundaries;
    }
    if (boundaries < 2) throw DataError("lane geometry needs at least 2 boundary lines");
    if (lines.front().kind != LineKind::Boundary || lines.back().kind != LineKind::Boundary)
        throw DataError("extreme lane lines must be boundaries");
    if (travel_direction != 1 && travel_direction != -1)
        throw DataError("travel_direction must be +1 or -1");
}

double LaneGeometry::lane_width() const {
    if (lines.size() < 2) return 0.0;
    std::vector<double> gaps;
    for (std::size_t i = 1; i < lines.size(); ++i) gaps.push_back(lines[i].offset - lines[i - 1].offset);
    std::sort(gaps.begin(), gaps.end());
    return gaps[gaps.size() / 2];
}

LaneGeometry LaneGeometry::transformed(const RigidTransform& tf) const {
    LaneGeometry out;
    out.travel_direction = tf.flipped ? -travel_direction : travel_direction;
    for (const auto& l : lines) {
        double off = l.offset + tf.translation.y();
        if (tf.flipped) off = -off;
        out.lines.push_back({off, l.kind});
    }
    std::sort(out.lines.begin(), out.lines.end(),
              [](const LaneLine& a, const LaneLine& b) { return a.offset < b.offset; });
    return out;
}

LaneGeometry LaneGeometry::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open lane file: " + path);
    LaneGeometry geo;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = split_csv_line(t);
        if (lower(trim(fields[0])) == "offset_m") continue;  // optional header
        if (fields.size() != 2)
            throw DataError("lane file line " + std::to_string(line_no) + ": expected offset_m,kind");
        LaneLine l;
        l.offset = parse_double(trim(fields[0]), line_no, "offset_m");
        std::string kind = lower(trim(fields[1]));
        if (kind == "center")
            l.kind = LineKind::Center;
        else if (kind == "boundary")
            l.kind = LineKind::Boundary;
        else
            throw DataError("lane file line " + std::to_string(line_no) + ": unknown kind '" + kind + "'");
        geo.lines.push_back(l);
    }
    std::sort(geo.lines.begin(), geo.lines.end(),
              [](const LaneLine& a, const LaneLine& b) { return a.offset < b.offset; });
    geo.validate();
    return geo;
}

void LaneGeometry::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << "offset_m,kind\n";
    for (const auto& l : lines)
        out << fmt_fixed(l.offset, 3) << ',' << (l.kind == LineKind::Center ? "center" : "boundary") << '\n';
}

double RigidTransform::rotation() const { return flipped ? M_PI : 0.0; }

Vec2 RigidTransform::apply_point(const Vec2& p) const {
    Vec2 q = p + translation;
    return flipped ? Vec2(-q.x(), -q.y()) : q;
}

Vec2 RigidTransform::apply_vector(const Vec2& v) const { return flipped ? Vec2(-v.x(), -v.y()) : v; }

Vec2 RigidTransform::invert_point(const Vec2& p) const {
    Vec2 q = flipped ? Vec2(-p.x(), -p.y()) : p;
    return q - translation;
}

Vec2 RigidTransform::invert_vector(const Vec2& v) const { return flipped ? Vec2(-v.x(), -v.y()) : v; }

std::vector<TrajectoryWindow> make_windows(const Dataset& ds, int t_obs, int t_pred, int stride,
                                           const NeighborRule& rule, WindowReport* report) {
    if (t_obs < 2) throw ConfigError("t_obs must be >= 2");
    if (t_pred < 1) throw ConfigError("t_pred must be >= 1");
    if (stride < 1) throw ConfigError("stride must be >= 1");

    const int span = t_obs + t_pred;
    WindowReport rep;
    std::vector<TrajectoryWindow> windows;

    for (std::size_t ti = 0; ti < ds.tracks.size(); ++ti) {
        const auto& track = ds.tracks[ti];
        const long n = static_cast<long>(track.states.size());
        if (n < span) {
            ++rep.tracks_too_short;
            continue;
        }
        const std::size_t per_track = static_cast<std::size_t>((n - span) / stride) + 1;
        rep.expected_from_lengths += per_track;

        for (long s = 0; s + span <= n; s += stride) {
            TrajectoryWindow w;
            w.vehicle_id = track.vehicle_id;
            w.dt = ds.dt;
            w.observed.assign(track.states.begin() + s, track.states.begin() + s + t_obs);
            w.future.assign(track.states.begin() + s + t_obs, track.states.begin() + s + span);

            // neighbor selection at the last observed frame
            const long anchor_frame = track.start_frame + s + t_obs - 1;
            const Vec2 anchor_pos = w.observed.back().position;
            struct Candidate {
                double dist;
                std::size_t track_index;
                long offset;  // index of window start within the neighbor track
            };
            std::vector<Candidate> cands;
            for (std::size_t oj = 0; oj < ds.tracks.size(); ++oj) {
                if (oj == ti) continue;
                const auto& other = ds.tracks[oj];
                if (other.vehicle_id == track.vehicle_id) continue;
                const long rel = anchor_frame - other.start_frame;
                const long obs_start = rel - (t_obs - 1);
                if (obs_start < 0 || rel >= static_cast<long>(other.states.size())) continue;  // missing frames
                const Vec2 p = other.states[static_cast<std::size_t>(rel)].position;
                const double dx = std::abs(p.x() - anchor_pos.x());
                const double dy = std::abs(p.y() - anchor_pos.y());
                if (dx > rule.longitudinal_range || dy > rule.lateral_range) continue;
                cands.push_back({(p - anchor_pos).norm(), oj, obs_start});
            }
            std::sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
                if (a.dist != b.dist) return a.dist < b.dist;
                return ds.tracks[a.track_index].vehicle_id < ds.tracks[b.track_index].vehicle_id;
            });
            if (static_cast<int>(cands.size()) > rule.max_count) cands.resize(static_cast<std::size_t>(rule.max_count));

            w.neighbors.assign(static_cast<std::size_t>(rule.max_count), NeighborTrack{});
            for (std::size_t k = 0; k < cands.size(); ++k) {
                const auto& other = ds.tracks[cands[k].track_index];
                NeighborTrack nt;
                nt.id = other.vehicle_id;
                nt.present = true;
                nt.observed.assign(other.states.begin() + cands[k].offset,
                                   other.states.begin() + cands[k].offset + t_obs);
                w.neighbors[k] = std::move(nt);
            }
            for (auto& slot : w.neighbors) {
                if (!slot.present) slot.observed.assign(static_cast<std::size_t>(t_obs), VehicleState{});
            }
            windows.push_back(std::move(w));
            ++rep.windows_emitted;
        }
    }
    if (report) *report = rep;
    return windows;
}

namespace {

void transform_states(std::vector<VehicleState>& states, const RigidTransform& tf) {
    for (auto& st : states) {
        st.position = tf.apply_point(st.position);
        st.velocity = tf.apply_vector(st.velocity);
    }
}

void untransform_states(std::vector<VehicleState>& states, const RigidTransform& tf) {
    for (auto& st : states) {
        st.position = tf.invert_point(st.position);
        st.velocity = tf.invert_vector(st.velocity);
    }
}

}  // namespace

std::pair<TrajectoryWindow, RigidTransform> normalize(const TrajectoryWindow& window) {
    if (window.future.empty()) throw DataError("normalize: window has no future segment");
    RigidTransform tf;
    tf.translation = -window.future.front().position;

    Vec2 mean_vel = Vec2::Zero();
    for (const auto& st : window.observed) mean_vel += st.velocity;
    if (!window.observed.empty()) mean_vel /= static_cast<double>(window.observed.size());
    tf.flipped = mean_vel.x() < 0.0;

    TrajectoryWindow out = window;
    transform_states(out.observed, tf);
    transform_states(out.future, tf);
    for (auto& nb : out.neighbors) {
        if (nb.present) transform_states(nb.observed, tf);
    }
    return {out, tf};
}

TrajectoryWindow denormalize(const TrajectoryWindow& window, const RigidTransform& tf) {
    TrajectoryWindow out = window;
    untransform_states(out.observed, tf);
    untransform_states(out.future, tf);
    for (auto& nb : out.neighbors) {
        if (nb.present) untransform_states(nb.observed, tf);
    }
    return out;
}

std::vector<LineDistance> distances_to_lines(const Vec2& position, const LaneGeometry& lanes) {
    std::vector<LineDistance> out;
    out.reserve(lanes.lines.size());
    for (std::size_t i = 0; i < lanes.lines.size(); ++i) {
        LineDistance d;
        d.index = static_cast<int>(i);
        d.distance = std::abs(position.y() - lanes.lines[i].offset);
        d.kind = lanes.lines[i].kind;
        out.push_back(d);
    }
    return out;
}

}  // namespace gnp::traj
