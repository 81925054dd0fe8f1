#include "loco/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace loco {
namespace {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

// Population statistics of a trace.
MeanStd population(const std::vector<double>& v) {
    MeanStd out;
    if (v.empty()) return out;
    double sum = 0.0;
    for (double x : v) sum += x;
    out.mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(v.size()));
    return out;
}

} // namespace

PursuitMetrics pursuit_metrics(const TrialRecord& r) {
    if (r.scenario != ScenarioType::Pursuit) throw std::invalid_argument("pursuit metrics need a pursuit record");
    if (r.rows.empty()) throw std::invalid_argument("trial record has no rows");

    std::vector<double> dist;
    std::vector<double> diff;
    dist.reserve(r.rows.size());
    diff.reserve(r.rows.size());
    for (const auto& row : r.rows) {
        dist.push_back(norm(row.ball_position - row.avatar_position));
        diff.push_back(std::abs(mps_to_kmh(row.speed_mps - row.ball_speed_mps)));
    }

    PursuitMetrics m;
    const auto d = population(dist);
    const auto s = population(diff);
    m.d_avg = d.mean;
    m.d_std = d.std;
    m.s_avg = s.mean;
    m.s_std = s.std;

    // Keyframe changes happen at k * period for k = 1 .. count-1.
    double window_sum = 0.0;
    std::size_t windows = 0;
    const double eps = 1e-9;
    for (std::size_t k = 1; k < r.keyframes_kmh.size(); ++k) {
        const double t0 = static_cast<double>(k) * r.keyframe_period_s;
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < r.rows.size(); ++i) {
            const double t = r.rows[i].time_s;
            if (t >= t0 - eps && t <= t0 + kKeyframeWindowS + eps) {
                sum += diff[i];
                ++n;
            }
        }
        if (n == 0) continue;
        window_sum += sum / static_cast<double>(n);
        ++windows;
    }
    m.s_inst = windows > 0 ? window_sum / static_cast<double>(windows) : 0.0;
    return m;
}

double polyline_x_at(std::span<const Gate> path, double z) {
    if (path.empty()) return 0.0;
    // Vertices run toward -z.
    if (z >= path.front().z) return path.front().x;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const Gate& a = path[i - 1];
        const Gate& b = path[i];
        if (z >= b.z) {
            const double span = a.z - b.z;
            if (span <= 0.0) return b.x;
            const double f = (a.z - z) / span;
            return a.x + f * (b.x - a.x);
        }
    }
    return path.back().x;
}

WaypointMetrics waypoint_metrics(const TrialRecord& r) {
    if (r.scenario != ScenarioType::Waypoints) throw std::invalid_argument("waypoint metrics need a waypoints record");
    if (r.rows.empty()) throw std::invalid_argument("trial record has no rows");

    std::vector<Gate> path;
    path.push_back({r.start.x, r.start.z});
    path.insert(path.end(), r.gates.begin(), r.gates.end());
    if (!r.gates.empty()) path.push_back({r.gates.back().x, r.finish_z});

    WaypointMetrics m;
    m.t_c = r.rows.back().time_s - r.rows.front().time_s;

    double length = 0.0;
    double lateral = 0.0;
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const Vec3& p = r.rows[i].avatar_position;
        if (i > 0) {
            const Vec3& q = r.rows[i - 1].avatar_position;
            length += std::hypot(p.x - q.x, p.z - q.z);
        }
        lateral += std::abs(p.x - polyline_x_at(path, p.z));
        for (const auto& e : r.rows[i].events) {
            if (e.kind == GateEventKind::Pass) ++m.n_w;
            if (e.kind == GateEventKind::Collision) ++m.n_c;
        }
    }
    m.s_l = m.t_c > 0.0 ? length / m.t_c : 0.0;
    m.d_p = lateral / static_cast<double>(r.rows.size());
    return m;
}

Summary summarize(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("cannot summarize an empty sample");
    Summary s;
    s.n = v.size();
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.sem = std::sqrt(ss / static_cast<double>(s.n - 1)) / std::sqrt(static_cast<double>(s.n));
    }
    return s;
}

std::map<std::string, Summary> aggregate(std::span<const std::map<std::string, double>> rows) {
    if (rows.empty()) throw std::invalid_argument("cannot aggregate zero trials");
    std::map<std::string, Summary> out;
    for (const auto& [name, unused] : rows.front()) {
        std::vector<double> column;
        for (const auto& row : rows) {
            auto it = row.find(name);
            if (it == row.end()) throw std::invalid_argument("metric rows disagree on field '" + name + "'");
            column.push_back(it->second);
        }
        out[name] = summarize(column);
    }
    return out;
}

std::map<std::string, double> to_fields(const PursuitMetrics& m) {
    return {{"d_avg_m", m.d_avg}, {"d_std_m", m.d_std}, {"s_avg_kmh", m.s_avg}, {"s_std_kmh", m.s_std},
            {"s_inst_kmh", m.s_inst}};
}

std::map<std::string, double> to_fields(const WaypointMetrics& m) {
    return {{"t_c_s", m.t_c}, {"s_l_mps", m.s_l}, {"d_p_m", m.d_p}, {"n_w", static_cast<double>(m.n_w)},
            {"n_c", static_cast<double>(m.n_c)}};
}

} // namespace loco
