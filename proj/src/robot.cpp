#include "dltfed/robot.hpp"

#include <cmath>

namespace dltfed {

const Interval* CoverageMap::find(const std::string& bssid) const {
    auto it = cells.find(bssid);
    return it == cells.end() ? nullptr : &it->second;
}

bool CoverageMap::covers(const std::string& bssid, double position) const {
    const auto* cell = find(bssid);
    return cell != nullptr && cell->contains(position);
}

double CoverageMap::trigger_position() const {
    const auto* serving = find(serving_bssid);
    if (serving == nullptr) throw UnknownBssid("serving BSSID missing from coverage map: " + serving_bssid);
    return serving->hi - trigger_margin;
}

double RobotModel::position_at(TimeMs t) const {
    return position + speed * static_cast<double>(t - clock) / 1000.0;
}

std::size_t RobotStep::lost() const {
    std::size_t n = 0;
    for (const auto& m : messages) n += m.delivered ? 0 : 1;
    return n;
}

RobotStep robot_step(const RobotModel& robot, const CoverageMap& coverage, TimeMs dt) {
    if (dt == 0) throw std::invalid_argument("robot_step requires dt > 0");
    RobotStep out{robot, std::nullopt, std::nullopt, {}};
    auto& r = out.robot;
    const TimeMs start = robot.clock;
    const TimeMs end = start + dt;

    if (!robot.triggered && robot.speed > 0) {
        const double threshold = coverage.trigger_position();
        TimeMs crossing = start;
        if (robot.position < threshold) {
            const double ms = (threshold - robot.position) / robot.speed * 1000.0;
            crossing = start + static_cast<TimeMs>(std::ceil(ms - 1e-9));
        }
        if (crossing <= end) {
            out.trigger_at = crossing;
            r.triggered = true;
        }
    }

    const TimeMs period = robot.control_period;
    for (TimeMs tick = (start / period + 1) * period; tick <= end; tick += period) {
        const double pos = robot.position_at(tick);
        if (r.pending) {
            auto& h = *r.pending;
            if (r.connected_ap && tick >= h.detach_at) r.connected_ap.reset();
            if (!r.connected_ap && tick >= h.associate_at) {
                r.connected_ap = h.to;
                out.associated_at = h.associate_at;
                const bool reachable = coverage.covers(h.from, pos) || coverage.covers(h.to, pos);
                for (auto generated : h.buffered) out.messages.push_back({generated, tick, pos, reachable});
                r.pending.reset();
            }
        }
        if (r.connected_ap) {
            const bool ok = coverage.covers(*r.connected_ap, pos);
            out.messages.push_back({tick, tick, pos, ok});
        } else if (r.pending) {
            r.pending->buffered.push_back(tick);
        } else {
            out.messages.push_back({tick, tick, pos, false});
        }
    }

    r.position = robot.position_at(end);
    r.clock = end;
    return out;
}

RobotModel begin_handover(const RobotModel& robot, const std::string& target, const CoverageMap& coverage) {
    if (coverage.find(target) == nullptr) throw UnknownBssid("unknown BSSID " + target);
    RobotModel r = robot;
    PendingHandover h;
    h.from = robot.connected_ap.value_or("");
    h.to = target;
    h.detach_at = robot.clock + robot.handover.scan;
    h.associate_at = h.detach_at + robot.handover.disassociate + robot.handover.associate;
    r.pending = std::move(h);
    return r;
}

HandoverResult handover(const RobotModel& robot, const std::string& target, const CoverageMap& coverage) {
    HandoverResult out{robot.handover.total(), 0, begin_handover(robot, target, coverage)};
    // Step until the association has happened and the held messages were flushed.
    while (out.robot.pending) {
        auto step = robot_step(out.robot, coverage, out.robot.control_period);
        out.loss += step.lost();
        out.robot = std::move(step.robot);
    }
    return out;
}

} // namespace dltfed
