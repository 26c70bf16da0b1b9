#pragma once

// Edge-robotics corridor model: a robot moving along a 1-D path, the access
// points covering it, and the closed-loop control messages between Brain and robot.

#include "dltfed/bytes.hpp"
#include "dltfed/contract.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dltfed {

struct HandoverLatency {
    TimeMs scan = 0;
    TimeMs disassociate = 0;
    TimeMs associate = 0;

    TimeMs total() const { return scan + disassociate + associate; }
};

struct CoverageMap {
    std::map<std::string, Interval> cells; // BSSID -> coverage on the path
    std::string serving_bssid;             // vAP1: its upper bound drives the trigger
    double trigger_margin = 0;             // meters

    const Interval* find(const std::string& bssid) const;
    bool covers(const std::string& bssid, double position) const;
    /// Position at which the federation trigger fires.
    double trigger_position() const;
};

struct PendingHandover {
    std::string from;
    std::string to;
    TimeMs detach_at = 0;
    TimeMs associate_at = 0;
    std::vector<TimeMs> buffered; // generation times of messages held while detached
};

struct RobotModel {
    double position = 0;            // meters
    double speed = 0;               // meters per second
    TimeMs control_period = 100;    // closed-loop message cadence
    HandoverLatency handover;
    std::optional<std::string> connected_ap;
    TimeMs clock = 0;               // robot-local virtual time
    bool triggered = false;
    std::optional<PendingHandover> pending;

    double position_at(TimeMs t) const;
};

struct ControlMessage {
    TimeMs generated_at = 0;
    TimeMs delivered_at = 0;
    double position = 0;
    bool delivered = false;
};

struct RobotStep {
    RobotModel robot;
    std::optional<TimeMs> trigger_at;
    std::optional<TimeMs> associated_at;
    std::vector<ControlMessage> messages;

    std::size_t lost() const;
};

/// Advances the robot by dt. Emits one control message per control tick; a message is
/// delivered iff the robot is attached to an AP covering its position. While detached
/// during a handover, messages are held and flushed at the first tick at or after
/// association, delivered iff the old or new AP covers the robot at flush time.
/// Throws std::invalid_argument for dt == 0.
RobotStep robot_step(const RobotModel& robot, const CoverageMap& coverage, TimeMs dt);

struct UnknownBssid : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Starts a scan/disassociate/associate sequence towards `target` at the robot's clock.
RobotModel begin_handover(const RobotModel& robot, const std::string& target, const CoverageMap& coverage);

struct HandoverResult {
    TimeMs duration = 0;
    std::size_t loss = 0;
    RobotModel robot;
};

/// Runs a complete handover from the robot's current state and counts lost messages.
HandoverResult handover(const RobotModel& robot, const std::string& target, const CoverageMap& coverage);

} // namespace dltfed
