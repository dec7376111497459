#pragma once

#include <deque>
#include <limits>
#include <memory>
#include <vector>

#include "coswap/simulation_unit.hpp"

namespace coswap {

// Something the engine advances to the global time at the start of every
// loop iteration (message feeds and similar external-world stand-ins).
class Environment {
public:
    virtual ~Environment() = default;
    virtual void advance_to(double time) = 0;
};

struct FeedEntry {
    double timestamp;
    double value;
};

// Timestamped message tape shared by broker instances. Entries become
// published once the availability horizon passes their timestamp; the
// claim cursor tracks which prefix has been handed out as prefetch blocks.
class BrokerFeed : public Environment {
public:
    BrokerFeed() = default;
    explicit BrokerFeed(std::vector<FeedEntry> entries);

    void advance_to(double time) override;
    double now() const { return now_; }

    const std::vector<FeedEntry>& entries() const { return entries_; }
    // Number of entries with timestamp <= now.
    std::size_t published_count() const;

    std::size_t claim_cursor() const { return claim_cursor_; }
    // Claim up to `count` published entries at the cursor; returns the
    // half-open index range actually claimed.
    std::pair<std::size_t, std::size_t> claim(std::size_t count);

private:
    std::vector<FeedEntry> entries_;
    double now_ = -std::numeric_limits<double>::infinity();
    std::size_t claim_cursor_ = 0;
};

// In-process stand-in for an AMQP data broker. At instantiation it claims a
// prefetch block of already-published messages (its read-and-acked queue)
// and synchronizes its output to the first of them; without a prefetch it
// synchronizes to the newest published message and subscribes right after
// it. Each step it receives newly published entries and emits queued
// messages paced by a consumption clock that starts at the synchronized
// message timestamp and advances by dt per step.
//
// Outputs: angle (last message value), stamp (its timestamp), valid
// (message age within maxage). Parameters: prefetch_count, maxage.
class BrokerUnit : public UnitBase {
public:
    BrokerUnit(std::string instance_name, std::shared_ptr<BrokerFeed> feed);

    static ModelDescription make_description();

    // Timestamp of the newest emitted message; NaN before any emission.
    double last_emitted_timestamp() const { return last_ts_; }
    bool clock_started() const { return clock_set_; }
    double consumption_clock() const { return clock_; }
    std::size_t queued_messages() const { return queue_.size(); }
    // Tape indices this instance consumed (popped as emissions or the
    // initial synchronization message).
    const std::vector<std::size_t>& consumed_entries() const { return consumed_; }

protected:
    void on_initialized() override;
    void on_step(double dt) override;

private:
    void emit(std::size_t index);
    void receive_published();

    std::shared_ptr<BrokerFeed> feed_;
    std::deque<std::size_t> queue_; // indices into the feed tape
    std::size_t next_receive_ = 0;
    double clock_ = 0.0;
    bool clock_set_ = false;
    double last_ts_ = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::size_t> consumed_;
};

// Read a broker feed tape from CSV text with header `timestamp,value` and
// strictly increasing timestamps.
std::vector<FeedEntry> parse_feed_csv(const std::string& text);

} // namespace coswap
