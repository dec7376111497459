#include "coswap/broker.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coswap/errors.hpp"

namespace coswap {

// Slack for timestamp comparisons; absorbs the drift of accumulated step
// additions (orders of magnitude below any feed spacing).
static constexpr double kTimeSlack = 1e-9;

BrokerFeed::BrokerFeed(std::vector<FeedEntry> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        if (!(entries_[i].timestamp > entries_[i - 1].timestamp))
            throw Error("broker feed timestamps must be strictly increasing (entry " +
                        std::to_string(i) + ")");
    }
}

void BrokerFeed::advance_to(double time) { now_ = std::max(now_, time); }

std::size_t BrokerFeed::published_count() const {
    double horizon = now_ + kTimeSlack;
    auto it = std::upper_bound(entries_.begin(), entries_.end(), horizon,
                               [](double t, const FeedEntry& e) { return t < e.timestamp; });
    return static_cast<std::size_t>(it - entries_.begin());
}

std::pair<std::size_t, std::size_t> BrokerFeed::claim(std::size_t count) {
    std::size_t start = claim_cursor_;
    std::size_t avail = published_count();
    std::size_t end = std::min(avail, start + count);
    if (end < start) end = start;
    claim_cursor_ = std::max(claim_cursor_, end);
    return {start, end};
}

ModelDescription BrokerUnit::make_description() {
    ModelDescription d;
    d.model_name = "message-broker";
    d.variables = {
        {"angle", ValueType::Real, Causality::Output, Value(0.0), false},
        {"stamp", ValueType::Real, Causality::Output, Value(0.0), false},
        {"valid", ValueType::Boolean, Causality::Output, Value(true), false},
        {"prefetch_count", ValueType::Integer, Causality::Parameter, Value(0), true},
        {"maxage", ValueType::Real, Causality::Parameter, Value(1.0), true},
    };
    return d;
}

BrokerUnit::BrokerUnit(std::string instance_name, std::shared_ptr<BrokerFeed> feed)
    : UnitBase(make_description(), std::move(instance_name)), feed_(std::move(feed)) {
    if (!feed_) feed_ = std::make_shared<BrokerFeed>();
}

void BrokerUnit::emit(std::size_t index) {
    const FeedEntry& e = feed_->entries()[index];
    store("angle", Value(e.value));
    store("stamp", Value(e.timestamp));
    last_ts_ = e.timestamp;
    consumed_.push_back(index);
}

void BrokerUnit::receive_published() {
    std::size_t published = feed_->published_count();
    while (next_receive_ < published) queue_.push_back(next_receive_++);
}

void BrokerUnit::on_initialized() {
    std::int64_t prefetch = int_var("prefetch_count");
    if (prefetch < 0) fail("prefetch_count must be >= 0");
    if (!(real_var("maxage") > 0.0)) fail("maxage must be positive");

    auto [begin, end] = feed_->claim(static_cast<std::size_t>(prefetch));
    for (std::size_t i = begin; i < end; ++i) queue_.push_back(i);
    next_receive_ = end;

    if (!queue_.empty()) {
        // Synchronize to the first queued (prefetched) message.
        std::size_t first = queue_.front();
        queue_.pop_front();
        emit(first);
        clock_ = feed_->entries()[first].timestamp;
        clock_set_ = true;
    } else {
        std::size_t published = feed_->published_count();
        next_receive_ = std::max(next_receive_, published);
        if (published > 0) {
            // Synchronize to the newest published message without
            // consuming it; subscription starts right after it.
            const FeedEntry& e = feed_->entries()[published - 1];
            store("angle", Value(e.value));
            store("stamp", Value(e.timestamp));
            clock_ = e.timestamp;
            clock_set_ = true;
        }
    }
}

void BrokerUnit::on_step(double dt) {
    receive_published();
    if (!clock_set_) {
        if (queue_.empty()) return; // no reference point yet
        clock_ = feed_->entries()[queue_.front()].timestamp;
        clock_set_ = true;
    } else {
        clock_ += dt;
    }

    while (!queue_.empty() &&
           feed_->entries()[queue_.front()].timestamp <= clock_ + kTimeSlack) {
        std::size_t idx = queue_.front();
        queue_.pop_front();
        emit(idx);
    }

    bool valid = true;
    if (!std::isnan(last_ts_)) valid = (clock_ - last_ts_) <= real_var("maxage");
    store("valid", Value(valid));
}

std::vector<FeedEntry> parse_feed_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<FeedEntry> entries;
    bool first = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line != "timestamp,value")
                throw ParseError("feed CSV must start with header 'timestamp,value'");
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError("feed CSV line " + std::to_string(lineno) + " needs two fields");
        try {
            entries.push_back(
                {std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
        } catch (const std::exception&) {
            throw ParseError("feed CSV line " + std::to_string(lineno) + " is not numeric");
        }
    }
    // the BrokerFeed constructor re-checks monotonicity
    BrokerFeed check(entries);
    return entries;
}

} // namespace coswap
