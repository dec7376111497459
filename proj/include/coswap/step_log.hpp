#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "coswap/value.hpp"

namespace coswap {

// One simulation-loop iteration's log record. `values` runs parallel to the
// column list announced through StepLogSink::on_columns; a disengaged value
// renders as an empty CSV cell (port not yet present).
struct StepLog {
    double time = 0.0;
    std::vector<std::optional<Value>> values;
};

class StepLogSink {
public:
    virtual ~StepLogSink() = default;
    // Called once before the first row, and again mid-run when a live-mode
    // transfer changes the column set (a new segment).
    virtual void on_columns(const std::vector<std::string>& columns) = 0;
    virtual void on_row(const StepLog& row) = 0;
};

// Renders `time,<cells...>` with reals at 9 fixed decimals, booleans as
// 1/0; the header row lists `time` and the column names.
std::string render_csv_header(const std::vector<std::string>& columns);
std::string render_csv_row(const StepLog& row);

// Writes one CSV file per column segment: the first segment goes to the
// configured path, later segments to `<path>.seg2.csv`, `<path>.seg3.csv`...
class CsvFileSink : public StepLogSink {
public:
    explicit CsvFileSink(std::string path);

    void on_columns(const std::vector<std::string>& columns) override;
    void on_row(const StepLog& row) override;

    int segments() const { return segment_; }

private:
    std::string path_;
    std::ofstream out_;
    int segment_ = 0;
};

// Collects everything in memory; `csv()` returns the byte-exact single-file
// rendering (tests compare these).
class MemorySink : public StepLogSink {
public:
    void on_columns(const std::vector<std::string>& columns) override;
    void on_row(const StepLog& row) override;

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<StepLog>& rows() const { return rows_; }
    int segments() const { return segments_; }
    std::string csv() const;

private:
    std::vector<std::string> columns_;
    std::vector<StepLog> rows_;
    int segments_ = 0;
};

} // namespace coswap
