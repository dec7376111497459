#include "coswap/step_log.hpp"

#include "coswap/errors.hpp"

namespace coswap {

std::string render_csv_header(const std::vector<std::string>& columns) {
    std::string out = "time";
    for (const auto& c : columns) {
        out += ",";
        out += c;
    }
    out += "\n";
    return out;
}

std::string render_csv_row(const StepLog& row) {
    std::string out = render_real(row.time);
    for (const auto& cell : row.values) {
        out += ",";
        if (cell) out += cell->render();
    }
    out += "\n";
    return out;
}

CsvFileSink::CsvFileSink(std::string path) : path_(std::move(path)) {}

void CsvFileSink::on_columns(const std::vector<std::string>& columns) {
    ++segment_;
    std::string path =
        segment_ == 1 ? path_ : path_ + ".seg" + std::to_string(segment_) + ".csv";
    out_.close();
    out_.open(path, std::ios::trunc);
    if (!out_) throw Error("cannot open log file " + path);
    out_ << render_csv_header(columns);
    if (!out_) throw Error("write failure on " + path);
}

void CsvFileSink::on_row(const StepLog& row) {
    out_ << render_csv_row(row);
    if (!out_) throw Error("write failure on " + path_);
}

void MemorySink::on_columns(const std::vector<std::string>& columns) {
    columns_ = columns;
    ++segments_;
}

void MemorySink::on_row(const StepLog& row) { rows_.push_back(row); }

std::string MemorySink::csv() const {
    std::string out = render_csv_header(columns_);
    for (const auto& row : rows_) out += render_csv_row(row);
    return out;
}

} // namespace coswap
