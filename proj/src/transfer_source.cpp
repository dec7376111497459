#include "coswap/transfer_source.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "coswap/errors.hpp"

namespace coswap {

void ScriptedTransferSource::add(double time, std::string text, std::string id) {
    if (id.empty()) id = "scheduled@" + std::to_string(time);
    entries_.push_back({time, {std::move(id), std::move(text)}});
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const Entry& a, const Entry& b) { return a.time < b.time; });
}

std::optional<PendingSpec> ScriptedTransferSource::poll(long, double time) {
    if (entries_.empty() || entries_.front().time > time) return std::nullopt;
    return entries_.front().spec;
}

void ScriptedTransferSource::consumed(const PendingSpec& spec, bool accepted,
                                      const std::string& diagnostics) {
    if (!entries_.empty() && entries_.front().spec.id == spec.id) entries_.pop_front();
    outcomes_.push_back({spec.id, accepted, diagnostics});
}

std::vector<std::filesystem::path> scan_transfer_dir(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    std::vector<fs::path> out;
    fs::directory_iterator it(dir, ec);
    if (ec) throw Error("cannot read transfer directory " + dir.string() + ": " + ec.message());
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() != ".json") continue;
        out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

DirectoryTransferSource::DirectoryTransferSource(std::filesystem::path dir)
    : dir_(std::move(dir)) {}

std::optional<PendingSpec> DirectoryTransferSource::poll(long, double) {
    auto candidates = scan_transfer_dir(dir_);
    if (candidates.empty()) return std::nullopt;
    std::ifstream in(candidates.front());
    if (!in) throw Error("cannot read swap specification " + candidates.front().string());
    std::ostringstream text;
    text << in.rdbuf();
    return PendingSpec{candidates.front().string(), text.str()};
}

void DirectoryTransferSource::consumed(const PendingSpec& spec, bool accepted,
                                       const std::string& diagnostics) {
    namespace fs = std::filesystem;
    fs::path original(spec.id);
    fs::path renamed = original;
    renamed += accepted ? ".applied" : ".rejected";
    std::error_code ec;
    fs::rename(original, renamed, ec);
    if (!accepted) {
        std::ofstream sidecar(renamed.string() + ".txt");
        sidecar << diagnostics;
    }
}

} // namespace coswap
