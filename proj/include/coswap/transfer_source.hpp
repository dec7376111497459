#pragma once

#include <deque>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace coswap {

// A swap specification waiting at a transfer point.
struct PendingSpec {
    std::string id;   // path or schedule label, used in reports
    std::string text; // JSON document
};

// Where the engine looks for new swap specifications. poll() is called
// synchronously at eligible transfer points; at most one spec is consumed
// per point, and the engine reports the outcome through consumed().
class TransferSource {
public:
    virtual ~TransferSource() = default;
    virtual std::optional<PendingSpec> poll(long iteration, double time) = 0;
    virtual void consumed(const PendingSpec& spec, bool accepted,
                          const std::string& diagnostics) = 0;
};

// Deterministic schedule of (time, spec text) pairs: a spec becomes
// available at the first transfer point whose global time reaches its
// scheduled time. Used by tests and the bundled scenarios.
class ScriptedTransferSource : public TransferSource {
public:
    void add(double time, std::string text, std::string id = "");

    std::optional<PendingSpec> poll(long iteration, double time) override;
    void consumed(const PendingSpec& spec, bool accepted, const std::string& diagnostics) override;

    struct Outcome {
        std::string id;
        bool accepted;
        std::string diagnostics;
    };
    const std::vector<Outcome>& outcomes() const { return outcomes_; }

private:
    struct Entry {
        double time;
        PendingSpec spec;
    };
    std::deque<Entry> entries_;
    std::vector<Outcome> outcomes_;
};

// Lexicographically sorted *.json entries of a directory, excluding
// already-processed *.applied / *.rejected files. Pure read, no renames.
std::vector<std::filesystem::path> scan_transfer_dir(const std::filesystem::path& dir);

// Watch-folder protocol: poll() returns the first candidate from
// scan_transfer_dir; consumed() renames it with a `.applied` or `.rejected`
// suffix, writing a diagnostic sidecar (`<name>.rejected.txt`) next to
// rejected specs.
class DirectoryTransferSource : public TransferSource {
public:
    explicit DirectoryTransferSource(std::filesystem::path dir);

    std::optional<PendingSpec> poll(long iteration, double time) override;
    void consumed(const PendingSpec& spec, bool accepted, const std::string& diagnostics) override;

private:
    std::filesystem::path dir_;
};

} // namespace coswap
