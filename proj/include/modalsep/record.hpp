#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace modalsep {

/// Physical quantity stored in a ResponseRecord.
enum class Quantity { Acceleration, Displacement };

std::string to_string(Quantity quantity);
Quantity quantity_from_string(const std::string& name);

/// Sampled multichannel time series: N samples by m channels.
struct ResponseRecord {
    Eigen::MatrixXd samples;                  ///< N x m
    double sample_rate = 0.0;                 ///< Hz
    std::vector<std::string> channel_labels;  ///< size m
    Quantity quantity = Quantity::Acceleration;
    std::uint64_t seed = 0;  ///< RNG seed that generated the record (0 = not simulated)

    Eigen::Index sample_count() const { return samples.rows(); }
    Eigen::Index channel_count() const { return samples.cols(); }

    /// Throws Error subtypes when invariants are violated: N >= 2, all entries
    /// finite, sample_rate > 0, label count equal to channel count.
    void validate() const;

    /// "ch1".."chm".
    static std::vector<std::string> default_labels(Eigen::Index channels);
};

/// Writes the record as CSV (header row = channel labels, one row per sample,
/// full double precision) plus a JSON sidecar `<stem>.meta.json` in the same
/// directory carrying sample_rate, units, quantity, and seed. Both writes are
/// atomic (temp file + rename).
void write_record_csv(const ResponseRecord& record, const std::filesystem::path& path);

/// Path of the metadata sidecar belonging to a record CSV.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

/// Parses a record CSV. The sample rate comes from the sidecar unless an
/// override is given. Throws EmptyFile, RaggedRows (naming the offending
/// line), or MissingSampleRate.
ResponseRecord ingest_csv(const std::filesystem::path& path,
                          std::optional<double> sample_rate_override = std::nullopt);

}  // namespace modalsep
