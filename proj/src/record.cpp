#include "modalsep/record.hpp"

#include <json.hpp>
#include <sstream>

#include "io_util.hpp"
#include "modalsep/errors.hpp"

namespace modalsep {

std::string to_string(Quantity quantity) {
    return quantity == Quantity::Acceleration ? "acceleration" : "displacement";
}

Quantity quantity_from_string(const std::string& name) {
    if (name == "acceleration") return Quantity::Acceleration;
    if (name == "displacement") return Quantity::Displacement;
    throw ConfigError("unknown quantity: '" + name + "'");
}

void ResponseRecord::validate() const {
    if (samples.rows() < 2) throw TooShort("record needs at least 2 samples");
    if (!samples.allFinite()) throw Error("record contains non-finite samples");
    if (!(sample_rate > 0.0)) throw MissingSampleRate("sample rate must be positive");
    if (static_cast<Eigen::Index>(channel_labels.size()) != samples.cols())
        throw ShapeMismatch("label count does not match channel count");
}

std::vector<std::string> ResponseRecord::default_labels(Eigen::Index channels) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(channels));
    for (Eigen::Index i = 0; i < channels; ++i) labels.push_back("ch" + std::to_string(i + 1));
    return labels;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    p.replace_extension(".meta.json");
    return p;
}

void write_record_csv(const ResponseRecord& record, const std::filesystem::path& path) {
    record.validate();
    std::string out;
    out.reserve(static_cast<std::size_t>(record.samples.size()) * 20);
    for (Eigen::Index c = 0; c < record.channel_count(); ++c) {
        if (c > 0) out += ',';
        out += record.channel_labels[static_cast<std::size_t>(c)];
    }
    out += '\n';
    for (Eigen::Index r = 0; r < record.sample_count(); ++r) {
        for (Eigen::Index c = 0; c < record.channel_count(); ++c) {
            if (c > 0) out += ',';
            out += detail::format_double(record.samples(r, c));
        }
        out += '\n';
    }
    detail::atomic_write(path, out);

    nlohmann::json meta{
        {"sample_rate", record.sample_rate},
        {"units", record.quantity == Quantity::Acceleration ? "m/s^2" : "m"},
        {"quantity", to_string(record.quantity)},
        {"seed", record.seed},
    };
    detail::atomic_write(sidecar_path(path), meta.dump(2) + "\n");
}

namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

}  // namespace

ResponseRecord ingest_csv(const std::filesystem::path& path,
                          std::optional<double> sample_rate_override) {
    if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
    const std::string content = detail::read_file(path);

    ResponseRecord record;

    const std::filesystem::path meta_path = sidecar_path(path);
    if (std::filesystem::exists(meta_path)) {
        nlohmann::json meta;
        try {
            meta = nlohmann::json::parse(detail::read_file(meta_path));
        } catch (const nlohmann::json::exception& e) {
            throw IoError("bad sidecar " + meta_path.string() + ": " + e.what());
        }
        record.sample_rate = meta.value("sample_rate", 0.0);
        record.seed = meta.value("seed", std::uint64_t{0});
        if (meta.contains("quantity"))
            record.quantity = quantity_from_string(meta["quantity"].get<std::string>());
    }
    if (sample_rate_override) record.sample_rate = *sample_rate_override;
    if (!(record.sample_rate > 0.0))
        throw MissingSampleRate("no sidecar next to " + path.string() +
                                " and no sample-rate override given");

    std::istringstream lines(content);
    std::string line;
    long line_no = 0;
    std::vector<std::vector<double>> rows;
    Eigen::Index columns = -1;
    while (std::getline(lines, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (line_no == 1) {
            columns = static_cast<Eigen::Index>(fields.size());
            for (auto f : fields) record.channel_labels.emplace_back(f);
            continue;
        }
        if (static_cast<Eigen::Index>(fields.size()) != columns)
            throw RaggedRows("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(columns) + " fields, got " +
                             std::to_string(fields.size()));
        std::vector<double> row;
        row.reserve(fields.size());
        for (auto f : fields) row.push_back(detail::parse_double(f, "line " + std::to_string(line_no)));
        rows.push_back(std::move(row));
    }
    if (line_no == 0) throw EmptyFile("empty file: " + path.string());
    if (rows.empty()) throw EmptyFile("no data rows in: " + path.string());

    record.samples.resize(static_cast<Eigen::Index>(rows.size()), columns);
    for (Eigen::Index r = 0; r < record.samples.rows(); ++r)
        for (Eigen::Index c = 0; c < columns; ++c)
            record.samples(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];

    record.validate();
    return record;
}

}  // namespace modalsep
