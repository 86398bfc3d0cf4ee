#include "modalsep/preprocess.hpp"

#include <cmath>

#include "modalsep/errors.hpp"

namespace modalsep {

void PreprocessConfig::validate() const {
    if (decimate_factor < 1) throw ConfigError("decimate_factor must be at least 1");
}

ResponseRecord preprocess(const ResponseRecord& record, const PreprocessConfig& config,
                          Eigen::VectorXd* channel_scale) {
    config.validate();
    record.validate();

    ResponseRecord out = record;
    if (config.demean) {
        out.samples.rowwise() -= out.samples.colwise().mean();
    }

    if (config.decimate_factor > 1) {
        const Eigen::Index factor = config.decimate_factor;
        const Eigen::Index blocks = out.samples.rows() / factor;
        if (blocks < 2)
            throw TooShort("decimation by " + std::to_string(config.decimate_factor) +
                           " leaves fewer than 2 samples");
        Eigen::MatrixXd reduced(blocks, out.samples.cols());
        for (Eigen::Index b = 0; b < blocks; ++b)
            reduced.row(b) = out.samples.middleRows(b * factor, factor).colwise().mean();
        out.samples = std::move(reduced);
        out.sample_rate /= static_cast<double>(factor);
    }

    Eigen::VectorXd scale = Eigen::VectorXd::Ones(out.samples.cols());
    if (config.standardize) {
        const Eigen::Index n = out.samples.rows();
        for (Eigen::Index j = 0; j < out.samples.cols(); ++j) {
            const double mean = out.samples.col(j).mean();
            const double variance =
                (out.samples.col(j).array() - mean).square().sum() / static_cast<double>(n - 1);
            if (variance > 0.0) {
                const double stddev = std::sqrt(variance);
                out.samples.col(j) /= stddev;
                scale(j) = stddev;
            }
        }
    }
    if (channel_scale != nullptr) *channel_scale = std::move(scale);

    out.validate();
    return out;
}

}  // namespace modalsep
