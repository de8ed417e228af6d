#include "rearing/analysis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "rearing/core/errors.hpp"
#include "rearing/learn/train.hpp"

namespace rearing::analysis {

void ConditionMeanFeatures::validate() const {
    if (means.ndim() != 2 || means.shape[0] != kConditionCells) {
        throw DataError("condition means must be [24, d]");
    }
    for (int c : counts) {
        if (c <= 0) throw DataError("every (object, viewpoint) cell needs samples");
    }
}

ConditionMeanFeatures condition_means(const probe::FeatureSet& features) {
    features.validate();
    if (!features.covers_all_cells()) {
        throw DataError("condition means need all 24 (object, viewpoint) cells");
    }
    const int n = features.rows();
    const int d = features.dims();
    ConditionMeanFeatures out;
    out.means = Tensor({kConditionCells, d});
    std::vector<double> acc(static_cast<std::size_t>(kConditionCells) * d, 0.0);
    for (int i = 0; i < n; ++i) {
        const int cell = cell_index(features.object_id[static_cast<std::size_t>(i)],
                                    features.viewpoint_range[static_cast<std::size_t>(i)]);
        out.counts[static_cast<std::size_t>(cell)]++;
        const float* row = &features.x.v[static_cast<std::size_t>(i) * d];
        double* dst = &acc[static_cast<std::size_t>(cell) * d];
        for (int j = 0; j < d; ++j) dst[j] += row[j];
    }
    for (int cell = 0; cell < kConditionCells; ++cell) {
        const double inv = 1.0 / out.counts[static_cast<std::size_t>(cell)];
        for (int j = 0; j < d; ++j) {
            out.means.v[static_cast<std::size_t>(cell) * d + j] =
                static_cast<float>(acc[static_cast<std::size_t>(cell) * d + j] * inv);
        }
    }
    return out;
}

ConditionMeanFeatures condition_means(learn::ResNetEncoder& encoder,
                                      const dataset::DatasetManifest& manifest,
                                      const std::filesystem::path& dataset_dir) {
    const learn::LoadedImages loaded =
        learn::load_images(manifest, dataset_dir.string(), /*require_single_condition=*/false);
    const Tensor feats = learn::extract_features(encoder, loaded.images);
    return condition_means(probe::feature_set_from_manifest(manifest, feats));
}

Rdm compute_rdm(const ConditionMeanFeatures& means) {
    means.validate();
    const int d = means.means.shape[1];
    std::array<double, kConditionCells> norm{};
    for (int i = 0; i < kConditionCells; ++i) {
        const float* v = &means.means.v[static_cast<std::size_t>(i) * d];
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += static_cast<double>(v[j]) * v[j];
        norm[static_cast<std::size_t>(i)] = std::sqrt(s);
        if (!(norm[static_cast<std::size_t>(i)] > 0.0)) {
            throw NumericError("zero-norm condition mean; cosine distance undefined");
        }
    }
    Rdm rdm;
    for (int i = 0; i < kConditionCells; ++i) {
        rdm.at(i, i) = 0.0;
        for (int j = i + 1; j < kConditionCells; ++j) {
            const float* a = &means.means.v[static_cast<std::size_t>(i) * d];
            const float* b = &means.means.v[static_cast<std::size_t>(j) * d];
            double dot = 0.0;
            for (int k = 0; k < d; ++k) dot += static_cast<double>(a[k]) * b[k];
            double dist = 1.0 - dot / (norm[static_cast<std::size_t>(i)] *
                                       norm[static_cast<std::size_t>(j)]);
            dist = std::clamp(dist, 0.0, 2.0);
            rdm.at(i, j) = dist;
            rdm.at(j, i) = dist;
        }
    }
    return rdm;
}

LdaProjection lda_project(const Tensor& x, const std::vector<int>& labels) {
    if (x.ndim() != 2) throw std::invalid_argument("lda input must be [n, d]");
    const int n = x.shape[0];
    const int d = x.shape[1];
    if (static_cast<std::size_t>(n) != labels.size()) {
        throw std::invalid_argument("lda feature rows and label count differ");
    }
    if (d < 2) throw std::invalid_argument("lda needs at least 2 feature dimensions");

    std::map<int, int> class_count;
    for (int y : labels) class_count[y]++;
    if (class_count.size() < 3) throw DataError("lda needs at least 3 classes");
    for (const auto& [y, c] : class_count) {
        if (c < 2) {
            throw DataError("lda class " + std::to_string(y) + " has fewer than 2 samples");
        }
    }
    std::vector<int> class_ids;
    std::map<int, int> class_row;
    for (const auto& [y, c] : class_count) {
        class_row[y] = static_cast<int>(class_ids.size());
        class_ids.push_back(y);
    }
    const int k = static_cast<int>(class_ids.size());

    Eigen::MatrixXd xm(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) xm(i, j) = x.v[static_cast<std::size_t>(i) * d + j];
    }
    Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(k, d);
    for (int i = 0; i < n; ++i) mu.row(class_row[labels[static_cast<std::size_t>(i)]]) += xm.row(i);
    for (int c = 0; c < k; ++c) mu.row(c) /= class_count[class_ids[static_cast<std::size_t>(c)]];
    const Eigen::RowVectorXd global = xm.colwise().mean();

    Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < n; ++i) {
        const Eigen::RowVectorXd dev =
            xm.row(i) - mu.row(class_row[labels[static_cast<std::size_t>(i)]]);
        sw.noalias() += dev.transpose() * dev;
    }
    Eigen::MatrixXd sb = Eigen::MatrixXd::Zero(d, d);
    for (int c = 0; c < k; ++c) {
        const Eigen::RowVectorXd dev = mu.row(c) - global;
        sb.noalias() += class_count[class_ids[static_cast<std::size_t>(c)]] *
                        (dev.transpose() * dev);
    }
    const double eps = 1e-6 * sw.trace() / d;
    sw.diagonal().array() += eps;

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(sb, sw);
    if (solver.info() != Eigen::Success) throw NumericError("lda eigensolver failed");

    // eigenvalues come back ascending; the two leading axes sit at the end
    Eigen::MatrixXd axes(d, 2);
    axes.col(0) = solver.eigenvectors().col(d - 1);
    axes.col(1) = solver.eigenvectors().col(d - 2);
    for (int a = 0; a < 2; ++a) {
        const double lead = axes.col(a).cwiseAbs().maxCoeff();
        for (int j = 0; j < d; ++j) {
            if (std::abs(axes(j, a)) > 1e-10 * lead) {
                if (axes(j, a) < 0.0) axes.col(a) = -axes.col(a);
                break;
            }
        }
    }

    const Eigen::MatrixXd centered = xm.rowwise() - global;
    const Eigen::MatrixXd pts = centered * axes;
    const Eigen::MatrixXd cm = (mu.rowwise() - global) * axes;

    LdaProjection out;
    out.points = Tensor({n, 2});
    for (int i = 0; i < n; ++i) {
        out.points.v[static_cast<std::size_t>(i) * 2] = static_cast<float>(pts(i, 0));
        out.points.v[static_cast<std::size_t>(i) * 2 + 1] = static_cast<float>(pts(i, 1));
    }
    out.class_means = Tensor({k, 2});
    for (int c = 0; c < k; ++c) {
        out.class_means.v[static_cast<std::size_t>(c) * 2] = static_cast<float>(cm(c, 0));
        out.class_means.v[static_cast<std::size_t>(c) * 2 + 1] = static_cast<float>(cm(c, 1));
    }
    out.class_ids = std::move(class_ids);
    return out;
}

double chick_image_budget(double hours) {
    if (!(hours >= 0.0)) throw std::invalid_argument("hours must be nonnegative");
    return hours * 3600.0 * 10.0;
}

}  // namespace rearing::analysis
