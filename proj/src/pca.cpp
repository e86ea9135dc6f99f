#include "pcaret/pca.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "pcaret/errors.hpp"

namespace pcaret::pca {

namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajorMatrix>;

ConstMap map_matrix(const EmbeddingMatrix& X) {
    return ConstMap(X.data().data(), static_cast<Eigen::Index>(X.rows()),
                    static_cast<Eigen::Index>(X.cols()));
}

} // namespace

Standardizer fit_standardizer(const EmbeddingMatrix& X) {
    const std::size_t n = X.rows();
    const std::size_t d = X.cols();
    if (n < 2) {
        throw DataError("fit_standardizer: need at least 2 rows, got " + std::to_string(n));
    }
    X.require_finite("fit_standardizer");

    Standardizer s;
    s.dim = d;
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    s.zero_variance.assign(d, 0);

    for (std::size_t j = 0; j < d; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += X(i, j);
        s.mean[j] = sum / static_cast<double>(n);
    }
    for (std::size_t j = 0; j < d; ++j) {
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double c = X(i, j) - s.mean[j];
            ss += c * c;
        }
        double var = ss / static_cast<double>(n - 1);
        if (var > 0.0) {
            s.scale[j] = std::sqrt(var);
        } else {
            s.scale[j] = 1.0;
            s.zero_variance[j] = 1;
        }
    }
    return s;
}

EmbeddingMatrix standardize(const Standardizer& s, const EmbeddingMatrix& X) {
    if (X.cols() != s.dim) {
        throw DataError("standardize: matrix has " + std::to_string(X.cols()) +
                        " columns, standardizer expects " + std::to_string(s.dim));
    }
    EmbeddingMatrix out(X.rows(), X.cols());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t j = 0; j < X.cols(); ++j) {
            out(i, j) = (X(i, j) - s.mean[j]) / s.scale[j];
        }
    }
    return out;
}

PcaModel fit_pca(const EmbeddingMatrix& Xstd, std::size_t max_components) {
    const std::size_t n = Xstd.rows();
    const std::size_t d = Xstd.cols();
    if (n < 2) {
        throw DataError("fit_pca: need at least 2 rows, got " + std::to_string(n));
    }
    Xstd.require_finite("fit_pca");

    const std::size_t limit = std::min(n - 1, d);
    std::size_t k = max_components == kAllComponents ? limit : max_components;
    if (k < 1 || k > limit) {
        throw DataError("fit_pca: max_components " + std::to_string(k) +
                        " out of range [1, " + std::to_string(limit) + "]");
    }

    PcaModel model;
    model.input_dim = d;
    model.num_components = k;
    model.train_mean.assign(d, 0.0);

    ConstMap X = map_matrix(Xstd);
    Eigen::RowVectorXd mean = X.colwise().mean();
    for (std::size_t j = 0; j < d; ++j) model.train_mean[j] = mean(static_cast<Eigen::Index>(j));

    RowMajorMatrix centered = X.rowwise() - mean;
    model.total_variance = centered.squaredNorm() / static_cast<double>(n - 1);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw DataError("fit_pca: SVD did not converge");
    }
    const auto& sigma = svd.singularValues();
    const auto& V = svd.matrixV(); // d x min(n,d), columns are principal axes

    model.components.assign(k * d, 0.0);
    model.explained_variance.assign(k, 0.0);
    model.explained_variance_ratio.assign(k, 0.0);
    model.cumulative_ratio.assign(k, 0.0);

    double running = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        double s = sigma(static_cast<Eigen::Index>(c));
        double lambda = s * s / static_cast<double>(n - 1);
        model.explained_variance[c] = lambda;
        double ratio = model.total_variance > 0.0 ? lambda / model.total_variance : 0.0;
        model.explained_variance_ratio[c] = ratio;
        running += ratio;
        model.cumulative_ratio[c] = running;

        // Sign convention: largest-magnitude entry positive, first such
        // entry deciding on exact ties.
        double* row = model.components.data() + c * d;
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double value = V(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c));
            row[j] = value;
            if (std::fabs(value) > best) {
                best = std::fabs(value);
                arg = j;
            }
        }
        if (row[arg] < 0.0) {
            for (std::size_t j = 0; j < d; ++j) row[j] = -row[j];
        }
    }
    return model;
}

std::size_t select_components(const PcaModel& model, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw DataError("select_components: threshold must be in (0, 1], got " +
                        std::to_string(threshold));
    }
    // Small slack so thresholds like 1.0 are reachable despite rounding
    // in the cumulative sum.
    const double target = threshold - 1e-12;
    for (std::size_t i = 0; i < model.cumulative_ratio.size(); ++i) {
        if (model.cumulative_ratio[i] >= target) return i + 1;
    }
    throw DataError("select_components: threshold " + std::to_string(threshold) +
                    " unreachable; fitted components cover " +
                    std::to_string(model.cumulative_ratio.empty()
                                       ? 0.0
                                       : model.cumulative_ratio.back()));
}

EmbeddingMatrix transform(const PcaModel& model, const EmbeddingMatrix& Xstd) {
    if (Xstd.cols() != model.input_dim) {
        throw DataError("transform: matrix has " + std::to_string(Xstd.cols()) +
                        " columns, model expects " + std::to_string(model.input_dim));
    }
    const std::size_t n = Xstd.rows();
    const std::size_t k = model.num_components;
    EmbeddingMatrix out(n, k);
    if (n == 0 || k == 0) return out;

    ConstMap X = map_matrix(Xstd);
    ConstMap C(model.components.data(), static_cast<Eigen::Index>(k),
               static_cast<Eigen::Index>(model.input_dim));
    Eigen::Map<const Eigen::RowVectorXd> mean(model.train_mean.data(),
                                              static_cast<Eigen::Index>(model.input_dim));
    Eigen::Map<RowMajorMatrix> Y(out.data().data(), static_cast<Eigen::Index>(n),
                                 static_cast<Eigen::Index>(k));
    Y = (X.rowwise() - mean) * C.transpose();
    return out;
}

EmbeddingMatrix inverse_transform(const PcaModel& model, const EmbeddingMatrix& Y) {
    if (Y.cols() != model.num_components) {
        throw DataError("inverse_transform: matrix has " + std::to_string(Y.cols()) +
                        " columns, model has " + std::to_string(model.num_components) +
                        " components");
    }
    const std::size_t n = Y.rows();
    const std::size_t d = model.input_dim;
    EmbeddingMatrix out(n, d);
    Eigen::Map<const Eigen::RowVectorXd> mean(model.train_mean.data(),
                                              static_cast<Eigen::Index>(d));
    Eigen::Map<RowMajorMatrix> X(out.data().data(), static_cast<Eigen::Index>(n),
                                 static_cast<Eigen::Index>(d));
    if (model.num_components == 0) {
        X = mean.replicate(static_cast<Eigen::Index>(n), 1);
        return out;
    }
    ConstMap Ym = map_matrix(Y);
    ConstMap C(model.components.data(), static_cast<Eigen::Index>(model.num_components),
               static_cast<Eigen::Index>(d));
    X = (Ym * C).rowwise() + mean;
    return out;
}

std::vector<std::pair<std::size_t, double>> variance_curve(const PcaModel& model) {
    std::vector<std::pair<std::size_t, double>> curve;
    curve.reserve(model.num_components);
    for (std::size_t i = 0; i < model.num_components; ++i) {
        curve.emplace_back(i + 1, model.cumulative_ratio[i]);
    }
    return curve;
}

PcaModel truncated(const PcaModel& model, std::size_t k) {
    if (k > model.num_components) {
        throw DataError("truncated: k " + std::to_string(k) + " exceeds fitted " +
                        std::to_string(model.num_components));
    }
    PcaModel out;
    out.input_dim = model.input_dim;
    out.num_components = k;
    out.components.assign(model.components.begin(),
                          model.components.begin() +
                              static_cast<std::ptrdiff_t>(k * model.input_dim));
    out.explained_variance.assign(model.explained_variance.begin(),
                                  model.explained_variance.begin() + static_cast<std::ptrdiff_t>(k));
    out.explained_variance_ratio.assign(
        model.explained_variance_ratio.begin(),
        model.explained_variance_ratio.begin() + static_cast<std::ptrdiff_t>(k));
    out.cumulative_ratio.assign(model.cumulative_ratio.begin(),
                                model.cumulative_ratio.begin() + static_cast<std::ptrdiff_t>(k));
    out.train_mean = model.train_mean;
    out.total_variance = model.total_variance;
    return out;
}

void validate_model(const PcaModel& model) {
    const std::size_t k = model.num_components;
    const std::size_t d = model.input_dim;
    if (model.components.size() != k * d || model.explained_variance.size() != k ||
        model.explained_variance_ratio.size() != k || model.cumulative_ratio.size() != k ||
        model.train_mean.size() != d) {
        throw DataError("pca model: inconsistent field sizes");
    }
    if (model.total_variance < 0.0 || !std::isfinite(model.total_variance)) {
        throw DataError("pca model: invalid total variance");
    }
    // Rows orthonormal within 1e-8.
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a; b < k; ++b) {
            double dot = 0.0;
            const double* ra = model.components.data() + a * d;
            const double* rb = model.components.data() + b * d;
            for (std::size_t j = 0; j < d; ++j) dot += ra[j] * rb[j];
            double expect = a == b ? 1.0 : 0.0;
            if (std::fabs(dot - expect) > 1e-8) {
                throw DataError("pca model: components not orthonormal (rows " +
                                std::to_string(a) + "," + std::to_string(b) + ")");
            }
        }
    }
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
        double ev = model.explained_variance[i];
        if (!(ev >= 0.0) || ev > prev + 1e-12) {
            throw DataError("pca model: explained variance not non-negative descending");
        }
        prev = ev;
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (model.cumulative_ratio[i] > 1.0 + 1e-12 ||
            (i > 0 && model.cumulative_ratio[i] < model.cumulative_ratio[i - 1] - 1e-15)) {
            throw DataError("pca model: cumulative ratio not non-decreasing within [0, 1]");
        }
    }
}

} // namespace pcaret::pca
