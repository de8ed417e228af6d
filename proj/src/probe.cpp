#include "rearing/probe/probe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "rearing/core/errors.hpp"
#include "rearing/core/parallel.hpp"
#include "rearing/learn/train.hpp"

namespace rearing::probe {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow for large |z|
double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

void check_labels(const Tensor& x, const std::vector<int>& labels) {
    if (x.ndim() != 2) throw std::invalid_argument("readout features must be [n, d]");
    if (static_cast<std::size_t>(x.shape[0]) != labels.size()) {
        throw std::invalid_argument("feature rows and label count differ");
    }
    for (int y : labels) {
        if (y != 0 && y != 1) throw std::invalid_argument("labels must be 0 or 1");
    }
}

std::uint64_t params_checksum(learn::Layer& net) {
    std::vector<learn::Param*> ps;
    net.collect_params(ps);
    std::uint64_t h = 1469598103934665603ull;
    for (const learn::Param* p : ps) {
        h = (h ^ tensor_checksum(p->w)) * 1099511628211ull;
    }
    return h;
}

}  // namespace

void ProbeParams::validate() const {
    if (!(l2 >= 0.0) || !std::isfinite(l2)) throw std::invalid_argument("l2 must be >= 0");
    if (max_iters <= 0) throw std::invalid_argument("max_iters must be positive");
    if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be positive");
}

void FeatureSet::validate() const {
    if (x.ndim() != 2) throw DataError("feature set tensor must be [n, d]");
    const auto n = static_cast<std::size_t>(x.shape[0]);
    if (object_id.size() != n || viewpoint_range.size() != n) {
        throw DataError("feature set metadata length mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (object_id[i] != 1 && object_id[i] != 2) {
            throw DataError("feature set object_id outside {1,2}");
        }
        if (viewpoint_range[i] < 1 || viewpoint_range[i] > 12) {
            throw DataError("feature set viewpoint_range outside 1..12");
        }
    }
    for (float v : x.v) {
        if (!std::isfinite(v)) throw DataError("feature set contains non-finite values");
    }
}

bool FeatureSet::covers_all_cells() const {
    int count[2][12] = {};
    const auto n = static_cast<std::size_t>(rows());
    for (std::size_t i = 0; i < n; ++i) {
        count[object_id[i] - 1][viewpoint_range[i] - 1]++;
    }
    for (int o = 0; o < 2; ++o) {
        for (int r = 0; r < 12; ++r) {
            if (count[o][r] == 0) return false;
        }
    }
    return true;
}

Standardizer fit_standardizer(const Tensor& x, const std::vector<int>& rows) {
    if (x.ndim() != 2) throw std::invalid_argument("standardizer input must be [n, d]");
    if (rows.empty()) throw std::invalid_argument("standardizer needs at least one row");
    const int d = x.shape[1];
    Standardizer s;
    s.mean.assign(static_cast<std::size_t>(d), 0.0f);
    s.scale.assign(static_cast<std::size_t>(d), 0.0f);
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    for (int j = 0; j < d; ++j) {
        double sum = 0.0;
        for (int i : rows) sum += x.v[static_cast<std::size_t>(i) * d + j];
        const double mean = sum * inv_n;
        double var = 0.0;
        for (int i : rows) {
            const double dlt = x.v[static_cast<std::size_t>(i) * d + j] - mean;
            var += dlt * dlt;
        }
        var *= inv_n;
        const double sd = std::sqrt(var);
        s.mean[static_cast<std::size_t>(j)] = static_cast<float>(mean);
        s.scale[static_cast<std::size_t>(j)] = sd < 1e-12 ? 0.0f : static_cast<float>(1.0 / sd);
    }
    return s;
}

Tensor apply_standardizer(const Standardizer& s, const Tensor& x, const std::vector<int>& rows) {
    if (x.ndim() != 2) throw std::invalid_argument("standardizer input must be [n, d]");
    const int d = x.shape[1];
    if (s.mean.size() != static_cast<std::size_t>(d)) {
        throw std::invalid_argument("standardizer dimension mismatch");
    }
    Tensor out({static_cast<int>(rows.size()), d});
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const float* src = &x.v[static_cast<std::size_t>(rows[r]) * d];
        float* dst = &out.v[r * static_cast<std::size_t>(d)];
        for (int j = 0; j < d; ++j) {
            dst[j] = (src[j] - s.mean[static_cast<std::size_t>(j)]) *
                     s.scale[static_cast<std::size_t>(j)];
        }
    }
    return out;
}

double readout_loss(const LinearReadout& r, const Tensor& x, const std::vector<int>& labels,
                    double l2) {
    check_labels(x, labels);
    const int n = x.shape[0];
    const int d = x.shape[1];
    if (r.w.size() != static_cast<std::size_t>(d)) {
        throw std::invalid_argument("readout width and feature dimension differ");
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const float* row = &x.v[static_cast<std::size_t>(i) * d];
        double z = r.b;
        for (int j = 0; j < d; ++j) z += static_cast<double>(r.w[static_cast<std::size_t>(j)]) * row[j];
        total += softplus(z) - static_cast<double>(labels[static_cast<std::size_t>(i)]) * z;
    }
    double reg = 0.0;
    for (float w : r.w) reg += static_cast<double>(w) * static_cast<double>(w);
    return total / n + l2 * reg;
}

LinearReadout fit_readout(const Tensor& x, const std::vector<int>& labels, double l2,
                          std::uint64_t seed, const ProbeParams& params) {
    check_labels(x, labels);
    ProbeParams p = params;
    p.l2 = l2;
    p.validate();
    const int n = x.shape[0];
    const int d = x.shape[1];
    if (n < 2) throw DataError("readout fit needs at least two samples");
    const int pos = static_cast<int>(std::count(labels.begin(), labels.end(), 1));
    if (pos == 0 || pos == n) throw DataError("readout fit needs both classes present");
    // Zero init and full-batch descent leave no random choices; the seed is
    // part of the interface so callers stay stable if that ever changes.
    (void)seed;

    // 1/L step size from the logistic Hessian bound on augmented inputs
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const float* row = &x.v[static_cast<std::size_t>(i) * d];
        double s = 1.0;  // bias column
        for (int j = 0; j < d; ++j) s += static_cast<double>(row[j]) * row[j];
        sq += s;
    }
    const double lips = 0.25 * sq / n + 2.0 * p.l2;
    const double lr = 1.0 / lips;

    std::vector<double> w(static_cast<std::size_t>(d), 0.0);
    double b = 0.0;
    std::vector<double> gw(static_cast<std::size_t>(d));
    const double inv_n = 1.0 / n;
    for (int it = 0; it < p.max_iters; ++it) {
        std::fill(gw.begin(), gw.end(), 0.0);
        double gb = 0.0;
        for (int i = 0; i < n; ++i) {
            const float* row = &x.v[static_cast<std::size_t>(i) * d];
            double z = b;
            for (int j = 0; j < d; ++j) z += w[static_cast<std::size_t>(j)] * row[j];
            const double resid = sigmoid(z) - labels[static_cast<std::size_t>(i)];
            for (int j = 0; j < d; ++j) gw[static_cast<std::size_t>(j)] += resid * row[j];
            gb += resid;
        }
        double norm_sq = 0.0;
        for (int j = 0; j < d; ++j) {
            gw[static_cast<std::size_t>(j)] =
                gw[static_cast<std::size_t>(j)] * inv_n + 2.0 * p.l2 * w[static_cast<std::size_t>(j)];
            norm_sq += gw[static_cast<std::size_t>(j)] * gw[static_cast<std::size_t>(j)];
        }
        gb *= inv_n;
        norm_sq += gb * gb;
        if (std::sqrt(norm_sq) < p.grad_tol) break;
        for (int j = 0; j < d; ++j) w[static_cast<std::size_t>(j)] -= lr * gw[static_cast<std::size_t>(j)];
        b -= lr * gb;
    }

    LinearReadout out;
    out.w.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        const double wj = w[static_cast<std::size_t>(j)];
        if (!std::isfinite(wj)) throw NumericError("readout fit diverged");
        out.w[static_cast<std::size_t>(j)] = static_cast<float>(wj);
    }
    if (!std::isfinite(b)) throw NumericError("readout fit diverged");
    out.b = static_cast<float>(b);
    return out;
}

double evaluate_readout(const LinearReadout& r, const Tensor& x, const std::vector<int>& labels) {
    check_labels(x, labels);
    const int n = x.shape[0];
    const int d = x.shape[1];
    if (n == 0) throw DataError("cannot evaluate a readout on an empty set");
    if (r.w.size() != static_cast<std::size_t>(d)) {
        throw std::invalid_argument("readout width and feature dimension differ");
    }
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        const float* row = &x.v[static_cast<std::size_t>(i) * d];
        double z = r.b;
        for (int j = 0; j < d; ++j) z += static_cast<double>(r.w[static_cast<std::size_t>(j)]) * row[j];
        const int pred = z > 0.0 ? 1 : 0;  // probability 0.5 boundary, ties to class 0
        if (pred == labels[static_cast<std::size_t>(i)]) ++hits;
    }
    return static_cast<double>(hits) / n;
}

EvalReport cross_validate(const FeatureSet& features, FoldScheme scheme, double l2,
                          std::uint64_t seed, const ProbeParams& params) {
    features.validate();
    if (!features.covers_all_cells()) {
        throw DataError("evaluation features must cover all 24 (object, viewpoint) cells");
    }
    const auto folds = make_folds(scheme, seed);
    const auto nf = folds.size();
    std::vector<double> acc(nf, 0.0);
    std::vector<std::string> errors(nf);

    par::for_n(static_cast<int>(nf), [&](int f) {
        try {
            const FoldSplit& split = folds[static_cast<std::size_t>(f)];
            std::vector<int> train_rows;
            std::vector<int> test_rows;
            for (int i = 0; i < features.rows(); ++i) {
                const int r = features.viewpoint_range[static_cast<std::size_t>(i)];
                const bool in_train = std::binary_search(split.train_ranges.begin(),
                                                         split.train_ranges.end(), r);
                (in_train ? train_rows : test_rows).push_back(i);
            }
            auto labels_of = [&](const std::vector<int>& rows) {
                std::vector<int> ys;
                ys.reserve(rows.size());
                for (int i : rows) ys.push_back(features.object_id[static_cast<std::size_t>(i)] - 1);
                return ys;
            };
            const Standardizer st = fit_standardizer(features.x, train_rows);
            const Tensor xtr = apply_standardizer(st, features.x, train_rows);
            const Tensor xte = apply_standardizer(st, features.x, test_rows);
            const LinearReadout readout = fit_readout(xtr, labels_of(train_rows), l2, seed, params);
            acc[static_cast<std::size_t>(f)] = evaluate_readout(readout, xte, labels_of(test_rows));
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(f)] = e.what();
        }
    });
    for (const std::string& e : errors) {
        if (!e.empty()) throw DataError("fold evaluation failed: " + e);
    }

    EvalReport report;
    report.scheme = to_string(scheme);
    report.per_fold_accuracy = acc;
    double mean = 0.0;
    for (double a : acc) mean += a;
    mean /= static_cast<double>(nf);
    double var = 0.0;
    for (double a : acc) var += (a - mean) * (a - mean);
    var /= static_cast<double>(nf - 1);
    report.mean_accuracy = mean;
    report.standard_error = std::sqrt(var) / std::sqrt(static_cast<double>(nf));
    return report;
}

EvalReport cross_validate(learn::ResNetEncoder& encoder, const dataset::DatasetManifest& manifest,
                          const std::filesystem::path& dataset_dir, FoldScheme scheme, double l2,
                          std::uint64_t seed, const ProbeParams& params) {
    const std::uint64_t before = params_checksum(encoder);
    const learn::LoadedImages loaded =
        learn::load_images(manifest, dataset_dir.string(), /*require_single_condition=*/false);
    const Tensor feats = learn::extract_features(encoder, loaded.images);
    if (params_checksum(encoder) != before) {
        throw std::logic_error("encoder parameters changed during feature extraction");
    }
    FeatureSet fs = feature_set_from_manifest(manifest, feats);
    EvalReport report = cross_validate(fs, scheme, l2, seed, params);
    if (params_checksum(encoder) != before) {
        throw std::logic_error("encoder parameters changed during probing");
    }
    return report;
}

FeatureSet feature_set_from_manifest(const dataset::DatasetManifest& manifest, const Tensor& x) {
    if (x.ndim() != 2 || static_cast<std::size_t>(x.shape[0]) != manifest.records.size()) {
        throw DataError("feature rows do not match manifest records");
    }
    FeatureSet fs;
    fs.x = x;
    fs.object_id.reserve(manifest.records.size());
    fs.viewpoint_range.reserve(manifest.records.size());
    for (const auto& rec : manifest.records) {
        fs.object_id.push_back(rec.object_id);
        fs.viewpoint_range.push_back(rec.viewpoint_range);
    }
    fs.validate();
    return fs;
}

void save_features_jsonl(const std::filesystem::path& path, const KeyedFeatures& f) {
    if (f.x.ndim() != 2 || static_cast<std::size_t>(f.x.shape[0]) != f.keys.size()) {
        throw std::invalid_argument("keyed feature rows and keys differ");
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw DataError("cannot open " + tmp.string() + " for writing");
        const int d = f.x.shape[1];
        for (std::size_t i = 0; i < f.keys.size(); ++i) {
            nlohmann::json j;
            j["key"] = f.keys[i];
            auto arr = nlohmann::json::array();
            for (int c = 0; c < d; ++c) arr.push_back(f.x.v[i * static_cast<std::size_t>(d) + c]);
            j["f"] = std::move(arr);
            out << j.dump() << '\n';
        }
        if (!out) throw DataError("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

KeyedFeatures load_features_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open features file " + path.string());
    KeyedFeatures f;
    std::vector<float> flat;
    int d = -1;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.contains("key") || !j.contains("f") || !j["f"].is_array()) {
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": expected fields key and f");
        }
        const auto& arr = j["f"];
        if (d < 0) {
            d = static_cast<int>(arr.size());
            if (d == 0) throw DataError("feature rows must be non-empty");
        } else if (static_cast<int>(arr.size()) != d) {
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": inconsistent feature dimension");
        }
        f.keys.push_back(j["key"].get<std::string>());
        for (const auto& v : arr) {
            if (!v.is_number()) {
                throw DataError(path.string() + ":" + std::to_string(line_no) +
                                ": non-numeric feature value");
            }
            flat.push_back(v.get<float>());
        }
    }
    if (f.keys.empty()) throw DataError("features file " + path.string() + " holds no rows");
    f.x = Tensor({static_cast<int>(f.keys.size()), d});
    f.x.v = std::move(flat);
    return f;
}

FeatureSet feature_set_from_keyed(const dataset::DatasetManifest& manifest,
                                  const KeyedFeatures& f) {
    std::unordered_map<std::string, const dataset::ManifestRecord*> by_path;
    by_path.reserve(manifest.records.size());
    for (const auto& rec : manifest.records) by_path[rec.image_path] = &rec;

    FeatureSet fs;
    fs.x = f.x;
    fs.object_id.reserve(f.keys.size());
    fs.viewpoint_range.reserve(f.keys.size());
    for (const std::string& key : f.keys) {
        auto it = by_path.find(key);
        if (it == by_path.end()) {
            throw DataError("imported feature key '" + key + "' not present in the manifest");
        }
        fs.object_id.push_back(it->second->object_id);
        fs.viewpoint_range.push_back(it->second->viewpoint_range);
    }
    fs.validate();
    return fs;
}

std::string report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["method"] = r.method;
    j["condition"] = r.condition;
    j["scheme"] = r.scheme;
    j["per_fold_accuracy"] = r.per_fold_accuracy;
    j["mean_accuracy"] = r.mean_accuracy;
    j["standard_error"] = r.standard_error;
    j["chick_reference"] = {{"familiar", r.chick_familiar}, {"novel", r.chick_novel}};
    return j.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad evaluation report: ") + e.what());
    }
    EvalReport r;
    try {
        r.method = j.at("method").get<std::string>();
        r.condition = j.at("condition").get<std::string>();
        r.scheme = j.at("scheme").get<std::string>();
        r.per_fold_accuracy = j.at("per_fold_accuracy").get<std::vector<double>>();
        r.mean_accuracy = j.at("mean_accuracy").get<double>();
        r.standard_error = j.at("standard_error").get<double>();
        r.chick_familiar = j.at("chick_reference").at("familiar").get<double>();
        r.chick_novel = j.at("chick_reference").at("novel").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad evaluation report: ") + e.what());
    }
    for (double a : r.per_fold_accuracy) {
        if (a < 0.0 || a > 1.0) throw DataError("evaluation report accuracy outside [0,1]");
    }
    return r;
}

std::vector<std::string> report_csv_rows(const EvalReport& r) {
    std::vector<std::string> rows;
    rows.reserve(r.per_fold_accuracy.size());
    char buf[364];
    for (std::size_t f = 0; f < r.per_fold_accuracy.size(); ++f) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%s,%zu,%.17g", r.method.c_str(),
                      r.condition.c_str(), r.scheme.c_str(), f, r.per_fold_accuracy[f]);
        rows.emplace_back(buf);
    }
    return rows;
}

}  // namespace rearing::probe
