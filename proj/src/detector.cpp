#include "csmcover/detector.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "csmcover/errors.hpp"

namespace csmcover {

std::string_view label_name(Label l) { return l == Label::Cover ? "cover" : "stego"; }

std::size_t Split::count(Label l) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), l));
}

namespace {

void validate_split(const Split& s, const char* which, int source_id) {
    const auto where = "source " + std::to_string(source_id) + " " + which + " split";
    if (s.size() == 0) throw ValidationError(where + " is empty");
    if (static_cast<std::size_t>(s.features.rows()) != s.size()) {
        throw ValidationError(where + " has " + std::to_string(s.features.rows()) + " rows but " +
                              std::to_string(s.size()) + " labels");
    }
    const auto covers = s.count(Label::Cover);
    const auto stegos = s.count(Label::Stego);
    const auto gap = covers > stegos ? covers - stegos : stegos - covers;
    if (gap > 1) {
        throw ValidationError(where + " is unbalanced (" + std::to_string(covers) + " covers, " +
                              std::to_string(stegos) + " stegos)");
    }
    if (!s.features.allFinite()) throw ValidationError(where + " has non-finite feature values");
}

struct ClassMeans {
    Eigen::VectorXd cover;
    Eigen::VectorXd stego;
    std::size_t n_cover = 0;
    std::size_t n_stego = 0;
};

ClassMeans class_means(const Split& split) {
    const auto d = split.dimension();
    ClassMeans m{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d), 0, 0};
    for (std::size_t i = 0; i < split.size(); ++i) {
        const auto row = split.features.row(static_cast<Eigen::Index>(i)).transpose();
        if (split.labels[i] == Label::Cover) {
            m.cover += row;
            ++m.n_cover;
        } else {
            m.stego += row;
            ++m.n_stego;
        }
    }
    if (m.n_cover == 0 || m.n_stego == 0) {
        throw ValidationError("cannot train a detector: one class has no samples");
    }
    m.cover /= static_cast<double>(m.n_cover);
    m.stego /= static_cast<double>(m.n_stego);
    return m;
}

Eigen::MatrixXd scatter(const Split& split, const ClassMeans& m) {
    Eigen::MatrixXd centered = split.features;
    for (std::size_t i = 0; i < split.size(); ++i) {
        const auto& mu = split.labels[i] == Label::Cover ? m.cover : m.stego;
        centered.row(static_cast<Eigen::Index>(i)) -= mu.transpose();
    }
    return centered.transpose() * centered;
}

}  // namespace

void validate_dataset(const SourceDataset& ds) {
    validate_split(ds.train, "train", ds.source_id);
    validate_split(ds.test, "test", ds.source_id);
    if (ds.train.dimension() != ds.test.dimension()) {
        throw ValidationError("source " + std::to_string(ds.source_id) +
                              " train and test splits differ in dimension");
    }
}

Eigen::MatrixXd pooled_covariance(const Split& split) {
    const auto m = class_means(split);
    return scatter(split, m) / static_cast<double>(split.size());
}

LinearDetector train_detector(const Split& split, int source_id, double ridge) {
    if (!(ridge > 0.0)) throw ValidationError("ridge parameter must be positive");
    if (split.size() == 0) throw ValidationError("cannot train a detector on an empty split");
    const auto m = class_means(split);
    const auto d = split.dimension();
    Eigen::MatrixXd a = scatter(split, m) / static_cast<double>(split.size());
    a.diagonal().array() += ridge;
    const Eigen::VectorXd delta = m.stego - m.cover;

    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
        throw RuntimeError("detector for source " + std::to_string(source_id) +
                           ": regularized covariance is not positive definite");
    }
    LinearDetector det;
    det.weights = llt.solve(delta);
    det.bias = -0.5 * det.weights.dot(m.stego + m.cover);
    det.trained_on = source_id;
    if (!det.weights.allFinite() || !std::isfinite(det.bias) || det.weights.size() != d) {
        throw RuntimeError("detector for source " + std::to_string(source_id) + " has non-finite weights");
    }
    return det;
}

LinearDetector train_detector(const SourceDataset& dataset, double ridge) {
    validate_dataset(dataset);
    return train_detector(dataset.train, dataset.source_id, ridge);
}

std::size_t misclassified(const LinearDetector& det, const Split& test) {
    if (test.size() == 0) throw ValidationError("probability of error needs a non-empty test set");
    if (test.dimension() != det.weights.size()) {
        throw ValidationError("detector dimension " + std::to_string(det.weights.size()) +
                              " does not match test dimension " + std::to_string(test.dimension()));
    }
    const Eigen::VectorXd scores = test.features * det.weights;
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const Label predicted = scores[static_cast<Eigen::Index>(i)] + det.bias > 0.0 ? Label::Stego : Label::Cover;
        if (predicted != test.labels[i]) ++wrong;
    }
    return wrong;
}

double probability_of_error(const LinearDetector& det, const Split& test) {
    const auto wrong = misclassified(det, test);
    return static_cast<double>(wrong) / static_cast<double>(test.size());
}

std::size_t RegretMatrix::position(int source_id) const {
    const auto it = std::find(source_ids.begin(), source_ids.end(), source_id);
    if (it == source_ids.end()) {
        throw ValidationError("source " + std::to_string(source_id) + " is not in the regret matrix");
    }
    return static_cast<std::size_t>(it - source_ids.begin());
}

Eigen::MatrixXd RegretMatrix::error_matrix() const {
    if (intrinsic.size() != size()) throw ValidationError("regret matrix has no intrinsic difficulties");
    Eigen::MatrixXd pe = regret;
    for (std::size_t t = 0; t < size(); ++t) pe.col(static_cast<Eigen::Index>(t)).array() += intrinsic[t];
    return pe;
}

void validate_regret_matrix(const RegretMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.size());
    if (n == 0) throw ValidationError("regret matrix is empty");
    if (m.regret.rows() != n || m.regret.cols() != n) {
        throw ValidationError("regret matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    if (std::set<int>(m.source_ids.begin(), m.source_ids.end()).size() != m.size()) {
        throw ValidationError("regret matrix source ids must be unique");
    }
    if (!m.regret.allFinite()) throw ValidationError("regret matrix has non-finite entries");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (m.regret(i, i) != 0.0) {
            throw ValidationError("regret matrix diagonal entry for source " +
                                  std::to_string(m.source_ids[static_cast<std::size_t>(i)]) + " is not 0");
        }
    }
    if (!m.intrinsic.empty()) {
        if (m.intrinsic.size() != m.size()) throw ValidationError("intrinsic difficulty count mismatch");
        for (Eigen::Index t = 0; t < n; ++t) {
            const double id = m.intrinsic[static_cast<std::size_t>(t)];
            if (id < 0.0 || id > 1.0) throw ValidationError("intrinsic difficulty outside [0,1]");
            for (Eigen::Index s = 0; s < n; ++s) {
                if (m.regret(s, t) < -id - 1e-12) {
                    throw ValidationError("regret below -intrinsic difficulty at (" +
                                          std::to_string(m.source_ids[static_cast<std::size_t>(s)]) + ", " +
                                          std::to_string(m.source_ids[static_cast<std::size_t>(t)]) + ")");
                }
            }
        }
    }
}

RegretMatrix regret_matrix(std::span<const SourceDataset> datasets, double ridge) {
    if (datasets.size() < 2) throw ValidationError("a regret matrix needs at least two sources");
    const auto d = datasets.front().dimension();
    std::set<int> ids;
    for (const auto& ds : datasets) {
        validate_dataset(ds);
        if (ds.dimension() != d) {
            throw ValidationError("source " + std::to_string(ds.source_id) + " has dimension " +
                                  std::to_string(ds.dimension()) + " but source " +
                                  std::to_string(datasets.front().source_id) + " has " + std::to_string(d));
        }
        if (!ids.insert(ds.source_id).second) {
            throw ValidationError("source " + std::to_string(ds.source_id) + " appears twice");
        }
    }

    const auto n = datasets.size();
    std::vector<LinearDetector> detectors;
    detectors.reserve(n);
    for (const auto& ds : datasets) detectors.push_back(train_detector(ds.train, ds.source_id, ridge));

    RegretMatrix out;
    out.regret = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    out.intrinsic.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        out.source_ids.push_back(datasets[t].source_id);
        out.test_sizes.push_back(datasets[t].test.size());
        out.intrinsic[t] = probability_of_error(detectors[t], datasets[t].test);
    }
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t t = 0; t < n; ++t) {
            if (s == t) continue;
            out.regret(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) =
                probability_of_error(detectors[s], datasets[t].test) - out.intrinsic[t];
        }
    }
    return out;
}

std::string render_percent_table(const Eigen::MatrixXd& values, const std::vector<int>& ids, int decimals) {
    std::vector<std::string> header{"Train / Eval"};
    for (int id : ids) header.push_back(std::to_string(id));
    std::vector<std::vector<std::string>> rows;
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        std::vector<std::string> row{std::to_string(ids[static_cast<std::size_t>(r)])};
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            std::ostringstream cell;
            cell << std::fixed << std::setprecision(decimals) << 100.0 * values(r, c);
            row.push_back(cell.str());
        }
        rows.push_back(std::move(row));
    }
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& cells) {
        out << "|";
        for (std::size_t c = 0; c < cells.size(); ++c) {
            out << ' ' << std::setw(static_cast<int>(width[c])) << cells[c] << " |";
        }
        out << "\n";
    };
    emit(header);
    out << "|";
    for (auto w : width) out << std::string(w + 2, '-') << "|";
    out << "\n";
    for (const auto& row : rows) emit(row);
    return out.str();
}

}  // namespace csmcover
