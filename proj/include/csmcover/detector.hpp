#ifndef CSMCOVER_DETECTOR_HPP
#define CSMCOVER_DETECTOR_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace csmcover {

enum class Label : std::uint8_t { Cover = 0, Stego = 1 };

std::string_view label_name(Label l);

/// One labeled split. Row i of `features` carries `labels[i]`.
struct Split {
    Eigen::MatrixXd features;
    std::vector<Label> labels;

    std::size_t size() const { return labels.size(); }
    Eigen::Index dimension() const { return features.cols(); }
    std::size_t count(Label l) const;
};

struct SourceDataset {
    int source_id = 0;
    Split train;
    Split test;

    Eigen::Index dimension() const { return train.dimension(); }
};

/// Checks the dataset invariants: non-empty splits, balanced labels (within
/// one element per split), shared dimension, finite values.
void validate_dataset(const SourceDataset& ds);

struct LinearDetector {
    Eigen::VectorXd weights;
    double bias = 0.0;
    int trained_on = 0;

    double score(const Eigen::Ref<const Eigen::RowVectorXd>& x) const { return x.dot(weights) + bias; }
    /// Stego when the score is strictly positive.
    Label predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
        return score(x) > 0.0 ? Label::Stego : Label::Cover;
    }
};

inline constexpr double kDefaultRidge = 1e-3;

/// Pooled within-class covariance (maximum-likelihood normalization: scatter
/// divided by the total sample count) of a split.
Eigen::MatrixXd pooled_covariance(const Split& split);

/// Ridge-regularized Fisher linear discriminant:
///   w = (S + lambda I)^-1 (mu_stego - mu_cover),  b = -w . (mu_stego + mu_cover) / 2
/// Trained on `dataset.train` only.
LinearDetector train_detector(const SourceDataset& dataset, double ridge = kDefaultRidge);
LinearDetector train_detector(const Split& split, int source_id, double ridge = kDefaultRidge);

/// Fraction of misclassified samples.
double probability_of_error(const LinearDetector& det, const Split& test);
std::size_t misclassified(const LinearDetector& det, const Split& test);

/// Pairwise regret between sources. Row = training source, column = evaluation source.
struct RegretMatrix {
    std::vector<int> source_ids;
    /// Per-source intrinsic difficulty; empty when the matrix was loaded
    /// without its sidecar.
    std::vector<double> intrinsic;
    Eigen::MatrixXd regret;
    /// Test-split size per source, recorded for provenance. May be empty.
    std::vector<std::size_t> test_sizes;

    std::size_t size() const { return source_ids.size(); }
    /// Position of `source_id` in `source_ids`; throws ValidationError if absent.
    std::size_t position(int source_id) const;
    /// P_E(train s, eval t) = regret + intrinsic[t]. Requires intrinsic.
    Eigen::MatrixXd error_matrix() const;
};

/// Checks shape, unique ids, zero diagonal, regret >= -intrinsic when known.
void validate_regret_matrix(const RegretMatrix& m);

/// Trains one detector per source and evaluates every (train, eval) pair on
/// the evaluation source's test split.
RegretMatrix regret_matrix(std::span<const SourceDataset> datasets, double ridge = kDefaultRidge);

/// Human-readable table in percent, rows = train, columns = eval.
std::string render_percent_table(const Eigen::MatrixXd& values, const std::vector<int>& ids,
                                 int decimals = 1);

}  // namespace csmcover

#endif
