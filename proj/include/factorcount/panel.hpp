#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "factorcount/errors.hpp"

namespace fc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// An N x T observation panel: rows are cross-section units (series), columns
// are time points.  Immutable after construction.
struct PanelData {
    Matrix values;  // N x T
    std::optional<std::vector<std::string>> series_labels;  // length N
    std::optional<std::vector<std::string>> time_labels;    // length T

    PanelData() = default;

    explicit PanelData(Matrix v,
                       std::optional<std::vector<std::string>> series = std::nullopt,
                       std::optional<std::vector<std::string>> times = std::nullopt)
        : values(std::move(v)),
          series_labels(std::move(series)),
          time_labels(std::move(times)) {
        validate();
    }

    Eigen::Index n() const { return values.rows(); }
    Eigen::Index t() const { return values.cols(); }

    void validate() const {
        if (values.rows() < 2 || values.cols() < 2)
            throw dimension_error("PanelData: need N >= 2 and T >= 2, got N=" +
                                  std::to_string(values.rows()) + " T=" +
                                  std::to_string(values.cols()));
        if (!values.allFinite())
            throw input_error("PanelData: non-finite entries");
        if (series_labels && static_cast<Eigen::Index>(series_labels->size()) != values.rows())
            throw input_error("PanelData: series label count does not match N");
        if (time_labels && static_cast<Eigen::Index>(time_labels->size()) != values.cols())
            throw input_error("PanelData: time label count does not match T");
    }

    // Panel with each row demeaned (the unknown-mean convention).
    Matrix row_demeaned() const {
        Matrix out = values;
        out.colwise() -= values.rowwise().mean();
        return out;
    }
};

}  // namespace fc
