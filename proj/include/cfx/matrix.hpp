#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "cells.hpp"
#include "error.hpp"

namespace cfx {

inline constexpr double kProbabilityTolerance = 1e-9;

/// Joint probabilities over the eight counterfactual outcome cells.
class CounterfactualMatrix {
public:
    CounterfactualMatrix() = default;
    explicit CounterfactualMatrix(const std::array<double, kCellCount>& p) : p_(p) {}

    /// Row-major 2x4 table as laid out in the outcome matrix: first row GT=T,
    /// second GT=F; columns (aided,unaided) = (T,T) (T,F) (F,T) (F,F).
    static CounterfactualMatrix from_table(const std::array<double, 4>& gt_true,
                                           const std::array<double, 4>& gt_false) {
        CounterfactualMatrix m;
        for (std::size_t j = 0; j < 4; ++j) {
            m.p_[j] = gt_true[j];
            m.p_[4 + j] = gt_false[j];
        }
        return m;
    }

    double operator[](CellKind c) const { return p_[index(c)]; }
    double& operator[](CellKind c) { return p_[index(c)]; }

    const std::array<double, kCellCount>& values() const { return p_; }

    double total() const {
        double s = 0.0;
        for (double v : p_) s += v;
        return s;
    }

    double ground_truth_mass(GroundTruth g) const {
        const std::size_t base = index(g) * 4;
        return p_[base] + p_[base + 1] + p_[base + 2] + p_[base + 3];
    }

    bool operator==(const CounterfactualMatrix&) const = default;

private:
    std::array<double, kCellCount> p_{};
};

/// Joint probabilities over (ground truth, verdict).
class ConfusionMatrix {
public:
    ConfusionMatrix() = default;

    double at(GroundTruth g, Decision d) const { return p_[index(g)][index(d)]; }
    double& at(GroundTruth g, Decision d) { return p_[index(g)][index(d)]; }

    double row_mass(GroundTruth g) const { return p_[index(g)][0] + p_[index(g)][1]; }
    double total() const { return row_mass(GroundTruth::T) + row_mass(GroundTruth::F); }

    bool operator==(const ConfusionMatrix&) const = default;

private:
    std::array<std::array<double, 2>, 2> p_{};
};

struct MatrixIssue {
    ErrorCode code;          // NonStochastic or NegativeEntry
    std::optional<CellKind> cell;
    double value;            // offending entry, or the sum for NonStochastic
};

struct MatrixCheck {
    std::vector<MatrixIssue> issues;
    bool ok() const { return issues.empty(); }
    std::string message() const {
        std::string out;
        for (const auto& i : issues) {
            if (!out.empty()) out += "; ";
            if (i.code == ErrorCode::NegativeEntry)
                out += "negative entry " + std::string(name(*i.cell)) + " = " + std::to_string(i.value);
            else if (i.cell)
                out += "non-finite entry " + std::string(name(*i.cell));
            else
                out += "entries sum to " + std::to_string(i.value) + ", expected 1";
        }
        return out;
    }
};

inline MatrixCheck validate_matrix(const CounterfactualMatrix& m) {
    MatrixCheck check;
    bool finite = true;
    for (CellKind c : kAllCells) {
        const double v = m[c];
        if (!std::isfinite(v)) {
            check.issues.push_back({ErrorCode::NonStochastic, c, v});
            finite = false;
        } else if (v < 0.0) {
            check.issues.push_back({ErrorCode::NegativeEntry, c, v});
        }
    }
    if (finite) {
        const double sum = m.total();
        if (std::abs(sum - 1.0) > kProbabilityTolerance)
            check.issues.push_back({ErrorCode::NonStochastic, std::nullopt, sum});
    }
    return check;
}

inline void require_valid(const CounterfactualMatrix& m, const std::string& field_path = "matrix") {
    const auto check = validate_matrix(m);
    if (!check.ok()) {
        const auto& first = check.issues.front();
        std::string path = field_path;
        if (first.cell) path += "." + std::string(name(*first.cell));
        throw Error(first.code, check.message(), path);
    }
}

struct Partition {
    ConfusionMatrix aided;
    ConfusionMatrix unaided;
};

/// Marginalizes the joint matrix onto the aided and the unaided verdicts.
inline Partition partition(const CounterfactualMatrix& m) {
    require_valid(m);
    Partition out;
    for (CellKind c : kAllCells) {
        out.aided.at(ground_truth_of(c), aided_of(c)) += m[c];
        out.unaided.at(ground_truth_of(c), unaided_of(c)) += m[c];
    }
    return out;
}

inline double sensitivity(const ConfusionMatrix& cm) {
    const double mass = cm.row_mass(GroundTruth::T);
    if (!(mass > 0.0))
        throw Error(ErrorCode::DegenerateMarginal, "no mass on GT=T; sensitivity undefined");
    return cm.at(GroundTruth::T, Decision::T) / mass;
}

inline double specificity(const ConfusionMatrix& cm) {
    const double mass = cm.row_mass(GroundTruth::F);
    if (!(mass > 0.0))
        throw Error(ErrorCode::DegenerateMarginal, "no mass on GT=F; specificity undefined");
    return cm.at(GroundTruth::F, Decision::F) / mass;
}

} // namespace cfx
