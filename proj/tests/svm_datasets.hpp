#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <random>
#include <vector>

#include "attrforge/features.hpp"

namespace testing {

struct SvmDataset {
    Eigen::MatrixXd points;  // n x d
    std::vector<int> labels;
    double c = 1.0;

    std::vector<attrforge::SparseVector> sparse() const {
        std::vector<attrforge::SparseVector> out;
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
            std::vector<double> row(static_cast<std::size_t>(points.cols()));
            for (Eigen::Index j = 0; j < points.cols(); ++j) row[static_cast<std::size_t>(j)] = points(i, j);
            out.push_back(attrforge::SparseVector::from_dense(row));
        }
        return out;
    }
    std::size_t dimension() const { return static_cast<std::size_t>(points.cols()); }
};

// (2,2) positive and the origin negative: w = (0.5, 0.5), b = -1.
inline SvmDataset analytic_pair() {
    SvmDataset d;
    d.points.resize(2, 2);
    d.points << 2, 2, 0, 0;
    d.labels = {1, -1};
    d.c = 1.0;
    return d;
}

// Seeded small problems: 2..6 points, 1..3 dimensions, integer grid coordinates,
// both classes present, C drawn from a fixed menu.
inline std::vector<SvmDataset> small_datasets(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double menu[] = {0.1, 0.5, 1.0, 2.0, 10.0};
    std::vector<SvmDataset> out;
    out.push_back(analytic_pair());
    while (out.size() < count) {
        const auto n = static_cast<Eigen::Index>(2 + rng() % 5);
        const auto d = static_cast<Eigen::Index>(1 + rng() % 3);
        SvmDataset ds;
        ds.points.resize(n, d);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) ds.points(i, j) = static_cast<double>(rng() % 7) - 3.0;
        }
        ds.labels.resize(static_cast<std::size_t>(n));
        for (auto& y : ds.labels) y = rng() % 2 ? 1 : -1;
        ds.labels[0] = 1;
        ds.labels[1] = -1;
        ds.c = menu[rng() % 5];
        bool empty = true;
        for (Eigen::Index i = 0; i < n; ++i) empty = empty && ds.points.row(i).isZero();
        if (empty) continue;
        out.push_back(std::move(ds));
    }
    return out;
}

}  // namespace testing
