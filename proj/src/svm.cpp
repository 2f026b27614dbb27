#include "attrforge/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace attrforge {

void SvmParams::validate() const {
    if (!(c > 0.0) || !(tol > 0.0) || !(eps > 0.0) || max_passes < 1) {
        throw std::invalid_argument("SVM parameters c, tol, eps and max_passes must be positive");
    }
}

double dot(const SparseVector& a, const SparseVector& b) {
    double sum = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.columns.size() && j < b.columns.size()) {
        if (a.columns[i] < b.columns[j]) {
            ++i;
        } else if (a.columns[i] > b.columns[j]) {
            ++j;
        } else {
            sum += a.value(i) * b.value(j);
            ++i;
            ++j;
        }
    }
    return sum;
}

double decision_value(const SvmModel& model, const SparseVector& x) {
    double sum = model.bias;
    for (std::size_t i = 0; i < x.columns.size(); ++i) {
        const auto col = x.columns[i];
        if (col >= model.weights.size()) {
            throw std::out_of_range("feature column " + std::to_string(col) +
                                    " outside model dimension " +
                                    std::to_string(model.weights.size()));
        }
        sum += model.weights[col] * x.value(i);
    }
    return sum;
}

double dual_objective(std::span<const double> alphas, std::span<const SparseVector> xs,
                      std::span<const int> ys) {
    double linear = 0.0;
    double quadratic = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        linear += alphas[i];
        if (alphas[i] == 0.0) continue;
        for (std::size_t j = 0; j < alphas.size(); ++j) {
            if (alphas[j] == 0.0) continue;
            quadratic += alphas[i] * alphas[j] * ys[i] * ys[j] * dot(xs[i], xs[j]);
        }
    }
    return linear - 0.5 * quadratic;
}

namespace {

// Upper bound on full sweeps; guards against slow cycling on degenerate data.
constexpr std::size_t kMaxSweeps = 20000;

class SmoSolver {
public:
    SmoSolver(std::span<const SparseVector> xs, std::span<const int> ys, const SvmParams& params)
        : xs_(xs), ys_(ys), params_(params), n_(xs.size()), gram_(n_ * n_), alpha_(n_, 0.0),
          errors_(n_) {
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i; j < n_; ++j) {
                const double k = dot(xs[i], xs[j]);
                gram_[i * n_ + j] = k;
                gram_[j * n_ + i] = k;
            }
        }
        stop_tol_ = params.tol / 2.0;
        snap_ = 1e-12 * params.c;
    }

    // Full sweeps alternate with sweeps over the free multipliers until those
    // settle. Only full sweeps count towards max_passes and termination.
    std::size_t solve() {
        std::size_t passes = 0;
        std::size_t sweeps = 0;
        bool examine_all = true;
        while (passes < params_.max_passes && sweeps < kMaxSweeps) {
            refresh_errors();
            bool any_violation = false;
            std::size_t changed = 0;
            for (std::size_t i = 0; i < n_; ++i) {
                if (!examine_all && !is_free(i)) continue;
                if (!violates(i)) continue;
                any_violation = true;
                if (optimize_with(i)) ++changed;
            }
            ++sweeps;
            if (examine_all) {
                if (!any_violation) break;
                passes = changed == 0 ? passes + 1 : 0;
                examine_all = changed == 0;
            } else if (changed == 0) {
                examine_all = true;
            }
        }
        return sweeps;
    }

    const std::vector<double>& alphas() const { return alpha_; }

private:
    double k(std::size_t i, std::size_t j) const { return gram_[i * n_ + j]; }

    bool is_free(std::size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < params_.c; }

    void refresh_errors() {
        for (std::size_t t = 0; t < n_; ++t) errors_[t] = bias_ - ys_[t];
        for (std::size_t s = 0; s < n_; ++s) {
            if (alpha_[s] == 0.0) continue;
            const double coef = alpha_[s] * ys_[s];
            const double* row = &gram_[s * n_];
            for (std::size_t t = 0; t < n_; ++t) errors_[t] += coef * row[t];
        }
    }

    bool violates(std::size_t i) const {
        const double r = errors_[i] * ys_[i];
        return (r < -stop_tol_ && alpha_[i] < params_.c) || (r > stop_tol_ && alpha_[i] > 0.0);
    }

    bool optimize_with(std::size_t i) {
        // Second choice: maximal |E_i - E_j|, lowest index on ties.
        std::size_t best = n_;
        double best_gap = -1.0;
        for (std::size_t j = 0; j < n_; ++j) {
            if (j == i) continue;
            const double gap = std::abs(errors_[i] - errors_[j]);
            if (gap > best_gap) {
                best_gap = gap;
                best = j;
            }
        }
        if (best < n_ && take_step(i, best)) return true;
        // Fall back to free multipliers, then everything, in index order.
        for (std::size_t j = 0; j < n_; ++j) {
            if (j == i || j == best) continue;
            if (is_free(j) && take_step(i, j)) return true;
        }
        for (std::size_t j = 0; j < n_; ++j) {
            if (j == i || j == best) continue;
            if (!is_free(j) && take_step(i, j)) return true;
        }
        return false;
    }

    double snap(double a) const {
        if (a < snap_) return 0.0;
        if (a > params_.c - snap_) return params_.c;
        return a;
    }

    bool take_step(std::size_t i, std::size_t j) {
        const double c = params_.c;
        const double ai = alpha_[i];
        const double aj = alpha_[j];
        const int yi = ys_[i];
        const int yj = ys_[j];
        const double ei = errors_[i];
        const double ej = errors_[j];

        double lo;
        double hi;
        if (yi != yj) {
            lo = std::max(0.0, aj - ai);
            hi = std::min(c, c + aj - ai);
        } else {
            lo = std::max(0.0, ai + aj - c);
            hi = std::min(c, ai + aj);
        }
        if (hi - lo <= snap_) return false;

        const double kii = k(i, i);
        const double kjj = k(j, j);
        const double kij = k(i, j);
        const double eta = kii + kjj - 2.0 * kij;

        double aj_new;
        if (eta > 0.0) {
            aj_new = std::clamp(aj + yj * (ei - ej) / eta, lo, hi);
        } else {
            // Objective is linear along the constraint line: take the better end.
            const double s = yi * yj;
            const auto objective_at = [&](double a2) {
                const double a1 = ai + s * (aj - a2);
                const double d1 = a1 - ai;
                const double d2 = a2 - aj;
                // Change in dual objective for the step (d1, d2).
                return d1 + d2 - (d1 * yi * (ei + yi - bias_) + d2 * yj * (ej + yj - bias_)) -
                       0.5 * (d1 * d1 * kii + d2 * d2 * kjj + 2.0 * s * d1 * d2 * kij);
            };
            const double at_lo = objective_at(lo);
            const double at_hi = objective_at(hi);
            if (at_lo > at_hi + params_.eps) {
                aj_new = lo;
            } else if (at_hi > at_lo + params_.eps) {
                aj_new = hi;
            } else {
                return false;
            }
        }
        aj_new = snap(aj_new);
        if (std::abs(aj_new - aj) < params_.eps) return false;

        const double ai_new = snap(ai + yi * yj * (aj - aj_new));
        const double di = ai_new - ai;
        const double dj = aj_new - aj;

        const double b1 = bias_ - ei - yi * di * kii - yj * dj * kij;
        const double b2 = bias_ - ej - yi * di * kij - yj * dj * kjj;
        double b_new;
        if (ai_new > 0.0 && ai_new < c) {
            b_new = b1;
        } else if (aj_new > 0.0 && aj_new < c) {
            b_new = b2;
        } else {
            b_new = 0.5 * (b1 + b2);
        }

        const double db = b_new - bias_;
        for (std::size_t t = 0; t < n_; ++t) {
            errors_[t] += yi * di * k(i, t) + yj * dj * k(j, t) + db;
        }
        alpha_[i] = ai_new;
        alpha_[j] = aj_new;
        bias_ = b_new;
        return true;
    }

    std::span<const SparseVector> xs_;
    std::span<const int> ys_;
    SvmParams params_;
    std::size_t n_;
    std::vector<double> gram_;
    std::vector<double> alpha_;
    std::vector<double> errors_;
    double bias_ = 0.0;
    double stop_tol_ = 0.0;
    double snap_ = 0.0;
};

double estimate_bias(const std::vector<double>& weights, std::span<const double> alphas,
                     std::span<const SparseVector> xs, std::span<const int> ys, double c) {
    const auto wx = [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t t = 0; t < xs[i].columns.size(); ++t) {
            s += weights[xs[i].columns[t]] * xs[i].value(t);
        }
        return s;
    };
    double free_sum = 0.0;
    std::size_t free_count = 0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const double target = ys[i] - wx(i);  // the b that puts x_i exactly on its margin
        if (alphas[i] > 0.0 && alphas[i] < c) {
            free_sum += target;
            ++free_count;
            continue;
        }
        // a=0 needs y f >= 1; a=C needs y f <= 1.
        const bool at_zero = alphas[i] <= 0.0;
        if ((ys[i] > 0) == at_zero) {
            lower = std::max(lower, target);
        } else {
            upper = std::min(upper, target);
        }
    }
    if (free_count > 0) return free_sum / static_cast<double>(free_count);
    if (std::isfinite(lower) && std::isfinite(upper)) return 0.5 * (lower + upper);
    if (std::isfinite(lower)) return lower;
    if (std::isfinite(upper)) return upper;
    return 0.0;
}

}  // namespace

SmoSolution solve_smo(std::span<const SparseVector> xs, std::span<const int> ys,
                      const SvmParams& params, std::size_t dimension) {
    params.validate();
    if (xs.size() != ys.size()) throw std::invalid_argument("xs and ys differ in length");
    if (xs.size() < 2) throw std::invalid_argument("need at least two training examples");
    bool has_pos = false;
    bool has_neg = false;
    for (int y : ys) {
        if (y == 1) {
            has_pos = true;
        } else if (y == -1) {
            has_neg = true;
        } else {
            throw std::invalid_argument("labels must be +1 or -1");
        }
    }
    if (!has_pos || !has_neg) throw std::invalid_argument("training data has a single label");

    std::size_t needed = 0;
    for (const auto& x : xs) {
        if (!x.columns.empty()) needed = std::max<std::size_t>(needed, x.columns.back() + 1);
    }
    if (dimension == 0) dimension = needed;
    if (dimension == 0) throw std::invalid_argument("empty feature space");
    if (dimension < needed) throw std::invalid_argument("feature column exceeds dimension");

    SmoSolver solver(xs, ys, params);
    SmoSolution solution;
    solution.sweeps = solver.solve();
    solution.alphas = solver.alphas();

    SvmModel& model = solution.model;
    model.params = params;
    model.weights.assign(dimension, 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double a = solution.alphas[i];
        if (a == 0.0) continue;
        ++model.n_support;
        for (std::size_t t = 0; t < xs[i].columns.size(); ++t) {
            model.weights[xs[i].columns[t]] += a * ys[i] * xs[i].value(t);
        }
    }
    model.bias = estimate_bias(model.weights, solution.alphas, xs, ys, params.c);
    return solution;
}

SvmModel train_binary(std::span<const SparseVector> xs, std::span<const int> ys,
                      const SvmParams& params, std::size_t dimension) {
    return solve_smo(xs, ys, params, dimension).model;
}

std::vector<KktViolation> check_kkt(const SvmModel& model, std::span<const double> alphas,
                                    std::span<const SparseVector> xs, std::span<const int> ys,
                                    double tol) {
    std::vector<KktViolation> out;
    const double c = model.params.c;
    const double snap = 1e-12 * c;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double margin = ys[i] * decision_value(model, xs[i]);
        const double a = alphas[i];
        bool ok;
        if (a <= snap) {
            ok = margin >= 1.0 - tol;
        } else if (a >= c - snap) {
            ok = margin <= 1.0 + tol;
        } else {
            ok = std::abs(margin - 1.0) <= tol;
        }
        if (!ok) out.push_back({i, a, margin});
    }
    return out;
}

}  // namespace attrforge
