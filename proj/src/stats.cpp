#include "lectometer/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lectometer/error.hpp"

namespace lecto {

std::int64_t ConfusionMatrix::total() const {
    std::int64_t t = 0;
    for (const auto& row : counts)
        for (std::int64_t c : row) t += c;
    return t;
}

ConfusionMatrix confusion(const std::vector<std::string>& pred,
                          const std::vector<std::string>& truth,
                          const std::vector<std::string>& classes) {
    if (pred.size() != truth.size())
        throw ValidationError("pred and truth must have the same length");
    if (classes.empty()) throw ValidationError("class list must not be empty");

    ConfusionMatrix m;
    m.classes = classes;
    m.counts.assign(classes.size(), std::vector<std::int64_t>(classes.size(), 0));
    auto index_of = [&](const std::string& label) {
        auto it = std::find(classes.begin(), classes.end(), label);
        if (it == classes.end())
            throw ValidationError("label \"" + label + "\" is not in the class list");
        return static_cast<size_t>(it - classes.begin());
    };
    for (size_t i = 0; i < pred.size(); ++i)
        ++m.counts[index_of(truth[i])][index_of(pred[i])];
    return m;
}

MetricSuite metric_suite(const ConfusionMatrix& m) {
    const size_t n_in = m.classes.size();
    if (m.counts.size() != n_in) throw ValidationError("confusion matrix shape mismatch");
    for (const auto& row : m.counts)
        if (row.size() != n_in) throw ValidationError("confusion matrix shape mismatch");

    // Classes absent from both axes carry no information; drop them.
    std::vector<size_t> keep;
    for (size_t i = 0; i < n_in; ++i) {
        std::int64_t row = 0, col = 0;
        for (size_t j = 0; j < n_in; ++j) {
            row += m.counts[i][j];
            col += m.counts[j][i];
        }
        if (row > 0 || col > 0) keep.push_back(i);
    }
    if (keep.empty()) throw ValidationError("confusion matrix is empty");

    const size_t n = keep.size();
    std::vector<std::vector<std::int64_t>> c(n, std::vector<std::int64_t>(n, 0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) c[i][j] = m.counts[keep[i]][keep[j]];

    std::vector<std::int64_t> rowsum(n, 0), colsum(n, 0);
    std::int64_t total = 0, trace = 0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            rowsum[i] += c[i][j];
            colsum[j] += c[i][j];
            total += c[i][j];
        }
        trace += c[i][i];
    }

    MetricSuite s;
    const double N = static_cast<double>(total);
    s.accuracy = static_cast<double>(trace) / N;
    s.error = 1.0 - s.accuracy;

    double precision_w = 0.0, recall_w = 0.0, f1_w = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double weight = static_cast<double>(rowsum[i]) / N;
        const double tp = static_cast<double>(c[i][i]);
        const double precision = colsum[i] > 0 ? tp / static_cast<double>(colsum[i]) : 0.0;
        const double recall = rowsum[i] > 0 ? tp / static_cast<double>(rowsum[i]) : 0.0;
        const double f1 =
            precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        precision_w += weight * precision;
        recall_w += weight * recall;
        f1_w += weight * f1;
    }
    s.precision_weighted = precision_w;
    s.recall_weighted = recall_w;
    s.f1_weighted = f1_w;

    // Multiclass correlation (R_k) and Cohen's kappa share the marginals.
    double sum_pt = 0.0, sum_pp = 0.0, sum_tt = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sum_pt += static_cast<double>(colsum[i]) * static_cast<double>(rowsum[i]);
        sum_pp += static_cast<double>(colsum[i]) * static_cast<double>(colsum[i]);
        sum_tt += static_cast<double>(rowsum[i]) * static_cast<double>(rowsum[i]);
    }
    const double mcc_num = static_cast<double>(trace) * N - sum_pt;
    const double mcc_den = std::sqrt((N * N - sum_pp) * (N * N - sum_tt));
    if (mcc_den > 0.0)
        s.mcc = mcc_num / mcc_den;
    else
        s.mcc = s.accuracy == 1.0 ? 1.0 : 0.0;  // single observed class

    const double pe = sum_pt / (N * N);
    if (pe < 1.0)
        s.kappa = (s.accuracy - pe) / (1.0 - pe);
    else
        s.kappa = s.accuracy == 1.0 ? 1.0 : 0.0;
    return s;
}

double mean_absolute_error(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size())
        throw ValidationError("pred and truth must have the same length");
    if (pred.empty()) throw ValidationError("mean absolute error needs at least one pair");
    double sum = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) sum += std::fabs(pred[i] - truth[i]);
    return sum / static_cast<double>(pred.size());
}

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 3e-16;

double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n <= kMaxIter; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_continued_fraction(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (a <= 0.0) throw ValidationError("gamma shape must be positive");
    if (x < 0.0) throw ValidationError("gamma argument must be non-negative");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_continued_fraction(a, x);
}

double gamma_p(double a, double x) { return 1.0 - gamma_q(a, x); }

double chi_square_upper_tail(double stat, int dof) {
    if (dof <= 0) throw ValidationError("chi-square needs at least one degree of freedom");
    if (stat < 0.0) throw ValidationError("chi-square statistic must be non-negative");
    return gamma_q(static_cast<double>(dof) / 2.0, stat / 2.0);
}

ChiSquareResult chi_square_independence(const std::vector<std::vector<std::int64_t>>& table) {
    const size_t rows = table.size();
    if (rows < 2) throw ValidationError("contingency table needs at least 2 rows");
    const size_t cols = table[0].size();
    if (cols < 2) throw ValidationError("contingency table needs at least 2 columns");
    for (const auto& row : table) {
        if (row.size() != cols) throw ValidationError("contingency table rows differ in length");
        for (std::int64_t v : row)
            if (v < 0) throw ValidationError("contingency counts must be non-negative");
    }

    std::vector<std::int64_t> rowsum(rows, 0), colsum(cols, 0);
    std::int64_t total = 0;
    for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j) {
            rowsum[i] += table[i][j];
            colsum[j] += table[i][j];
            total += table[i][j];
        }
    for (std::int64_t v : rowsum)
        if (v == 0) throw ValidationError("contingency table has a zero row marginal");
    for (std::int64_t v : colsum)
        if (v == 0) throw ValidationError("contingency table has a zero column marginal");

    ChiSquareResult r;
    for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j) {
            const double expected = static_cast<double>(rowsum[i]) *
                                    static_cast<double>(colsum[j]) / static_cast<double>(total);
            const double diff = static_cast<double>(table[i][j]) - expected;
            r.stat += diff * diff / expected;
        }
    r.dof = static_cast<int>((rows - 1) * (cols - 1));
    r.p = chi_square_upper_tail(r.stat, r.dof);
    return r;
}

HolmResult holm_bonferroni(const std::vector<double>& p_values, double alpha) {
    if (p_values.empty()) throw ValidationError("Holm adjustment needs at least one p-value");
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0))
            throw ValidationError("p-values must lie in [0, 1]");

    const size_t m = p_values.size();
    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return p_values[a] < p_values[b]; });

    HolmResult r;
    r.adjusted.assign(m, 0.0);
    r.reject.assign(m, false);
    double running = 0.0;
    for (size_t i = 0; i < m; ++i) {
        const double scaled = static_cast<double>(m - i) * p_values[order[i]];
        running = std::max(running, scaled);
        r.adjusted[order[i]] = std::min(1.0, running);
    }
    for (size_t i = 0; i < m; ++i) r.reject[i] = r.adjusted[i] < alpha;
    return r;
}

}  // namespace lecto
