#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lecto {

// Rows are actual classes, columns predicted, in the order of `classes`.
struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<std::int64_t>> counts;
    std::int64_t total() const;
};

ConfusionMatrix confusion(const std::vector<std::string>& pred,
                          const std::vector<std::string>& truth,
                          const std::vector<std::string>& classes);

struct MetricSuite {
    double accuracy = 0.0;
    double recall_weighted = 0.0;     // support-weighted; equals accuracy
    double precision_weighted = 0.0;  // support-weighted one-vs-rest
    double f1_weighted = 0.0;
    double mcc = 0.0;    // multiclass (R_k) form
    double kappa = 0.0;  // Cohen
    double error = 0.0;  // exactly 1 - accuracy
};

// Classes absent from both axes are dropped first. A class never predicted
// contributes precision 0. An all-zero matrix is rejected.
MetricSuite metric_suite(const ConfusionMatrix& m);

double mean_absolute_error(std::span<const double> pred, std::span<const double> truth);

struct ChiSquareResult {
    double stat = 0.0;
    int dof = 0;
    double p = 0.0;
};

// Pearson chi-square test of independence, no continuity correction. The
// table needs at least 2 rows and 2 columns and no zero marginal.
ChiSquareResult chi_square_independence(const std::vector<std::vector<std::int64_t>>& table);

struct HolmResult {
    std::vector<double> adjusted;  // same order as the input
    std::vector<bool> reject;      // adjusted < alpha
};

// Holm-Bonferroni step-down adjustment: sort ascending, adjusted_(i) =
// max over j<=i of (m-j+1)*p_(j), clipped at 1, restored to input order.
HolmResult holm_bonferroni(const std::vector<double>& p_values, double alpha);

// Regularized incomplete gamma functions, accurate to well below 1e-8
// absolute (series expansion for x < a+1, continued fraction otherwise).
double gamma_q(double a, double x);  // upper
double gamma_p(double a, double x);  // lower

// Upper tail of the chi-square distribution: Q(dof/2, x/2).
double chi_square_upper_tail(double stat, int dof);

}  // namespace lecto
