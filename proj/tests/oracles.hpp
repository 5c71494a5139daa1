#pragma once

// Reference implementations used only by tests. They are deliberately
// naive so they can be checked by eye.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

// Textbook recursive Cox-de Boor definition, half-open intervals.
inline double cox_de_boor(const std::vector<double>& t, int i, int k, double x) {
    if (k == 0) return (t[i] <= x && x < t[i + 1]) ? 1.0 : 0.0;
    double left = 0.0;
    double right = 0.0;
    if (t[i + k] != t[i]) left = (x - t[i]) / (t[i + k] - t[i]) * cox_de_boor(t, i, k - 1, x);
    if (t[i + k + 1] != t[i + 1]) {
        right = (t[i + k + 1] - x) / (t[i + k + 1] - t[i + 1]) * cox_de_boor(t, i + 1, k - 1, x);
    }
    return left + right;
}

inline std::vector<double> uniform_knots(double lo, double hi, int g, int k) {
    std::vector<double> t;
    const double h = (hi - lo) / g;
    for (int i = -k; i <= g + k; ++i) t.push_back(lo + i * h);
    return t;
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double rel_error(double a, double b, double floor = 1e-8) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace oracle
