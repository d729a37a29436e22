#include "ko/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace ko::quad {
namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod(const Integrand& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(mid);
    double k = fc * kWgk[7];
    double g = fc * kWg[3];
    for (std::size_t i = 0; i < 7; ++i) {
        const double dx = half * kXgk[i];
        const double sum = f(mid - dx) + f(mid + dx);
        k += kWgk[i] * sum;
        if (i % 2 == 1) g += kWg[i / 2] * sum;
    }
    return {a, b, k * half, std::abs((k - g) * half)};
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, double rel_tol, double abs_tol,
                 std::size_t max_intervals) {
    Result r;
    if (a == b) {
        r.converged = true;
        return r;
    }
    std::priority_queue<Segment> heap;
    Segment first = kronrod(f, a, b);
    r.evaluations = 15;
    double total = first.value;
    double err = first.error;
    heap.push(first);

    // K15 and G7 can agree by accident across a kink, so the first interval is
    // always bisected and children inherit the parent/children discrepancy.
    bool split = false;
    while ((!split || err > std::max(abs_tol, rel_tol * std::abs(total))) && heap.size() < max_intervals) {
        if (!std::isfinite(total)) break;
        Segment worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) break;  // interval below resolution
        heap.pop();
        split = true;
        Segment left = kronrod(f, worst.a, mid);
        Segment right = kronrod(f, mid, worst.b);
        r.evaluations += 30;
        const double gap = 0.5 * std::abs(worst.value - (left.value + right.value));
        left.error = std::max(left.error, gap);
        right.error = std::max(right.error, gap);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed the drift of the running updates.
    total = 0.0;
    err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    r.value = total;
    r.error = err;
    r.converged = std::isfinite(total) && err <= std::max(abs_tol, rel_tol * std::abs(total)) * 1.0001;
    return r;
}

TailResult integrate_to_infinity(const Integrand& f, double a, double width, double rel_tol,
                                 std::size_t max_panels) {
    TailResult out;
    double sum = 0.0;
    double prev_panel = 0.0;
    double prev_ratio = -1.0;
    double prev_estimate = 0.0;
    std::size_t non_shrinking = 0;

    for (std::size_t j = 0; j < max_panels; ++j) {
        const double lo = a + width * (std::ldexp(1.0, static_cast<int>(j)) - 1.0);
        const double hi = a + width * (std::ldexp(1.0, static_cast<int>(j) + 1) - 1.0);
        if (!std::isfinite(hi)) break;
        const Result panel = integrate(f, lo, hi, rel_tol * 0.1, rel_tol * 0.01 * std::abs(sum));
        out.panels = j + 1;
        if (!std::isfinite(panel.value)) {
            out.value = panel.value;
            out.status = TailStatus::Diverged;
            return out;
        }
        sum += panel.value;

        if (j >= 2 && panel.value <= rel_tol * std::abs(sum)) {
            out.value = sum;
            out.remainder = 0.0;
            out.status = TailStatus::Converged;
            return out;
        }

        const double ratio = prev_panel > 0.0 ? panel.value / prev_panel : -1.0;
        out.last_ratio = ratio;
        if (ratio >= 0.999) ++non_shrinking;
        else non_shrinking = 0;

        if (ratio > 0.0 && ratio < 0.999 && prev_ratio > 0.0 && prev_ratio < 0.999) {
            const double remainder = panel.value * ratio / (1.0 - ratio);
            const double estimate = sum + remainder;
            if (j >= 4 && std::abs(estimate - prev_estimate) <= rel_tol * std::abs(estimate) &&
                std::abs(ratio - prev_ratio) <= 1e-3) {
                out.value = estimate;
                out.remainder = remainder;
                out.status = TailStatus::Converged;
                return out;
            }
            prev_estimate = estimate;
        }
        // Panel sums that keep pace with the doubling width never settle.
        if (j >= 40 && non_shrinking >= 20) {
            out.value = sum;
            out.status = TailStatus::Diverged;
            return out;
        }
        prev_ratio = ratio;
        prev_panel = panel.value;
    }
    out.value = sum;
    out.status = non_shrinking > 0 ? TailStatus::Diverged : TailStatus::Unresolved;
    return out;
}

}  // namespace ko::quad
