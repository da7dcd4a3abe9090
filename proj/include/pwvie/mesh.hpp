#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "pwvie/error.hpp"

namespace pwvie {

/// Up to four nodes and their Lagrange weights.
struct Stencil {
    std::array<std::size_t, 4> index{};
    std::array<double, 4> weight{};
    int size = 0;
};

/// Contiguous panels with g Chebyshev-Lobatto nodes each; neighbouring
/// panels share their common endpoint node.
class Mesh {
public:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    Mesh() = default;
    Mesh(std::vector<double> breaks, int nodes_per_panel) : breaks_(std::move(breaks)), g_(nodes_per_panel) {
        if (g_ < 2) throw Error(ErrorCode::Domain, "need at least 2 nodes per panel");
        if (breaks_.size() < 2) throw Error(ErrorCode::Domain, "mesh needs at least one panel");
        for (std::size_t i = 1; i < breaks_.size(); ++i)
            if (!(breaks_[i] > breaks_[i - 1])) throw Error(ErrorCode::Domain, "mesh breaks must increase");
        nodes_.reserve(panels() * static_cast<std::size_t>(g_ - 1) + 1);
        for (std::size_t p = 0; p < panels(); ++p) {
            const double a = breaks_[p], b = breaks_[p + 1];
            for (int k = p == 0 ? 0 : 1; k < g_; ++k) {
                double x = a + (b - a) * (1 - std::cos(std::numbers::pi * k / (g_ - 1))) / 2;
                if (k == g_ - 1) x = b;
                nodes_.push_back(x);
            }
        }
    }

    /// [0,h], then [h(1+(m-1)eps), h(1+m eps)] clipped at T.
    static Mesh step_mesh(double h, double eps, double T, int g) {
        if (!(h > 0)) throw Error(ErrorCode::Domain, "first interval length must be positive");
        std::vector<double> b{0.0, std::min(h, T)};
        if (b.back() < T && !(eps > 0))
            throw Error(ErrorCode::StepOrdering, "no admissible step stretch (eps = 0)");
        for (int m = 1; b.back() < T; ++m) {
            const double next = h * (1 + m * eps);
            b.push_back(next >= T * (1 - 1e-12) ? T : next);
        }
        return Mesh(std::move(b), g);
    }

    /// [0, t_min], then panels doubling in length up to T.
    static Mesh geometric(double t_min, double T, int g) {
        if (!(t_min > 0 && t_min < T)) throw Error(ErrorCode::Domain, "need 0 < t_min < T");
        std::vector<double> b{0.0, t_min};
        while (b.back() < T) b.push_back(std::min(2 * b.back(), T));
        const std::size_t n = b.size();
        if (n > 3 && b[n - 1] - b[n - 2] < 0.5 * (b[n - 2] - b[n - 3])) b.erase(b.end() - 2);
        return Mesh(std::move(b), g);
    }

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& breaks() const { return breaks_; }
    std::size_t size() const { return nodes_.size(); }
    std::size_t panels() const { return breaks_.size() - 1; }
    int nodes_per_panel() const { return g_; }
    double start() const { return breaks_.front(); }
    double end() const { return breaks_.back(); }

    std::size_t panel_first(std::size_t p) const { return p * static_cast<std::size_t>(g_ - 1); }
    std::size_t panel_last(std::size_t p) const { return panel_first(p) + static_cast<std::size_t>(g_ - 1); }

    /// Panel containing t; a shared endpoint belongs to the lower panel.
    std::size_t panel_of(double t) const {
        if (t < start() || t > end()) throw Error(ErrorCode::Domain, "point outside the mesh");
        auto it = std::lower_bound(breaks_.begin() + 1, breaks_.end(), t);
        return static_cast<std::size_t>(it - breaks_.begin()) - 1;
    }

    /// Cubic Lagrange stencil inside the panel of t, using no node with index
    /// above max_index.
    Stencil stencil(double t, std::size_t max_index = npos) const {
        std::size_t p = panel_of(t);
        if (max_index != npos && panel_first(p) > max_index) p = max_index == 0 ? 0 : panel_of(nodes_[max_index]);
        const std::size_t first = panel_first(p);
        std::size_t last = panel_last(p);
        if (max_index != npos) last = std::min(last, std::max(max_index, first));
        // Local interval containing t.
        auto it = std::upper_bound(nodes_.begin() + static_cast<std::ptrdiff_t>(first),
                                   nodes_.begin() + static_cast<std::ptrdiff_t>(panel_last(p)), t);
        std::size_t k = static_cast<std::size_t>(it - nodes_.begin());
        k = k == first ? first : k - 1;
        Stencil s;
        const std::size_t avail = last - first + 1;
        // With fewer than four admissible nodes the stencil degrades to the
        // linear interpolant on the interval containing t.
        s.size = avail >= 4 ? 4 : static_cast<int>(std::min<std::size_t>(2, avail));
        std::size_t lo = s.size == 4 && k > first ? k - 1 : std::min(k, last);
        if (lo + static_cast<std::size_t>(s.size) - 1 > last) lo = last + 1 - static_cast<std::size_t>(s.size);
        for (int i = 0; i < s.size; ++i) s.index[static_cast<std::size_t>(i)] = lo + static_cast<std::size_t>(i);
        for (int i = 0; i < s.size; ++i) {
            double w = 1;
            const double xi = nodes_[s.index[static_cast<std::size_t>(i)]];
            for (int j = 0; j < s.size; ++j) {
                if (j == i) continue;
                const double xj = nodes_[s.index[static_cast<std::size_t>(j)]];
                w *= (t - xj) / (xi - xj);
            }
            s.weight[static_cast<std::size_t>(i)] = w;
        }
        return s;
    }

private:
    std::vector<double> breaks_;
    int g_ = 0;
    std::vector<double> nodes_;
};

/// Node values on a mesh with piecewise-cubic interpolation.
class MeshFunction {
public:
    MeshFunction() = default;
    MeshFunction(Mesh mesh, std::vector<double> values) : mesh_(std::move(mesh)), values_(std::move(values)) {
        if (values_.size() != mesh_.size()) throw Error(ErrorCode::Domain, "value count differs from node count");
        for (double v : values_)
            if (!std::isfinite(v)) throw Error(ErrorCode::Domain, "non-finite mesh value");
    }

    const Mesh& mesh() const { return mesh_; }
    const std::vector<double>& values() const { return values_; }
    bool empty() const { return values_.empty(); }

    double operator()(double t) const {
        const Stencil s = mesh_.stencil(t);
        double v = 0;
        for (int i = 0; i < s.size; ++i)
            v += s.weight[static_cast<std::size_t>(i)] * values_[s.index[static_cast<std::size_t>(i)]];
        return v;
    }

private:
    Mesh mesh_;
    std::vector<double> values_;
};

}  // namespace pwvie
