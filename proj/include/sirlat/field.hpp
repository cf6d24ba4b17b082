#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "sirlat/detail/csv.hpp"
#include "sirlat/params.hpp"

namespace sirlat {

/// Closed integer rectangle [x_lo, x_hi] x [y_lo, y_hi]; empty when x_lo > x_hi.
struct Window {
    int x_lo = 0;
    int x_hi = -1;
    int y_lo = 0;
    int y_hi = -1;

    static Window square(int radius) { return {-radius, radius, -radius, radius}; }
    static Window point(int x, int y) { return {x, x, y, y}; }

    bool empty() const { return x_lo > x_hi || y_lo > y_hi; }
    int width() const { return empty() ? 0 : x_hi - x_lo + 1; }
    int height() const { return empty() ? 0 : y_hi - y_lo + 1; }
    std::size_t size() const { return static_cast<std::size_t>(width()) * static_cast<std::size_t>(height()); }

    bool contains(int x, int y) const { return x >= x_lo && x <= x_hi && y >= y_lo && y <= y_hi; }

    Window dilated(int r) const
    {
        if (empty()) {
            return *this;
        }
        return {x_lo - r, x_hi + r, y_lo - r, y_hi + r};
    }

    Window united(const Window& o) const
    {
        if (empty()) {
            return o;
        }
        if (o.empty()) {
            return *this;
        }
        return {std::min(x_lo, o.x_lo), std::max(x_hi, o.x_hi), std::min(y_lo, o.y_lo), std::max(y_hi, o.y_hi)};
    }

    friend bool operator==(const Window&, const Window&) = default;
};

/// Dense per-site values over a window; reads outside the window give T{}.
template <class T>
class Field {
public:
    Field() = default;
    explicit Field(Window w) : window_(w), values_(w.size(), T{}) {}

    const Window& window() const { return window_; }
    const std::vector<T>& values() const { return values_; }
    std::vector<T>& values() { return values_; }

    T at(int x, int y) const { return window_.contains(x, y) ? values_[index(x, y)] : T{}; }

    /// Unchecked access; (x, y) must lie in the window.
    T& ref(int x, int y) { return values_[index(x, y)]; }
    const T& ref(int x, int y) const { return values_[index(x, y)]; }

    void set(int x, int y, T v)
    {
        if (!window_.contains(x, y)) {
            throw DomainError("Field::set outside window");
        }
        values_[index(x, y)] = v;
    }

    /// Copy onto a window containing the current one.
    Field regrown(const Window& w) const
    {
        Field out(w);
        for (int y = window_.y_lo; y <= window_.y_hi; ++y) {
            for (int x = window_.x_lo; x <= window_.x_hi; ++x) {
                out.ref(x, y) = ref(x, y);
            }
        }
        return out;
    }

    std::size_t index(int x, int y) const
    {
        return static_cast<std::size_t>(y - window_.y_lo) * static_cast<std::size_t>(window_.width()) +
               static_cast<std::size_t>(x - window_.x_lo);
    }

private:
    Window window_;
    std::vector<T> values_;
};

using RealField = Field<double>;
using CountField = Field<int>;

/// Sum over the site and its four l1 neighbours.
template <class T>
T neighbourhood_sum(const Field<T>& f, int x, int y)
{
    return f.at(x, y) + f.at(x + 1, y) + f.at(x - 1, y) + f.at(x, y + 1) + f.at(x, y - 1);
}

template <class T>
double max_abs_diff(const Field<T>& a, const Field<T>& b)
{
    const Window w = a.window().united(b.window());
    double m = 0.0;
    for (int y = w.y_lo; y <= w.y_hi; ++y) {
        for (int x = w.x_lo; x <= w.x_hi; ++x) {
            m = std::max(m, std::abs(static_cast<double>(a.at(x, y)) - static_cast<double>(b.at(x, y))));
        }
    }
    return m;
}

/// CSV with header x,y,value, rows in y-major order.
template <class T>
void write_field_csv(std::ostream& out, const Field<T>& f)
{
    out << "x,y,value\n";
    const Window& w = f.window();
    for (int y = w.y_lo; y <= w.y_hi; ++y) {
        for (int x = w.x_lo; x <= w.x_hi; ++x) {
            out << x << ',' << y << ',';
            if constexpr (std::is_floating_point_v<T>) {
                out << detail::fmt_double(f.ref(x, y));
            } else {
                out << f.ref(x, y);
            }
            out << '\n';
        }
    }
}

/// ASCII PGM (P2, maxval 255) with gray = round(value * scale * 255), clamped.
/// The top row is y_hi so the picture has the usual orientation.
template <class T>
void write_field_pgm(std::ostream& out, const Field<T>& f, double scale = 1.0)
{
    const Window& w = f.window();
    out << "P2\n" << w.width() << ' ' << w.height() << "\n255\n";
    for (int y = w.y_hi; y >= w.y_lo; --y) {
        for (int x = w.x_lo; x <= w.x_hi; ++x) {
            const double v = std::clamp(static_cast<double>(f.ref(x, y)) * scale, 0.0, 1.0);
            out << static_cast<int>(std::lround(v * 255.0));
            out << (x == w.x_hi ? '\n' : ' ');
        }
    }
}

}  // namespace sirlat
