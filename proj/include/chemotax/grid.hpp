#pragma once

#include <cstddef>
#include <vector>

#include "chemotax/errors.hpp"
#include "chemotax/model.hpp"

namespace chemotax {

/// Uniform cell-centered grid on an interval or rectangle.
/// Cells are indexed i + nx*j with x running fastest; in 1D ny()==1 and the
/// y spacing is a nominal 1 so cell_measure() is just hx.
class Grid {
public:
    static Grid build(const DomainSpec& domain);

    int dimension() const { return dim_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    double length_x() const { return lenx_; }
    double length_y() const { return leny_; }
    std::size_t cell_count() const { return static_cast<std::size_t>(nx_) * ny_; }
    double cell_measure() const { return hx_ * hy_; }
    // Defined as the sum of cell measures so quadrature closes exactly.
    double measure() const { return cell_measure() * static_cast<double>(cell_count()); }
    double min_spacing() const { return dim_ == 2 ? (hx_ < hy_ ? hx_ : hy_) : hx_; }

    double x_center(int i) const { return (i + 0.5) * hx_; }
    double y_center(int j) const { return (j + 0.5) * hy_; }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx_) * j;
    }

    bool operator==(const Grid&) const = default;

private:
    int dim_ = 1;
    int nx_ = 0;
    int ny_ = 1;
    double hx_ = 0.0;
    double hy_ = 1.0;
    double lenx_ = 0.0;
    double leny_ = 1.0;
};

/// One real value per cell.
struct Field {
    Grid grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const Grid& g, double fill = 0.0)
        : grid(g), values(g.cell_count(), fill) {}

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    double& at(int i, int j) { return values[grid.index(i, j)]; }
    double at(int i, int j) const { return values[grid.index(i, j)]; }

    bool operator==(const Field&) const = default;
};

/// True if every entry is finite.
bool all_finite(const Field& f);

/// Arithmetic cell average (equals the mean over Omega on a uniform grid).
double mean(const Field& f);

} // namespace chemotax
