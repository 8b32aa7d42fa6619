#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace wgkit {

// Thrown for any physically or numerically invalid input. The CLI maps it to
// exit status 1.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class MaterialKind { constant, sellmeier };

// Lossless, wavelength-dependent refractive index.
// Sellmeier: n^2 = 1 + sum_i B_i lambda^2 / (lambda^2 - C_i), lambda in um, C in um^2.
struct MaterialModel {
    std::string name;
    MaterialKind kind = MaterialKind::constant;
    double n_const = 1.0;
    std::array<double, 3> sellmeier_b{};
    std::array<double, 3> sellmeier_c_um2{};
    double lambda_min = 0.0;  // m
    double lambda_max = 0.0;  // m

    static MaterialModel constant(std::string name, double n, double lambda_min, double lambda_max);
    static MaterialModel sellmeier(std::string name, std::array<double, 3> b,
                                   std::array<double, 3> c_um2, double lambda_min,
                                   double lambda_max);

    bool in_range(double lambda) const { return lambda >= lambda_min && lambda <= lambda_max; }
};

// Default stack: Ta2O5 core (n = 2.10), Malitson fused silica, air.
MaterialModel tantala_default();
MaterialModel fused_silica_malitson();
MaterialModel air();

// Throws DomainError when lambda is outside the valid range or the Sellmeier
// sum yields n^2 < 1.
double refractive_index(const MaterialModel& model, double lambda);

}  // namespace wgkit
