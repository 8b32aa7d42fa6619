#include "wgkit/materials.hpp"

#include <cmath>
#include <sstream>

namespace wgkit {

MaterialModel MaterialModel::constant(std::string name, double n, double lambda_min,
                                      double lambda_max) {
    if (!(n >= 1.0)) throw DomainError("material '" + name + "': constant index must be >= 1");
    if (!(lambda_min > 0.0 && lambda_max > lambda_min))
        throw DomainError("material '" + name + "': invalid wavelength range");
    MaterialModel m;
    m.name = std::move(name);
    m.kind = MaterialKind::constant;
    m.n_const = n;
    m.lambda_min = lambda_min;
    m.lambda_max = lambda_max;
    return m;
}

MaterialModel MaterialModel::sellmeier(std::string name, std::array<double, 3> b,
                                       std::array<double, 3> c_um2, double lambda_min,
                                       double lambda_max) {
    if (!(lambda_min > 0.0 && lambda_max > lambda_min))
        throw DomainError("material '" + name + "': invalid wavelength range");
    MaterialModel m;
    m.name = std::move(name);
    m.kind = MaterialKind::sellmeier;
    m.sellmeier_b = b;
    m.sellmeier_c_um2 = c_um2;
    m.lambda_min = lambda_min;
    m.lambda_max = lambda_max;
    return m;
}

MaterialModel tantala_default() { return MaterialModel::constant("Ta2O5", 2.10, 0.3e-6, 2.0e-6); }

MaterialModel fused_silica_malitson() {
    return MaterialModel::sellmeier("SiO2", {0.6961663, 0.4079426, 0.8974794},
                                    {0.0684043 * 0.0684043, 0.1162414 * 0.1162414,
                                     9.896161 * 9.896161},
                                    0.21e-6, 3.71e-6);
}

MaterialModel air() { return MaterialModel::constant("air", 1.0, 0.1e-6, 10.0e-6); }

double refractive_index(const MaterialModel& model, double lambda) {
    if (!model.in_range(lambda)) {
        std::ostringstream msg;
        msg << "material '" << model.name << "': wavelength " << lambda * 1e9
            << " nm outside valid range [" << model.lambda_min * 1e9 << ", "
            << model.lambda_max * 1e9 << "] nm";
        throw DomainError(msg.str());
    }
    if (model.kind == MaterialKind::constant) return model.n_const;

    const double l_um = lambda * 1e6;
    const double l2 = l_um * l_um;
    double n2 = 1.0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double denom = l2 - model.sellmeier_c_um2[i];
        if (denom == 0.0)
            throw DomainError("material '" + model.name + "': Sellmeier pole at wavelength");
        n2 += model.sellmeier_b[i] * l2 / denom;
    }
    if (!(n2 >= 1.0))
        throw DomainError("material '" + model.name +
                          "': Sellmeier sum gives n^2 < 1 (malformed coefficients)");
    return std::sqrt(n2);
}

}  // namespace wgkit
