#include "wgkit/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "wgkit/materials.hpp"
#include "wgkit/parallel.hpp"

namespace wgkit {

double to_total_loss_db(double transmission) {
    if (!(transmission > 0.0)) throw DomainError("transmission must be positive");
    if (transmission > 1.0) throw DomainError("transmission must not exceed 1");
    return -10.0 * std::log10(transmission);
}

void CutbackDataset::add_transmission(double length_mm, double transmission, bool excluded,
                                      std::string reason) {
    add_loss_db(length_mm, to_total_loss_db(transmission), excluded, std::move(reason));
}

void CutbackDataset::add_loss_db(double length_mm, double loss_db, bool excluded, std::string reason) {
    if (!std::isfinite(length_mm) || length_mm < 0.0)
        throw DomainError("cutback: length must be finite and non-negative");
    if (!std::isfinite(loss_db) || loss_db < 0.0)
        throw DomainError("cutback: loss must be finite and non-negative (transmission <= 1)");
    entries.push_back({length_mm, loss_db, excluded, std::move(reason), std::nullopt});
}

LossFit fit_cutback(const CutbackDataset& data, bool weighted) {
    LossFit fit;
    std::vector<const CutbackEntry*> use;
    for (std::size_t i = 0; i < data.entries.size(); ++i) {
        if (data.entries[i].excluded)
            fit.excluded.push_back(i);
        else
            use.push_back(&data.entries[i]);
    }
    if (use.size() < 2) throw DomainError("cutback: need at least two usable points");
    std::set<double> distinct;
    for (auto* e : use) distinct.insert(e->length_mm);
    if (distinct.size() < 2) throw DomainError("cutback: all lengths identical");

    // Sort by length so the sums do not depend on entry order.
    std::stable_sort(use.begin(), use.end(), [](auto* a, auto* b) {
        return a->length_mm < b->length_mm || (a->length_mm == b->length_mm && a->loss_db < b->loss_db);
    });

    const int n = static_cast<int>(use.size());
    std::vector<double> w(n, 1.0);
    if (weighted)
        for (int i = 0; i < n; ++i) {
            if (!use[i]->sigma_db || !(*use[i]->sigma_db > 0.0))
                throw DomainError("cutback: weighted fit needs a positive sigma on every point");
            w[i] = 1.0 / (*use[i]->sigma_db * *use[i]->sigma_db);
        }

    // Centered sums keep the slope well-conditioned.
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (int i = 0; i < n; ++i) {
        sw += w[i];
        sx += w[i] * use[i]->length_mm;
        sy += w[i] * use[i]->loss_db;
    }
    const double xm = sx / sw, ym = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dx = use[i]->length_mm - xm;
        sxx += w[i] * dx * dx;
        sxy += w[i] * dx * (use[i]->loss_db - ym);
    }
    fit.slope = sxy / sxx;
    fit.intercept = ym - fit.slope * xm;
    fit.n_points = n;

    double scale;  // variance scale for (X^T W X)^{-1}
    if (weighted) {
        scale = 1.0;
    } else if (n == 2) {
        fit.degenerate = true;
        scale = 0.0;
    } else {
        double ssr = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = use[i]->loss_db - (fit.intercept + fit.slope * use[i]->length_mm);
            ssr += r * r;
        }
        scale = ssr / (n - 2);
    }
    fit.slope_err = std::sqrt(scale / sxx);
    fit.intercept_err = std::sqrt(scale * (1.0 / sw + xm * xm / sxx));
    fit.covariance = -scale * xm / sxx;
    return fit;
}

InsertionLoss insertion_loss(const LossFit& fit, double l_out_db) {
    if (!(l_out_db >= 0.0)) throw DomainError("insertion_loss: L_out must be >= 0");
    InsertionLoss r;
    r.value = fit.intercept - l_out_db;
    r.error = fit.intercept_err;
    r.negative = r.value < 0.0;
    return r;
}

CoverageResult cutback_coverage(double slope, double intercept, const std::vector<double>& lengths_mm,
                                double sigma_db, int trials, std::uint64_t master_seed, double k_se,
                                int threads) {
    if (trials < 1) throw DomainError("coverage: need at least one trial");
    if (lengths_mm.size() < 3) throw DomainError("coverage: need at least three lengths");
    if (!(sigma_db > 0.0)) throw DomainError("coverage: noise level must be positive");

    double xm = 0.0;
    for (double l : lengths_mm) xm += l;
    xm /= static_cast<double>(lengths_mm.size());
    double sxx = 0.0;
    for (double l : lengths_mm) sxx += (l - xm) * (l - xm);
    const double known_se = sigma_db / std::sqrt(sxx);

    struct Hit {
        bool slope, intercept, known;
    };
    const auto hits = parallel_map(
        static_cast<std::size_t>(trials),
        [&](std::size_t t) {
            std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                              static_cast<std::uint32_t>(master_seed >> 32),
                              static_cast<std::uint32_t>(t)};
            std::mt19937_64 rng(seq);
            std::normal_distribution<double> noise(0.0, sigma_db);
            CutbackDataset d;
            for (double l : lengths_mm) {
                // Losses stay positive for any sane sigma; clamp just in case.
                d.add_loss_db(l, std::max(0.0, intercept + slope * l + noise(rng)));
            }
            const LossFit f = fit_cutback(d);
            return Hit{std::abs(f.slope - slope) <= k_se * f.slope_err,
                       std::abs(f.intercept - intercept) <= k_se * f.intercept_err,
                       std::abs(f.slope - slope) <= k_se * known_se};
        },
        threads);

    CoverageResult r;
    r.trials = trials;
    for (const auto& h : hits) {
        r.slope_coverage += h.slope;
        r.intercept_coverage += h.intercept;
        r.slope_coverage_known_sigma += h.known;
    }
    r.slope_coverage /= trials;
    r.intercept_coverage /= trials;
    r.slope_coverage_known_sigma /= trials;
    return r;
}

std::optional<double> te_slab_neff(double n_f, double n_s, double n_c, double thickness,
                                   double lambda) {
    if (!(thickness > 0.0 && lambda > 0.0)) throw DomainError("slab: invalid thickness or wavelength");
    const double n_clad = std::max(n_s, n_c);
    if (!(n_f > n_clad)) return std::nullopt;
    const double k0 = 2.0 * std::numbers::pi / lambda;
    // Fundamental TE root of t kappa - atan(gs/kappa) - atan(gc/kappa); the
    // residual falls monotonically from n_clad to n_f.
    auto residual = [&](double n) {
        const double kappa = k0 * std::sqrt(n_f * n_f - n * n);
        const double gs = k0 * std::sqrt(n * n - n_s * n_s);
        const double gc = k0 * std::sqrt(n * n - n_c * n_c);
        return thickness * kappa - std::atan(gs / kappa) - std::atan(gc / kappa);
    };
    double lo = n_clad, hi = n_f;
    const double eps = 1e-14 * n_f;
    if (residual(lo + eps) < 0.0) return std::nullopt;  // below cutoff
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid) > 0.0 ? lo : hi) = mid;
    }
    const double n = 0.5 * (lo + hi);
    if (n <= n_clad + eps) return std::nullopt;
    return n;
}

SlabEquivalent effective_slab_reduction(const WaveguideGeometry& geom, double lambda) {
    geom.validate();
    const double nf = refractive_index(geom.core, lambda);
    const double ns = refractive_index(geom.substrate, lambda);
    const double nc = refractive_index(geom.superstrate, lambda);
    SlabEquivalent s;
    s.half_width = 0.5 * geom.core_width;
    s.n2 = nc;
    if (nf == ns && nf == nc) {
        // No vertical structure: the film index is the material index.
        s.n1 = nf;
        s.lateral_neff = nf;
        return s;
    }
    const auto film = te_slab_neff(nf, ns, nc, geom.core_height, lambda);
    if (!film) throw DomainError("slab reduction: vertical slab below cutoff");
    s.n1 = *film;
    const auto lateral = te_slab_neff(s.n1, nc, nc, geom.core_width, lambda);
    if (!lateral) throw DomainError("slab reduction: lateral slab below cutoff");
    s.lateral_neff = *lateral;
    return s;
}

void RoughnessSpec::validate() const {
    if (!(sigma >= 0.0)) throw DomainError("roughness: sigma must be >= 0");
    if (!(correlation_length > 0.0)) throw DomainError("roughness: correlation length must be > 0");
}

namespace {

constexpr double kDbPerNeper = 4.342944819032518;  // 10 log10(e)

}  // namespace

double payne_lacey_alpha(const SlabEquivalent& slab, const RoughnessSpec& rough, double lambda,
                         const PayneLaceyOptions& options) {
    rough.validate();
    if (!(lambda > 0.0)) throw DomainError("payne_lacey: wavelength must be positive");
    const double n1 = slab.n1, n2 = slab.n2, d = slab.half_width;
    if (!(n1 > n2 && d > 0.0)) throw DomainError("payne_lacey: slab must guide (n1 > n2, d > 0)");
    const double k0 = 2.0 * std::numbers::pi / lambda;
    const double pre = rough.sigma * rough.sigma / (std::sqrt(2.0) * k0 * std::pow(d, 4) * n1);

    double alpha;  // 1/m
    if (options.mode == PayneLaceyMode::upper_bound) {
        alpha = pre * options.kappa;
    } else {
        const double v = k0 * d * std::sqrt(n1 * n1 - n2 * n2);
        const auto ne = te_slab_neff(n1, n2, n2, 2.0 * d, lambda);
        if (!ne) throw DomainError("payne_lacey: slab below cutoff");
        const double u = k0 * d * std::sqrt(n1 * n1 - *ne * *ne);
        const double w = k0 * d * std::sqrt(*ne * *ne - n2 * n2);
        if (!(w > 0.0)) throw DomainError("payne_lacey: slab below cutoff");
        const double delta = (n1 * n1 - n2 * n2) / (2.0 * n1 * n1);
        const double x = w * rough.correlation_length / d;
        const double gamma = n2 * v / (n1 * w * std::sqrt(delta));
        const double g = u * u * v * v / (1.0 + w);
        const double r = std::sqrt((1.0 + x * x) * (1.0 + x * x) + 2.0 * x * x * gamma * gamma);
        const double f = x * std::sqrt(r + 1.0 - x * x) / r;
        alpha = pre * g * f;
    }
    return alpha * kDbPerNeper * 1e-3;
}

double payne_lacey_sigma_for(const SlabEquivalent& slab, double alpha_db_per_mm,
                             double correlation_length, double lambda,
                             const PayneLaceyOptions& options) {
    if (!(alpha_db_per_mm >= 0.0)) throw DomainError("payne_lacey: target loss must be >= 0");
    constexpr double ref_sigma = 1e-9;
    const double ref = payne_lacey_alpha(slab, {ref_sigma, correlation_length}, lambda, options);
    if (!(ref > 0.0)) throw DomainError("payne_lacey: model gives zero loss, cannot invert");
    return ref_sigma * std::sqrt(alpha_db_per_mm / ref);
}

}  // namespace wgkit
