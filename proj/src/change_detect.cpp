#include "rfcd/change_detect.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rfcd {

void Thresholds::validate() const {
    if (!(eps_c > 0) || !(eps_sigma > 0))
        throw std::invalid_argument("thresholds must be positive");
}

void WindowConfig::validate() const {
    if (count < 1) throw std::invalid_argument("window: need at least one sample");
    if (!(half_width > 0)) throw std::invalid_argument("window: nonpositive half width");
    if (!(prefix_spacing_factor >= 1)) throw std::invalid_argument("window: prefix factor < 1");
}

double ChangeRepresentation::color_norm() const {
    double s = 0;
    for (double v : color_diffs) s += v;
    return s;
}

double ChangeRepresentation::density_norm() const {
    double s = 0;
    for (double v : density_diffs) s += v;
    return s;
}

namespace {

// Weighted emission terms T_i * alpha_i * c_i and T_i * alpha_i * sigma_i at
// the window samples, with T accumulated from the ray start.
struct WindowTerms {
    std::vector<Vec3> weighted_color;
    std::vector<double> weighted_density;
};

WindowTerms window_terms(const RadianceField& field, const Ray& ray, double t_start, double h,
                         int count, double prefix_h) {
    // Optical depth of [near, t_start), midpoint rule at spacing <= prefix_h.
    double log_t = 0.0;
    double prefix_len = t_start - ray.near;
    if (prefix_len > 0) {
        int n = std::max(1, static_cast<int>(std::ceil(prefix_len / prefix_h)));
        double step = prefix_len / n;
        for (int i = 0; i < n; ++i) {
            Vec3 pos = ray.at(ray.near + (i + 0.5) * step);
            log_t -= field.query(pos, ray.direction).density * step;
        }
    }

    WindowTerms out;
    out.weighted_color.resize(count);
    out.weighted_density.resize(count);
    for (int i = 0; i < count; ++i) {
        Vec3 pos = ray.at(t_start + (i + 0.5) * h);
        RadianceSample s = field.query(pos, ray.direction);
        double transmittance = std::exp(log_t);
        double alpha = -std::expm1(-s.density * h);
        out.weighted_color[i] = s.color * (transmittance * alpha);
        out.weighted_density[i] = s.density * transmittance * alpha;
        log_t -= s.density * h;
    }
    return out;
}

}  // namespace

ChangeRepresentation change_representation(const RadianceField& field_a,
                                           const RadianceField& field_b, const Vec3& x,
                                           const Ray& view_ray, const WindowConfig& window) {
    window.validate();
    double t_x = dot(x - view_ray.origin, view_ray.direction);
    if (norm(view_ray.at(t_x) - x) > 1e-6)
        throw std::invalid_argument("change_representation: point is not on the view ray");
    double t_start = t_x - window.half_width;
    double t_end = t_x + window.half_width;
    if (t_start < view_ray.near || t_end > view_ray.far)
        throw std::invalid_argument("change_representation: window outside [near, far]");

    double h = 2.0 * window.half_width / window.count;
    WindowTerms a = window_terms(field_a, view_ray, t_start, h, window.count,
                                 window.prefix_spacing_factor * h);
    WindowTerms b = window_terms(field_b, view_ray, t_start, h, window.count,
                                 window.prefix_spacing_factor * h);

    ChangeRepresentation rep;
    rep.view = view_ray.direction;
    rep.color_diffs.resize(window.count);
    rep.density_diffs.resize(window.count);
    for (int i = 0; i < window.count; ++i) {
        rep.color_diffs[i] = l1(a.weighted_color[i], b.weighted_color[i]);
        rep.density_diffs[i] = std::abs(a.weighted_density[i] - b.weighted_density[i]);
    }
    return rep;
}

ChangeIndicators per_view_indicators(const ChangeRepresentation& rep, const Thresholds& th) {
    th.validate();
    return ChangeIndicators{rep.color_norm() > th.eps_c / 255.0,
                            rep.density_norm() > th.eps_sigma};
}

ViewSet sample_view_set(SceneMode mode, const Vec3& x, const Ray& reference_ray, int v,
                        const ViewCone& cone) {
    if (v < 1) throw std::invalid_argument("sample_view_set: need at least one view");
    double t_x = dot(x - reference_ray.origin, reference_ray.direction);
    if (norm(reference_ray.at(t_x) - x) > 1e-6)
        throw std::invalid_argument("sample_view_set: point is not on the reference ray");

    ViewSet set;
    set.mode = mode;
    set.rays.reserve(static_cast<size_t>(v));
    auto ray_from_direction = [&](const Vec3& dir) {
        Vec3 d = normalized(dir);
        return Ray{x - d * t_x, d, reference_ray.near, reference_ray.far};
    };

    if (mode == SceneMode::Surround) {
        // -90..+90 degrees about the world vertical through x.
        for (int k = 0; k < v; ++k) {
            double angle = v == 1 ? 0.0
                                  : -std::numbers::pi / 2.0 + std::numbers::pi * k / (v - 1);
            set.rays.push_back(ray_from_direction(rotation_z(angle) * reference_ray.direction));
        }
        return set;
    }

    // Forward-facing: golden-angle spiral filling the (elliptical) capture
    // cone, reference direction first. e1 spans the lateral axis, e2 the
    // vertical one.
    Vec3 d0 = reference_ray.direction;
    Vec3 ortho = std::abs(d0.z) < 0.999 ? Vec3{0, 0, 1} : Vec3{0, 1, 0};
    Vec3 e1 = normalized(cross(d0, ortho));
    Vec3 e2 = normalized(cross(e1, d0));
    constexpr double golden_angle = 2.399963229728653;
    for (int k = 0; k < v; ++k) {
        if (k == 0) {
            set.rays.push_back(ray_from_direction(d0));
            continue;
        }
        double radius = std::sqrt(static_cast<double>(k) / (v - 1));
        double azimuth = k * golden_angle;
        double lat = cone.lateral * radius * std::cos(azimuth);
        double vert = cone.vertical * radius * std::sin(azimuth);
        Vec3 dir = d0 + e1 * std::tan(lat) + e2 * std::tan(vert);
        set.rays.push_back(ray_from_direction(dir));
    }
    return set;
}

ChangeIndicators detect_change_point(const RadianceField& field_a, const RadianceField& field_b,
                                     const Vec3& x, const ViewSet& views, const Thresholds& th,
                                     const WindowConfig& window) {
    if (views.rays.empty()) throw std::invalid_argument("detect_change_point: empty view set");
    ChangeIndicators agg{true, true};
    for (const Ray& ray : views.rays) {
        ChangeIndicators one = per_view_indicators(
            change_representation(field_a, field_b, x, ray, window), th);
        agg.v_c = agg.v_c && one.v_c;
        agg.v_sigma = agg.v_sigma && one.v_sigma;
        if (!agg.v_c && !agg.v_sigma) break;  // AND can only stay false
    }
    return agg;
}

}  // namespace rfcd
