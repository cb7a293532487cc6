#pragma once

#include <cmath>
#include <cstdint>

#include "rfcd/alignment.hpp"
#include "rfcd/field.hpp"
#include "rfcd/rng.hpp"

namespace rfcd {

/// Views an inner field through a similarity transform: world queries are
/// pulled back into the inner frame. Density scales by 1/s so optical depth
/// along transformed rays is preserved. This is how an unregistered capture
/// pair is emulated and how an estimated alignment is applied.
class TransformedField final : public RadianceField {
public:
    TransformedField(const RadianceField& inner, const SimilarityTransform& world_from_inner)
        : inner_(inner), inv_(world_from_inner.inverse()), inv_scale_(1.0 / world_from_inner.scale) {}

    RadianceSample query(const Vec3& x, const Vec3& d) const override {
        RadianceSample s = inner_.query(inv_.apply(x), inv_.rotation * d);
        s.density *= inv_scale_;
        return s;
    }

private:
    const RadianceField& inner_;
    SimilarityTransform inv_;
    double inv_scale_;
};

/// Scales queried color by a constant factor (clamped to [0,1]); the global
/// brightness knob standing in for environmental light changes.
class BrightnessField final : public RadianceField {
public:
    BrightnessField(const RadianceField& inner, double gain) : inner_(inner), gain_(gain) {}

    RadianceSample query(const Vec3& x, const Vec3& d) const override {
        RadianceSample s = inner_.query(x, d);
        s.color = clamp01(s.color * gain_);
        return s;
    }

private:
    const RadianceField& inner_;
    double gain_;
};

/// Adds deterministic per-position color noise, but only to queries whose
/// direction lies within `max_angle` of one designated axis. Models a single
/// corrupted view so the direction-consistent intersection has something to
/// suppress.
class SingleViewNoiseField final : public RadianceField {
public:
    SingleViewNoiseField(const RadianceField& inner, const Vec3& axis, double max_angle,
                         double amplitude, std::uint64_t seed, double cell = 0.02)
        : inner_(inner),
          axis_(normalized(axis)),
          cos_max_(std::cos(max_angle)),
          amplitude_(amplitude),
          seed_(seed),
          cell_(cell) {}

    RadianceSample query(const Vec3& x, const Vec3& d) const override {
        RadianceSample s = inner_.query(x, d);
        if (dot(d, axis_) >= cos_max_) {
            s.color = clamp01(s.color + noise_at(x));
        }
        return s;
    }

private:
    Vec3 noise_at(const Vec3& x) const {
        auto q = [&](double v) { return static_cast<std::uint64_t>(std::llround(v / cell_)); };
        std::uint64_t h = seed_;
        h = h * 0x9e3779b97f4a7c15ull + q(x.x);
        h = h * 0x9e3779b97f4a7c15ull + q(x.y);
        h = h * 0x9e3779b97f4a7c15ull + q(x.z);
        Rng rng(h);
        return {rng.uniform(-amplitude_, amplitude_), rng.uniform(-amplitude_, amplitude_),
                rng.uniform(-amplitude_, amplitude_)};
    }

    const RadianceField& inner_;
    Vec3 axis_;
    double cos_max_;
    double amplitude_;
    std::uint64_t seed_;
    double cell_;
};

}  // namespace rfcd
